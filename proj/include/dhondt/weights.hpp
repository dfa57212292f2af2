#ifndef DHONDT_WEIGHTS_HPP
#define DHONDT_WEIGHTS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dhondt/domain.hpp"
#include "dhondt/voting.hpp"

namespace dhondt {

inline constexpr double kWeightFloor = 1e-6;
inline constexpr double kWeightSumTolerance = 1e-9;
inline constexpr std::int64_t kUnderdevelopedClicks = 3;

// Positive weights over base recommenders, summing to one.
class VoteModel {
 public:
  VoteModel() = default;

  // Rescales `weights` to unit sum. Every weight must be positive.
  static VoteModel normalized(std::vector<double> weights) {
    if (weights.empty()) throw InputError("vote model needs >= 1 weight");
    double sum = 0.0;
    for (double w : weights) {
      if (!std::isfinite(w) || w <= 0.0)
        throw InputError("vote weights must be positive and finite");
      sum += w;
    }
    for (double& w : weights) w /= sum;
    return VoteModel(std::move(weights));
  }

  // Accepts weights that already sum to one (within tolerance).
  static VoteModel from_weights(std::vector<double> weights) {
    if (weights.empty()) throw InputError("vote model needs >= 1 weight");
    double sum = 0.0;
    for (double w : weights) {
      if (!std::isfinite(w) || w <= 0.0)
        throw InputError("vote weights must be positive and finite");
      sum += w;
    }
    if (std::abs(sum - 1.0) > kWeightSumTolerance)
      throw InputError("vote weights must sum to 1");
    return VoteModel(std::move(weights));
  }

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t r) const { return weights_[r]; }
  std::span<const double> weights() const noexcept { return weights_; }

  // Index of the largest weight; ties go to the lowest index.
  std::size_t dominant() const {
    return static_cast<std::size_t>(
        std::max_element(weights_.begin(), weights_.end()) - weights_.begin());
  }

  friend bool operator==(const VoteModel&, const VoteModel&) = default;

 private:
  explicit VoteModel(std::vector<double> w) : weights_(std::move(w)) {}
  std::vector<double> weights_;
};

inline VoteModel uniform_model(int n) {
  if (n < 1) throw InputError("uniform model needs n >= 1");
  return VoteModel::from_weights(
      std::vector<double>(static_cast<std::size_t>(n), 1.0 / n));
}

namespace detail {

inline void check_rate(double eta) {
  if (!(eta > 0.0 && eta < 1.0))
    throw InputError("learning rate must lie in (0, 1)");
}

inline VoteModel floor_and_normalize(std::vector<double> w) {
  for (double& x : w) x = std::max(x, kWeightFloor);
  return VoteModel::normalized(std::move(w));
}

}  // namespace detail

// Multiplies the winner's weight by (1 + eta) and renormalizes.
inline VoteModel reward(const VoteModel& model, std::size_t winner,
                        double eta) {
  detail::check_rate(eta);
  if (winner >= model.size())
    throw InputError("reward target out of range");
  std::vector<double> w(model.weights().begin(), model.weights().end());
  w[winner] *= 1.0 + eta;
  return detail::floor_and_normalize(std::move(w));
}

// Multiplies each weight by (1 - eta * share) and renormalizes.
inline VoteModel penalize(const VoteModel& model,
                          const ResponsibilityVector& responsibility,
                          double eta) {
  detail::check_rate(eta);
  if (responsibility.shares.size() != model.size())
    throw InputError("responsibility dimension does not match model");
  std::vector<double> w(model.weights().begin(), model.weights().end());
  for (std::size_t r = 0; r < w.size(); ++r) {
    const double share = responsibility.shares[r];
    if (!std::isfinite(share) || share < 0.0)
      throw InputError("responsibility shares must be non-negative");
    const double factor = 1.0 - eta * share;
    if (factor <= 0.0)
      throw InputError("penalty would make a weight non-positive");
    w[r] *= factor;
  }
  return detail::floor_and_normalize(std::move(w));
}

enum class MixingKind { linear_ramp };

class MixingSchedule {
 public:
  explicit MixingSchedule(std::int64_t ramp_length = 100,
                          MixingKind kind = MixingKind::linear_ramp)
      : kind_(kind), ramp_length_(ramp_length) {
    if (ramp_length <= 0) throw InputError("ramp_length must be > 0");
  }
  MixingKind kind() const noexcept { return kind_; }
  std::int64_t ramp_length() const noexcept { return ramp_length_; }

 private:
  MixingKind kind_;
  std::int64_t ramp_length_;
};

// Weight of the personal model: 0 for a new user, 1 once the ramp is done.
inline double mixing_coefficient(std::int64_t user_event_count,
                                 const MixingSchedule& schedule) {
  if (user_event_count <= 0) return 0.0;
  return std::min(1.0, static_cast<double>(user_event_count) /
                           static_cast<double>(schedule.ramp_length()));
}

inline VoteModel hybrid_votes(const VoteModel& global,
                              const VoteModel& personal, double alpha) {
  if (global.size() != personal.size())
    throw InputError("hybrid models differ in dimension");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw InputError("mixing coefficient must lie in [0, 1]");
  if (alpha == 0.0) return global;
  if (alpha == 1.0) return personal;
  std::vector<double> w(global.size());
  for (std::size_t r = 0; r < w.size(); ++r)
    w[r] = (1.0 - alpha) * global[r] + alpha * personal[r];
  return VoteModel::from_weights(std::move(w));
}

enum class Variant { global_only, full_personal, hybrid };
enum class ColdStartPolicy { uniform, clone_top_user };

inline std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::global_only: return "global-only";
    case Variant::full_personal: return "full-personal";
    case Variant::hybrid: return "hybrid";
  }
  return "global-only";
}

inline Variant parse_variant(std::string_view s) {
  if (s == "global-only" || s == "global") return Variant::global_only;
  if (s == "full-personal" || s == "personal") return Variant::full_personal;
  if (s == "hybrid") return Variant::hybrid;
  throw InputError("unknown variant: " + std::string(s));
}

inline std::string_view to_string(ColdStartPolicy p) {
  return p == ColdStartPolicy::uniform ? "uniform" : "clone-top-user";
}

inline ColdStartPolicy parse_cold_start(std::string_view s) {
  if (s == "uniform") return ColdStartPolicy::uniform;
  if (s == "clone-top-user") return ColdStartPolicy::clone_top_user;
  throw InputError("unknown cold-start policy: " + std::string(s));
}

struct UserRecord {
  UserId user;
  VoteModel model;
  std::int64_t click_count = 0;  // events whose list got at least one click
  std::int64_t event_count = 0;
};

// Per-user models in registration order.
class UserModelStore {
 public:
  bool empty() const noexcept { return records_.empty(); }
  std::size_t size() const noexcept { return records_.size(); }
  const std::vector<UserRecord>& records() const noexcept { return records_; }

  const UserRecord* find(const UserId& user) const {
    auto it = index_.find(user);
    return it == index_.end() ? nullptr : &records_[it->second];
  }
  UserRecord* find(const UserId& user) {
    auto it = index_.find(user);
    return it == index_.end() ? nullptr : &records_[it->second];
  }

  UserRecord& insert(const UserId& user, VoteModel model) {
    if (index_.contains(user))
      throw InputError("user already registered: " + user.str());
    index_.emplace(user, records_.size());
    records_.push_back({user, std::move(model), 0, 0});
    return records_.back();
  }

  void set_model(const UserId& user, VoteModel model) {
    must_find(user).model = std::move(model);
  }

  void record_event(const UserId& user, bool clicked) {
    UserRecord& rec = must_find(user);
    ++rec.event_count;
    if (clicked) ++rec.click_count;
  }

 private:
  UserRecord& must_find(const UserId& user) {
    UserRecord* rec = find(user);
    if (rec == nullptr) throw InputError("unknown user: " + user.str());
    return *rec;
  }

  std::vector<UserRecord> records_;
  std::unordered_map<UserId, std::size_t> index_;
};

// Starting model for a user seen for the first time.
inline VoteModel cold_start_init(const UserModelStore& store,
                                 ColdStartPolicy policy, int n) {
  if (n < 1) throw InputError("cold start needs n >= 1");
  if (policy == ColdStartPolicy::uniform || store.empty())
    return uniform_model(n);
  const UserRecord* top = &store.records().front();
  for (const auto& rec : store.records())
    if (rec.click_count > top->click_count) top = &rec;
  if (top->model.size() != static_cast<std::size_t>(n))
    throw InputError("stored model dimension does not match n");
  return top->model;
}

// Registers `user` via the cold-start policy if needed.
inline UserRecord& ensure_user(UserModelStore& store, const UserId& user,
                               ColdStartPolicy policy, int n) {
  if (UserRecord* rec = store.find(user)) return *rec;
  return store.insert(user, cold_start_init(store, policy, n));
}

// Vote model used to aggregate for `user`.
inline VoteModel select_model(UserModelStore& store, const UserId& user,
                              Variant variant, bool skip_underdeveloped,
                              const MixingSchedule& schedule,
                              const VoteModel& global,
                              ColdStartPolicy cold_start =
                                  ColdStartPolicy::uniform) {
  if (variant == Variant::global_only) return global;
  const UserRecord& rec = ensure_user(store, user, cold_start,
                                      static_cast<int>(global.size()));
  if (skip_underdeveloped && rec.click_count < kUnderdevelopedClicks)
    return global;
  if (variant == Variant::full_personal) return rec.model;
  return hybrid_votes(global, rec.model,
                      mixing_coefficient(rec.event_count, schedule));
}

}  // namespace dhondt

#endif  // DHONDT_WEIGHTS_HPP
