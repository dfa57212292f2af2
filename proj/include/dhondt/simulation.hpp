#ifndef DHONDT_SIMULATION_HPP
#define DHONDT_SIMULATION_HPP

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dhondt/domain.hpp"
#include "dhondt/recommenders.hpp"
#include "dhondt/voting.hpp"
#include "dhondt/weights.hpp"

namespace dhondt {

enum class BehaviourKind { stat08, stat06, lin0901 };

inline std::string_view to_string(BehaviourKind k) {
  switch (k) {
    case BehaviourKind::stat08: return "stat08";
    case BehaviourKind::stat06: return "stat06";
    case BehaviourKind::lin0901: return "lin0901";
  }
  return "stat08";
}

inline BehaviourKind parse_behaviour(std::string_view s) {
  if (s == "stat08") return BehaviourKind::stat08;
  if (s == "stat06") return BehaviourKind::stat06;
  if (s == "lin0901") return BehaviourKind::lin0901;
  throw InputError("unknown behaviour model: " + std::string(s));
}

// Position-dependent probability that a shown item is noticed.
struct BehaviourModel {
  BehaviourKind kind = BehaviourKind::stat08;
  int list_length = kDefaultListLength;
  // Test hook: constant probability overriding `kind`.
  std::optional<double> forced_probability;

  BehaviourModel() = default;
  explicit BehaviourModel(BehaviourKind k, int length = kDefaultListLength)
      : kind(k), list_length(length) {}

  static BehaviourModel constant(double p, int list_length = kDefaultListLength) {
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("probability must lie in [0, 1]");
    BehaviourModel m(BehaviourKind::stat08, list_length);
    m.forced_probability = p;
    return m;
  }
};

inline double notice_probability(int position, const BehaviourModel& model) {
  if (model.list_length < 1) throw InputError("list_length must be >= 1");
  if (position < 1 || position > model.list_length)
    throw InputError("position " + std::to_string(position) + " outside 1.." +
                     std::to_string(model.list_length));
  if (model.forced_probability) return *model.forced_probability;
  switch (model.kind) {
    case BehaviourKind::stat08: return 0.8;
    case BehaviourKind::stat06: return 0.6;
    case BehaviourKind::lin0901:
      if (model.list_length == 1) return 0.9;
      return 0.9 - (position - 1) * 0.8 / (model.list_length - 1);
  }
  return 0.0;
}

// Uniform double in [0, 1) from the top 53 bits of one engine draw.
template <class Urbg>
double unit_draw(Urbg& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Click generator for one replay step. Depends only on (run seed, event).
inline std::mt19937_64 event_rng(std::uint64_t seed, std::uint64_t event_index) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ event_index));
}

// Items of the next `window_size` events of the same user strictly after
// `cursor`.
inline std::set<ItemId> item_window(const EventStream& eval, std::size_t cursor,
                                    int window_size) {
  if (cursor >= eval.size()) throw InputError("cursor outside the stream");
  if (window_size < 0) throw InputError("window_size must be >= 0");
  std::set<ItemId> out;
  int seen = 0;
  const UserId& user = eval[cursor].user;
  for (std::size_t t = cursor + 1; t < eval.size() && seen < window_size; ++t) {
    if (eval[t].user != user) continue;
    out.insert(eval[t].item);
    ++seen;
  }
  return out;
}

// Position k (1-based) is clicked iff its item is in the window and the
// k-th draw falls below the notice probability. One draw per position.
template <class Urbg>
std::vector<int> simulate_clicks(const AggregatedList& recs,
                                 const std::set<ItemId>& window,
                                 const BehaviourModel& model, Urbg& rng) {
  std::vector<int> clicked;
  for (const auto& entry : recs) {
    const double draw = unit_draw(rng);
    if (window.contains(entry.item) &&
        draw < notice_probability(entry.position, model))
      clicked.push_back(entry.position);
  }
  return clicked;
}

struct SimulationConfig {
  Variant variant = Variant::global_only;
  BehaviourModel behaviour;
  int window_size = 5;
  int candidates_k = kDefaultCandidates;
  int list_n = kDefaultListLength;
  double eta_global = 0.05;
  double eta_personal = 0.1;
  bool normalize_responsibility = true;
  bool skip_underdeveloped = false;
  ColdStartPolicy cold_start = ColdStartPolicy::uniform;
  std::int64_t ramp_length = 100;
  std::uint64_t seed = 0;
  int context_length = 50;  // history items handed to the recommenders

  void validate() const {
    if (window_size < 1) throw InputError("window_size must be >= 1");
    if (candidates_k < 1) throw InputError("candidates_k must be >= 1");
    if (list_n < 1) throw InputError("list_n must be >= 1");
    if (behaviour.list_length != list_n)
      throw InputError("behaviour list_length must equal list_n");
    if (!(eta_global > 0.0 && eta_global < 1.0) ||
        !(eta_personal > 0.0 && eta_personal < 1.0))
      throw InputError("learning rates must lie in (0, 1)");
    if (ramp_length <= 0) throw InputError("ramp_length must be > 0");
    if (context_length < 1) throw InputError("context_length must be >= 1");
  }
};

struct UserStats {
  UserId user;
  std::int64_t recommendations = 0;
  std::int64_t clicks = 0;
};

struct WeightSample {
  std::int64_t iteration = 0;
  std::string model_id;  // "global" or "user:<id>"
  std::vector<double> weights;
};

struct Impression {
  std::int64_t event_index = 0;
  UserId user;
  int position = 0;
  ItemId item;
  bool clicked = false;
};

struct SimulationReport {
  std::vector<std::string> recommender_names;
  std::int64_t total_events = 0;
  std::int64_t total_recommendations = 0;
  std::int64_t total_clicks = 0;
  double ctr = 0.0;
  std::vector<UserStats> users;  // first-seen order
  std::vector<WeightSample> trajectory;
  std::vector<Impression> impressions;
  std::vector<double> final_global;
  std::vector<UserRecord> personal_models;  // empty for global-only
  std::size_t dominant_global = 0;
  std::optional<std::size_t> dominant_personal_majority;

  // ctr restricted to users for which pred(user) holds.
  template <class Pred>
  double ctr_where(Pred&& pred) const {
    std::int64_t recs = 0, clicks = 0;
    for (const auto& u : users)
      if (pred(u.user)) {
        recs += u.recommendations;
        clicks += u.clicks;
      }
    return recs > 0 ? static_cast<double>(clicks) / static_cast<double>(recs) : 0.0;
  }
};

namespace detail {

// next[t] = index of the same user's next event, or npos.
inline std::vector<std::size_t> next_same_user(const EventStream& eval) {
  std::vector<std::size_t> next(eval.size(), std::string::npos);
  std::unordered_map<UserId, std::size_t> last;
  for (std::size_t t = eval.size(); t-- > 0;) {
    auto it = last.find(eval[t].user);
    if (it != last.end()) next[t] = it->second;
    last[eval[t].user] = t;
  }
  return next;
}

struct History {
  std::deque<ItemId> items;
  std::deque<std::int64_t> timestamps;

  void push(const InteractionEvent& ev, std::size_t cap) {
    items.push_back(ev.item);
    timestamps.push_back(ev.timestamp);
    if (items.size() > cap) {
      items.pop_front();
      timestamps.pop_front();
    }
  }
};

}  // namespace detail

// Sequential replay of `eval`. Recommenders must have been trained on
// `train` only; the training events seed each user's visible history.
inline SimulationReport run(const SimulationConfig& cfg,
                            std::span<const std::unique_ptr<Recommender>> recommenders,
                            const EventStream& train, const EventStream& eval) {
  cfg.validate();
  if (recommenders.empty()) throw InputError("at least one recommender is required");
  const int n_rec = static_cast<int>(recommenders.size());
  const auto cap = static_cast<std::size_t>(cfg.context_length);
  const MixingSchedule schedule(cfg.ramp_length);
  const bool personal = cfg.variant != Variant::global_only;

  SimulationReport report;
  for (const auto& r : recommenders) report.recommender_names.push_back(r->spec().label());

  std::unordered_map<UserId, detail::History> history;
  for (const auto& ev : train) history[ev.user].push(ev, cap);

  std::unordered_map<UserId, std::size_t> user_slot;
  UserModelStore store;
  VoteModel global = uniform_model(n_rec);
  const auto next = detail::next_same_user(eval);
  std::vector<CandidateList> candidates;
  candidates.reserve(recommenders.size());

  for (std::size_t t = 0; t < eval.size(); ++t) {
    const InteractionEvent& ev = eval[t];
    auto& hist = history[ev.user];
    RecommendationContext ctx{ev.user, {hist.items.begin(), hist.items.end()},
                              {hist.timestamps.begin(), hist.timestamps.end()}};

    candidates.clear();
    bool any_candidate = false;
    for (int r = 0; r < n_rec; ++r) {
      candidates.push_back(recommenders[static_cast<std::size_t>(r)]->recommend(
          ctx, cfg.candidates_k, r));
      any_candidate = any_candidate || !candidates.back().empty();
    }

    const VoteModel votes = select_model(store, ev.user, cfg.variant,
                                         cfg.skip_underdeveloped, schedule, global,
                                         cfg.cold_start);
    AggregatedList shown;
    if (any_candidate)
      shown = aggregate(candidates, votes.weights(), cfg.list_n,
                        cfg.normalize_responsibility);

    std::set<ItemId> window;
    for (std::size_t s = next[t], seen = 0;
         s != std::string::npos && seen < static_cast<std::size_t>(cfg.window_size);
         s = next[s], ++seen)
      window.insert(eval[s].item);

    auto rng = event_rng(cfg.seed, t);
    const auto clicked = simulate_clicks(shown, window, cfg.behaviour, rng);

    UserRecord* record = personal ? store.find(ev.user) : nullptr;
    std::size_t c = 0;
    for (const auto& entry : shown) {
      const bool hit = c < clicked.size() && clicked[c] == entry.position;
      if (hit) ++c;
      if (hit) {
        const std::size_t winner = entry.responsibility.argmax();
        global = reward(global, winner, cfg.eta_global);
        if (record) record->model = reward(record->model, winner, cfg.eta_personal);
      } else {
        global = penalize(global, entry.responsibility, cfg.eta_global);
        if (record)
          record->model = penalize(record->model, entry.responsibility, cfg.eta_personal);
      }
      report.impressions.push_back(
          {static_cast<std::int64_t>(t), ev.user, entry.position, entry.item, hit});
    }
    if (personal) store.record_event(ev.user, !clicked.empty());

    auto [slot, inserted] = user_slot.emplace(ev.user, report.users.size());
    if (inserted) report.users.push_back({ev.user, 0, 0});
    auto& stats = report.users[slot->second];
    ++stats.recommendations;
    stats.clicks += static_cast<std::int64_t>(clicked.size());

    ++report.total_events;
    ++report.total_recommendations;
    report.total_clicks += static_cast<std::int64_t>(clicked.size());

    const auto iteration = static_cast<std::int64_t>(t);
    report.trajectory.push_back(
        {iteration, "global", {global.weights().begin(), global.weights().end()}});
    if (record)
      report.trajectory.push_back({iteration, "user:" + ev.user.str(),
                                   {record->model.weights().begin(),
                                    record->model.weights().end()}});

    hist.push(ev, cap);
  }

  report.ctr = report.total_recommendations > 0
                   ? static_cast<double>(report.total_clicks) /
                         static_cast<double>(report.total_recommendations)
                   : 0.0;
  report.final_global.assign(global.weights().begin(), global.weights().end());
  report.dominant_global = global.dominant();
  if (personal && !store.empty()) {
    report.personal_models = store.records();
    std::vector<std::size_t> votes(recommenders.size(), 0);
    for (const auto& rec : store.records()) ++votes[rec.model.dominant()];
    report.dominant_personal_majority = static_cast<std::size_t>(
        std::max_element(votes.begin(), votes.end()) - votes.begin());
  }
  return report;
}

}  // namespace dhondt

#endif  // DHONDT_SIMULATION_HPP
