#ifndef DHONDT_VOTING_HPP
#define DHONDT_VOTING_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dhondt/domain.hpp"

namespace dhondt {

inline constexpr int kDefaultCandidates = 100;
inline constexpr int kDefaultListLength = 20;

struct CandidateEntry {
  ItemId item;
  int rank = 0;  // 1-based
};

// One recommender's ranked top-K. `capacity` is the K the list was
// requested with; relevance is computed against it, not against size().
class CandidateList {
 public:
  CandidateList() = default;

  CandidateList(int recommender_index, const std::vector<ItemId>& ranked,
                int capacity)
      : recommender_index_(recommender_index), capacity_(capacity) {
    if (recommender_index < 0)
      throw InputError("recommender index must be >= 0");
    if (capacity < 1) throw InputError("candidate capacity must be >= 1");
    if (ranked.size() > static_cast<std::size_t>(capacity))
      throw InputError("candidate list longer than its capacity");
    std::unordered_set<ItemId> seen;
    entries_.reserve(ranked.size());
    for (const auto& item : ranked) {
      if (!seen.insert(item).second)
        throw InputError("duplicate item in candidate list: " + item.str());
      entries_.push_back({item, static_cast<int>(entries_.size()) + 1});
    }
  }

  // Capacity defaults to the list length.
  CandidateList(int recommender_index, const std::vector<ItemId>& ranked)
      : CandidateList(recommender_index, ranked,
                      std::max<int>(1, static_cast<int>(ranked.size()))) {}

  int recommender_index() const noexcept { return recommender_index_; }
  int capacity() const noexcept { return capacity_; }
  const std::vector<CandidateEntry>& entries() const noexcept {
    return entries_;
  }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

 private:
  int recommender_index_ = 0;
  int capacity_ = 1;
  std::vector<CandidateEntry> entries_;
};

class Relevance {
 public:
  explicit Relevance(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0))
      throw InputError("relevance must lie in [0, 1]");
  }
  double value() const noexcept { return value_; }

 private:
  double value_;
};

// Linear rank-to-relevance map: (K - rank + 1) / K.
inline Relevance relevance_from_rank(int rank, int k) {
  if (rank < 1 || rank > k)
    throw InputError("rank " + std::to_string(rank) + " outside 1.." +
                     std::to_string(k));
  return Relevance(static_cast<double>(k - rank + 1) / static_cast<double>(k));
}

using RelevanceFn = std::function<double(int rank, int capacity)>;

inline double linear_relevance(int rank, int capacity) {
  return relevance_from_rank(rank, capacity).value();
}

inline double unit_relevance(int, int) { return 1.0; }

struct ResponsibilityVector {
  std::vector<double> shares;

  double total() const {
    double sum = 0.0;
    for (double s : shares) sum += s;
    return sum;
  }

  // Index of the largest share; ties go to the lowest index.
  std::size_t argmax() const {
    std::size_t best = 0;
    for (std::size_t r = 1; r < shares.size(); ++r)
      if (shares[r] > shares[best]) best = r;
    return best;
  }
};

struct AggregatedEntry {
  ItemId item;
  int position = 0;  // 1-based
  ResponsibilityVector responsibility;
};

using AggregatedList = std::vector<AggregatedEntry>;

namespace detail {

inline void check_votes(std::span<const double> votes) {
  if (votes.empty()) throw InputError("vote vector is empty");
  bool any_positive = false;
  for (double v : votes) {
    if (!std::isfinite(v) || v < 0.0)
      throw InputError("votes must be finite and non-negative");
    any_positive = any_positive || v > 0.0;
  }
  if (!any_positive) throw InputError("all votes are zero");
}

}  // namespace detail

// Classic highest-averages allocation. Ties go to the lowest party index.
inline std::vector<int> dhondt_seats(std::span<const double> votes,
                                     int n_seats) {
  if (n_seats < 0) throw InputError("seat count must be >= 0");
  std::vector<int> seats(votes.size(), 0);
  if (n_seats == 0) {
    for (double v : votes)
      if (!std::isfinite(v) || v < 0.0)
        throw InputError("votes must be finite and non-negative");
    return seats;
  }
  detail::check_votes(votes);
  for (int seat = 0; seat < n_seats; ++seat) {
    std::size_t best = 0;
    double best_quotient = -1.0;
    for (std::size_t p = 0; p < votes.size(); ++p) {
      const double q = votes[p] / static_cast<double>(seats[p] + 1);
      if (q > best_quotient) {
        best_quotient = q;
        best = p;
      }
    }
    ++seats[best];
  }
  return seats;
}

// Fuzzy d'Hondt aggregation.
//
// Each recommender r holds a fractional seat count s_r. At every slot the
// effective vote is e_r = v_r / (1 + s_r) and every unselected item i gets
// support sigma(i) = sum_r e_r * rel_r(i). The item with the largest support
// wins the slot (ties: smallest ItemId), and s_r grows by r's normalized
// share e_r * rel_r(i) / sigma(i). With disjoint lists and unit relevance this
// is exactly dhondt_seats. Selection stops early once no item has support.
inline AggregatedList aggregate(std::span<const CandidateList> candidates,
                                std::span<const double> votes, int n_slots,
                                bool normalize_responsibility,
                                const RelevanceFn& relevance = linear_relevance) {
  detail::check_votes(votes);
  if (n_slots < 1) throw InputError("n_slots must be >= 1");

  const std::size_t n_parties = votes.size();
  std::vector<bool> seen_party(n_parties, false);

  // Per item: (party, relevance) pairs, kept in party order so the support
  // sum does not depend on the order of `candidates`.
  std::map<ItemId, std::vector<std::pair<std::size_t, double>>> table;
  for (const auto& list : candidates) {
    const auto r = static_cast<std::size_t>(list.recommender_index());
    if (r >= n_parties)
      throw InputError("candidate list index " + std::to_string(r) +
                       " has no vote");
    if (seen_party[r])
      throw InputError("two candidate lists for recommender " +
                       std::to_string(r));
    seen_party[r] = true;
    for (const auto& entry : list.entries()) {
      const double rel = relevance(entry.rank, list.capacity());
      if (!(rel >= 0.0 && rel <= 1.0))
        throw InputError("relevance must lie in [0, 1]");
      if (rel > 0.0) table[entry.item].emplace_back(r, rel);
    }
  }

  struct Pooled {
    const ItemId* item;
    std::vector<std::pair<std::size_t, double>> support;
    bool taken = false;
  };
  std::vector<Pooled> pool;
  pool.reserve(table.size());
  for (auto& [item, support] : table) {
    std::sort(support.begin(), support.end());
    pool.push_back({&item, std::move(support)});
  }

  AggregatedList out;
  out.reserve(std::min<std::size_t>(pool.size(), n_slots));
  std::vector<double> seats(n_parties, 0.0);
  std::vector<double> effective(n_parties, 0.0);

  for (int slot = 0; slot < n_slots; ++slot) {
    for (std::size_t r = 0; r < n_parties; ++r)
      effective[r] = votes[r] / (1.0 + seats[r]);

    Pooled* best = nullptr;
    double best_support = 0.0;
    for (auto& cand : pool) {
      if (cand.taken) continue;
      double sigma = 0.0;
      for (const auto& [r, rel] : cand.support) sigma += effective[r] * rel;
      if (sigma > best_support) {
        best_support = sigma;
        best = &cand;
      }
    }
    if (best == nullptr) break;

    best->taken = true;
    ResponsibilityVector resp{std::vector<double>(n_parties, 0.0)};
    for (const auto& [r, rel] : best->support) {
      const double raw = effective[r] * rel;
      const double share = raw / best_support;
      seats[r] += share;
      resp.shares[r] = normalize_responsibility ? share : raw;
    }
    out.push_back({*best->item, static_cast<int>(out.size()) + 1,
                   std::move(resp)});
  }
  return out;
}

}  // namespace dhondt

#endif  // DHONDT_VOTING_HPP
