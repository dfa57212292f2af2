#ifndef DHONDT_RECOMMENDERS_RECOMMENDER_HPP
#define DHONDT_RECOMMENDERS_RECOMMENDER_HPP

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dhondt/domain.hpp"
#include "dhondt/voting.hpp"

namespace dhondt {

enum class RecommenderKind {
  popularity,
  cosine_content,
  item_knn,
  session_knn,
  bpr_mf,
  item2vec
};

inline constexpr RecommenderKind kAllRecommenderKinds[] = {
    RecommenderKind::popularity,  RecommenderKind::item2vec,
    RecommenderKind::cosine_content, RecommenderKind::bpr_mf,
    RecommenderKind::item_knn,    RecommenderKind::session_knn};

inline std::string_view to_string(RecommenderKind kind) {
  switch (kind) {
    case RecommenderKind::popularity: return "popularity";
    case RecommenderKind::cosine_content: return "cosine-content";
    case RecommenderKind::item_knn: return "item-knn";
    case RecommenderKind::session_knn: return "session-knn";
    case RecommenderKind::bpr_mf: return "bpr-mf";
    case RecommenderKind::item2vec: return "item2vec";
  }
  return "popularity";
}

inline RecommenderKind parse_recommender_kind(std::string_view s) {
  for (auto kind : kAllRecommenderKinds)
    if (to_string(kind) == s) return kind;
  throw InputError("unknown recommender kind: " + std::string(s));
}

// String-valued hyperparameters with typed, range-checked accessors.
class Hyperparameters {
 public:
  Hyperparameters() = default;
  Hyperparameters(std::initializer_list<std::pair<const std::string, std::string>> init)
      : values_(init) {}

  void set(const std::string& key, std::string value) {
    values_[key] = std::move(value);
  }
  bool contains(const std::string& key) const { return values_.contains(key); }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string text(const std::string& key, std::string fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double real(const std::string& key, double fallback, double lo,
              double hi) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    double v = 0.0;
    const auto& s = it->second;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw InputError("hyperparameter " + key + " is not a number: " + s);
    if (v < lo || v > hi)
      throw InputError("hyperparameter " + key + " out of range");
    return v;
  }

  int integer(const std::string& key, int fallback, int lo, int hi) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    int v = 0;
    const auto& s = it->second;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw InputError("hyperparameter " + key + " is not an integer: " + s);
    if (v < lo || v > hi)
      throw InputError("hyperparameter " + key + " out of range");
    return v;
  }

  // Throws if any key is not in `allowed`.
  void require_known(std::initializer_list<std::string_view> allowed) const {
    std::string unknown;
    for (const auto& [key, _] : values_) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        unknown += (unknown.empty() ? "" : ", ") + key;
    }
    if (!unknown.empty())
      throw InputError("unknown hyperparameters: " + unknown);
  }

  friend bool operator==(const Hyperparameters&,
                         const Hyperparameters&) = default;

 private:
  std::map<std::string, std::string> values_;
};

struct RecommenderSpec {
  RecommenderKind kind = RecommenderKind::popularity;
  Hyperparameters hyperparameters;
  std::string name;  // display name; empty means the kind name

  std::string label() const {
    return name.empty() ? std::string(to_string(kind)) : name;
  }
};

// Item -> attribute tokens.
using AttributeTable = std::unordered_map<ItemId, std::vector<std::string>>;

struct RecommendationContext {
  UserId user;
  std::vector<ItemId> recent_items;  // oldest first
  // Parallel to recent_items when known; may be empty.
  std::vector<std::int64_t> recent_timestamps;
};

// Dense indexing of the training items, sorted by ItemId so that index
// order doubles as the tie-break order.
class ItemVocabulary {
 public:
  ItemVocabulary() = default;

  template <class Range>
  explicit ItemVocabulary(const Range& items) {
    std::set<ItemId> unique(items.begin(), items.end());
    items_.assign(unique.begin(), unique.end());
    index_.reserve(items_.size());
    for (std::size_t i = 0; i < items_.size(); ++i) index_.emplace(items_[i], i);
  }

  std::size_t size() const noexcept { return items_.size(); }
  const ItemId& item(std::size_t i) const { return items_[i]; }
  const std::vector<ItemId>& items() const noexcept { return items_; }

  // -1 when unknown.
  std::ptrdiff_t find(const ItemId& item) const {
    auto it = index_.find(item);
    return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
  }

 private:
  std::vector<ItemId> items_;
  std::unordered_map<ItemId, std::size_t> index_;
};

namespace detail {

// Top k indices with score > 0, by score descending then index ascending.
inline std::vector<std::size_t> top_positive(const std::vector<double>& scores,
                                             int k) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (scores[i] > 0.0) idx.push_back(i);
  auto better = [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
  };
  const auto take = std::min<std::size_t>(idx.size(), static_cast<std::size_t>(k));
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take),
                    idx.end(), better);
  idx.resize(take);
  return idx;
}

inline std::vector<std::size_t> top_positive(
    const std::unordered_map<std::size_t, double>& scores, int k) {
  std::vector<std::pair<std::size_t, double>> v;
  v.reserve(scores.size());
  for (const auto& [i, s] : scores)
    if (s > 0.0) v.emplace_back(i, s);
  auto better = [](const auto& a, const auto& b) {
    return a.second > b.second || (a.second == b.second && a.first < b.first);
  };
  const auto take = std::min<std::size_t>(v.size(), static_cast<std::size_t>(k));
  std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(take),
                    v.end(), better);
  std::vector<std::size_t> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(v[i].first);
  return out;
}

// Training counts, ordered by count descending then ItemId.
inline std::vector<std::size_t> popularity_order(
    const ItemVocabulary& vocab, const EventStream& events) {
  std::vector<double> counts(vocab.size(), 0.0);
  for (const auto& ev : events) {
    auto i = vocab.find(ev.item);
    if (i >= 0) counts[static_cast<std::size_t>(i)] += 1.0;
  }
  return top_positive(counts, static_cast<int>(counts.size()));
}

inline std::vector<ItemId> event_items(const EventStream& events) {
  std::vector<ItemId> items;
  items.reserve(events.size());
  for (const auto& ev : events) items.push_back(ev.item);
  return items;
}

inline std::vector<ItemId> popularity_items(const EventStream& events) {
  ItemVocabulary vocab(event_items(events));
  std::vector<ItemId> out;
  for (auto i : popularity_order(vocab, events)) out.push_back(vocab.item(i));
  return out;
}

}  // namespace detail

// A base recommender fitted on the training slice. Immutable once built;
// recommend() is safe to call concurrently.
class Recommender {
 public:
  explicit Recommender(RecommenderSpec spec) : spec_(std::move(spec)) {}
  virtual ~Recommender() = default;
  Recommender(const Recommender&) = delete;
  Recommender& operator=(const Recommender&) = delete;

  const RecommenderSpec& spec() const noexcept { return spec_; }

  CandidateList recommend(const RecommendationContext& ctx, int k,
                          int recommender_index = 0) const {
    if (k < 1) throw InputError("K must be >= 1");
    return CandidateList(recommender_index, rank(ctx, k), k);
  }

 protected:
  virtual std::vector<ItemId> rank(const RecommendationContext& ctx,
                                   int k) const = 0;

  // Popularity fallback shared by every model.
  std::vector<ItemId> fallback(int k) const {
    std::vector<ItemId> out;
    const auto take = std::min<std::size_t>(fallback_.size(), static_cast<std::size_t>(k));
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(fallback_[i]);
    return out;
  }

  void set_fallback(std::vector<ItemId> order) { fallback_ = std::move(order); }

  template <class Indices>
  static std::vector<ItemId> to_items(const ItemVocabulary& vocab,
                                      const Indices& idx) {
    std::vector<ItemId> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(vocab.item(i));
    return out;
  }

 private:
  RecommenderSpec spec_;
  std::vector<ItemId> fallback_;
};

}  // namespace dhondt

#endif  // DHONDT_RECOMMENDERS_RECOMMENDER_HPP
