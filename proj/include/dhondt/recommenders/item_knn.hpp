#ifndef DHONDT_RECOMMENDERS_ITEM_KNN_HPP
#define DHONDT_RECOMMENDERS_ITEM_KNN_HPP

#include <cmath>
#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dhondt/recommenders/recommender.hpp"

namespace dhondt {

// Item-based KNN. sim(i, j) is the cosine between the binary user columns
// of the training co-occurrence matrix; score(i) sums sim(i, j) over the
// last `history` context items j. Each item keeps its `neighbors` most
// similar items (0 keeps all).
class ItemKnnRecommender final : public Recommender {
 public:
  ItemKnnRecommender(RecommenderSpec spec, const EventStream& train)
      : Recommender(std::move(spec)) {
    const auto& hp = this->spec().hyperparameters;
    hp.require_known({"history", "neighbors"});
    history_ = static_cast<std::size_t>(hp.integer("history", 10, 1, 100000));
    const int max_neighbors = hp.integer("neighbors", 200, 0, 1000000);
    set_fallback(detail::popularity_items(train));
    vocab_ = ItemVocabulary(detail::event_items(train));

    std::map<UserId, std::vector<std::size_t>> user_items;
    for (const auto& ev : train)
      user_items[ev.user].push_back(static_cast<std::size_t>(vocab_.find(ev.item)));
    std::vector<std::vector<std::size_t>> item_users(vocab_.size());
    std::vector<std::vector<std::size_t>> users;
    for (auto& [_, items] : user_items) {
      std::sort(items.begin(), items.end());
      items.erase(std::unique(items.begin(), items.end()), items.end());
      for (auto i : items) item_users[i].push_back(users.size());
      users.push_back(std::move(items));
    }

    neighbors_.resize(vocab_.size());
    std::vector<double> cooc(vocab_.size(), 0.0);
    std::vector<std::size_t> touched;
    for (std::size_t j = 0; j < vocab_.size(); ++j) {
      touched.clear();
      for (auto u : item_users[j])
        for (auto i : users[u]) {
          if (i == j) continue;
          if (cooc[i] == 0.0) touched.push_back(i);
          cooc[i] += 1.0;
        }
      auto& nb = neighbors_[j];
      nb.reserve(touched.size());
      for (auto i : touched) {
        const double denom = std::sqrt(static_cast<double>(item_users[i].size()) *
                                       static_cast<double>(item_users[j].size()));
        nb.emplace_back(i, cooc[i] / denom);
        cooc[i] = 0.0;
      }
      std::sort(nb.begin(), nb.end(), [](const auto& a, const auto& b) {
        return a.second > b.second || (a.second == b.second && a.first < b.first);
      });
      if (max_neighbors > 0 && nb.size() > static_cast<std::size_t>(max_neighbors))
        nb.resize(static_cast<std::size_t>(max_neighbors));
      nb.shrink_to_fit();
    }
  }

  // 0 when either item is unknown or the pair was truncated away.
  double similarity(const ItemId& a, const ItemId& b) const {
    auto i = vocab_.find(a);
    auto j = vocab_.find(b);
    if (i < 0 || j < 0) return 0.0;
    for (const auto& [n, s] : neighbors_[static_cast<std::size_t>(j)])
      if (n == static_cast<std::size_t>(i)) return s;
    return 0.0;
  }

 protected:
  std::vector<ItemId> rank(const RecommendationContext& ctx,
                           int k) const override {
    const auto& recent = ctx.recent_items;
    const std::size_t first = recent.size() > history_ ? recent.size() - history_ : 0;
    std::unordered_map<std::size_t, double> scores;
    for (std::size_t p = first; p < recent.size(); ++p) {
      auto j = vocab_.find(recent[p]);
      if (j < 0) continue;
      for (const auto& [i, s] : neighbors_[static_cast<std::size_t>(j)])
        scores[i] += s;
    }
    if (scores.empty()) return fallback(k);
    return to_items(vocab_, detail::top_positive(scores, k));
  }

 private:
  std::size_t history_ = 10;
  ItemVocabulary vocab_;
  std::vector<std::vector<std::pair<std::size_t, double>>> neighbors_;
};

}  // namespace dhondt

#endif  // DHONDT_RECOMMENDERS_ITEM_KNN_HPP
