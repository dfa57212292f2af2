#ifndef DHONDT_RECOMMENDERS_COSINE_CONTENT_HPP
#define DHONDT_RECOMMENDERS_COSINE_CONTENT_HPP

#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include "dhondt/recommenders/recommender.hpp"

namespace dhondt {

// Content-based cosine similarity. Items are binary vectors over attribute
// tokens when a catalog is given, otherwise over the training users that
// touched them. The user profile is the mean vector of the last `history`
// context items.
class CosineContentRecommender final : public Recommender {
 public:
  CosineContentRecommender(RecommenderSpec spec, const EventStream& train,
                           const AttributeTable* attributes)
      : Recommender(std::move(spec)) {
    const auto& hp = this->spec().hyperparameters;
    hp.require_known({"history"});
    history_ = static_cast<std::size_t>(hp.integer("history", 20, 1, 100000));
    set_fallback(detail::popularity_items(train));

    std::vector<ItemId> items = detail::event_items(train);
    const bool use_catalog = attributes != nullptr && !attributes->empty();
    if (use_catalog)
      for (const auto& [item, _] : *attributes) items.push_back(item);
    vocab_ = ItemVocabulary(items);

    std::unordered_map<std::string, std::size_t> token_ids;
    auto token_id = [&](const std::string& t) {
      auto [it, inserted] = token_ids.emplace(t, token_ids.size());
      if (inserted) postings_.emplace_back();
      return it->second;
    };
    tokens_.assign(vocab_.size(), {});
    if (use_catalog) {
      for (std::size_t i = 0; i < vocab_.size(); ++i) {
        auto it = attributes->find(vocab_.item(i));
        if (it == attributes->end()) continue;
        for (const auto& t : it->second) tokens_[i].push_back(token_id(t));
      }
    } else {
      for (const auto& ev : train)
        tokens_[static_cast<std::size_t>(vocab_.find(ev.item))].push_back(
            token_id(ev.user.str()));
    }
    for (std::size_t i = 0; i < vocab_.size(); ++i) {
      auto& t = tokens_[i];
      std::sort(t.begin(), t.end());
      t.erase(std::unique(t.begin(), t.end()), t.end());
      for (auto tok : t) postings_[tok].push_back(i);
    }
  }

  const ItemVocabulary& vocabulary() const noexcept { return vocab_; }

 protected:
  std::vector<ItemId> rank(const RecommendationContext& ctx,
                           int k) const override {
    const auto& recent = ctx.recent_items;
    const std::size_t first = recent.size() > history_ ? recent.size() - history_ : 0;
    std::unordered_map<std::size_t, double> profile;
    std::size_t n_known = 0;
    for (std::size_t p = first; p < recent.size(); ++p) {
      auto i = vocab_.find(recent[p]);
      if (i < 0) continue;
      ++n_known;
      for (auto tok : tokens_[static_cast<std::size_t>(i)]) profile[tok] += 1.0;
    }
    if (profile.empty()) return fallback(k);

    double profile_norm = 0.0;
    for (auto& [_, w] : profile) {
      w /= static_cast<double>(n_known);
      profile_norm += w * w;
    }
    profile_norm = std::sqrt(profile_norm);

    std::vector<double> scores(vocab_.size(), 0.0);
    for (const auto& [tok, w] : profile)
      for (auto i : postings_[tok]) scores[i] += w;
    for (std::size_t i = 0; i < scores.size(); ++i)
      if (scores[i] > 0.0)
        scores[i] /= profile_norm * std::sqrt(static_cast<double>(tokens_[i].size()));
    return to_items(vocab_, detail::top_positive(scores, k));
  }

 private:
  std::size_t history_ = 20;
  ItemVocabulary vocab_;
  std::vector<std::vector<std::size_t>> tokens_;
  std::vector<std::vector<std::size_t>> postings_;
};

}  // namespace dhondt

#endif  // DHONDT_RECOMMENDERS_COSINE_CONTENT_HPP
