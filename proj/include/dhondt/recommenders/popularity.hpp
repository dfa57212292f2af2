#ifndef DHONDT_RECOMMENDERS_POPULARITY_HPP
#define DHONDT_RECOMMENDERS_POPULARITY_HPP

#include <string>
#include <vector>

#include "dhondt/recommenders/recommender.hpp"

namespace dhondt {

// Most-interacted training items. With hyperparameter `attribute` set, only
// items carrying that attribute token are ranked.
class PopularityRecommender final : public Recommender {
 public:
  PopularityRecommender(RecommenderSpec spec, const EventStream& train,
                        const AttributeTable* attributes)
      : Recommender(std::move(spec)) {
    this->spec().hyperparameters.require_known({"attribute"});
    const std::string attribute = this->spec().hyperparameters.text("attribute", "");
    auto all = detail::popularity_items(train);
    set_fallback(all);
    if (attribute.empty()) {
      ranking_ = std::move(all);
      return;
    }
    if (attributes == nullptr)
      throw InputError("popularity attribute filter needs an attribute table");
    for (auto& item : all) {
      auto it = attributes->find(item);
      if (it == attributes->end()) continue;
      for (const auto& token : it->second) {
        if (token == attribute) {
          ranking_.push_back(item);
          break;
        }
      }
    }
  }

  const std::vector<ItemId>& ranking() const noexcept { return ranking_; }

 protected:
  std::vector<ItemId> rank(const RecommendationContext&, int k) const override {
    const auto take = std::min<std::size_t>(ranking_.size(), static_cast<std::size_t>(k));
    return {ranking_.begin(), ranking_.begin() + static_cast<std::ptrdiff_t>(take)};
  }

 private:
  std::vector<ItemId> ranking_;
};

}  // namespace dhondt

#endif  // DHONDT_RECOMMENDERS_POPULARITY_HPP
