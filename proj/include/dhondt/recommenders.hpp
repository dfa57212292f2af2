#ifndef DHONDT_RECOMMENDERS_HPP
#define DHONDT_RECOMMENDERS_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "dhondt/recommenders/bpr_mf.hpp"
#include "dhondt/recommenders/cosine_content.hpp"
#include "dhondt/recommenders/item2vec.hpp"
#include "dhondt/recommenders/item_knn.hpp"
#include "dhondt/recommenders/popularity.hpp"
#include "dhondt/recommenders/recommender.hpp"
#include "dhondt/recommenders/session_knn.hpp"

namespace dhondt {

// Fits one base recommender on the training slice. Deterministic in
// (spec, train, attributes, seed).
inline std::unique_ptr<Recommender> train(const RecommenderSpec& spec,
                                          const EventStream& train_events,
                                          const AttributeTable* attributes,
                                          std::uint64_t seed) {
  switch (spec.kind) {
    case RecommenderKind::popularity:
      return std::make_unique<PopularityRecommender>(spec, train_events, attributes);
    case RecommenderKind::cosine_content:
      return std::make_unique<CosineContentRecommender>(spec, train_events, attributes);
    case RecommenderKind::item_knn:
      return std::make_unique<ItemKnnRecommender>(spec, train_events);
    case RecommenderKind::session_knn:
      return std::make_unique<SessionKnnRecommender>(spec, train_events);
    case RecommenderKind::bpr_mf:
      return std::make_unique<BprMfRecommender>(spec, train_events, seed);
    case RecommenderKind::item2vec:
      return std::make_unique<Item2VecRecommender>(spec, train_events, seed);
  }
  throw InputError("unknown recommender kind");
}

using RecommenderSet = std::vector<std::unique_ptr<Recommender>>;

// The six base recommenders with default hyperparameters.
inline std::vector<RecommenderSpec> default_recommender_specs() {
  std::vector<RecommenderSpec> specs;
  for (auto kind : kAllRecommenderKinds) specs.push_back({kind, {}, {}});
  return specs;
}

// Recommender r is seeded with seed + r so each model's stream is fixed.
inline RecommenderSet train_all(std::span<const RecommenderSpec> specs,
                                const EventStream& train_events,
                                const AttributeTable* attributes,
                                std::uint64_t seed) {
  RecommenderSet out;
  out.reserve(specs.size());
  for (std::size_t r = 0; r < specs.size(); ++r)
    out.push_back(train(specs[r], train_events, attributes, seed + r));
  return out;
}

}  // namespace dhondt

#endif  // DHONDT_RECOMMENDERS_HPP
