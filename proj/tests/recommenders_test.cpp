#include "dhondt/recommenders.hpp"

#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

namespace dhondt {
namespace {

constexpr std::int64_t kMinute = 60'000;

EventStream stream(std::vector<std::tuple<std::int64_t, const char*, const char*>> rows) {
  std::vector<InteractionEvent> events;
  for (auto& [t, u, i] : rows) events.emplace_back(t, UserId(u), ItemId(i));
  return sort_stream(std::move(events));
}

std::vector<std::string> names(const CandidateList& list) {
  std::vector<std::string> out;
  for (const auto& e : list.entries()) out.push_back(e.item.str());
  return out;
}

RecommendationContext context(const char* user, std::vector<const char*> items = {}) {
  RecommendationContext ctx{UserId(user), {}, {}};
  for (const char* i : items) ctx.recent_items.emplace_back(i);
  return ctx;
}

TEST(Popularity, CountOrder) {
  auto rec = train({RecommenderKind::popularity, {}, {}},
                   stream({{1, "u1", "i1"}, {2, "u2", "i1"}, {3, "u1", "i2"}}), nullptr, 0);
  EXPECT_EQ(names(rec->recommend(context("x"), 10)), (std::vector<std::string>{"i1", "i2"}));
}

TEST(Popularity, TopK) {
  std::vector<std::tuple<std::int64_t, const char*, const char*>> rows;
  for (int k = 0; k < 5; ++k) rows.emplace_back(k, "u", "a");
  for (int k = 0; k < 3; ++k) rows.emplace_back(10 + k, "u", "b");
  rows.emplace_back(20, "u", "c");
  auto rec = train({RecommenderKind::popularity, {}, {}}, stream(rows), nullptr, 0);
  EXPECT_EQ(names(rec->recommend(context("anyone"), 2)), (std::vector<std::string>{"a", "b"}));
}

TEST(Popularity, MatchesCountingOracle) {
  std::mt19937_64 rng(4);
  std::vector<InteractionEvent> events;
  std::map<std::string, int> counts;
  for (int k = 0; k < 2000; ++k) {
    const std::string item = "i" + std::to_string(rng() % 40);
    ++counts[item];
    events.emplace_back(k, UserId("u" + std::to_string(rng() % 7)), ItemId(item));
  }
  std::vector<std::pair<std::string, int>> expected(counts.begin(), counts.end());
  std::stable_sort(expected.begin(), expected.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  auto rec = train({RecommenderKind::popularity, {}, {}}, sort_stream(events), nullptr, 0);
  const auto got = names(rec->recommend(context("u"), 100));
  ASSERT_EQ(got.size(), expected.size());
  for (std::size_t k = 0; k < got.size(); ++k) EXPECT_EQ(got[k], expected[k].first);
}

TEST(Popularity, AttributeFilter) {
  AttributeTable attrs{{ItemId("a"), {"pool:x"}}, {ItemId("b"), {"pool:y"}},
                       {ItemId("c"), {"pool:y", "other"}}};
  RecommenderSpec spec{RecommenderKind::popularity, {{"attribute", "pool:y"}}, "pop-y"};
  auto rec = train(spec, stream({{1, "u", "a"}, {2, "u", "a"}, {3, "u", "b"}, {4, "v", "c"},
                                 {5, "v", "c"}}),
                   &attrs, 0);
  EXPECT_EQ(names(rec->recommend(context("u"), 5)), (std::vector<std::string>{"c", "b"}));
  EXPECT_EQ(rec->spec().label(), "pop-y");
  EXPECT_THROW(train(spec, stream({{1, "u", "a"}}), nullptr, 0), InputError);
}

TEST(Recommenders, UnknownHyperparameterRejected) {
  RecommenderSpec spec{RecommenderKind::item_knn, {{"neighbours", "5"}}, {}};
  EXPECT_THROW(train(spec, stream({{1, "u", "a"}}), nullptr, 0), InputError);
  RecommenderSpec bad{RecommenderKind::bpr_mf, {{"factors", "many"}}, {}};
  EXPECT_THROW(train(bad, stream({{1, "u", "a"}}), nullptr, 0), InputError);
}

TEST(ItemKnn, CoOccurrenceGivesPositiveSimilarity) {
  ItemKnnRecommender rec({RecommenderKind::item_knn, {}, {}},
                         stream({{1, "u1", "a"}, {2, "u1", "b"}, {3, "u2", "a"}, {4, "u2", "b"}}));
  EXPECT_GT(rec.similarity(ItemId("a"), ItemId("b")), 0.0);
}

TEST(ItemKnn, MatchesBruteForceCosine) {
  // 4 users x 4 items.
  const std::vector<std::vector<int>> m{{1, 1, 0, 0}, {1, 0, 1, 0}, {0, 1, 1, 1}, {1, 1, 1, 0}};
  const char* items[] = {"a", "b", "c", "d"};
  const char* users[] = {"u1", "u2", "u3", "u4"};
  std::vector<std::tuple<std::int64_t, const char*, const char*>> rows;
  std::int64_t t = 0;
  for (int u = 0; u < 4; ++u)
    for (int i = 0; i < 4; ++i)
      if (m[u][i]) rows.emplace_back(t++, users[u], items[i]);
  ItemKnnRecommender rec({RecommenderKind::item_knn, {}, {}}, stream(rows));

  auto cosine = [&](int i, int j) {
    double dot = 0, ni = 0, nj = 0;
    for (int u = 0; u < 4; ++u) {
      dot += m[u][i] * m[u][j];
      ni += m[u][i];
      nj += m[u][j];
    }
    return dot / std::sqrt(ni * nj);
  };
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i == j) continue;
      EXPECT_NEAR(rec.similarity(ItemId(items[i]), ItemId(items[j])), cosine(i, j), 1e-12);
    }

    std::vector<std::pair<double, std::string>> expected;
    for (int j = 0; j < 4; ++j)
      if (j != i && cosine(i, j) > 0) expected.emplace_back(-cosine(i, j), items[j]);
    std::sort(expected.begin(), expected.end());
    std::vector<std::string> order;
    for (auto& [_, n] : expected) order.push_back(n);
    EXPECT_EQ(names(rec.recommend(context("u1", {items[i]}), 10)), order);
  }
}

TEST(ItemKnn, ScoresSumOverRecentItems) {
  ItemKnnRecommender rec({RecommenderKind::item_knn, {}, {}},
                         stream({{1, "u1", "a"}, {2, "u1", "x"}, {3, "u2", "b"}, {4, "u2", "y"},
                                 {5, "u3", "a"}, {6, "u3", "b"}, {7, "u3", "y"}}));
  // y co-occurs with both a and b, x only with a.
  const auto got = names(rec.recommend(context("q", {"a", "b"}), 3));
  EXPECT_EQ(got.front(), "y");
}

TEST(SessionKnn, EmptyContextFallsBackToPopularity) {
  auto train_events = stream({{1, "u1", "a"}, {2, "u2", "a"}, {3, "u1", "b"}});
  auto sknn = train({RecommenderKind::session_knn, {}, {}}, train_events, nullptr, 0);
  auto pop = train({RecommenderKind::popularity, {}, {}}, train_events, nullptr, 0);
  EXPECT_EQ(names(sknn->recommend(context("new"), 5)), names(pop->recommend(context("new"), 5)));
}

TEST(SessionKnn, SplitsSessionsOnGaps) {
  SessionKnnRecommender rec({RecommenderKind::session_knn, {}, {}},
                            stream({{0, "u1", "a"}, {5 * kMinute, "u1", "b"},
                                    {100 * kMinute, "u1", "c"}, {101 * kMinute, "u1", "d"}}));
  EXPECT_EQ(rec.session_count(), 2u);
  // a's neighbour session is {a, b}.
  EXPECT_EQ(names(rec.recommend(context("q", {"a"}), 5)), (std::vector<std::string>{"a", "b"}));
}

TEST(SessionKnn, CurrentSessionUsesTimestamps) {
  SessionKnnRecommender rec({RecommenderKind::session_knn, {}, {}},
                            stream({{0, "u1", "a"}, {1, "u1", "b"},
                                    {100 * kMinute, "u2", "c"}, {100 * kMinute + 1, "u2", "d"}}));
  RecommendationContext ctx = context("q", {"a", "c"});
  ctx.recent_timestamps = {0, 200 * kMinute};  // only "c" is in the current session
  EXPECT_EQ(names(rec.recommend(ctx, 5)), (std::vector<std::string>{"c", "d"}));
}

TEST(CosineContent, IdenticalProfileRanksItemFirst) {
  AttributeTable attrs{{ItemId("v"), {"red", "large"}},
                       {ItemId("w"), {"red", "small"}},
                       {ItemId("z"), {"blue"}}};
  auto rec = train({RecommenderKind::cosine_content, {}, {}},
                   stream({{1, "u", "w"}, {2, "u", "v"}, {3, "u2", "z"}}), &attrs, 0);
  const auto got = names(rec->recommend(context("u", {"v"}), 3));
  ASSERT_FALSE(got.empty());
  EXPECT_EQ(got.front(), "v");
  EXPECT_EQ(got.size(), 2u);  // "z" shares nothing
}

TEST(CosineContent, FallsBackToCoOccurrenceRows) {
  auto rec = train({RecommenderKind::cosine_content, {}, {}},
                   stream({{1, "u1", "a"}, {2, "u1", "b"}, {3, "u2", "c"}}), nullptr, 0);
  const auto got = names(rec->recommend(context("q", {"a"}), 3));
  EXPECT_EQ(got, (std::vector<std::string>{"a", "b"}));
}

TEST(BprMf, DeterministicGivenSeed) {
  std::vector<std::tuple<std::int64_t, const char*, const char*>> rows{
      {1, "u1", "a"}, {2, "u1", "b"}, {3, "u2", "b"}, {4, "u2", "c"}, {5, "u3", "a"}};
  BprMfRecommender a({RecommenderKind::bpr_mf, {}, {}}, stream(rows), 42);
  BprMfRecommender b({RecommenderKind::bpr_mf, {}, {}}, stream(rows), 42);
  EXPECT_TRUE(std::equal(a.user_factors().begin(), a.user_factors().end(),
                         b.user_factors().begin(), b.user_factors().end()));
  EXPECT_TRUE(std::equal(a.item_factors().begin(), a.item_factors().end(),
                         b.item_factors().begin(), b.item_factors().end()));
  BprMfRecommender c({RecommenderKind::bpr_mf, {}, {}}, stream(rows), 43);
  EXPECT_FALSE(std::equal(a.item_factors().begin(), a.item_factors().end(),
                          c.item_factors().begin(), c.item_factors().end()));
}

TEST(BprMf, LossDecreasesOverFirstEpochs) {
  std::mt19937_64 rng(9);
  std::vector<InteractionEvent> events;
  for (int u = 0; u < 60; ++u)
    for (int k = 0; k < 8; ++k) {
      const int group = u % 3;
      const int item = group * 10 + static_cast<int>(rng() % 10);
      events.emplace_back(u * 100 + k, UserId("u" + std::to_string(u)),
                          ItemId("i" + std::to_string(item)));
    }
  BprMfRecommender rec({RecommenderKind::bpr_mf, {}, {}}, sort_stream(events), 1);
  const auto& loss = rec.epoch_losses();
  ASSERT_GE(loss.size(), 4u);
  EXPECT_LT(loss[1], loss[0]);
  EXPECT_LT(loss[2], loss[1]);
  EXPECT_LT(loss[3], loss[2]);
}

TEST(BprMf, UnknownUserGetsPopularity) {
  auto events = stream({{1, "u1", "a"}, {2, "u2", "a"}, {3, "u1", "b"}});
  auto bpr = train({RecommenderKind::bpr_mf, {}, {}}, events, nullptr, 0);
  EXPECT_EQ(names(bpr->recommend(context("ghost"), 5)), (std::vector<std::string>{"a", "b"}));
}

TEST(Item2Vec, CoOccurringItemsAreCloser) {
  std::vector<InteractionEvent> events;
  std::int64_t t = 0;
  const char* fillers[] = {"d", "e", "f", "g"};
  for (int s = 0; s < 200; ++s) {
    const std::string user = "u" + std::to_string(s);
    if (s % 2 == 0) {
      events.emplace_back(t, UserId(user), ItemId("a"));
      events.emplace_back(t + 1, UserId(user), ItemId("b"));
    } else {
      events.emplace_back(t, UserId(user), ItemId("c"));
    }
    events.emplace_back(t + 2, UserId(user), ItemId(fillers[s % 4]));
    t += 1000;
  }
  Item2VecRecommender rec({RecommenderKind::item2vec, {}, {}}, sort_stream(events), 3);
  EXPECT_GT(rec.similarity(ItemId("a"), ItemId("b")), rec.similarity(ItemId("a"), ItemId("c")));
}

class AllKinds : public ::testing::TestWithParam<RecommenderKind> {};

TEST_P(AllKinds, OutputContract) {
  std::mt19937_64 rng(12);
  std::vector<InteractionEvent> events;
  for (int k = 0; k < 3000; ++k)
    events.emplace_back(static_cast<std::int64_t>(k) * 7 * kMinute / 10,
                        UserId("u" + std::to_string(rng() % 30)),
                        ItemId("i" + std::to_string(rng() % 150)));
  const auto train_events = sort_stream(events);
  AttributeTable attrs;
  for (int i = 0; i < 150; ++i)
    attrs[ItemId("i" + std::to_string(i))] = {"c" + std::to_string(i % 7)};
  const RecommenderSpec spec{GetParam(), {}, {}};
  auto a = train(spec, train_events, &attrs, 5);
  auto b = train(spec, train_events, &attrs, 5);
  for (int trial = 0; trial < 20; ++trial) {
    RecommendationContext ctx{UserId("u" + std::to_string(trial)), {}, {}};
    for (int k = 0; k < trial % 6; ++k) {
      ctx.recent_items.emplace_back("i" + std::to_string(rng() % 160));
      ctx.recent_timestamps.push_back(k * kMinute);
    }
    for (int kk : {1, 10, 100}) {
      const auto la = a->recommend(ctx, kk, 3);
      const auto lb = b->recommend(ctx, kk, 3);
      EXPECT_LE(la.size(), static_cast<std::size_t>(kk));
      EXPECT_FALSE(la.empty());
      EXPECT_EQ(la.recommender_index(), 3);
      EXPECT_EQ(names(la), names(lb));
      std::set<std::string> distinct;
      for (const auto& n : names(la)) EXPECT_TRUE(distinct.insert(n).second);
    }
  }
}

TEST_P(AllKinds, EmptyTrainingGivesEmptyLists) {
  auto rec = train({GetParam(), {}, {}}, EventStream{}, nullptr, 0);
  EXPECT_TRUE(rec->recommend(context("u", {"a"}), 10).empty());
}

INSTANTIATE_TEST_SUITE_P(Recommenders, AllKinds, ::testing::ValuesIn(kAllRecommenderKinds),
                         [](const auto& info) {
                           std::string n(to_string(info.param));
                           std::replace(n.begin(), n.end(), '-', '_');
                           return n;
                         });

}  // namespace
}  // namespace dhondt
