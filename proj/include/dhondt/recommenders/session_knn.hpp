#ifndef DHONDT_RECOMMENDERS_SESSION_KNN_HPP
#define DHONDT_RECOMMENDERS_SESSION_KNN_HPP

#include <cmath>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dhondt/recommenders/recommender.hpp"
#include "dhondt/recommenders/sessions.hpp"

namespace dhondt {

// Session-based KNN. Training sessions are split at `gap_minutes` of
// inactivity. The `k` training sessions closest to the current session
// (binary cosine) vote for their items with their similarity. Only the
// `sample` most recent sessions per item are considered as neighbours.
class SessionKnnRecommender final : public Recommender {
 public:
  SessionKnnRecommender(RecommenderSpec spec, const EventStream& train)
      : Recommender(std::move(spec)) {
    const auto& hp = this->spec().hyperparameters;
    hp.require_known({"k", "gap_minutes", "sample", "history"});
    k_ = static_cast<std::size_t>(hp.integer("k", 50, 1, 100000));
    gap_ms_ = static_cast<std::int64_t>(hp.real("gap_minutes", 30.0, 0.0, 1e9) *
                                        detail::kMillisPerMinute);
    sample_ = static_cast<std::size_t>(hp.integer("sample", 1000, 1, 10000000));
    history_ = static_cast<std::size_t>(hp.integer("history", 10, 1, 100000));
    set_fallback(detail::popularity_items(train));
    vocab_ = ItemVocabulary(detail::event_items(train));

    for (auto& s : detail::split_sessions(train, vocab_, gap_ms_)) {
      std::sort(s.items.begin(), s.items.end());
      s.items.erase(std::unique(s.items.begin(), s.items.end()), s.items.end());
      sessions_.push_back(std::move(s.items));
    }
    postings_.resize(vocab_.size());
    for (std::size_t s = 0; s < sessions_.size(); ++s)
      for (auto i : sessions_[s]) postings_[i].push_back(s);
  }

  std::size_t session_count() const noexcept { return sessions_.size(); }

 protected:
  std::vector<ItemId> rank(const RecommendationContext& ctx,
                           int k) const override {
    std::vector<std::size_t> current;
    for (const auto& item : detail::current_session(ctx, gap_ms_, history_)) {
      auto i = vocab_.find(item);
      if (i >= 0) current.push_back(static_cast<std::size_t>(i));
    }
    std::sort(current.begin(), current.end());
    current.erase(std::unique(current.begin(), current.end()), current.end());
    if (current.empty()) return fallback(k);

    std::unordered_map<std::size_t, double> overlap;
    for (auto i : current) {
      const auto& post = postings_[i];
      const std::size_t first = post.size() > sample_ ? post.size() - sample_ : 0;
      for (std::size_t p = first; p < post.size(); ++p) overlap[post[p]] += 1.0;
    }
    std::vector<std::pair<std::size_t, double>> nearest;
    nearest.reserve(overlap.size());
    const double current_size = static_cast<double>(current.size());
    for (const auto& [s, c] : overlap)
      nearest.emplace_back(
          s, c / std::sqrt(current_size * static_cast<double>(sessions_[s].size())));
    auto better = [](const auto& a, const auto& b) {
      return a.second > b.second || (a.second == b.second && a.first < b.first);
    };
    const auto take = std::min(nearest.size(), k_);
    std::partial_sort(nearest.begin(), nearest.begin() + static_cast<std::ptrdiff_t>(take),
                      nearest.end(), better);
    nearest.resize(take);

    std::unordered_map<std::size_t, double> scores;
    for (const auto& [s, sim] : nearest)
      for (auto i : sessions_[s]) scores[i] += sim;
    return to_items(vocab_, detail::top_positive(scores, k));
  }

 private:
  std::size_t k_ = 50;
  std::int64_t gap_ms_ = 30 * detail::kMillisPerMinute;
  std::size_t sample_ = 1000;
  std::size_t history_ = 10;
  ItemVocabulary vocab_;
  std::vector<std::vector<std::size_t>> sessions_;
  std::vector<std::vector<std::size_t>> postings_;
};

}  // namespace dhondt

#endif  // DHONDT_RECOMMENDERS_SESSION_KNN_HPP
