#ifndef DHONDT_RECOMMENDERS_BPR_MF_HPP
#define DHONDT_RECOMMENDERS_BPR_MF_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <unordered_map>
#include <vector>

#include "dhondt/recommenders/recommender.hpp"

namespace dhondt {

// Matrix factorization trained with the pairwise BPR objective on implicit
// feedback. SGD over (user, positive, uniformly sampled negative) triples.
class BprMfRecommender final : public Recommender {
 public:
  BprMfRecommender(RecommenderSpec spec, const EventStream& train,
                   std::uint64_t seed)
      : Recommender(std::move(spec)) {
    const auto& hp = this->spec().hyperparameters;
    hp.require_known({"factors", "epochs", "learning_rate", "regularization",
                      "init_std"});
    factors_ = static_cast<std::size_t>(hp.integer("factors", 32, 1, 4096));
    const int epochs = hp.integer("epochs", 10, 0, 100000);
    const double lr = hp.real("learning_rate", 0.05, 0.0, 10.0);
    const double reg = hp.real("regularization", 0.01, 0.0, 10.0);
    const double init_std = hp.real("init_std", 0.1, 0.0, 10.0);
    set_fallback(detail::popularity_items(train));
    vocab_ = ItemVocabulary(detail::event_items(train));

    std::map<UserId, std::vector<std::size_t>> user_items;
    for (const auto& ev : train)
      user_items[ev.user].push_back(static_cast<std::size_t>(vocab_.find(ev.item)));
    for (auto& [user, items] : user_items) {
      std::sort(items.begin(), items.end());
      items.erase(std::unique(items.begin(), items.end()), items.end());
      user_index_.emplace(user, positives_.size());
      positives_.push_back(std::move(items));
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> init(0.0, init_std);
    user_factors_.resize(positives_.size() * factors_);
    item_factors_.resize(vocab_.size() * factors_);
    for (auto& x : user_factors_) x = init(rng);
    for (auto& x : item_factors_) x = init(rng);

    for (std::size_t u = 0; u < positives_.size(); ++u)
      for (auto i : positives_[u]) pairs_.emplace_back(u, i);
    if (pairs_.empty() || vocab_.size() < 2) return;

    // Fixed triples for monitoring the loss across epochs.
    std::mt19937_64 monitor_rng(seed ^ 0x9e3779b97f4a7c15ULL);
    for (const auto& [u, i] : pairs_)
      monitor_.push_back({u, i, sample_negative(u, monitor_rng)});
    epoch_losses_.push_back(mean_loss());

    std::uniform_int_distribution<std::size_t> pick(0, pairs_.size() - 1);
    std::vector<double> diff(factors_);
    for (int epoch = 0; epoch < epochs; ++epoch) {
      for (std::size_t step = 0; step < pairs_.size(); ++step) {
        const auto [u, i] = pairs_[pick(rng)];
        const std::size_t j = sample_negative(u, rng);
        auto pu = user_row(u);
        auto qi = item_row(i);
        auto qj = item_row(j);
        double x = 0.0;
        for (std::size_t f = 0; f < factors_; ++f) x += pu[f] * (qi[f] - qj[f]);
        const double g = 1.0 / (1.0 + std::exp(x));  // sigmoid(-x)
        for (std::size_t f = 0; f < factors_; ++f) {
          const double wu = pu[f];
          pu[f] += lr * (g * (qi[f] - qj[f]) - reg * wu);
          qi[f] += lr * (g * wu - reg * qi[f]);
          qj[f] += lr * (-g * wu - reg * qj[f]);
        }
      }
      epoch_losses_.push_back(mean_loss());
    }
  }

  // Mean BPR loss on the monitoring triples: before training, then after
  // every epoch.
  const std::vector<double>& epoch_losses() const noexcept { return epoch_losses_; }
  std::span<const double> user_factors() const noexcept { return user_factors_; }
  std::span<const double> item_factors() const noexcept { return item_factors_; }

 protected:
  std::vector<ItemId> rank(const RecommendationContext& ctx,
                           int k) const override {
    auto it = user_index_.find(ctx.user);
    if (it == user_index_.end()) return fallback(k);
    const auto pu = user_row_const(it->second);
    std::vector<double> scores(vocab_.size(), 0.0);
    for (std::size_t i = 0; i < vocab_.size(); ++i) {
      const auto qi = item_row_const(i);
      double s = 0.0;
      for (std::size_t f = 0; f < factors_; ++f) s += pu[f] * qi[f];
      scores[i] = s;
    }
    // Scores can be negative; shift so every item stays rankable.
    double lo = 0.0;
    for (double s : scores) lo = std::min(lo, s);
    for (double& s : scores) s = s - lo + 1e-12;
    return to_items(vocab_, detail::top_positive(scores, k));
  }

 private:
  struct Triple {
    std::size_t user, positive, negative;
  };

  std::span<double> user_row(std::size_t u) {
    return {user_factors_.data() + u * factors_, factors_};
  }
  std::span<double> item_row(std::size_t i) {
    return {item_factors_.data() + i * factors_, factors_};
  }
  std::span<const double> user_row_const(std::size_t u) const {
    return {user_factors_.data() + u * factors_, factors_};
  }
  std::span<const double> item_row_const(std::size_t i) const {
    return {item_factors_.data() + i * factors_, factors_};
  }

  template <class Rng>
  std::size_t sample_negative(std::size_t u, Rng& rng) const {
    std::uniform_int_distribution<std::size_t> pick(0, vocab_.size() - 1);
    const auto& pos = positives_[u];
    std::size_t j = pick(rng);
    for (int attempt = 0; attempt < 100 && std::binary_search(pos.begin(), pos.end(), j);
         ++attempt)
      j = pick(rng);
    return j;
  }

  double mean_loss() const {
    double total = 0.0;
    for (const auto& t : monitor_) {
      const auto pu = user_row_const(t.user);
      const auto qi = item_row_const(t.positive);
      const auto qj = item_row_const(t.negative);
      double x = 0.0;
      for (std::size_t f = 0; f < factors_; ++f) x += pu[f] * (qi[f] - qj[f]);
      total += std::log1p(std::exp(-x));
    }
    return monitor_.empty() ? 0.0 : total / static_cast<double>(monitor_.size());
  }

  std::size_t factors_ = 32;
  ItemVocabulary vocab_;
  std::unordered_map<UserId, std::size_t> user_index_;
  std::vector<std::vector<std::size_t>> positives_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
  std::vector<Triple> monitor_;
  std::vector<double> user_factors_;
  std::vector<double> item_factors_;
  std::vector<double> epoch_losses_;
};

}  // namespace dhondt

#endif  // DHONDT_RECOMMENDERS_BPR_MF_HPP
