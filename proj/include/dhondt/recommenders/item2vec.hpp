#ifndef DHONDT_RECOMMENDERS_ITEM2VEC_HPP
#define DHONDT_RECOMMENDERS_ITEM2VEC_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "dhondt/recommenders/recommender.hpp"
#include "dhondt/recommenders/sessions.hpp"

namespace dhondt {

// word2vec-style item embeddings: skip-gram with negative sampling over the
// item sequences of training sessions. Candidates are ranked by cosine to
// the mean embedding of the last `history` context items.
class Item2VecRecommender final : public Recommender {
 public:
  Item2VecRecommender(RecommenderSpec spec, const EventStream& train,
                      std::uint64_t seed)
      : Recommender(std::move(spec)) {
    const auto& hp = this->spec().hyperparameters;
    hp.require_known({"dimension", "window", "negatives", "epochs",
                      "learning_rate", "history", "gap_minutes"});
    dim_ = static_cast<std::size_t>(hp.integer("dimension", 32, 1, 4096));
    const int window = hp.integer("window", 3, 1, 1000);
    const int negatives = hp.integer("negatives", 5, 0, 1000);
    const int epochs = hp.integer("epochs", 5, 0, 100000);
    const double lr0 = hp.real("learning_rate", 0.025, 0.0, 10.0);
    history_ = static_cast<std::size_t>(hp.integer("history", 5, 1, 100000));
    const auto gap_ms = static_cast<std::int64_t>(
        hp.real("gap_minutes", 30.0, 0.0, 1e9) * detail::kMillisPerMinute);
    set_fallback(detail::popularity_items(train));
    vocab_ = ItemVocabulary(detail::event_items(train));
    const std::size_t n = vocab_.size();

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> init(-0.5 / static_cast<double>(dim_),
                                                0.5 / static_cast<double>(dim_));
    input_.resize(n * dim_);
    for (auto& x : input_) x = init(rng);
    std::vector<double> output(n * dim_, 0.0);

    std::vector<std::vector<std::size_t>> corpus;
    std::vector<double> freq(n, 0.0);
    for (auto& s : detail::split_sessions(train, vocab_, gap_ms)) {
      for (auto i : s.items) freq[i] += 1.0;
      if (s.items.size() > 1) corpus.push_back(std::move(s.items));
    }

    // Unigram^0.75 negative-sampling distribution.
    std::vector<double> cumulative(n, 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += std::pow(freq[i], 0.75);
      cumulative[i] = acc;
    }

    std::size_t total_steps = 0;
    for (const auto& seq : corpus) total_steps += seq.size();
    total_steps *= static_cast<std::size_t>(std::max(epochs, 0));
    std::size_t step = 0;

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw_negative = [&] {
      const double r = unit(rng) * acc;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
      return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), n - 1);
    };

    std::vector<double> grad(dim_);
    auto train_pair = [&](std::size_t center, std::size_t target, double label,
                          double lr) {
      double* v = &input_[center * dim_];
      double* u = &output[target * dim_];
      double dot = 0.0;
      for (std::size_t f = 0; f < dim_; ++f) dot += v[f] * u[f];
      const double g = lr * (label - 1.0 / (1.0 + std::exp(-dot)));
      for (std::size_t f = 0; f < dim_; ++f) {
        grad[f] += g * u[f];
        u[f] += g * v[f];
      }
    };

    for (int epoch = 0; epoch < epochs; ++epoch) {
      for (const auto& seq : corpus) {
        for (std::size_t p = 0; p < seq.size(); ++p, ++step) {
          const double lr = lr0 * std::max(1e-4, 1.0 - static_cast<double>(step) /
                                                       static_cast<double>(total_steps));
          const std::size_t lo = p >= static_cast<std::size_t>(window) ? p - window : 0;
          const std::size_t hi = std::min(seq.size() - 1, p + window);
          for (std::size_t c = lo; c <= hi; ++c) {
            if (c == p || seq[c] == seq[p]) continue;
            std::fill(grad.begin(), grad.end(), 0.0);
            train_pair(seq[p], seq[c], 1.0, lr);
            for (int neg = 0; neg < negatives; ++neg) {
              const std::size_t j = draw_negative();
              if (j == seq[c]) continue;
              train_pair(seq[p], j, 0.0, lr);
            }
            double* v = &input_[seq[p] * dim_];
            for (std::size_t f = 0; f < dim_; ++f) v[f] += grad[f];
          }
        }
      }
    }

    // Unit-length copies for cosine scoring.
    for (std::size_t i = 0; i < n; ++i) {
      double* v = &input_[i * dim_];
      double norm = 0.0;
      for (std::size_t f = 0; f < dim_; ++f) norm += v[f] * v[f];
      norm = std::sqrt(norm);
      if (norm > 0.0)
        for (std::size_t f = 0; f < dim_; ++f) v[f] /= norm;
    }
  }

  // Cosine between two item embeddings; 0 if either is unknown.
  double similarity(const ItemId& a, const ItemId& b) const {
    auto i = vocab_.find(a);
    auto j = vocab_.find(b);
    if (i < 0 || j < 0) return 0.0;
    const double* u = &input_[static_cast<std::size_t>(i) * dim_];
    const double* v = &input_[static_cast<std::size_t>(j) * dim_];
    double dot = 0.0;
    for (std::size_t f = 0; f < dim_; ++f) dot += u[f] * v[f];
    return dot;
  }

 protected:
  std::vector<ItemId> rank(const RecommendationContext& ctx,
                           int k) const override {
    const auto& recent = ctx.recent_items;
    std::vector<double> query(dim_, 0.0);
    std::size_t used = 0;
    for (std::size_t p = recent.size(); p-- > 0 && used < history_;) {
      auto i = vocab_.find(recent[p]);
      if (i < 0) continue;
      ++used;
      const double* v = &input_[static_cast<std::size_t>(i) * dim_];
      for (std::size_t f = 0; f < dim_; ++f) query[f] += v[f];
    }
    if (used == 0) return fallback(k);
    double norm = 0.0;
    for (double q : query) norm += q * q;
    if (norm == 0.0) return fallback(k);

    std::vector<double> scores(vocab_.size(), 0.0);
    for (std::size_t i = 0; i < vocab_.size(); ++i) {
      const double* v = &input_[i * dim_];
      double dot = 0.0;
      for (std::size_t f = 0; f < dim_; ++f) dot += v[f] * query[f];
      scores[i] = dot;  // same order as cosine: |query| is constant
    }
    return to_items(vocab_, detail::top_positive(scores, k));
  }

 private:
  std::size_t dim_ = 32;
  std::size_t history_ = 5;
  ItemVocabulary vocab_;
  std::vector<double> input_;
};

}  // namespace dhondt

#endif  // DHONDT_RECOMMENDERS_ITEM2VEC_HPP
