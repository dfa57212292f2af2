// Independent reference implementations used only by the tests.
#ifndef DHONDT_TESTS_ORACLES_HPP
#define DHONDT_TESTS_ORACLES_HPP

#include <algorithm>
#include <cstddef>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace oracle {

// Lists every quotient v_p / d for d = 1..n_seats, orders them by value
// (ties: lower party first) and hands out one seat per top quotient.
inline std::vector<int> seats_by_quotient_enumeration(const std::vector<double>& votes,
                                                      int n_seats) {
  std::vector<std::tuple<double, std::size_t, int>> quotients;
  for (std::size_t p = 0; p < votes.size(); ++p)
    for (int d = 1; d <= n_seats; ++d)
      quotients.emplace_back(votes[p] / static_cast<double>(d), p, d);
  std::sort(quotients.begin(), quotients.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
    return std::get<2>(a) < std::get<2>(b);
  });
  std::vector<int> seats(votes.size(), 0);
  for (int k = 0; k < n_seats; ++k) ++seats[std::get<1>(quotients[static_cast<std::size_t>(k)])];
  return seats;
}

struct RefList {
  std::size_t party;
  std::vector<std::string> items;  // rank = position + 1
  int capacity;
};

struct RefPick {
  std::string item;
  std::vector<double> normalized;
};

// Step-by-step fuzzy selection written without any indexing structures:
// every step rescans every list for every item. If `min_margin` is given it
// receives the smallest relative gap between the winning support and the
// runner-up over all steps.
template <class Relevance>
std::vector<RefPick> fuzzy_select(const std::vector<RefList>& lists,
                                  const std::vector<double>& votes, int n_slots,
                                  Relevance relevance, double* min_margin = nullptr) {
  if (min_margin) *min_margin = 1.0;
  std::set<std::string> remaining;
  for (const auto& l : lists)
    for (const auto& i : l.items) remaining.insert(i);
  std::vector<double> seats(votes.size(), 0.0);
  std::vector<RefPick> out;
  for (int step = 0; step < n_slots; ++step) {
    std::string best;
    double best_sigma = 0.0;
    double second_sigma = 0.0;
    std::vector<double> best_raw;
    for (const auto& item : remaining) {  // ascending, so ties keep the smaller id
      std::vector<double> raw(votes.size(), 0.0);
      double sigma = 0.0;
      for (std::size_t p = 0; p < votes.size(); ++p) {
        for (const auto& l : lists) {
          if (l.party != p) continue;
          for (std::size_t pos = 0; pos < l.items.size(); ++pos) {
            if (l.items[pos] != item) continue;
            raw[p] = votes[p] / (1.0 + seats[p]) *
                     relevance(static_cast<int>(pos) + 1, l.capacity);
          }
        }
        sigma += raw[p];
      }
      if (sigma > best_sigma) {
        second_sigma = best_sigma;
        best_sigma = sigma;
        best = item;
        best_raw = raw;
      } else if (sigma > second_sigma) {
        second_sigma = sigma;
      }
    }
    if (best.empty()) break;
    if (min_margin && second_sigma > 0.0)
      *min_margin = std::min(*min_margin, (best_sigma - second_sigma) / best_sigma);
    RefPick pick{best, {}};
    for (std::size_t p = 0; p < votes.size(); ++p) {
      pick.normalized.push_back(best_raw[p] / best_sigma);
      seats[p] += best_raw[p] / best_sigma;
    }
    remaining.erase(best);
    out.push_back(std::move(pick));
  }
  return out;
}

}  // namespace oracle

#endif  // DHONDT_TESTS_ORACLES_HPP
