// Random instance generators shared by unit and acceptance tests.
#ifndef DHONDT_TESTS_FIXTURES_HPP
#define DHONDT_TESTS_FIXTURES_HPP

#include <algorithm>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "dhondt/voting.hpp"
#include "oracles.hpp"

namespace fixtures {

struct Instance {
  std::vector<dhondt::CandidateList> lists;
  std::vector<oracle::RefList> ref;
  std::vector<double> votes;
};

inline std::string item_name(int k) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "it%04d", k);
  return buf;
}

// Overlapping lists drawn from a shared catalog.
inline Instance random_instance(std::mt19937_64& rng, int max_parties = 5,
                                int catalog = 30, int max_len = 12) {
  std::uniform_int_distribution<int> n_parties(1, max_parties);
  std::uniform_real_distribution<double> vote(0.01, 1.0);
  Instance inst;
  const int parties = n_parties(rng);
  std::vector<int> ids(static_cast<std::size_t>(catalog));
  for (int k = 0; k < catalog; ++k) ids[static_cast<std::size_t>(k)] = k;
  std::uniform_int_distribution<int> len(0, max_len);
  for (int p = 0; p < parties; ++p) {
    inst.votes.push_back(vote(rng));
    std::shuffle(ids.begin(), ids.end(), rng);
    const int n = len(rng);
    std::vector<dhondt::ItemId> items;
    oracle::RefList ref{static_cast<std::size_t>(p), {}, max_len};
    for (int k = 0; k < n; ++k) {
      items.emplace_back(item_name(ids[static_cast<std::size_t>(k)]));
      ref.items.push_back(item_name(ids[static_cast<std::size_t>(k)]));
    }
    inst.lists.emplace_back(p, items, max_len);
    inst.ref.push_back(std::move(ref));
  }
  return inst;
}

// Disjoint lists; party p's items sort before party p+1's so ItemId
// tie-breaking matches party-index tie-breaking.
inline Instance disjoint_instance(std::mt19937_64& rng, int n_slots) {
  std::uniform_int_distribution<int> n_parties(1, 6);
  std::uniform_int_distribution<int> vote(1, 20);
  Instance inst;
  const int parties = n_parties(rng);
  for (int p = 0; p < parties; ++p) {
    inst.votes.push_back(vote(rng));
    std::vector<dhondt::ItemId> items;
    for (int k = 0; k < n_slots; ++k) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "p%02d_%04d", p, k);
      items.emplace_back(buf);
    }
    inst.lists.emplace_back(p, items);
  }
  return inst;
}

// Party index encoded in a disjoint_instance item id ("pNN_...").
inline std::size_t party_of(const dhondt::ItemId& item) {
  return static_cast<std::size_t>(std::stoi(item.str().substr(1, 2)));
}

}  // namespace fixtures

#endif  // DHONDT_TESTS_FIXTURES_HPP
