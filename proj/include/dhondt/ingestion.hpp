#ifndef DHONDT_INGESTION_HPP
#define DHONDT_INGESTION_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dhondt/domain.hpp"
#include "dhondt/recommenders/recommender.hpp"

namespace dhondt {

// Malformed input row. line() is 1-based.
class ParseError : public InputError {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : InputError(path + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

enum class DatasetSource { retailrocket_csv, generic_csv, synthetic };

inline std::string_view to_string(DatasetSource s) {
  switch (s) {
    case DatasetSource::retailrocket_csv: return "retailrocket-csv";
    case DatasetSource::generic_csv: return "generic-csv";
    case DatasetSource::synthetic: return "synthetic";
  }
  return "generic-csv";
}

inline DatasetSource parse_dataset_source(std::string_view s) {
  if (s == "retailrocket-csv") return DatasetSource::retailrocket_csv;
  if (s == "generic-csv") return DatasetSource::generic_csv;
  if (s == "synthetic") return DatasetSource::synthetic;
  throw InputError("unknown dataset source: " + std::string(s));
}

struct SyntheticSpec {
  int n_users = 1000;
  int n_items = 1000;
  int n_events = 100000;
  double minority_fraction = 0.2;
  double preference_skew = 9.0;  // odds of an in-pool choice
  std::uint64_t seed = 0;
  // Zipf exponent of item popularity inside a pool; 0 is uniform.
  double popularity_exponent = 1.0;
  // Zipf-distributed user activity instead of uniform.
  bool heavy_tailed_users = false;

  void validate() const {
    if (n_users < 1 || n_items < 2 || n_events < 1)
      throw InputError("synthetic spec needs n_users >= 1, n_items >= 2, n_events >= 1");
    if (!(minority_fraction >= 0.0 && minority_fraction <= 1.0))
      throw InputError("minority_fraction must lie in [0, 1]");
    if (!(preference_skew >= 1.0))
      throw InputError("preference_skew must be >= 1");
    if (!(popularity_exponent >= 0.0))
      throw InputError("popularity_exponent must be >= 0");
  }
};

struct DatasetConfig {
  DatasetSource source = DatasetSource::generic_csv;
  std::string path;
  std::string attributes_path;  // optional item-attribute file
  std::int64_t min_user_events = 0;
  double train_fraction = 0.5;
  double eval_fraction = 0.1;
  std::int64_t max_events = 0;  // keep the first N events after filtering; 0 = all
  bool views_only = false;
  SyntheticSpec synthetic;

  void validate() const {
    if (min_user_events < 0) throw InputError("min_user_events must be >= 0");
    if (max_events < 0) throw InputError("max_events must be >= 0");
    if (!(train_fraction > 0.0 && train_fraction <= 1.0))
      throw InputError("train_fraction must lie in (0, 1]");
    if (!(eval_fraction > 0.0 && eval_fraction <= 1.0))
      throw InputError("eval_fraction must lie in (0, 1]");
    if (train_fraction + eval_fraction > 1.0 + 1e-12)
      throw InputError("train_fraction + eval_fraction must be <= 1");
    if (source == DatasetSource::synthetic)
      synthetic.validate();
    else if (path.empty())
      throw InputError("dataset path is required");
  }
};

enum class Segment { majority, minority };

struct Dataset {
  EventStream stream;
  AttributeTable attributes;
  std::unordered_map<UserId, Segment> segments;  // synthetic data only
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::int64_t parse_timestamp(std::string_view s, const std::string& path,
                                    std::size_t line) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 0)
    throw ParseError(path, line, "bad timestamp '" + std::string(s) + "'");
  return v;
}

// Calls fn(line_number, line) for every line, CR stripped.
template <class Fn>
void for_each_line(const std::string& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    fn(number, std::string_view(line));
  }
}

inline std::vector<InteractionEvent> read_retailrocket(const std::string& path) {
  std::vector<InteractionEvent> events;
  for_each_line(path, [&](std::size_t n, std::string_view line) {
    if (n == 1) {
      if (line != "timestamp,visitorid,event,itemid,transactionid")
        throw ParseError(path, n, "unexpected RetailRocket header");
      return;
    }
    if (line.empty()) return;
    auto f = split_fields(line, ',');
    if (f.size() != 4 && f.size() != 5)
      throw ParseError(path, n, "expected 5 fields, got " + std::to_string(f.size()));
    if (f[1].empty() || f[3].empty())
      throw ParseError(path, n, "empty visitorid or itemid");
    events.emplace_back(parse_timestamp(f[0], path, n), UserId(std::string(f[1])),
                        ItemId(std::string(f[3])), parse_event_kind(f[2]));
  });
  return events;
}

inline std::vector<InteractionEvent> read_generic(const std::string& path) {
  std::vector<InteractionEvent> events;
  for_each_line(path, [&](std::size_t n, std::string_view line) {
    if (line.empty()) return;
    if (n == 1 && line.starts_with("timestamp")) return;
    auto f = split_fields(line, ',');
    if (f.size() != 3 && f.size() != 4)
      throw ParseError(path, n, "expected 3 or 4 fields, got " + std::to_string(f.size()));
    if (f[1].empty() || f[2].empty())
      throw ParseError(path, n, "empty user or item");
    const EventKind kind = f.size() == 4 ? parse_event_kind(f[3]) : EventKind::view;
    events.emplace_back(parse_timestamp(f[0], path, n), UserId(std::string(f[1])),
                        ItemId(std::string(f[2])), kind);
  });
  return events;
}

// Keeps users with strictly more than `min_events` events.
inline EventStream filter_active_users(const EventStream& stream,
                                       std::int64_t min_events) {
  if (min_events <= 0) return stream;
  std::unordered_map<UserId, std::int64_t> counts;
  for (const auto& ev : stream) ++counts[ev.user];
  return stream.filter(
      [&](const InteractionEvent& ev) { return counts[ev.user] > min_events; });
}

}  // namespace detail

// "item,attr1;attr2;..." per line.
inline AttributeTable load_item_attributes(const std::string& path) {
  AttributeTable table;
  detail::for_each_line(path, [&](std::size_t n, std::string_view line) {
    if (line.empty()) return;
    auto comma = line.find(',');
    if (comma == std::string_view::npos || comma == 0)
      throw ParseError(path, n, "expected 'item,attr1;attr2;...'");
    auto& tokens = table[ItemId(std::string(line.substr(0, comma)))];
    for (auto tok : detail::split_fields(line.substr(comma + 1), ';'))
      if (!tok.empty()) tokens.emplace_back(tok);
  });
  return table;
}

// Deterministic two-segment population. The majority segment prefers the
// first half of the catalog, the minority the second half; an in-pool pick
// happens with probability skew / (skew + 1).
inline Dataset generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);

  auto pad = [](char prefix, int value, int width) {
    std::string digits = std::to_string(value);
    return std::string(1, prefix) +
           std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(digits.size()))), '0') +
           digits;
  };
  const int user_width = static_cast<int>(std::to_string(spec.n_users).size());
  const int item_width = static_cast<int>(std::to_string(spec.n_items).size());

  Dataset out;
  std::vector<UserId> users;
  users.reserve(static_cast<std::size_t>(spec.n_users));
  for (int u = 0; u < spec.n_users; ++u) users.emplace_back(pad('u', u, user_width));
  std::vector<ItemId> items;
  items.reserve(static_cast<std::size_t>(spec.n_items));
  for (int i = 0; i < spec.n_items; ++i) items.emplace_back(pad('i', i, item_width));

  const auto n_minority = static_cast<std::size_t>(
      std::lround(spec.minority_fraction * spec.n_users));
  std::vector<std::size_t> order(users.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Segment> segment(users.size(), Segment::majority);
  for (std::size_t k = 0; k < n_minority; ++k) segment[order[k]] = Segment::minority;
  for (std::size_t u = 0; u < users.size(); ++u) out.segments.emplace(users[u], segment[u]);

  const std::size_t half = items.size() / 2;
  const std::size_t pool_size[2] = {half, items.size() - half};
  const std::size_t pool_start[2] = {0, half};
  for (std::size_t i = 0; i < items.size(); ++i)
    out.attributes[items[i]] = {i < half ? "pool:major" : "pool:minor"};

  auto zipf_weights = [](std::size_t n, double exponent) {
    std::vector<double> w(n);
    for (std::size_t r = 0; r < n; ++r)
      w[r] = 1.0 / std::pow(static_cast<double>(r + 1), exponent);
    return w;
  };
  const auto weights_major = zipf_weights(pool_size[0], spec.popularity_exponent);
  const auto weights_minor = zipf_weights(pool_size[1], spec.popularity_exponent);
  std::discrete_distribution<std::size_t> in_pool[2] = {
      {weights_major.begin(), weights_major.end()},
      {weights_minor.begin(), weights_minor.end()}};

  std::vector<double> activity(users.size(), 1.0);
  if (spec.heavy_tailed_users) {
    std::vector<std::size_t> perm(users.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t r = 0; r < perm.size(); ++r)
      activity[perm[r]] = 1.0 / std::pow(static_cast<double>(r + 1), 1.1);
  }
  std::discrete_distribution<std::size_t> pick_user(activity.begin(), activity.end());

  const double p_in = spec.preference_skew / (spec.preference_skew + 1.0);
  std::bernoulli_distribution stay_in_pool(p_in);
  constexpr std::int64_t kYearStart = 1577836800000;  // 2020-01-01T00:00Z
  constexpr std::int64_t kYearMs = 365LL * 24 * 3600 * 1000;
  std::uniform_int_distribution<std::int64_t> when(0, kYearMs - 1);

  std::vector<InteractionEvent> events;
  events.reserve(static_cast<std::size_t>(spec.n_events));
  for (int e = 0; e < spec.n_events; ++e) {
    const std::size_t u = pick_user(rng);
    const std::size_t home = segment[u] == Segment::majority ? 0 : 1;
    const std::size_t pool = stay_in_pool(rng) ? home : 1 - home;
    const std::size_t item = pool_start[pool] + in_pool[pool](rng);
    events.emplace_back(kYearStart + when(rng), users[u], items[item], EventKind::view);
  }
  out.stream = sort_stream(std::move(events));
  return out;
}

// Reads, sorts and filters the configured source.
inline Dataset load_dataset(const DatasetConfig& config) {
  config.validate();
  Dataset out;
  if (config.source == DatasetSource::synthetic) {
    out = generate_synthetic(config.synthetic);
  } else {
    if (!std::filesystem::exists(config.path))
      throw InputError("dataset file not found: " + config.path);
    out.stream = sort_stream(config.source == DatasetSource::retailrocket_csv
                                 ? detail::read_retailrocket(config.path)
                                 : detail::read_generic(config.path));
  }
  if (!config.attributes_path.empty())
    out.attributes = load_item_attributes(config.attributes_path);
  if (config.views_only)
    out.stream = out.stream.filter(
        [](const InteractionEvent& ev) { return ev.kind == EventKind::view; });
  out.stream = detail::filter_active_users(out.stream, config.min_user_events);
  if (config.max_events > 0 &&
      out.stream.size() > static_cast<std::size_t>(config.max_events))
    out.stream = out.stream.slice(0, static_cast<std::size_t>(config.max_events));
  return out;
}

inline EventStream load(const DatasetConfig& config) {
  return load_dataset(config).stream;
}

struct TrainEvalSplit {
  EventStream train;
  EventStream eval;
};

// train = first floor(train_fraction * n) events, eval = last
// ceil(eval_fraction * n). Events in between belong to neither.
inline TrainEvalSplit split(const EventStream& stream, double train_fraction,
                            double eval_fraction) {
  if (!(train_fraction > 0.0 && train_fraction <= 1.0))
    throw InputError("train_fraction must lie in (0, 1]");
  if (!(eval_fraction > 0.0 && eval_fraction <= 1.0))
    throw InputError("eval_fraction must lie in (0, 1]");
  if (train_fraction + eval_fraction > 1.0 + 1e-12)
    throw InputError("train_fraction + eval_fraction must be <= 1");
  const std::size_t n = stream.size();
  const double dn = static_cast<double>(n);
  // Slack keeps products such as 0.1 * 30 from rounding up a whole event.
  auto n_train = static_cast<std::size_t>(std::floor(train_fraction * dn + 1e-9));
  auto n_eval = static_cast<std::size_t>(std::ceil(eval_fraction * dn - 1e-9));
  n_train = std::min(n_train, n);
  n_eval = std::min(n_eval, n - n_train);
  return {stream.slice(0, n_train), stream.slice(n - n_eval, n)};
}

}  // namespace dhondt

#endif  // DHONDT_INGESTION_HPP
