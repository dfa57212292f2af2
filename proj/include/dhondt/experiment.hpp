#ifndef DHONDT_EXPERIMENT_HPP
#define DHONDT_EXPERIMENT_HPP

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dhondt/ingestion.hpp"
#include "dhondt/recommenders.hpp"
#include "dhondt/simulation.hpp"

namespace dhondt {

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

struct ExperimentConfig {
  DatasetConfig dataset;
  SimulationConfig simulation;
  std::vector<RecommenderSpec> recommenders = default_recommender_specs();
  std::string output_dir = "results";
  bool matrix = false;

  void validate() const {
    dataset.validate();
    simulation.validate();
    if (recommenders.empty()) throw ConfigError("no recommenders configured");
    std::set<std::string> labels;
    for (const auto& spec : recommenders)
      if (!labels.insert(spec.label()).second)
        throw ConfigError("duplicate recommender name: " + spec.label());
    if (output_dir.empty()) throw ConfigError("output_dir must be non-empty");
  }
};

// Command-line values that take precedence over the config file.
struct ConfigOverrides {
  std::optional<std::string> dataset_path;
  std::optional<std::string> variant;
  std::optional<std::string> behaviour;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  bool matrix = false;
};

namespace detail {

// Reads keys out of one JSON object and remembers which were used, so that
// leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const nlohmann::json& obj, std::string prefix,
               std::vector<std::string>& unknown)
      : obj_(obj), prefix_(std::move(prefix)), unknown_(unknown) {
    if (!obj_.is_object()) throw ConfigError(where() + " must be a JSON object");
  }
  ObjectReader(const ObjectReader&) = delete;

  ~ObjectReader() {
    for (const auto& [key, _] : obj_.items())
      if (!used_.contains(key)) unknown_.push_back(prefix_ + key);
  }

  const nlohmann::json* find(const std::string& key) {
    auto it = obj_.find(key);
    if (it == obj_.end()) return nullptr;
    used_.insert(key);
    return &*it;
  }

  template <class T>
  void read(const std::string& key, T& out) {
    if (const auto* v = find(key)) {
      try {
        out = v->get<T>();
      } catch (const nlohmann::json::exception&) {
        throw ConfigError("bad value for " + prefix_ + key);
      }
    }
  }

  template <class T, class Parse>
  void read_enum(const std::string& key, T& out, Parse parse) {
    if (const auto* v = find(key)) {
      if (!v->is_string()) throw ConfigError(prefix_ + key + " must be a string");
      out = parse(v->get<std::string>());
    }
  }

  std::string child_prefix(const std::string& key) const { return prefix_ + key + "."; }

 private:
  std::string where() const {
    return prefix_.empty() ? "config" : prefix_.substr(0, prefix_.size() - 1);
  }

  const nlohmann::json& obj_;
  std::string prefix_;
  std::vector<std::string>& unknown_;
  std::set<std::string> used_;
};

inline std::string scalar_to_string(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() || v.is_boolean()) return v.dump();
  throw ConfigError("hyperparameter values must be scalars");
}

}  // namespace detail

// Builds a config from parsed JSON plus overrides. Unknown keys are errors.
inline ExperimentConfig parse_config(const nlohmann::json& doc,
                                     const ConfigOverrides& overrides = {}) {
  ExperimentConfig cfg;
  std::vector<std::string> unknown;
  {
    detail::ObjectReader root(doc, "", unknown);
    if (const auto* ds = root.find("dataset")) {
      detail::ObjectReader r(*ds, "dataset.", unknown);
      auto& d = cfg.dataset;
      r.read_enum("source", d.source, parse_dataset_source);
      r.read("path", d.path);
      r.read("attributes_path", d.attributes_path);
      r.read("min_user_events", d.min_user_events);
      r.read("train_fraction", d.train_fraction);
      r.read("eval_fraction", d.eval_fraction);
      r.read("max_events", d.max_events);
      r.read("views_only", d.views_only);
      if (const auto* syn = r.find("synthetic")) {
        detail::ObjectReader s(*syn, r.child_prefix("synthetic"), unknown);
        auto& sp = d.synthetic;
        s.read("n_users", sp.n_users);
        s.read("n_items", sp.n_items);
        s.read("n_events", sp.n_events);
        s.read("minority_fraction", sp.minority_fraction);
        s.read("preference_skew", sp.preference_skew);
        s.read("seed", sp.seed);
        s.read("popularity_exponent", sp.popularity_exponent);
        s.read("heavy_tailed_users", sp.heavy_tailed_users);
      }
    }
    if (const auto* sim = root.find("simulation")) {
      detail::ObjectReader r(*sim, "simulation.", unknown);
      auto& s = cfg.simulation;
      r.read_enum("variant", s.variant, parse_variant);
      r.read_enum("behaviour", s.behaviour.kind, parse_behaviour);
      r.read("window_size", s.window_size);
      r.read("candidates_k", s.candidates_k);
      r.read("list_n", s.list_n);
      r.read("eta_global", s.eta_global);
      r.read("eta_personal", s.eta_personal);
      r.read("normalize_responsibility", s.normalize_responsibility);
      r.read("skip_underdeveloped", s.skip_underdeveloped);
      r.read_enum("cold_start", s.cold_start, parse_cold_start);
      r.read("ramp_length", s.ramp_length);
      r.read("seed", s.seed);
      r.read("context_length", s.context_length);
    }
    if (const auto* recs = root.find("recommenders")) {
      if (!recs->is_array()) throw ConfigError("recommenders must be an array");
      cfg.recommenders.clear();
      for (std::size_t i = 0; i < recs->size(); ++i) {
        detail::ObjectReader r((*recs)[i], "recommenders[" + std::to_string(i) + "].",
                               unknown);
        RecommenderSpec spec;
        if (r.find("kind") == nullptr)
          throw ConfigError("recommenders[" + std::to_string(i) + "].kind is required");
        r.read_enum("kind", spec.kind, parse_recommender_kind);
        r.read("name", spec.name);
        if (const auto* hp = r.find("hyperparameters")) {
          if (!hp->is_object()) throw ConfigError("hyperparameters must be an object");
          for (const auto& [key, value] : hp->items())
            spec.hyperparameters.set(key, detail::scalar_to_string(value));
        }
        cfg.recommenders.push_back(std::move(spec));
      }
    }
    root.read("output_dir", cfg.output_dir);
    root.read("matrix", cfg.matrix);
  }
  if (!unknown.empty()) {
    std::string msg = "unknown configuration keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw ConfigError(msg);
  }

  if (overrides.dataset_path) cfg.dataset.path = *overrides.dataset_path;
  if (overrides.variant) cfg.simulation.variant = parse_variant(*overrides.variant);
  if (overrides.behaviour)
    cfg.simulation.behaviour.kind = parse_behaviour(*overrides.behaviour);
  if (overrides.seed) cfg.simulation.seed = *overrides.seed;
  if (overrides.output_dir) cfg.output_dir = *overrides.output_dir;
  if (overrides.matrix) cfg.matrix = true;

  cfg.simulation.behaviour.list_length = cfg.simulation.list_n;
  cfg.validate();
  return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path,
                                          const ConfigOverrides& overrides = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  return parse_config(doc, overrides);
}

inline nlohmann::json to_json(const ExperimentConfig& cfg) {
  const auto& d = cfg.dataset;
  const auto& s = cfg.simulation;
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& spec : cfg.recommenders) {
    nlohmann::json hp = nlohmann::json::object();
    for (const auto& [k, v] : spec.hyperparameters.values()) hp[k] = v;
    recs.push_back({{"kind", to_string(spec.kind)}, {"name", spec.label()},
                    {"hyperparameters", hp}});
  }
  return {
      {"dataset",
       {{"source", to_string(d.source)},
        {"path", d.path},
        {"attributes_path", d.attributes_path},
        {"min_user_events", d.min_user_events},
        {"train_fraction", d.train_fraction},
        {"eval_fraction", d.eval_fraction},
        {"max_events", d.max_events},
        {"views_only", d.views_only},
        {"synthetic",
         {{"n_users", d.synthetic.n_users},
          {"n_items", d.synthetic.n_items},
          {"n_events", d.synthetic.n_events},
          {"minority_fraction", d.synthetic.minority_fraction},
          {"preference_skew", d.synthetic.preference_skew},
          {"seed", d.synthetic.seed},
          {"popularity_exponent", d.synthetic.popularity_exponent},
          {"heavy_tailed_users", d.synthetic.heavy_tailed_users}}}}},
      {"simulation",
       {{"variant", to_string(s.variant)},
        {"behaviour", to_string(s.behaviour.kind)},
        {"window_size", s.window_size},
        {"candidates_k", s.candidates_k},
        {"list_n", s.list_n},
        {"eta_global", s.eta_global},
        {"eta_personal", s.eta_personal},
        {"normalize_responsibility", s.normalize_responsibility},
        {"skip_underdeveloped", s.skip_underdeveloped},
        {"cold_start", to_string(s.cold_start)},
        {"ramp_length", s.ramp_length},
        {"seed", s.seed},
        {"context_length", s.context_length}}},
      {"recommenders", recs},
      {"output_dir", cfg.output_dir},
      {"matrix", cfg.matrix}};
}

namespace detail {

inline constexpr std::size_t kMaxTrajectoryRows = 10000;

// Shortest representation that parses back to the same double.
inline std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline std::ofstream open_output(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

inline void close_output(std::ofstream& out, const std::filesystem::path& p) {
  out.close();
  if (!out) throw std::runtime_error("failed writing " + p.string());
}

inline void write_weight_rows(const std::filesystem::path& path,
                              const SimulationReport& report, bool global_rows) {
  auto out = open_output(path);
  out << "iteration,model_id";
  for (const auto& name : report.recommender_names) out << ',' << name;
  out << '\n';

  std::map<std::string, std::vector<const WeightSample*>> by_model;
  std::vector<std::string> order;
  for (const auto& s : report.trajectory) {
    if ((s.model_id == "global") != global_rows) continue;
    auto [it, inserted] = by_model.try_emplace(s.model_id);
    if (inserted) order.push_back(s.model_id);
    it->second.push_back(&s);
  }
  // Down-sample each model to at most kMaxTrajectoryRows rows, keeping the last.
  std::vector<const WeightSample*> rows;
  for (const auto& id : order) {
    const auto& samples = by_model[id];
    const std::size_t stride =
        samples.size() <= kMaxTrajectoryRows
            ? 1
            : (samples.size() + kMaxTrajectoryRows - 2) / (kMaxTrajectoryRows - 1);
    for (std::size_t i = 0; i < samples.size(); ++i)
      if (i % stride == 0 || i + 1 == samples.size())
        rows.push_back(samples[i]);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) {
    return a->iteration < b->iteration;
  });
  for (const auto* s : rows) {
    out << s->iteration << ',' << s->model_id;
    for (double w : s->weights) out << ',' << format_real(w);
    out << '\n';
  }
  close_output(out, path);
}

inline void write_clicks(const std::filesystem::path& path,
                         const SimulationReport& report) {
  auto out = open_output(path);
  out << "event_index,user,position,item,clicked\n";
  for (const auto& imp : report.impressions)
    out << imp.event_index << ',' << imp.user.str() << ',' << imp.position << ','
        << imp.item.str() << ',' << (imp.clicked ? 1 : 0) << '\n';
  close_output(out, path);
}

}  // namespace detail

inline nlohmann::json report_to_json(const SimulationReport& report,
                                     const ExperimentConfig& cfg) {
  const auto& names = report.recommender_names;
  nlohmann::json users = nlohmann::json::array();
  std::unordered_map<UserId, const UserRecord*> models;
  for (const auto& rec : report.personal_models) models.emplace(rec.user, &rec);
  for (const auto& u : report.users) {
    nlohmann::json row = {
        {"user", u.user.str()},
        {"recommendations", u.recommendations},
        {"clicks", u.clicks},
        {"ctr", u.recommendations > 0
                    ? static_cast<double>(u.clicks) / static_cast<double>(u.recommendations)
                    : 0.0}};
    if (auto it = models.find(u.user); it != models.end()) {
      const auto& m = it->second->model;
      row["weights"] = std::vector<double>(m.weights().begin(), m.weights().end());
      row["dominant"] = names[m.dominant()];
      row["model_clicks"] = it->second->click_count;
    }
    users.push_back(std::move(row));
  }
  nlohmann::json dominant = {{"global", names[report.dominant_global]},
                             {"personal_majority", nullptr}};
  if (report.dominant_personal_majority)
    dominant["personal_majority"] = names[*report.dominant_personal_majority];
  return {{"variant", to_string(cfg.simulation.variant)},
          {"behaviour", to_string(cfg.simulation.behaviour.kind)},
          {"seed", cfg.simulation.seed},
          {"recommenders", names},
          {"total_events", report.total_events},
          {"total_recommendations", report.total_recommendations},
          {"total_clicks", report.total_clicks},
          {"ctr", report.ctr},
          {"final_global_weights", report.final_global},
          {"dominant", dominant},
          {"users", users},
          {"config", to_json(cfg)}};
}

// Writes results.json, weights_global.csv, weights_users.csv and clicks.csv.
inline void write_run_outputs(const std::filesystem::path& dir,
                              const SimulationReport& report,
                              const ExperimentConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  {
    const auto p = dir / "results.json";
    auto out = detail::open_output(p);
    out << report_to_json(report, cfg).dump(2) << '\n';
    detail::close_output(out, p);
  }
  detail::write_weight_rows(dir / "weights_global.csv", report, true);
  detail::write_weight_rows(dir / "weights_users.csv", report, false);
  detail::write_clicks(dir / "clicks.csv", report);
}

struct RunSummary {
  Variant variant;
  BehaviourKind behaviour;
  std::int64_t total_events;
  std::int64_t total_recommendations;
  std::int64_t total_clicks;
  double ctr;
  std::filesystem::path output;
};

inline constexpr Variant kAllVariants[] = {Variant::global_only,
                                           Variant::full_personal, Variant::hybrid};
inline constexpr BehaviourKind kAllBehaviours[] = {
    BehaviourKind::lin0901, BehaviourKind::stat06, BehaviourKind::stat08};

// Loads data, trains the base recommenders once, replays every requested
// (variant, behaviour) cell and writes outputs. Throws on failure.
inline std::vector<RunSummary> execute_experiment(const ExperimentConfig& cfg,
                                                  std::ostream& log) {
  cfg.validate();
  const Dataset data = load_dataset(cfg.dataset);
  const auto [train_events, eval_events] =
      split(data.stream, cfg.dataset.train_fraction, cfg.dataset.eval_fraction);
  const AttributeTable* attributes = data.attributes.empty() ? nullptr : &data.attributes;
  const RecommenderSet recommenders =
      train_all(cfg.recommenders, train_events, attributes, cfg.simulation.seed);

  std::vector<std::pair<Variant, BehaviourKind>> cells;
  if (cfg.matrix) {
    for (auto v : kAllVariants)
      for (auto b : kAllBehaviours) cells.emplace_back(v, b);
  } else {
    cells.emplace_back(cfg.simulation.variant, cfg.simulation.behaviour.kind);
  }

  const std::filesystem::path root(cfg.output_dir);
  std::vector<RunSummary> summaries;
  for (const auto& [variant, behaviour] : cells) {
    ExperimentConfig cell = cfg;
    cell.simulation.variant = variant;
    cell.simulation.behaviour.kind = behaviour;
    const auto report = run(cell.simulation, recommenders, train_events, eval_events);
    const auto dir = cfg.matrix ? root / (std::string(to_string(variant)) + "__" +
                                          std::string(to_string(behaviour)))
                                : root;
    write_run_outputs(dir, report, cell);
    log << "variant=" << to_string(variant) << " behaviour=" << to_string(behaviour)
        << " clicks=" << report.total_clicks << " ctr=" << detail::format_real(report.ctr)
        << '\n';
    summaries.push_back({variant, behaviour, report.total_events,
                         report.total_recommendations, report.total_clicks, report.ctr,
                         dir});
  }

  const auto summary_path = root / "summary.csv";
  auto out = detail::open_output(summary_path);
  out << "variant,behaviour,total_events,total_recommendations,total_clicks,ctr\n";
  for (const auto& s : summaries)
    out << to_string(s.variant) << ',' << to_string(s.behaviour) << ',' << s.total_events
        << ',' << s.total_recommendations << ',' << s.total_clicks << ','
        << detail::format_real(s.ctr) << '\n';
  detail::close_output(out, summary_path);
  return summaries;
}

// Exit status wrapper: 0 on success, 1 with a message on `err` otherwise.
inline int run_experiment(const ExperimentConfig& cfg, std::ostream& out,
                          std::ostream& err) {
  try {
    execute_experiment(cfg, out);
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace dhondt

#endif  // DHONDT_EXPERIMENT_HPP
