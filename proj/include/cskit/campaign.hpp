#pragma once

// Monte-Carlo campaigns: sweep (n, m, k, matrix kind, solver) x trials, time
// each stage, score every trial, aggregate, and persist.
//
// Config schema (JSON object, unknown keys rejected):
//   n        int or list, required          signal length(s)
//   k        int or list, required          sparsity level(s), 0 allowed
//   m        int or list, optional          measurement count(s); when
//                                           omitted, m = measurement_bound(n, max(k, 1), 2)
//   matrix   string or list, required       gaussian | bernoulli | partial_dct |
//                                           toeplitz | circulant | identity
//   solver   string/object or list, required  omp | iht | bp | oracle, or
//                                           {"name": ..., solver options}
//   trials   int >= 1, required
//   seed     uint64, default 0
//   noise    "none" | {"kind": "awgn", "sigma": s}, default none
//   normalize          bool, default true
//   amplitude          unit_gaussian | signed_ones, default unit_gaussian
//   success_threshold  (0, 1], default 0.9
//   archive            bool, default false (write x and x_hat per trial)
//   threads            int >= 1, default CSKIT_THREADS or 1
//   output_dir         string, default "campaign_out"
//
// Identity matrices always use m = n regardless of the m sweep.

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "cskit/certify.hpp"
#include "cskit/config.hpp"
#include "cskit/errors.hpp"
#include "cskit/io.hpp"
#include "cskit/metrics.hpp"
#include "cskit/model.hpp"
#include "cskit/parallel.hpp"
#include "cskit/random.hpp"
#include "cskit/recovery.hpp"
#include "cskit/timing.hpp"
#include "cskit/version.hpp"

namespace cskit {

struct CampaignConfig {
  std::vector<int> n;
  std::vector<int> k;
  std::optional<std::vector<int>> m;
  std::vector<MatrixKind> matrix;
  std::vector<RecoverySpec> solver;
  int trials = 1;
  std::uint64_t seed = 0;
  NoiseModel noise = NoiseModel::none();
  bool normalize = true;
  Amplitude amplitude = Amplitude::UnitGaussian;
  double success_threshold = kDefaultSuccessThreshold;
  bool archive = false;
  int threads = 1;
  std::string output_dir = "campaign_out";
};

inline CampaignConfig parse_config(const std::string& text) {
  using namespace config_detail;
  const json doc = parse_json_document(text);
  ObjectReader r(doc, "");
  CampaignConfig cfg;
  cfg.threads = default_thread_count();
  cfg.n = as_list(r.require("n"), "n", [](const json& j, const std::string& p) { return as_int(j, p, 1); });
  cfg.k = as_list(r.require("k"), "k", [](const json& j, const std::string& p) { return as_int(j, p, 0); });
  if (const auto* v = r.find("m"))
    cfg.m = as_list(*v, "m", [](const json& j, const std::string& p) { return as_int(j, p, 1); });
  cfg.matrix = as_list(r.require("matrix"), "matrix", parse_matrix_kind_at);
  cfg.solver = as_list(r.require("solver"), "solver", parse_solver_spec);
  cfg.trials = as_int(r.require("trials"), "trials", 1);
  if (const auto* v = r.find("seed")) cfg.seed = as_u64(*v, "seed");
  if (const auto* v = r.find("noise")) cfg.noise = parse_noise(*v, "noise");
  if (const auto* v = r.find("normalize")) cfg.normalize = as_bool(*v, "normalize");
  if (const auto* v = r.find("amplitude")) cfg.amplitude = parse_amplitude_at(*v, "amplitude");
  if (const auto* v = r.find("success_threshold")) {
    cfg.success_threshold = as_double(*v, "success_threshold");
    if (!(cfg.success_threshold > 0.0 && cfg.success_threshold <= 1.0))
      throw ParseError("success_threshold", "must lie in (0, 1]");
  }
  if (const auto* v = r.find("archive")) cfg.archive = as_bool(*v, "archive");
  if (const auto* v = r.find("threads")) cfg.threads = as_int(*v, "threads", 1, 1024);
  if (const auto* v = r.find("output_dir")) cfg.output_dir = as_string(*v, "output_dir");
  r.finish();

  const int n_min = *std::min_element(cfg.n.begin(), cfg.n.end());
  for (std::size_t i = 0; i < cfg.k.size(); ++i)
    if (cfg.k[i] > n_min) throw ParseError(index("k", i), "k must not exceed n");
  if (cfg.m) {
    for (std::size_t i = 0; i < cfg.m->size(); ++i)
      if ((*cfg.m)[i] > n_min) throw ParseError(index("m", i), "m must not exceed n");
  }
  return cfg;
}

// Config echo with every default filled in. Excludes threads and output_dir,
// which do not affect results.
inline json config_to_json(const CampaignConfig& cfg) {
  json solvers = json::array();
  for (const auto& s : cfg.solver) solvers.push_back(solver_spec_to_json(s));
  json kinds = json::array();
  for (auto k : cfg.matrix) kinds.push_back(std::string(to_string(k)));
  json doc = {{"n", cfg.n},
              {"k", cfg.k},
              {"matrix", kinds},
              {"solver", solvers},
              {"trials", cfg.trials},
              {"seed", cfg.seed},
              {"noise", noise_to_json(cfg.noise)},
              {"normalize", cfg.normalize},
              {"amplitude", std::string(to_string(cfg.amplitude))},
              {"success_threshold", cfg.success_threshold},
              {"archive", cfg.archive}};
  doc["m"] = cfg.m ? json(*cfg.m) : json(nullptr);
  return doc;
}

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string config_hash(const CampaignConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(config_to_json(cfg).dump())));
  return buf;
}

struct TrialRecord {
  std::size_t trial_id = 0;
  std::uint64_t seed = 0;
  MatrixKind matrix_kind = MatrixKind::Gaussian;
  Solver solver = Solver::OMP;
  int n = 0;
  int m = 0;
  int k = 0;
  double sampling_time = 0.0;
  double recovery_time = 0.0;
  double processing_time = 0.0;
  MetricReport metrics;
  bool success = false;
  bool converged = false;
  // Filled when archival is on.
  std::optional<Vector> x;
  std::optional<Vector> x_hat;
};

struct MetricStats {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t finite = 0;
  std::size_t infinite = 0;
  std::size_t undefined = 0;
};

struct AggregateRecord {
  MatrixKind matrix_kind = MatrixKind::Gaussian;
  Solver solver = Solver::OMP;
  int n = 0;
  int m = 0;
  int k = 0;
  std::size_t trials = 0;
  double success_rate = 0.0;
  double failure_rate = 0.0;
  // Mean per-trial RSNR; infinite when any trial recovered exactly.
  MetricValue mean_rsnr = MetricValue::undefined();
  std::vector<std::pair<std::string, MetricStats>> metrics;
};

struct CampaignResult {
  CampaignConfig config;
  std::vector<TrialRecord> trials;
  std::vector<AggregateRecord> aggregates;
};

// Attaches sweep coordinates to an error raised inside a trial.
class TrialError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrialCoordinates {
  std::size_t trial_id;
  std::size_t n_idx, m_idx, k_idx, kind_idx, solver_idx, trial;
  int n, m, k;
};

inline std::vector<TrialCoordinates> enumerate_trials(const CampaignConfig& cfg) {
  std::vector<TrialCoordinates> out;
  const std::size_t m_count = cfg.m ? cfg.m->size() : 1;
  for (std::size_t ni = 0; ni < cfg.n.size(); ++ni)
    for (std::size_t mi = 0; mi < m_count; ++mi)
      for (std::size_t ki = 0; ki < cfg.k.size(); ++ki)
        for (std::size_t ai = 0; ai < cfg.matrix.size(); ++ai)
          for (std::size_t si = 0; si < cfg.solver.size(); ++si)
            for (std::size_t t = 0; t < static_cast<std::size_t>(cfg.trials); ++t) {
              const int n = cfg.n[ni];
              const int k = cfg.k[ki];
              int m = cfg.m ? (*cfg.m)[mi] : measurement_bound(n, std::max(k, 1), 2.0);
              if (cfg.matrix[ai] == MatrixKind::Identity) m = n;
              out.push_back({out.size(), ni, mi, ki, ai, si, t, n, m, k});
            }
  return out;
}

// Seed of a trial. The solver index is left out so every solver sees the same
// instance.
inline std::uint64_t trial_seed(std::uint64_t master, const TrialCoordinates& c) {
  return derive_seed(master, {c.n_idx, c.m_idx, c.k_idx, c.kind_idx, c.trial});
}

inline TrialRecord run_trial(const CampaignConfig& cfg, const TrialCoordinates& c) {
  TrialRecord rec;
  rec.trial_id = c.trial_id;
  rec.seed = trial_seed(cfg.seed, c);
  rec.matrix_kind = cfg.matrix[c.kind_idx];
  rec.n = c.n;
  rec.m = c.m;
  rec.k = c.k;
  RecoverySpec spec = cfg.solver[c.solver_idx];
  rec.solver = spec.solver;
  spec.target_sparsity = std::max(c.k, 1);

  Stopwatch total;
  const auto a = build_matrix(rec.matrix_kind, c.m, c.n, derive_seed(rec.seed, {1}), cfg.normalize);
  const auto x = generate_sparse_signal(c.n, c.k, cfg.amplitude, derive_seed(rec.seed, {2}));
  const auto y = measure(a, x, cfg.noise, derive_seed(rec.seed, {3}));
  rec.sampling_time = y.sampling_time;
  const auto result = recover(a, y.y, spec);
  rec.recovery_time = result.recovery_time;
  const Vector y_hat = a.entries() * result.x_hat;
  MetricTolerances tol;
  tol.success_threshold = cfg.success_threshold;
  rec.metrics = compute_metrics(x, result.x_hat, y.y, y_hat, c.m, tol);
  rec.processing_time = total.seconds();
  rec.converged = result.converged;
  rec.success = rec.metrics.success;
  if (cfg.archive) {
    rec.x = x.values();
    rec.x_hat = result.x_hat;
  }
  return rec;
}

// Names of the per-trial numeric columns that are aggregated, in CSV order.
inline const std::vector<std::string>& aggregated_columns() {
  static const std::vector<std::string> cols = {
      "sampling_time_s",  "recovery_time_s",      "processing_time_s",      "recovery_error",
      "mse",              "correlation",          "covariance",             "error_sparsity_count",
      "error_sparsity_support", "compression_ratio", "snr_db",              "rsnr",
      "hamming_distance"};
  return cols;
}

inline std::vector<MetricValue> numeric_columns(const TrialRecord& r) {
  const auto& m = r.metrics;
  return {MetricValue::finite(r.sampling_time),
          MetricValue::finite(r.recovery_time),
          MetricValue::finite(r.processing_time),
          m.recovery_error,
          m.mse,
          m.correlation,
          m.covariance,
          MetricValue::finite(m.error_sparsity_count),
          MetricValue::finite(m.error_sparsity_support),
          m.compression_ratio,
          m.snr_db,
          m.rsnr,
          MetricValue::finite(m.hamming_distance)};
}

// Mean and sample standard deviation over finite values.
inline MetricStats summarize(const std::vector<MetricValue>& values) {
  MetricStats s;
  double sum = 0.0;
  for (const auto& v : values) {
    if (v.is_finite()) {
      ++s.finite;
      sum += v.value();
    } else if (v.is_infinite()) {
      ++s.infinite;
    } else {
      ++s.undefined;
    }
  }
  if (s.finite == 0) return s;
  s.mean = sum / static_cast<double>(s.finite);
  if (s.finite > 1) {
    double ss = 0.0;
    for (const auto& v : values)
      if (v.is_finite()) ss += (v.value() - s.mean) * (v.value() - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(s.finite - 1));
  }
  return s;
}

inline std::vector<AggregateRecord> aggregate(const std::vector<TrialRecord>& trials) {
  using Key = std::tuple<int, int, int, int, int>;  // kind, solver, n, m, k
  std::map<Key, std::vector<const TrialRecord*>> groups;
  std::vector<Key> order;
  for (const auto& t : trials) {
    const Key key{static_cast<int>(t.matrix_kind), static_cast<int>(t.solver), t.n, t.m, t.k};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&t);
  }
  std::vector<AggregateRecord> out;
  for (const auto& key : order) {
    const auto& members = groups[key];
    AggregateRecord agg;
    agg.matrix_kind = static_cast<MatrixKind>(std::get<0>(key));
    agg.solver = static_cast<Solver>(std::get<1>(key));
    agg.n = std::get<2>(key);
    agg.m = std::get<3>(key);
    agg.k = std::get<4>(key);
    agg.trials = members.size();
    std::vector<bool> outcomes;
    for (const auto* t : members) outcomes.push_back(t->success);
    const auto rate = success_rate(outcomes);
    agg.success_rate = rate.success_rate;
    agg.failure_rate = rate.failure_rate;

    const auto& names = aggregated_columns();
    std::vector<std::vector<MetricValue>> columns(names.size());
    for (const auto* t : members) {
      const auto vals = numeric_columns(*t);
      for (std::size_t c = 0; c < vals.size(); ++c) columns[c].push_back(vals[c]);
    }
    for (std::size_t c = 0; c < names.size(); ++c) agg.metrics.emplace_back(names[c], summarize(columns[c]));

    const auto& rsnr_stats = agg.metrics[11].second;
    if (rsnr_stats.infinite > 0)
      agg.mean_rsnr = MetricValue::infinite();
    else if (rsnr_stats.finite > 0)
      agg.mean_rsnr = MetricValue::finite(rsnr_stats.mean);
    out.push_back(std::move(agg));
  }
  return out;
}

inline CampaignResult run_campaign(const CampaignConfig& cfg, std::optional<int> threads = std::nullopt) {
  if (cfg.trials < 1) throw InvalidArgument("campaign: trials must be >= 1");
  if (cfg.n.empty() || cfg.k.empty() || cfg.matrix.empty() || cfg.solver.empty() || (cfg.m && cfg.m->empty()))
    throw InvalidArgument("campaign: sweep lists must not be empty");
  const auto coords = enumerate_trials(cfg);
  CampaignResult result;
  result.config = cfg;
  result.trials.resize(coords.size());
  parallel_for(coords.size(), threads.value_or(cfg.threads), [&](std::size_t i) {
    const auto& c = coords[i];
    try {
      result.trials[i] = run_trial(cfg, c);
    } catch (const std::exception& e) {
      throw TrialError("trial " + std::to_string(c.trial_id) + " (n=" + std::to_string(c.n) +
                       ", m=" + std::to_string(c.m) + ", k=" + std::to_string(c.k) + ", matrix=" +
                       std::string(to_string(cfg.matrix[c.kind_idx])) + ", solver=" +
                       std::string(to_string(cfg.solver[c.solver_idx].solver)) + ", trial=" +
                       std::to_string(c.trial) + "): " + e.what());
    }
  });
  result.aggregates = aggregate(result.trials);
  return result;
}

inline constexpr const char* kTrialsCsvHeader =
    "trial_id,seed,matrix_kind,solver,n,m,k,sampling_time_s,recovery_time_s,processing_time_s,"
    "recovery_error,mse,correlation,covariance,error_sparsity_count,error_sparsity_support,"
    "compression_ratio,snr_db,rsnr,hamming_distance,success,converged";

// Columns whose values are wall-clock measurements.
inline bool is_timing_column(std::string_view name) {
  return name == "sampling_time_s" || name == "recovery_time_s" || name == "processing_time_s";
}

// Finite values in 17 significant digits, "inf" for infinite, "undefined"
// for undefined.
inline std::string format_metric(const MetricValue& v) {
  if (v.is_finite()) return format_double(v.value());
  return v.is_infinite() ? "inf" : "undefined";
}

inline MetricValue parse_metric(std::string_view text) {
  if (text == "inf") return MetricValue::infinite();
  if (text == "undefined") return MetricValue::undefined();
  return MetricValue::finite(parse_double(text));
}

inline std::string trials_to_csv(const std::vector<TrialRecord>& trials) {
  std::string out = kTrialsCsvHeader;
  out += '\n';
  for (const auto& t : trials) {
    const auto& m = t.metrics;
    out += std::to_string(t.trial_id) + ',' + std::to_string(t.seed) + ',' + std::string(to_string(t.matrix_kind)) +
           ',' + std::string(to_string(t.solver)) + ',' + std::to_string(t.n) + ',' + std::to_string(t.m) + ',' +
           std::to_string(t.k) + ',' + format_double(t.sampling_time) + ',' + format_double(t.recovery_time) + ',' +
           format_double(t.processing_time) + ',' + format_metric(m.recovery_error) + ',' + format_metric(m.mse) +
           ',' + format_metric(m.correlation) + ',' + format_metric(m.covariance) + ',' +
           std::to_string(m.error_sparsity_count) + ',' + std::to_string(m.error_sparsity_support) + ',' +
           format_metric(m.compression_ratio) + ',' + format_metric(m.snr_db) + ',' + format_metric(m.rsnr) + ',' +
           std::to_string(m.hamming_distance) + ',' + (t.success ? "true" : "false") + ',' +
           (t.converged ? "true" : "false") + '\n';
  }
  return out;
}

// Parsed trials.csv: header names and the raw fields of each row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw InvalidArgument("csv has no column '" + std::string(name) + "'");
  }
};

inline CsvTable parse_csv_table(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    for (auto f : split_csv_line(line)) fields.emplace_back(f);
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      if (fields.size() != table.header.size())
        throw InvalidArgument("csv row has " + std::to_string(fields.size()) + " fields, header has " +
                              std::to_string(table.header.size()));
      table.rows.push_back(std::move(fields));
    }
  }
  return table;
}

inline json to_json(const MetricStats& s) {
  return {{"mean", s.mean}, {"stddev", s.stddev}, {"finite", s.finite}, {"infinite", s.infinite},
          {"undefined", s.undefined}};
}

inline json aggregates_to_json(const CampaignResult& r) {
  json groups = json::array();
  for (const auto& a : r.aggregates) {
    json metrics = json::object();
    for (const auto& [name, stats] : a.metrics) metrics[name] = to_json(stats);
    groups.push_back({{"matrix_kind", std::string(to_string(a.matrix_kind))},
                      {"solver", std::string(to_string(a.solver))},
                      {"n", a.n},
                      {"m", a.m},
                      {"k", a.k},
                      {"trials", a.trials},
                      {"success_rate", a.success_rate},
                      {"failure_rate", a.failure_rate},
                      {"mean_rsnr", to_json(a.mean_rsnr)},
                      {"metrics", std::move(metrics)}});
  }
  return {{"groups", std::move(groups)}};
}

struct Manifest {
  std::string config_hash;
  std::size_t trial_rows = 0;
  std::size_t aggregate_groups = 0;
  std::vector<std::string> files;
};

inline json manifest_to_json(const Manifest& m, const CampaignConfig& cfg) {
  return {{"tool", kToolName},
          {"version", kVersion},
          {"config_hash", m.config_hash},
          {"config", config_to_json(cfg)},
          {"rows", {{"trials.csv", m.trial_rows}, {"aggregates.json", m.aggregate_groups}}},
          {"files", m.files},
          {"timer",
           {{"clock", "steady_clock"},
            {"resolution_s", clock_resolution_seconds()},
            {"processing_time_covers", "matrix construction, signal generation, measurement, recovery, metrics"}}}};
}

// Writes trials.csv, aggregates.json, manifest.json and, when archival is
// on, archive.jsonl (one {trial_id, x, x_hat} object per line).
inline Manifest write_outputs(const CampaignResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());

  Manifest manifest;
  manifest.config_hash = config_hash(result.config);
  manifest.trial_rows = result.trials.size();
  manifest.aggregate_groups = result.aggregates.size();

  write_text_file(dir / "trials.csv", trials_to_csv(result.trials));
  manifest.files.push_back("trials.csv");
  write_text_file(dir / "aggregates.json", aggregates_to_json(result).dump(2) + "\n");
  manifest.files.push_back("aggregates.json");

  bool archived = false;
  std::string archive;
  for (const auto& t : result.trials) {
    if (!t.x || !t.x_hat) continue;
    archived = true;
    const json line = {{"trial_id", t.trial_id},
                       {"x", std::vector<double>(t.x->data(), t.x->data() + t.x->size())},
                       {"x_hat", std::vector<double>(t.x_hat->data(), t.x_hat->data() + t.x_hat->size())}};
    archive += line.dump() + "\n";
  }
  if (archived) {
    write_text_file(dir / "archive.jsonl", archive);
    manifest.files.push_back("archive.jsonl");
  }
  manifest.files.push_back("manifest.json");
  write_text_file(dir / "manifest.json", manifest_to_json(manifest, result.config).dump(2) + "\n");
  return manifest;
}

}  // namespace cskit
