#pragma once

// Command-line front end. Kept in a header so the test suite can drive the
// dispatcher in-process.
//
//   cskit gen      --kind K --m M --n N [--k K] [--format json|csv]
//   cskit certify  (--matrix FILE | --kind K --m M --n N) [--cap C] ...
//   cskit recover  --kind K --n N --m M --k K --solver S
//   cskit phase    [--config FILE] [--n N --points P --trials T ...]
//   cskit campaign CONFIG
//
// Global flags: --seed, --out, --threads. Exit codes: 0 success, 1 usage
// error, 2 runtime error.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cskit/cskit.hpp"

namespace cskit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

namespace detail {

inline MatrixKind require_kind(const std::string& name) {
  const auto kind = parse_matrix_kind(name);
  if (!kind || *kind == MatrixKind::Custom) throw CLI::ValidationError("--kind", "unknown matrix kind '" + name + "'");
  return *kind;
}

inline Solver require_solver(const std::string& name) {
  const auto s = parse_solver(name);
  if (!s) throw CLI::ValidationError("--solver", "unknown solver '" + name + "'");
  return *s;
}

inline Amplitude require_amplitude(const std::string& name) {
  const auto a = parse_amplitude(name);
  if (!a) throw CLI::ValidationError("--amplitude", "unknown amplitude '" + name + "'");
  return *a;
}

}  // namespace detail

inline int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compressive sensing evaluation toolkit", "cskit"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::uint64_t seed = 0;
  std::string out_dir;
  int threads = default_thread_count();
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  // gen
  auto* gen = app.add_subcommand("gen", "Write a seeded matrix (and optionally a signal) to files");
  std::string gen_kind;
  int gen_m = 0, gen_n = 0;
  std::optional<int> gen_k;
  std::string gen_format = "json";
  std::string gen_amplitude = "unit_gaussian";
  bool gen_raw = false;
  gen->add_option("--kind", gen_kind, "Matrix ensemble")->required();
  gen->add_option("--m", gen_m, "Rows")->required()->check(CLI::PositiveNumber);
  gen->add_option("--n", gen_n, "Columns")->required()->check(CLI::PositiveNumber);
  gen->add_option("--k", gen_k, "Also write a k-sparse signal")->check(CLI::NonNegativeNumber);
  gen->add_option("--amplitude", gen_amplitude, "unit_gaussian | signed_ones");
  gen->add_option("--format", gen_format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  gen->add_flag("--raw", gen_raw, "Skip column normalization");

  // certify
  auto* cert = app.add_subcommand("certify", "Certify a matrix: coherence, spark, NSP, RIP");
  std::string cert_matrix, cert_kind;
  int cert_m = 0, cert_n = 0, cert_cap = 0, cert_sparsity = 0;
  std::vector<int> cert_orders = {1, 2};
  std::string cert_method = "auto";
  std::uint64_t cert_samples = kDefaultRipSamples;
  double cert_c = 2.0;
  bool cert_raw = false;
  cert->add_option("--matrix", cert_matrix, "Matrix file (.json envelope or .csv)");
  cert->add_option("--kind", cert_kind, "Matrix ensemble");
  cert->add_option("--m", cert_m, "Rows")->check(CLI::PositiveNumber);
  cert->add_option("--n", cert_n, "Columns")->check(CLI::PositiveNumber);
  cert->add_flag("--raw", cert_raw, "Skip column normalization");
  cert->add_option("--cap", cert_cap, "Spark search cap (default: largest affordable)");
  cert->add_option("--rip-order", cert_orders, "RIP orders")->delimiter(',');
  cert->add_option("--rip-method", cert_method, "auto | exhaustive | montecarlo")
      ->check(CLI::IsMember({"auto", "exhaustive", "montecarlo"}));
  cert->add_option("--samples", cert_samples, "MonteCarlo supports");
  cert->add_option("--sparsity", cert_sparsity, "Sparsity for the measurement bound");
  cert->add_option("--c", cert_c, "Measurement-bound constant")->check(CLI::PositiveNumber);

  // recover
  auto* rec = app.add_subcommand("recover", "Run one planted instance end to end and print its metrics");
  std::string rec_kind = "gaussian", rec_solver = "omp", rec_amplitude = "unit_gaussian", rec_matrix;
  int rec_n = 0, rec_m = 0, rec_k = 1;
  double rec_sigma = 0.0, rec_threshold = kDefaultSuccessThreshold;
  rec->add_option("--kind", rec_kind, "Matrix ensemble");
  rec->add_option("--matrix", rec_matrix, "Matrix file instead of an ensemble");
  rec->add_option("--n", rec_n, "Signal length")->check(CLI::PositiveNumber);
  rec->add_option("--m", rec_m, "Measurements")->check(CLI::PositiveNumber);
  rec->add_option("--k", rec_k, "Sparsity")->check(CLI::NonNegativeNumber);
  rec->add_option("--solver", rec_solver, "omp | iht | bp | oracle");
  rec->add_option("--amplitude", rec_amplitude, "unit_gaussian | signed_ones");
  rec->add_option("--noise-sigma", rec_sigma, "AWGN standard deviation")->check(CLI::NonNegativeNumber);
  rec->add_option("--threshold", rec_threshold, "Success threshold in (0, 1]");

  // phase
  auto* ph = app.add_subcommand("phase", "Phase transition diagram to CSV and SVG");
  std::string ph_config, ph_kind, ph_solver;
  std::optional<int> ph_n, ph_points, ph_trials;
  ph->add_option("--config", ph_config, "Phase config JSON");
  ph->add_option("--n", ph_n, "Signal length")->check(CLI::PositiveNumber);
  ph->add_option("--points", ph_points, "Grid points per axis over [0.05, 1]")->check(CLI::PositiveNumber);
  ph->add_option("--trials", ph_trials, "Trials per cell")->check(CLI::PositiveNumber);
  ph->add_option("--kind", ph_kind, "Matrix ensemble");
  ph->add_option("--solver", ph_solver, "Solver");

  // campaign
  auto* camp = app.add_subcommand("campaign", "Run a Monte-Carlo campaign from a JSON config");
  std::string camp_config;
  camp->add_option("config", camp_config, "Campaign config JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      const auto kind = detail::require_kind(gen_kind);
      const std::filesystem::path dir = out_dir.empty() ? "." : out_dir;
      std::filesystem::create_directories(dir);
      const auto a = build_matrix(kind, gen_m, gen_n, derive_seed(seed, {1}), !gen_raw);
      nlohmann::json files = nlohmann::json::array();
      const auto mpath = dir / ("matrix." + gen_format);
      write_text_file(mpath, gen_format == "json" ? matrix_to_json(a).dump(2) + "\n" : matrix_to_csv(a.entries()));
      files.push_back(mpath.string());
      if (gen_k) {
        const auto x = generate_sparse_signal(gen_n, *gen_k, detail::require_amplitude(gen_amplitude),
                                              derive_seed(seed, {2}));
        const auto spath = dir / ("signal." + gen_format);
        write_text_file(spath, gen_format == "json" ? signal_to_json(x).dump(2) + "\n" : signal_to_csv(x.values()));
        files.push_back(spath.string());
      }
      out << nlohmann::json{{"files", files}, {"seed", seed}}.dump(2) << "\n";
      return kExitOk;
    }

    if (cert->parsed()) {
      std::optional<MeasurementMatrix> a;
      if (!cert_matrix.empty()) {
        a = load_matrix(cert_matrix);
      } else {
        if (cert_kind.empty() || cert_m == 0 || cert_n == 0)
          throw CLI::ValidationError("certify", "give --matrix FILE or --kind, --m and --n");
        a = build_matrix(detail::require_kind(cert_kind), cert_m, cert_n, derive_seed(seed, {1}), !cert_raw);
      }
      CertifyOptions opts;
      opts.spark_cap = cert_cap;
      opts.rip_orders = cert_orders;
      opts.rip.method = cert_method == "montecarlo" ? RipMethod::MonteCarlo : RipMethod::Exhaustive;
      if (cert_method == "exhaustive") opts.rip.budget = std::numeric_limits<std::uint64_t>::max();
      opts.rip.samples = cert_samples;
      opts.rip.seed = derive_seed(seed, {4});
      opts.sparsity = cert_sparsity;
      opts.bound_constant = cert_c;
      if (cert_method == "exhaustive") {
        for (int k : cert_orders) {
          const auto total = binomial(static_cast<std::uint64_t>(a->n()), static_cast<std::uint64_t>(std::max(k, 0)));
          if (total > kDefaultRipBudget)
            throw BudgetExceeded("certify: exhaustive RIP of order " + std::to_string(k), total, kDefaultRipBudget);
        }
      }
      out << to_json(certify(*a, opts)).dump(2) << "\n";
      return kExitOk;
    }

    if (rec->parsed()) {
      std::optional<MeasurementMatrix> a;
      if (!rec_matrix.empty()) {
        a = load_matrix(rec_matrix);
      } else {
        if (rec_n == 0) throw CLI::ValidationError("recover", "--n is required without --matrix");
        const auto kind = detail::require_kind(rec_kind);
        const int m = rec_m > 0 ? rec_m : (kind == MatrixKind::Identity ? rec_n : rec_n / 2);
        a = build_matrix(kind, m, rec_n, derive_seed(seed, {1}), true);
      }
      const auto x = generate_sparse_signal(a->n(), rec_k, detail::require_amplitude(rec_amplitude),
                                            derive_seed(seed, {2}));
      const auto y = measure(*a, x, NoiseModel::awgn(rec_sigma), derive_seed(seed, {3}));
      RecoverySpec spec = RecoverySpec::defaults(detail::require_solver(rec_solver));
      spec.target_sparsity = std::max(rec_k, 1);
      const auto result = recover(*a, y.y, spec);
      MetricTolerances tol;
      tol.success_threshold = rec_threshold;
      const auto report = compute_metrics(x, result.x_hat, y.y, a->entries() * result.x_hat, a->m(), tol);
      nlohmann::json doc = {{"instance",
                             {{"matrix_kind", std::string(to_string(a->kind()))},
                              {"m", a->m()},
                              {"n", a->n()},
                              {"k", x.k()},
                              {"seed", seed},
                              {"sampling_time_s", y.sampling_time}}},
                            {"recovery", to_json(result)},
                            {"metrics", to_json(report)},
                            {"success", report.success}};
      out << doc.dump(2) << "\n";
      return kExitOk;
    }

    if (ph->parsed()) {
      PhaseConfig cfg;
      if (!ph_config.empty()) cfg = parse_phase_config(read_text_file(ph_config));
      if (app.count("--seed") || ph_config.empty()) cfg.seed = seed;
      if (ph_n) cfg.n = *ph_n;
      if (ph_points) {
        cfg.delta_grid = uniform_grid(0.05, 1.0, *ph_points);
        cfg.rho_grid = cfg.delta_grid;
      }
      if (ph_trials) cfg.trials_per_cell = *ph_trials;
      if (!ph_kind.empty()) cfg.matrix_kind = detail::require_kind(ph_kind);
      if (!ph_solver.empty()) cfg.solver = RecoverySpec::defaults(detail::require_solver(ph_solver));
      cfg.threads = threads;
      const auto grid = run_phase_diagram(cfg);
      const std::filesystem::path dir = out_dir.empty() ? "phase_out" : out_dir;
      std::filesystem::create_directories(dir);
      write_text_file(dir / "phase.csv", phase_grid_to_csv(grid));
      write_text_file(dir / "phase.svg", phase_grid_to_svg(grid));
      nlohmann::json boundary = nlohmann::json::array();
      for (const auto& b : phase_boundary(grid)) boundary.push_back(b ? nlohmann::json(*b) : nlohmann::json(nullptr));
      out << nlohmann::json{{"csv", (dir / "phase.csv").string()},
                            {"svg", (dir / "phase.svg").string()},
                            {"boundary_rho_at_50pct", boundary}}
                 .dump(2)
          << "\n";
      return kExitOk;
    }

    if (camp->parsed()) {
      auto cfg = parse_config(read_text_file(camp_config));
      if (app.count("--seed")) cfg.seed = seed;
      if (app.count("--threads")) cfg.threads = threads;
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      const auto result = run_campaign(cfg);
      const auto manifest = write_outputs(result, cfg.output_dir);
      out << nlohmann::json{{"output_dir", cfg.output_dir},
                            {"trials", manifest.trial_rows},
                            {"groups", manifest.aggregate_groups},
                            {"config_hash", manifest.config_hash}}
                 .dump(2)
          << "\n";
      return kExitOk;
    }
  } catch (const CLI::ValidationError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace cskit::cli
