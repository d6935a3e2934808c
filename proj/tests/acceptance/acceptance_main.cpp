// Standalone acceptance run: one PASS/FAIL line per criterion, nonzero exit
// on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "cskit/cskit.hpp"

namespace {

using namespace cskit;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;
};

void fail(Outcome& o, const std::string& why) {
  if (o.pass) o.detail = why;
  o.pass = false;
}

int hardware_threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == k) return f(cur);
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
}

Outcome welch_suite() {
  Outcome o;
  const MatrixKind kinds[] = {MatrixKind::Gaussian, MatrixKind::Bernoulli, MatrixKind::PartialDCT,
                              MatrixKind::Toeplitz, MatrixKind::Circulant};
  int checked = 0;
  for (auto [m, n] : {std::pair{4, 8}, std::pair{8, 16}, std::pair{16, 32}})
    for (auto kind : kinds)
      for (std::uint64_t s = 0; s < 100; ++s) {
        const auto a = build_matrix(kind, m, n, derive_seed(1, {static_cast<std::uint64_t>(m), s}));
        const double mu = coherence(a);
        const double wb = welch_bound(m, n);
        ++checked;
        if (mu < wb - 1e-12)
          fail(o, std::string(to_string(kind)) + " " + std::to_string(m) + "x" + std::to_string(n) + " mu=" +
                      format_double(mu) + " < welch=" + format_double(wb));
      }
  if (o.pass) o.detail = std::to_string(checked) + " matrices";
  return o;
}

Outcome certifier_exactness() {
  Outcome o;
  const auto id = build_matrix(MatrixKind::Identity, 4, 4, 0);
  if (std::abs(coherence(id)) > 1e-12) fail(o, "identity coherence");
  for (int k = 1; k <= 4; ++k) {
    RipOptions opts;
    opts.method = RipMethod::Exhaustive;
    if (std::abs(rip_constant(id, k, opts).delta) > 1e-12) fail(o, "identity delta_" + std::to_string(k));
  }
  if (nsp_order(id, 4) != 2) fail(o, "identity nsp_order");

  Matrix d(3, 4);
  d << 1, 0, 1, 0.6, 0, 1, 0, 0.8, 0, 0, 0, 0;
  const MeasurementMatrix dup(d, MatrixKind::Custom);
  if (std::abs(coherence(dup) - 1.0) > 1e-12) fail(o, "duplicate coherence");
  const auto sp = spark(dup, 4);
  if (!sp.is_exact() || sp.value() != 2) fail(o, "duplicate spark");
  if (nsp_order(sp) != 0) fail(o, "duplicate nsp_order");
  if (o.pass) o.detail = "identity and duplicated-column cases exact";
  return o;
}

Outcome uniqueness_oracle() {
  Outcome o;
  int no_collision = 0, constructed = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto a = build_matrix(MatrixKind::Gaussian, 3, 6, derive_seed(3, {s}));
    const auto sp = spark(a, 4);
    if (!sp.is_exact()) {
      fail(o, "spark not exact");
      continue;
    }
    const int spark_value = sp.value();
    for (int k = 1; k <= 3; ++k) {
      if (2 * k < spark_value) {
        std::vector<Vector> vs;
        for (int kk = 1; kk <= k; ++kk)
          for_each_subset(6, kk, [&](const std::vector<int>& idx) {
            for (unsigned mask = 0; mask < (1u << kk); ++mask) {
              Vector v = Vector::Zero(6);
              for (int i = 0; i < kk; ++i) v[idx[static_cast<std::size_t>(i)]] = (mask >> i) & 1u ? 1.0 : -1.0;
              vs.push_back(v);
            }
          });
        for (std::size_t i = 0; i < vs.size(); ++i)
          for (std::size_t j = i + 1; j < vs.size(); ++j)
            if ((a.entries() * (vs[i] - vs[j])).norm() < 1e-9) fail(o, "unexpected collision");
        ++no_collision;
      } else {
        const auto subset = smallest_dependent_subset(a, 4);
        if (!subset) {
          fail(o, "no dependent subset");
          continue;
        }
        const Matrix sub = detail::select_columns(a.entries(), *subset);
        Eigen::JacobiSVD<Matrix> svd(sub, Eigen::ComputeFullV);
        const Vector h = svd.matrixV().col(sub.cols() - 1);
        const int half = static_cast<int>((subset->size() + 1) / 2);
        Vector x = Vector::Zero(6), xp = Vector::Zero(6);
        for (int i = 0; i < static_cast<int>(subset->size()); ++i)
          (i < half ? x : xp)[(*subset)[static_cast<std::size_t>(i)]] = i < half ? h[i] : -h[i];
        const bool sparse_enough = sparsity_level(x) <= k && sparsity_level(xp) <= k;
        const bool distinct = (x - xp).norm() > 0.5;
        const bool collide = (a.entries() * (x - xp)).norm() < 1e-9;
        if (sparse_enough && distinct && collide)
          ++constructed;
        else if (half <= k)
          fail(o, "collision construction failed");
      }
    }
  }
  if (o.pass) o.detail = std::to_string(no_collision) + " unique cases, " + std::to_string(constructed) + " collisions";
  return o;
}

Outcome solver_oracle() {
  Outcome o;
  int omp_ok = 0, bp_ok = 0, compared = 0;
  auto bp_spec = RecoverySpec::defaults(Solver::BasisPursuit);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto a = build_matrix(MatrixKind::Gaussian, 10, 20, derive_seed(4, {s, 1}));
    const auto x = generate_sparse_signal(20, 2, Amplitude::UnitGaussian, derive_seed(4, {s, 2}));
    const Vector y = a.entries() * x.values();
    auto omp_spec = RecoverySpec::defaults(Solver::OMP);
    omp_spec.target_sparsity = 2;
    const auto r = omp(a, y, omp_spec);
    if (recovery_error(x.values(), r.x_hat) <= 1e-6) ++omp_ok;
    const auto b = basis_pursuit(a, y, bp_spec);
    if (recovery_error(x.values(), b.x_hat) <= 1e-6) ++bp_ok;
    if (r.residual_norm <= 1e-8) {
      ++compared;
      if (r.support != exhaustive_oracle(a, y, 2).support) fail(o, "omp support differs from oracle, seed " + std::to_string(s));
    }
  }
  if (omp_ok < 45) fail(o, "omp recovered " + std::to_string(omp_ok) + "/50");
  if (bp_ok < 45) fail(o, "bp recovered " + std::to_string(bp_ok) + "/50");
  if (o.pass)
    o.detail = "omp " + std::to_string(omp_ok) + "/50, bp " + std::to_string(bp_ok) + "/50, " +
               std::to_string(compared) + " supports compared";
  return o;
}

Outcome metric_identities() {
  Outcome o;
  Rng rng(5);
  const auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
  for (int t = 0; t < 1000; ++t) {
    const int n = 2 + static_cast<int>(rng.below(100));
    Vector x(n), x_hat(n);
    const double scale = std::pow(10.0, -8 * rng.uniform());
    for (int i = 0; i < n; ++i) {
      x[i] = rng.normal();
      x_hat[i] = x[i] + scale * rng.normal();
    }
    const double r = recovery_error(x, x_hat);
    const double nx = x.norm();
    if (rel(r * r * nx * nx, n * mse(x, x_hat)) > 1e-9) fail(o, "identity A");
    const auto s = rsnr(x, x_hat);
    if (s.is_finite() && rel(s.value(), 1.0 / (r * r)) > 1e-9) fail(o, "identity B");
    const auto db = snr_db(x, x_hat);
    if (s.is_finite() && db.is_finite() && rel(db.value(), 10 * std::log10(s.value())) > 1e-9) fail(o, "identity C");
  }
  if (o.pass) o.detail = "1000 pairs";
  return o;
}

Outcome phase_sanity() {
  Outcome o;
  PhaseConfig cfg;
  cfg.n = 100;
  cfg.delta_grid = uniform_grid(0.1, 1.0, 10);
  cfg.rho_grid = uniform_grid(0.1, 1.0, 10);
  cfg.trials_per_cell = 50;
  cfg.seed = 6;
  cfg.threads = hardware_threads();
  const auto g = run_phase_diagram(cfg);
  const auto nearest = [](const std::vector<double>& grid, double v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
      if (std::abs(grid[i] - v) < std::abs(grid[best] - v)) best = i;
    return best;
  };
  const auto& easy = g.cells[nearest(cfg.delta_grid, 0.9)][nearest(cfg.rho_grid, 0.1)];
  const auto& hard = g.cells[nearest(cfg.delta_grid, 0.1)][nearest(cfg.rho_grid, 1.0)];
  if (easy.success_prob < 0.95) fail(o, "easy corner p=" + format_double(easy.success_prob));
  if (hard.success_prob > 0.05) fail(o, "hard corner p=" + format_double(hard.success_prob));
  for (const auto& column : g.cells) {
    const std::size_t half = column.size() / 2;
    double lower = 0, upper = 0;
    for (std::size_t j = 0; j < half; ++j) lower += column[j].success_prob;
    for (std::size_t j = column.size() - half; j < column.size(); ++j) upper += column[j].success_prob;
    if (upper / half > lower / half + 0.05) fail(o, "rho monotonicity at delta=" + format_double(column[0].delta));
  }
  if (o.pass) o.detail = "easy p=" + format_double(easy.success_prob) + ", hard p=" + format_double(hard.success_prob);
  return o;
}

std::string strip_timing(const std::string& csv) {
  const auto table = parse_csv_table(csv);
  std::string out;
  const auto emit = [&](const std::vector<std::string>& row) {
    bool first = true;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (is_timing_column(table.header[c])) continue;
      out += (first ? "" : ",") + row[c];
      first = false;
    }
    out += '\n';
  };
  emit(table.header);
  for (const auto& row : table.rows) emit(row);
  return out;
}

Outcome determinism() {
  Outcome o;
  const std::string doc = R"({"n":[32,48],"k":[2,5],"m":[16,24],"matrix":["gaussian","bernoulli","partial_dct",
      "toeplitz","circulant"],"solver":["omp","iht","bp"],"trials":4,"seed":42,
      "noise":{"kind":"awgn","sigma":0.01}})";
  const auto base = fs::temp_directory_path() / "cskit_acceptance_determinism";
  fs::remove_all(base);
  std::vector<std::string> runs;
  for (int threads : {1, hardware_threads(), 1}) {
    const auto cfg = parse_config(doc);
    const auto dir = base / std::to_string(runs.size());
    write_outputs(run_campaign(cfg, threads), dir);
    runs.push_back(strip_timing(read_text_file(dir / "trials.csv")));
  }
  if (runs[0] != runs[1]) fail(o, "thread count changed non-timing columns");
  if (runs[0] != runs[2]) fail(o, "repeat run changed non-timing columns");
  fs::remove_all(base);
  if (o.pass) o.detail = std::to_string(std::count(runs[0].begin(), runs[0].end(), '\n') - 1) + " rows identical";
  return o;
}

Outcome registry_fidelity() {
  Outcome o;
  using enum Process;
  const std::vector<std::pair<std::string, std::set<Process>>> expected = {
      {"Coherence", {SamplingMatrix, Recovery}},
      {"RIP", {SamplingMatrix}},
      {"NSP", {Recovery}},
      {"Sparsity", {SparseRepresentation}},
      {"Error sparsity", {SparseRepresentation}},
      {"Measurements bounds", {SamplingMatrix, Recovery}},
      {"Recovery error, MSE", {Recovery}},
      {"Correlation/covariance", {Recovery}},
      {"Recovery time", {Recovery}},
      {"Sampling time", {SamplingMatrix}},
      {"Compression ratio", {SamplingMatrix, Recovery}},
      {"Signal to error ratio", {SamplingMatrix}},
      {"Recovery SNR", {SamplingMatrix}},
      {"Recovery success rate/ Failure rate", {SamplingMatrix}},
      {"Phase transmission diagram", {SamplingMatrix}},
      {"Recovered SNR", {SamplingMatrix}},
      {"Hamming distance", {SamplingMatrix}},
      {"Complexity", {SparseRepresentation, SamplingMatrix, Recovery}},
  };
  const auto& reg = metric_registry();
  if (reg.size() != expected.size()) fail(o, "row count " + std::to_string(reg.size()));
  for (std::size_t i = 0; i < std::min(reg.size(), expected.size()); ++i)
    if (reg[i].name != expected[i].first || reg[i].processes != expected[i].second) fail(o, "row " + reg[i].name);
  const auto* c = find_metric("Coherence");
  const auto* s = find_metric("Sparsity");
  const auto* x = find_metric("Complexity");
  if (!c || c->processes != std::set<Process>{SamplingMatrix, Recovery}) fail(o, "Coherence spot check");
  if (!s || s->processes != std::set<Process>{SparseRepresentation}) fail(o, "Sparsity spot check");
  if (!x || x->processes != std::set<Process>{SparseRepresentation, SamplingMatrix, Recovery})
    fail(o, "Complexity spot check");
  if (o.pass) o.detail = "18 rows";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "welch bound suite", 5, welch_suite},
      {2, "certifier exactness", 0, certifier_exactness},
      {3, "uniqueness oracle", 30, uniqueness_oracle},
      {4, "solver-oracle equivalence", 60, solver_oracle},
      {5, "cross-metric identities", 5, metric_identities},
      {6, "phase diagram sanity", 600, phase_sanity},
      {7, "campaign determinism", 0, determinism},
      {8, "registry fidelity", 0, registry_fidelity},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    Stopwatch sw;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      fail(o, std::string("exception: ") + e.what());
    }
    const double t = sw.seconds();
    if (c.limit_s > 0 && t > c.limit_s) fail(o, "took " + format_double(t) + " s, limit " + format_double(c.limit_s));
    if (!o.pass) ++failures;
    std::printf("%s criterion %d (%s): %s [%.3f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), t);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
