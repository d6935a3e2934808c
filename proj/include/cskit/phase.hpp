#pragma once

// Empirical phase transition diagrams: success probability of a (matrix
// ensemble, solver) pair over the plane of undersampling delta = M/N and
// relative sparsity rho = K/M.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cskit/errors.hpp"
#include "cskit/io.hpp"
#include "cskit/metrics.hpp"
#include "cskit/model.hpp"
#include "cskit/parallel.hpp"
#include "cskit/random.hpp"
#include "cskit/recovery.hpp"

namespace cskit {

struct CellParams {
  int m = 1;
  int k = 1;
  friend bool operator==(const CellParams&, const CellParams&) = default;
};

// m = clamp(round(delta n), 1, n), k = clamp(round(rho m), 1, m).
inline CellParams cell_params(double delta, double rho, int n) {
  const auto m = static_cast<int>(std::clamp<long>(std::lround(delta * n), 1L, static_cast<long>(n)));
  const auto k = static_cast<int>(std::clamp<long>(std::lround(rho * m), 1L, static_cast<long>(m)));
  return {m, k};
}

// `points` values spaced uniformly on [lo, hi].
inline std::vector<double> uniform_grid(double lo, double hi, int points) {
  if (points < 1) throw InvalidArgument("uniform_grid: need at least one point");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    g[static_cast<std::size_t>(i)] = points == 1 ? hi : lo + (hi - lo) * i / (points - 1);
  return g;
}

struct PhaseConfig {
  int n = 200;
  std::vector<double> delta_grid = uniform_grid(0.05, 1.0, 20);
  std::vector<double> rho_grid = uniform_grid(0.05, 1.0, 20);
  int trials_per_cell = 50;
  MatrixKind matrix_kind = MatrixKind::Gaussian;
  bool normalize = true;
  Amplitude amplitude = Amplitude::UnitGaussian;
  // target_sparsity is overwritten per cell with the cell's k.
  RecoverySpec solver = RecoverySpec::defaults(Solver::OMP);
  NoiseModel noise = NoiseModel::none();
  double success_threshold = kDefaultSuccessThreshold;
  std::uint64_t seed = 0;
  std::uint64_t budget = 10'000'000;  // cells x trials
  int threads = 1;

  void validate() const {
    if (n < 1) throw InvalidArgument("phase config: n must be positive");
    if (trials_per_cell < 1) throw InvalidArgument("phase config: trials_per_cell must be >= 1");
    auto check_grid = [](const std::vector<double>& g, const char* name) {
      if (g.empty()) throw InvalidArgument(std::string("phase config: ") + name + " is empty");
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(g[i] > 0.0 && g[i] <= 1.0))
          throw InvalidArgument(std::string("phase config: ") + name + " values must lie in (0, 1]");
        if (i && !(g[i] > g[i - 1]))
          throw InvalidArgument(std::string("phase config: ") + name + " must be strictly increasing");
      }
    };
    check_grid(delta_grid, "delta_grid");
    check_grid(rho_grid, "rho_grid");
    if (!(success_threshold > 0.0 && success_threshold <= 1.0))
      throw InvalidArgument("phase config: success_threshold must lie in (0, 1]");
  }
};

struct PhaseCell {
  double delta = 0.0;
  double rho = 0.0;
  int m = 0;
  int k = 0;
  int successes = 0;
  int trials = 0;
  double success_prob = 0.0;
  double mean_recovery_time = 0.0;
};

struct PhaseGrid {
  PhaseConfig config;
  // cells[i][j] is (delta_grid[i], rho_grid[j]).
  std::vector<std::vector<PhaseCell>> cells;
};

struct PhaseTrial {
  bool success = false;
  double recovery_time = 0.0;
};

// One phase-diagram experiment at (m, k) with its position-derived seed.
inline PhaseTrial run_phase_trial(const PhaseConfig& cfg, int m, int k, std::uint64_t trial_seed) {
  const auto a = build_matrix(cfg.matrix_kind, m, cfg.n, derive_seed(trial_seed, {1}), cfg.normalize);
  const auto x = generate_sparse_signal(cfg.n, k, cfg.amplitude, derive_seed(trial_seed, {2}));
  const auto y = measure(a, x, cfg.noise, derive_seed(trial_seed, {3}));
  RecoverySpec spec = cfg.solver;
  spec.target_sparsity = k;
  const auto result = recover(a, y.y, spec);
  return {is_success(x.values(), result.x_hat, cfg.success_threshold), result.recovery_time};
}

inline PhaseGrid run_phase_diagram(const PhaseConfig& cfg) {
  cfg.validate();
  if (cfg.matrix_kind == MatrixKind::Identity || cfg.matrix_kind == MatrixKind::Custom)
    throw InvalidArgument("phase diagram: matrix kind must be a compressive random ensemble");
  const std::size_t rows = cfg.delta_grid.size();
  const std::size_t cols = cfg.rho_grid.size();
  const auto trials = static_cast<std::size_t>(cfg.trials_per_cell);
  const std::uint64_t work = static_cast<std::uint64_t>(rows * cols) * trials;
  if (work > cfg.budget) throw BudgetExceeded("phase diagram: cells x trials", work, cfg.budget);

  PhaseGrid grid;
  grid.config = cfg;
  grid.cells.assign(rows, std::vector<PhaseCell>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      auto& c = grid.cells[i][j];
      c.delta = cfg.delta_grid[i];
      c.rho = cfg.rho_grid[j];
      const auto p = cell_params(c.delta, c.rho, cfg.n);
      c.m = p.m;
      c.k = p.k;
      c.trials = cfg.trials_per_cell;
    }
  }

  std::vector<PhaseTrial> slots(rows * cols * trials);
  parallel_for(slots.size(), cfg.threads, [&](std::size_t idx) {
    const std::size_t t = idx % trials;
    const std::size_t cell = idx / trials;
    const std::size_t i = cell / cols;
    const std::size_t j = cell % cols;
    const auto& c = grid.cells[i][j];
    slots[idx] = run_phase_trial(cfg, c.m, c.k, derive_seed(cfg.seed, {i, j, t}));
  });

  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      auto& c = grid.cells[i][j];
      double time = 0.0;
      for (std::size_t t = 0; t < trials; ++t) {
        const auto& s = slots[(i * cols + j) * trials + t];
        c.successes += s.success ? 1 : 0;
        time += s.recovery_time;
      }
      c.success_prob = static_cast<double>(c.successes) / c.trials;
      c.mean_recovery_time = time / c.trials;
    }
  }
  return grid;
}

inline std::string phase_grid_to_csv(const PhaseGrid& g) {
  std::string out = "delta,rho,m,k,trials,successes,success_prob,mean_recovery_time_s\n";
  for (const auto& row : g.cells)
    for (const auto& c : row)
      out += format_double(c.delta) + ',' + format_double(c.rho) + ',' + std::to_string(c.m) + ',' +
             std::to_string(c.k) + ',' + std::to_string(c.trials) + ',' + std::to_string(c.successes) + ',' +
             format_double(c.success_prob) + ',' + format_double(c.mean_recovery_time) + '\n';
  return out;
}

// For each delta column, the rho at which success probability first drops
// through `level`, by linear interpolation between neighbouring rho points.
// Empty when the column never crosses.
inline std::vector<std::optional<double>> phase_boundary(const PhaseGrid& g, double level = 0.5) {
  std::vector<std::optional<double>> out;
  for (const auto& row : g.cells) {
    std::optional<double> hit;
    for (std::size_t j = 0; j + 1 < row.size() && !hit; ++j) {
      const double p0 = row[j].success_prob;
      const double p1 = row[j + 1].success_prob;
      if (p0 >= level && p1 < level) {
        const double t = (p0 - level) / (p0 - p1);
        hit = row[j].rho + t * (row[j + 1].rho - row[j].rho);
      }
    }
    out.push_back(hit);
  }
  return out;
}

// Two-color ramp: failure (success_prob 0) #b2182b to success (1) #2166ac,
// linear in RGB.
inline std::string ramp_color(double p) {
  p = std::clamp(p, 0.0, 1.0);
  const auto mix = [p](int lo, int hi) { return static_cast<int>(std::lround(lo + (hi - lo) * p)); };
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", mix(0xb2, 0x21), mix(0x18, 0x66), mix(0x2b, 0xac));
  return buf;
}

// Heatmap with delta on the horizontal axis and rho on the vertical axis
// (increasing upward).
inline std::string phase_grid_to_svg(const PhaseGrid& g) {
  const std::size_t rows = g.cells.size();
  const std::size_t cols = rows ? g.cells.front().size() : 0;
  constexpr int cell = 24;
  constexpr int margin = 60;
  const int width = margin * 2 + static_cast<int>(rows) * cell;
  const int height = margin * 2 + static_cast<int>(cols) * cell;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  svg << "<title>phase transition: " << to_string(g.config.matrix_kind) << " + "
      << to_string(g.config.solver.solver) << ", n=" << g.config.n << "</title>\n";
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const auto& c = g.cells[i][j];
      const int x = margin + static_cast<int>(i) * cell;
      const int y = margin + static_cast<int>(cols - 1 - j) * cell;
      svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
          << "\" fill=\"" << ramp_color(c.success_prob) << "\"><title>delta=" << format_double(c.delta)
          << " rho=" << format_double(c.rho) << " p=" << format_double(c.success_prob)
          << "</title></rect>\n";
    }
  }
  svg << "<text x=\"" << width / 2 << "\" y=\"" << height - margin / 3
      << "\" text-anchor=\"middle\">delta = M/N</text>\n";
  svg << "<text x=\"" << margin / 3 << "\" y=\"" << height / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 "
      << margin / 3 << ' ' << height / 2 << ")\">rho = K/M</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace cskit
