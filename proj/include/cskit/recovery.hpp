#pragma once

// Sparse recovery for y = A x (+ n): orthogonal matching pursuit, normalized
// iterative hard thresholding, basis pursuit by ADMM, and an exhaustive
// least-squares oracle over all supports of a given size.

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cskit/combinatorics.hpp"
#include "cskit/errors.hpp"
#include "cskit/model.hpp"
#include "cskit/timing.hpp"

namespace cskit {

enum class Solver { OMP, IHT, BasisPursuit, ExhaustiveOracle };

inline std::string_view to_string(Solver s) {
  switch (s) {
    case Solver::OMP: return "omp";
    case Solver::IHT: return "iht";
    case Solver::BasisPursuit: return "bp";
    case Solver::ExhaustiveOracle: return "oracle";
  }
  return "omp";
}

inline std::optional<Solver> parse_solver(std::string_view name) {
  if (name == "omp") return Solver::OMP;
  if (name == "iht") return Solver::IHT;
  if (name == "bp" || name == "basis_pursuit") return Solver::BasisPursuit;
  if (name == "oracle" || name == "exhaustive_oracle") return Solver::ExhaustiveOracle;
  return std::nullopt;
}

enum class IhtStep { Fixed, Normalized };

inline constexpr std::uint64_t kDefaultOracleBudget = 1'000'000;

struct RecoverySpec {
  Solver solver = Solver::OMP;
  std::optional<int> target_sparsity;
  // OMP: stop once ||y - A x|| <= residual_tol. IHT: stop once the iterate
  // moves by at most residual_tol. BP: 0 is the equality-constrained program,
  // > 0 relaxes to ||A x - y|| <= residual_tol.
  double residual_tol = 0.0;
  int max_iterations = 1000;

  IhtStep iht_step = IhtStep::Normalized;

  double feasibility_tol = 1e-6;
  double optimality_tol = 1e-6;
  double penalty = 1.0;

  std::uint64_t oracle_budget = kDefaultOracleBudget;

  static RecoverySpec defaults(Solver solver) {
    RecoverySpec s;
    s.solver = solver;
    switch (solver) {
      case Solver::OMP:
        s.residual_tol = 1e-10;
        s.max_iterations = 1000;
        break;
      case Solver::IHT:
        s.residual_tol = 1e-12;
        s.max_iterations = 3000;
        break;
      case Solver::BasisPursuit:
        s.residual_tol = 0.0;
        s.max_iterations = 5000;
        break;
      case Solver::ExhaustiveOracle:
        s.residual_tol = 0.0;
        s.max_iterations = 1;
        break;
    }
    return s;
  }

  void validate() const {
    if (max_iterations < 1) throw InvalidArgument("recovery spec: max_iterations must be >= 1");
    if (!(residual_tol >= 0.0)) throw InvalidArgument("recovery spec: residual_tol must be >= 0");
    if (target_sparsity && *target_sparsity < 1)
      throw InvalidArgument("recovery spec: target_sparsity must be positive");
    if ((solver == Solver::IHT || solver == Solver::ExhaustiveOracle) && !target_sparsity)
      throw InvalidArgument(std::string("recovery spec: ") + std::string(to_string(solver)) +
                            " requires target_sparsity");
    if (solver == Solver::OMP && !target_sparsity && residual_tol <= 0.0)
      throw InvalidArgument("recovery spec: omp needs target_sparsity or residual_tol > 0");
    if (solver == Solver::BasisPursuit &&
        !(feasibility_tol > 0.0 && optimality_tol > 0.0 && penalty > 0.0))
      throw InvalidArgument("recovery spec: basis pursuit tolerances and penalty must be positive");
  }
};

struct RecoveryResult {
  Solver solver = Solver::OMP;
  Vector x_hat;
  int iterations = 0;
  double residual_norm = 0.0;
  double recovery_time = 0.0;
  bool converged = false;
  std::vector<int> support;  // selected support for omp / oracle, nonzeros otherwise
};

inline nlohmann::json to_json(const RecoveryResult& r) {
  return {{"solver", std::string(to_string(r.solver))},
          {"x_hat", std::vector<double>(r.x_hat.data(), r.x_hat.data() + r.x_hat.size())},
          {"iterations", r.iterations},
          {"residual_norm", r.residual_norm},
          {"recovery_time_s", r.recovery_time},
          {"converged", r.converged}};
}

namespace detail {

inline void check_dims(const MeasurementMatrix& a, const Vector& y, const char* who) {
  if (y.size() != a.m())
    throw InvalidArgument(std::string(who) + ": measurement length " + std::to_string(y.size()) +
                          " does not match matrix rows " + std::to_string(a.m()));
}

// Minimum-norm least squares on a column subset. Returns the full-length
// vector and whether the subset had full column rank.
inline std::pair<Vector, bool> support_least_squares(const Matrix& a, const Vector& y,
                                                     const std::vector<int>& support) {
  Vector x = Vector::Zero(a.cols());
  if (support.empty()) return {x, true};
  Matrix sub(a.rows(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t j = 0; j < support.size(); ++j) sub.col(static_cast<Eigen::Index>(j)) = a.col(support[j]);
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(sub);
  const Vector coef = cod.solve(y);
  for (std::size_t j = 0; j < support.size(); ++j) x[support[j]] = coef[static_cast<Eigen::Index>(j)];
  return {x, cod.rank() == static_cast<Eigen::Index>(support.size())};
}

// Keeps the k largest-magnitude entries; ties go to the lower index.
inline Vector hard_threshold(const Vector& v, int k) {
  const auto n = static_cast<int>(v.size());
  if (k >= n) return v;
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&v](int i, int j) { return std::abs(v[i]) > std::abs(v[j]); });
  Vector out = Vector::Zero(n);
  for (int i = 0; i < k; ++i) out[order[static_cast<std::size_t>(i)]] = v[order[static_cast<std::size_t>(i)]];
  return out;
}

inline Vector soft_threshold(const Vector& v, double t) {
  return v.array().sign() * (v.array().abs() - t).max(0.0);
}

inline double residual(const Matrix& a, const Vector& y, const Vector& x) {
  return (y - a * x).norm();
}

}  // namespace detail

// Greedy support growth: pick the column most correlated (after column
// normalization) with the residual, refit by least squares, repeat.
// The refit is an incremental Gram-Schmidt QR of the selected columns.
inline RecoveryResult omp(const MeasurementMatrix& a, const Vector& y, const RecoverySpec& spec) {
  spec.validate();
  detail::check_dims(a, y, "omp");
  Stopwatch watch;
  const Matrix& A = a.entries();
  const Vector norms = a.column_norms();
  const int max_support = std::min(a.m(), a.n());
  const int target = spec.target_sparsity.value_or(max_support);

  RecoveryResult out;
  out.solver = Solver::OMP;
  std::vector<int> support;
  std::vector<bool> selected(static_cast<std::size_t>(a.n()), false);
  Matrix q(a.m(), 0);
  Vector r = y;
  double rnorm = r.norm();
  bool rank_deficient = false;
  bool stalled = false;

  while (out.iterations < spec.max_iterations && static_cast<int>(support.size()) < target &&
         rnorm > spec.residual_tol) {
    if (static_cast<int>(support.size()) >= a.n()) break;
    const Vector corr = A.transpose() * r;
    int best = -1;
    double best_score = -1.0;
    for (int j = 0; j < a.n(); ++j) {
      if (selected[static_cast<std::size_t>(j)] || norms[j] == 0.0) continue;
      const double score = std::abs(corr[j]) / norms[j];
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    if (best < 0 || best_score == 0.0) {
      stalled = true;
      break;
    }
    ++out.iterations;
    support.push_back(best);
    selected[static_cast<std::size_t>(best)] = true;

    // Two passes of modified Gram-Schmidt.
    Vector v = A.col(best);
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index c = 0; c < q.cols(); ++c) v -= q.col(c).dot(v) * q.col(c);
    const double vnorm = v.norm();
    if (vnorm <= 1e-12 * norms[best]) {
      rank_deficient = true;
      break;
    }
    q.conservativeResize(Eigen::NoChange, q.cols() + 1);
    q.col(q.cols() - 1) = v / vnorm;
    r = y - q * (q.transpose() * y);
    rnorm = r.norm();
  }

  std::sort(support.begin(), support.end());
  auto [x, full_rank] = detail::support_least_squares(A, y, support);
  out.x_hat = std::move(x);
  out.support = support;
  out.residual_norm = detail::residual(A, y, out.x_hat);
  const bool hit_target = static_cast<int>(support.size()) >= target;
  const bool hit_tol = out.residual_norm <= spec.residual_tol;
  out.converged = !rank_deficient && full_rank && !stalled && (hit_target || hit_tol);
  if (stalled && hit_tol) out.converged = true;
  out.recovery_time = watch.seconds();
  return out;
}

inline RecoveryResult omp(const MeasurementMatrix& a, const Measurements& y, const RecoverySpec& spec) {
  return omp(a, y.y, spec);
}

// x <- H_k(x + mu A^T (y - A x)) from x = 0. With the normalized step,
// mu = ||g_S||^2 / ||A g_S||^2 where S is the support of the current iterate
// (the full gradient when the iterate is zero or g_S vanishes).
inline RecoveryResult iht(const MeasurementMatrix& a, const Vector& y, const RecoverySpec& spec) {
  spec.validate();
  detail::check_dims(a, y, "iht");
  Stopwatch watch;
  const Matrix& A = a.entries();
  const int k = *spec.target_sparsity;

  RecoveryResult out;
  out.solver = Solver::IHT;
  Vector x = Vector::Zero(a.n());
  bool converged = false;
  int steps = 0;
  while (steps < spec.max_iterations) {
    const Vector g = A.transpose() * (y - A * x);
    if (g.squaredNorm() == 0.0) {
      converged = true;
      break;
    }
    double mu = 1.0;
    if (spec.iht_step == IhtStep::Normalized) {
      Vector gs = g;
      if (x.squaredNorm() > 0.0) {
        for (Eigen::Index i = 0; i < x.size(); ++i)
          if (x[i] == 0.0) gs[i] = 0.0;
        if (gs.squaredNorm() == 0.0) gs = g;
      }
      const double denom = (A * gs).squaredNorm();
      if (denom == 0.0) break;
      mu = gs.squaredNorm() / denom;
    }
    Vector next = detail::hard_threshold(x + mu * g, k);
    const double change = (next - x).norm();
    x = std::move(next);
    // A step that moves the iterate by no more than the tolerance only
    // confirms the fixed point; it is not counted.
    if (change <= spec.residual_tol) {
      converged = true;
      break;
    }
    ++steps;
  }
  out.iterations = steps;
  out.x_hat = std::move(x);
  out.support = support_of(out.x_hat);
  out.residual_norm = detail::residual(A, y, out.x_hat);
  out.converged = converged;
  out.recovery_time = watch.seconds();
  return out;
}

inline RecoveryResult iht(const MeasurementMatrix& a, const Measurements& y, const RecoverySpec& spec) {
  return iht(a, y.y, spec);
}

// min ||x||_1 subject to A x = y (residual_tol = 0) or ||A x - y|| <=
// residual_tol, by scaled-form ADMM with fixed penalty and no
// over-relaxation. The returned point is the constraint-side iterate.
inline RecoveryResult basis_pursuit(const MeasurementMatrix& a, const Vector& y,
                                    const RecoverySpec& spec) {
  spec.validate();
  detail::check_dims(a, y, "basis_pursuit");
  Stopwatch watch;
  const Matrix& A = a.entries();
  const auto n = A.cols();
  const double rho = spec.penalty;
  const double sqrt_n = std::sqrt(static_cast<double>(n));

  RecoveryResult out;
  out.solver = Solver::BasisPursuit;
  Vector x = Vector::Zero(n);
  Vector z = Vector::Zero(n);
  Vector u = Vector::Zero(n);
  bool converged = false;
  int it = 0;

  if (spec.residual_tol == 0.0) {
    // x-update is the projection onto {x : A x = y}.
    const Matrix pinv = Eigen::CompleteOrthogonalDecomposition<Matrix>(A).pseudoInverse();
    const Vector x_ls = pinv * y;
    const Matrix proj = Matrix::Identity(n, n) - pinv * A;
    for (it = 1; it <= spec.max_iterations; ++it) {
      x = proj * (z - u) + x_ls;
      const Vector z_old = z;
      z = detail::soft_threshold(x + u, 1.0 / rho);
      u += x - z;
      const double primal = (x - z).norm();
      const double dual = rho * (z - z_old).norm();
      const double eps_pri = sqrt_n * spec.feasibility_tol * 1e-2 +
                             spec.feasibility_tol * std::max(x.norm(), z.norm());
      const double eps_dual = sqrt_n * spec.optimality_tol * 1e-2 + spec.optimality_tol * rho * u.norm();
      if (primal <= eps_pri && dual <= eps_dual) {
        converged = true;
        break;
      }
    }
  } else {
    // Split w = A x - y constrained to the ball of radius residual_tol, and
    // z = x carrying the l1 term.
    const Matrix system = Matrix::Identity(n, n) + A.transpose() * A;
    const Eigen::LLT<Matrix> chol(system);
    Vector w = Vector::Zero(A.rows());
    Vector v = Vector::Zero(A.rows());
    const double radius = spec.residual_tol;
    for (it = 1; it <= spec.max_iterations; ++it) {
      x = chol.solve((z - u) + A.transpose() * (y + w - v));
      const Vector z_old = z;
      const Vector w_old = w;
      z = detail::soft_threshold(x + u, 1.0 / rho);
      const Vector ax = A * x - y;
      w = ax + v;
      const double wn = w.norm();
      if (wn > radius) w *= radius / wn;
      u += x - z;
      v += ax - w;
      const double primal = std::sqrt((x - z).squaredNorm() + (ax - w).squaredNorm());
      const double dual = rho * std::sqrt((z - z_old).squaredNorm() + (A.transpose() * (w - w_old)).squaredNorm());
      const double scale = std::max({x.norm(), z.norm(), y.norm()});
      const double eps_pri = sqrt_n * spec.feasibility_tol * 1e-2 + spec.feasibility_tol * scale;
      const double eps_dual = sqrt_n * spec.optimality_tol * 1e-2 +
                              spec.optimality_tol * rho * std::sqrt(u.squaredNorm() + v.squaredNorm());
      if (primal <= eps_pri && dual <= eps_dual) {
        converged = true;
        break;
      }
    }
  }
  // Polish: least squares on the support of z replaces x when it is no worse
  // in both feasibility and l1 norm.
  const auto z_support = support_of(z);
  if (!z_support.empty() && static_cast<Eigen::Index>(z_support.size()) <= A.rows()) {
    const auto [candidate, full_rank] = detail::support_least_squares(A, y, z_support);
    const double allowed = spec.residual_tol > 0.0
                               ? spec.residual_tol
                               : std::max(detail::residual(A, y, x), spec.feasibility_tol * y.norm());
    if (full_rank && detail::residual(A, y, candidate) <= allowed &&
        candidate.lpNorm<1>() <= x.lpNorm<1>())
      x = candidate;
  }
  out.iterations = std::min(it, spec.max_iterations);
  out.x_hat = std::move(x);
  out.support = support_of(out.x_hat);
  out.residual_norm = detail::residual(A, y, out.x_hat);
  out.converged = converged;
  out.recovery_time = watch.seconds();
  return out;
}

inline RecoveryResult basis_pursuit(const MeasurementMatrix& a, const Measurements& y,
                                    const RecoverySpec& spec) {
  return basis_pursuit(a, y.y, spec);
}

// Least squares on every size-k support; the smallest residual wins. Residuals
// within 1e-12 max(1, ||y||) of the current best count as ties and keep the
// lexicographically earlier support.
inline RecoveryResult exhaustive_oracle(const MeasurementMatrix& a, const Vector& y, int k,
                                        std::uint64_t budget = kDefaultOracleBudget) {
  detail::check_dims(a, y, "exhaustive_oracle");
  if (k < 1 || k > a.n())
    throw InvalidArgument("exhaustive_oracle: k must lie in [1, n], got " + std::to_string(k));
  const std::uint64_t total = binomial(static_cast<std::uint64_t>(a.n()), static_cast<std::uint64_t>(k));
  if (total > budget)
    throw BudgetExceeded("exhaustive_oracle: C(" + std::to_string(a.n()) + ", " + std::to_string(k) + ") supports",
                         total, budget);
  Stopwatch watch;
  const Matrix& A = a.entries();
  const double tie = 1e-12 * std::max(1.0, y.norm());

  RecoveryResult out;
  out.solver = Solver::ExhaustiveOracle;
  double best = std::numeric_limits<double>::infinity();
  bool best_full_rank = true;
  Combinations supports(a.n(), k);
  do {
    auto [x, full_rank] = detail::support_least_squares(A, y, supports.current());
    const double res = detail::residual(A, y, x);
    if (res < best - tie) {
      best = res;
      best_full_rank = full_rank;
      out.x_hat = std::move(x);
      out.support = supports.current();
    }
  } while (supports.next());
  out.iterations = static_cast<int>(std::min<std::uint64_t>(total, std::numeric_limits<int>::max()));
  out.residual_norm = best;
  out.converged = best_full_rank;
  out.recovery_time = watch.seconds();
  return out;
}

inline RecoveryResult exhaustive_oracle(const MeasurementMatrix& a, const Measurements& y, int k,
                                        std::uint64_t budget = kDefaultOracleBudget) {
  return exhaustive_oracle(a, y.y, k, budget);
}

inline RecoveryResult recover(const MeasurementMatrix& a, const Vector& y, const RecoverySpec& spec) {
  switch (spec.solver) {
    case Solver::OMP: return omp(a, y, spec);
    case Solver::IHT: return iht(a, y, spec);
    case Solver::BasisPursuit: return basis_pursuit(a, y, spec);
    case Solver::ExhaustiveOracle:
      spec.validate();
      return exhaustive_oracle(a, y, *spec.target_sparsity, spec.oracle_budget);
  }
  return omp(a, y, spec);
}

}  // namespace cskit
