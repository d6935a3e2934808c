// Plants a sparse signal, measures it with a Gaussian matrix, recovers it with
// each solver, and prints the certification report and per-solver metrics.

#include <iostream>

#include "cskit/cskit.hpp"

int main() {
  using namespace cskit;
  constexpr int n = 64;
  constexpr int m = 32;
  constexpr int k = 4;
  constexpr std::uint64_t seed = 2024;

  const auto a = build_matrix(MatrixKind::Gaussian, m, n, derive_seed(seed, {1}));
  const auto x = generate_sparse_signal(n, k, Amplitude::UnitGaussian, derive_seed(seed, {2}));
  const auto y = measure(a, x, NoiseModel::none(), derive_seed(seed, {3}));

  CertifyOptions copts;
  copts.spark_cap = 3;
  copts.rip_orders = {1, 2, 2 * k};
  copts.rip.method = RipMethod::MonteCarlo;
  copts.sparsity = k;
  std::cout << "certification: " << to_json(certify(a, copts)).dump() << "\n";

  for (auto solver : {Solver::OMP, Solver::IHT, Solver::BasisPursuit}) {
    auto spec = RecoverySpec::defaults(solver);
    spec.target_sparsity = k;
    const auto r = recover(a, y.y, spec);
    const auto report = compute_metrics(x, r.x_hat, y.y, a.entries() * r.x_hat, m);
    std::cout << to_string(solver) << ": iterations=" << r.iterations << " time=" << r.recovery_time
              << "s metrics=" << to_json(report).dump() << "\n";
  }
}
