// Timing comparison of the OpenMP kernels against their serial reference
// paths: candidate scoring inside the greedy pursuit (naive and incremental
// Cholesky variants) and the per-column sparse coding step of K-SVD.
#include <chrono>
#include <cstdio>
#include <random>

#include "csrbm/dictlearn.hpp"
#include "csrbm/recovery.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace csrbm;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   t0)
      .count();
}

Eigen::MatrixXd random_unit_atoms(int n, int j, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd d(n, j);
  for (int c = 0; c < j; ++c) {
    for (int r = 0; r < n; ++r) d(r, c) = g(rng);
    d.col(c).normalize();
  }
  return d;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not available; both paths run serially\n");
#endif

  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;

  // --- greedy pursuit candidate scoring ---
  const int n = 128, m = 40, j = 384, k = 10, segments = 10;
  auto phi = gen_bernoulli_matrix(m, n, 2);
  auto dict = make_dictionary_model(random_unit_atoms(n, j, rng));
  auto noise = build_noise_model(phi, Eigen::VectorXd::Constant(n, 0.01), 0.01);

  RbmModel rbm;
  rbm.weights = 0.1 * Eigen::MatrixXd::Random(j, 64);
  rbm.visible_bias = -2.0 * Eigen::VectorXd::Ones(j);
  rbm.hidden_bias = Eigen::VectorXd::Zero(64);

  auto model = make_recovery_model(phi, dict, noise, Eigen::VectorXd::Ones(j), {},
                                   rbm, k);

  std::vector<Eigen::VectorXd> ys;
  for (int s = 0; s < segments; ++s) {
    Eigen::VectorXd y(m);
    for (int i = 0; i < m; ++i) y(i) = g(rng);
    ys.push_back(y);
  }

  struct Variant {
    const char* name;
    RecoveryOptions opts;
  };
  const Variant variants[] = {
      {"greedy serial / naive scoring", {.parallel = false, .fast_scoring = false}},
      {"greedy openmp / naive scoring", {.parallel = true, .fast_scoring = false}},
      {"greedy serial / fast scoring", {.parallel = false, .fast_scoring = true}},
      {"greedy openmp / fast scoring", {.parallel = true, .fast_scoring = true}},
  };

  std::printf("\nrecovery: M=%d N=%d J=%d K=%d, %d segments\n", m, n, j, k, segments);
  double checksum_ref = -1;
  for (const auto& v : variants) {
    const auto t0 = std::chrono::steady_clock::now();
    double checksum = 0;
    for (const auto& y : ys) checksum += rbm_omp_like(model, y, v.opts).x_hat.sum();
    const double elapsed = ms_since(t0);
    if (checksum_ref < 0) checksum_ref = checksum;
    std::printf("  %-32s %8.1f ms  (checksum %+.6e%s)\n", v.name, elapsed, checksum,
                checksum == checksum_ref ? "" : " MISMATCH");
  }

  // --- K-SVD sparse coding ---
  const int b = 400, atoms = 256, code_k = 8;
  TrainingSet train;
  train.samples.resize(n, b);
  for (int c = 0; c < b; ++c)
    for (int r = 0; r < n; ++r) train.samples(r, c) = g(rng);

  std::printf("\nksvd: N=%d B=%d J=%d k=%d, 2 iterations\n", n, b, atoms, code_k);
  for (bool parallel : {false, true}) {
    const auto t0 = std::chrono::steady_clock::now();
    auto result = ksvd_train(train, atoms, code_k, 2, 3, parallel);
    std::printf("  coding %-25s %8.1f ms  (objective %.6f)\n",
                parallel ? "openmp" : "serial", ms_since(t0),
                result.objective_history.back());
  }
  return 0;
}
