#include "csrbm/sensing.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace csrbm {

SensingOperator gen_bernoulli_matrix(int m, int n, std::uint64_t seed) {
  if (m < 1 || m > n)
    throw std::invalid_argument("gen_bernoulli_matrix: need 1 <= m <= n");

  std::mt19937_64 rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));

  SensingOperator op;
  op.phi.resize(m, n);
  op.m_rows = m;
  op.n_cols = n;
  op.seed = seed;
  // row-major fill order so the matrix is a pure function of (m, n, seed)
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      op.phi(i, j) = (rng() & 1u) ? scale : -scale;
  return op;
}

Eigen::VectorXd measure(const SensingOperator& op, const Eigen::VectorXd& x,
                        double sigma_n_sq, std::uint64_t seed) {
  if (x.size() != op.n_cols)
    throw std::invalid_argument("measure: signal length does not match sensing matrix");
  if (sigma_n_sq < 0)
    throw std::invalid_argument("measure: negative noise variance");

  Eigen::VectorXd y = op.phi * x;
  if (sigma_n_sq > 0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(sigma_n_sq));
    for (int i = 0; i < y.size(); ++i) y(i) += gauss(rng);
  }
  return y;
}

NoiseModel build_noise_model(const SensingOperator& op,
                             const Eigen::VectorXd& sigma_r_sq,
                             double sigma_n_sq) {
  if (sigma_r_sq.size() != op.n_cols)
    throw std::invalid_argument("build_noise_model: sigma_r_sq length mismatch");
  if (sigma_n_sq < 0 || (sigma_r_sq.array() < 0).any())
    throw std::invalid_argument("build_noise_model: negative variance");

  constexpr double kFloor = 1e-8;
  NoiseModel nm;
  nm.sigma_n_sq = sigma_n_sq;
  nm.sigma_r_sq = sigma_r_sq.array() + kFloor;

  const int m = op.m_rows;
  nm.sigma_eta = op.phi * nm.sigma_r_sq.asDiagonal() * op.phi.transpose();
  nm.sigma_eta.diagonal().array() += sigma_n_sq;
  // symmetrize against round-off before factoring
  nm.sigma_eta = 0.5 * (nm.sigma_eta + nm.sigma_eta.transpose()).eval();

  Eigen::LLT<Eigen::MatrixXd> llt(nm.sigma_eta);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("build_noise_model: Sigma_eta not positive definite");
  nm.sigma_eta_factor = llt.matrixL();
  (void)m;
  return nm;
}

double quantization_noise_variance(double delta_f, int m_bits) {
  if (delta_f < 0) throw std::invalid_argument("quantization_noise_variance: delta_f < 0");
  if (m_bits < 1) throw std::invalid_argument("quantization_noise_variance: m_bits < 1");
  return delta_f * delta_f / (12.0 * std::exp2(2.0 * m_bits));
}

}  // namespace csrbm
