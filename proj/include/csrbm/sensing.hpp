#ifndef CSRBM_SENSING_HPP
#define CSRBM_SENSING_HPP

#include <cstdint>
#include <Eigen/Core>

namespace csrbm {

// Dense symmetric-Bernoulli sampling matrix, entries +-1/sqrt(M).
// Regenerable from (m, n, seed); experiments persist only the triple.
struct SensingOperator {
  Eigen::MatrixXd phi;
  int m_rows = 0;
  int n_cols = 0;
  std::uint64_t seed = 0;
};

// Effective measurement-noise model: Sigma_eta = Phi diag(sigma_r^2) Phi^T + sigma_n^2 I.
// The lower Cholesky factor is computed once and reused across segments.
struct NoiseModel {
  double sigma_n_sq = 0.0;
  Eigen::VectorXd sigma_r_sq;
  Eigen::MatrixXd sigma_eta;
  Eigen::MatrixXd sigma_eta_factor;  // lower triangular, L L^T = sigma_eta
};

SensingOperator gen_bernoulli_matrix(int m, int n, std::uint64_t seed);

// y = Phi x + n, n ~ N(0, sigma_n_sq I). sigma_n_sq = 0 gives exact Phi x.
Eigen::VectorXd measure(const SensingOperator& op, const Eigen::VectorXd& x,
                        double sigma_n_sq, std::uint64_t seed);

// Floors sigma_r_sq by 1e-8 on the diagonal so Sigma_eta stays PD even when
// the dictionary fits the training data exactly.
NoiseModel build_noise_model(const SensingOperator& op,
                             const Eigen::VectorXd& sigma_r_sq,
                             double sigma_n_sq);

// (delta_f)^2 / (12 * 2^(2m)) for a uniform quantizer with m bits.
double quantization_noise_variance(double delta_f, int m_bits);

}  // namespace csrbm

#endif
