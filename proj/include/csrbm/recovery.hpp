#ifndef CSRBM_RECOVERY_HPP
#define CSRBM_RECOVERY_HPP

#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "csrbm/dictlearn.hpp"
#include "csrbm/rbm.hpp"
#include "csrbm/sensing.hpp"
#include "csrbm/wavelet.hpp"

namespace csrbm {

// Thrown when a candidate support cannot be scored (P factorization failure).
struct CandidateRejected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Immutable per-(Phi, dictionary, prior) bundle; whitening of Xi against the
// noise covariance is done once here and reused for every segment.
struct RecoveryModel {
  SensingOperator sensing;
  SparsifyingModel sparsifier;
  NoiseModel noise;
  Eigen::MatrixXd xi;           // M x J, Phi * D
  Eigen::MatrixXd whitened_xi;  // L^-1 Xi, so whitened_xi^T whitened_xi = Xi^T Sigma_eta^-1 Xi
  Eigen::VectorXd coeff_variances;
  std::vector<int> never_active;  // excluded from candidate atoms
  RbmModel rbm;
  int sparsity_k = 0;
};

RecoveryModel make_recovery_model(SensingOperator sensing,
                                  SparsifyingModel sparsifier, NoiseModel noise,
                                  Eigen::VectorXd coeff_variances,
                                  std::vector<int> never_active, RbmModel rbm,
                                  int sparsity_k);

// Log-posterior of a support up to theta-independent constants:
//   1/2 y^T Se^-1 Xi_t P^-1 Xi_t^T Se^-1 y - 1/2 log det(P Sigma_t)
//   + sum_j softplus(W_.j^T S + b_h,j) + b_v^T S,   P = Xi_t^T Se^-1 Xi_t + Sigma_t^-1
double support_log_posterior(const RecoveryModel& model, const Eigen::VectorXd& y,
                             const std::vector<int>& theta);

struct RecoveryOptions {
  bool parallel = true;      // OpenMP candidate scoring
  bool fast_scoring = false; // incremental Cholesky extension of P
};

struct RecoveryResult {
  std::vector<int> support;
  SparseCode code;
  Eigen::VectorXd x_hat;
  bool truncated = false;  // all remaining candidates rejected before K atoms
};

// Greedy pursuit: each iteration scores every eligible extension of the
// current support and adds the argmax (ties to the lowest index); after K
// iterations the coefficients come from the posterior mean.
RecoveryResult rbm_omp_like(const RecoveryModel& model, const Eigen::VectorXd& y,
                            const RecoveryOptions& opts = {});

// Posterior mean on a fixed support via the K x K system P s = Xi_t^T Se^-1 y.
Eigen::VectorXd map_coefficients(const RecoveryModel& model,
                                 const Eigen::VectorXd& y,
                                 const std::vector<int>& theta);

// Same quantity through the M x M system (Xi_t St Xi_t^T + Se) z = y;
// kept as an independent route for cross-checking.
Eigen::VectorXd map_coefficients_full(const RecoveryModel& model,
                                      const Eigen::VectorXd& y,
                                      const std::vector<int>& theta);

// Plain OMP on (Xi, y) baseline.
RecoveryResult omp_recover(const RecoveryModel& model, const Eigen::VectorXd& y,
                           int k);

Eigen::VectorXd reconstruct_signal(const SparsifyingModel& sparsifier,
                                   const SparseCode& code);

}  // namespace csrbm

#endif
