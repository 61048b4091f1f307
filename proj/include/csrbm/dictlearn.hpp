#ifndef CSRBM_DICTLEARN_HPP
#define CSRBM_DICTLEARN_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "csrbm/wavelet.hpp"

namespace csrbm {

struct TrainingSet {
  Eigen::MatrixXd samples;  // N x B, one segment per column
  int count() const { return static_cast<int>(samples.cols()); }
};

// Everything the prior needs from the training run.
struct TrainingStatistics {
  Eigen::MatrixXd codes;                 // J x B
  Eigen::MatrixXd patterns;              // J x B binary
  Eigen::VectorXd coeff_variances;       // length J
  Eigen::VectorXd repr_error_variances;  // length N
  std::vector<int> never_active;         // atoms with zero activations
};

// Greedy OMP with least-squares refit on the selected support each
// iteration. Stops after k atoms or when the residual is negligible.
SparseCode omp_code(const SparsifyingModel& dict, const Eigen::VectorXd& g, int k);

struct KsvdResult {
  SparsifyingModel dict;
  Eigen::MatrixXd codes;                  // J x B
  std::vector<double> objective_history;  // ||G - DA||_F per iteration, [0] = initial
};

// K-SVD: alternate OMP coding of all columns with atom-wise rank-1 SVD
// updates. Atom init: J distinct training columns, normalized. Unused or
// near-duplicate atoms (|<di,dj>| > 0.99) are replaced by the worst
// represented sample.
KsvdResult ksvd_train(const TrainingSet& train, int j_atoms, int k, int iters,
                      std::uint64_t seed, bool parallel = true,
                      const Eigen::MatrixXd* init_dict = nullptr);

// sigma_s_i^2 = sum of squared activations / activation count; atoms never
// activated get variance 0 and go to the never_active list.
std::pair<Eigen::VectorXd, std::vector<int>> estimate_coeff_variances(
    const Eigen::MatrixXd& codes);

// per-coordinate mean square of E = G - D A
Eigen::VectorXd estimate_repr_error_variances(const TrainingSet& train,
                                              const SparsifyingModel& dict,
                                              const Eigen::MatrixXd& codes);

Eigen::MatrixXd extract_support_patterns(const Eigen::MatrixXd& codes);

TrainingStatistics compute_training_statistics(const TrainingSet& train,
                                               const SparsifyingModel& dict,
                                               const Eigen::MatrixXd& codes);

}  // namespace csrbm

#endif
