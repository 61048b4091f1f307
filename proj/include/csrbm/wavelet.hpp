#ifndef CSRBM_WAVELET_HPP
#define CSRBM_WAVELET_HPP

#include <vector>
#include <Eigen/Core>

namespace csrbm {

enum class TransformKind { wavelet, dictionary };

// Synthesis operator: either the inverse-transform matrix of an orthonormal
// Daubechies-4 wavelet basis (J = N) or a learned overcomplete dictionary
// with unit-norm atoms.
struct SparsifyingModel {
  TransformKind kind = TransformKind::dictionary;
  Eigen::MatrixXd synthesis;  // N x J
  int levels = 0;             // wavelet kind only
  Eigen::VectorXd atom_norms;

  int signal_dim() const { return static_cast<int>(synthesis.rows()); }
  int atoms() const { return static_cast<int>(synthesis.cols()); }
};

// Sparse representation with explicit support bookkeeping.
// pattern(i) == 1  <=>  i in support  <=>  values(i) != 0
struct SparseCode {
  Eigen::VectorXd values;
  std::vector<int> support;  // ascending
  Eigen::VectorXd pattern;   // binary, length J
};

// Orthonormal db4 analysis with periodic boundary handling.
// Coefficient order: [approx level L | details level L | ... | details level 1].
Eigen::VectorXd dwt_forward(const Eigen::VectorXd& x, int levels);
Eigen::VectorXd dwt_inverse(const Eigen::VectorXd& coeffs, int levels);

// Assembles the N x N synthesis matrix column by column from dwt_inverse.
SparsifyingModel make_wavelet_model(int n, int levels);

SparsifyingModel make_dictionary_model(const Eigen::MatrixXd& atoms);

// Keeps the k largest-magnitude coefficients; ties at the cut go to the
// lower index.
SparseCode top_k_sparsify(const Eigen::VectorXd& coeffs, int k);

SparseCode make_sparse_code(const Eigen::VectorXd& dense);

}  // namespace csrbm

#endif
