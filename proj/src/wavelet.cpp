#include "csrbm/wavelet.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace csrbm {

namespace {

// db4 orthonormal scaling filter, 8 taps, sum = sqrt(2)
constexpr double kDb4[8] = {
    0.23037781330885523,  0.7148465705525415,   0.6308807679295904,
    -0.02798376941698385, -0.18703481171888114, 0.030841381835986965,
    0.032883011666982945, -0.010597401784997278};

void check_dims(Eigen::Index n, int levels) {
  if (levels < 1) throw std::invalid_argument("dwt: levels must be >= 1");
  Eigen::Index block = n >> levels;
  if (block << levels != n || block < 1)
    throw std::invalid_argument("dwt: length must be divisible by 2^levels");
}

// one analysis step, periodic: a[i] = sum_k h[k] x[(2i+k) mod n]
void analysis_step(const Eigen::VectorXd& x, Eigen::VectorXd& approx,
                   Eigen::VectorXd& detail) {
  const Eigen::Index n = x.size();
  const Eigen::Index half = n / 2;
  approx.resize(half);
  detail.resize(half);
  for (Eigen::Index i = 0; i < half; ++i) {
    double a = 0.0, d = 0.0;
    for (int k = 0; k < 8; ++k) {
      const double xv = x((2 * i + k) % n);
      a += kDb4[k] * xv;
      // quadrature mirror: g[k] = (-1)^k h[7-k]
      d += ((k & 1) ? -kDb4[7 - k] : kDb4[7 - k]) * xv;
    }
    approx(i) = a;
    detail(i) = d;
  }
}

// adjoint of analysis_step (exact inverse by orthonormality)
Eigen::VectorXd synthesis_step(const Eigen::VectorXd& approx,
                               const Eigen::VectorXd& detail) {
  const Eigen::Index half = approx.size();
  const Eigen::Index n = 2 * half;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < half; ++i) {
    for (int k = 0; k < 8; ++k) {
      const Eigen::Index j = (2 * i + k) % n;
      const double g = (k & 1) ? -kDb4[7 - k] : kDb4[7 - k];
      x(j) += kDb4[k] * approx(i) + g * detail(i);
    }
  }
  return x;
}

}  // namespace

Eigen::VectorXd dwt_forward(const Eigen::VectorXd& x, int levels) {
  check_dims(x.size(), levels);
  Eigen::VectorXd out(x.size());
  Eigen::VectorXd cur = x, approx, detail;
  Eigen::Index pos = x.size();
  for (int lev = 1; lev <= levels; ++lev) {
    analysis_step(cur, approx, detail);
    pos -= detail.size();
    out.segment(pos, detail.size()) = detail;
    cur = approx;
  }
  out.head(cur.size()) = cur;
  return out;
}

Eigen::VectorXd dwt_inverse(const Eigen::VectorXd& coeffs, int levels) {
  check_dims(coeffs.size(), levels);
  const Eigen::Index n = coeffs.size();
  Eigen::Index block = n >> levels;
  Eigen::VectorXd cur = coeffs.head(block);
  Eigen::Index pos = block;
  for (int lev = levels; lev >= 1; --lev) {
    Eigen::VectorXd detail = coeffs.segment(pos, block);
    cur = synthesis_step(cur, detail);
    pos += block;
    block *= 2;
  }
  return cur;
}

SparsifyingModel make_wavelet_model(int n, int levels) {
  check_dims(n, levels);
  SparsifyingModel model;
  model.kind = TransformKind::wavelet;
  model.levels = levels;
  model.synthesis.resize(n, n);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    e(j) = 1.0;
    model.synthesis.col(j) = dwt_inverse(e, levels);
    e(j) = 0.0;
  }
  model.atom_norms = model.synthesis.colwise().norm();
  return model;
}

SparsifyingModel make_dictionary_model(const Eigen::MatrixXd& atoms) {
  SparsifyingModel model;
  model.kind = TransformKind::dictionary;
  model.synthesis = atoms;
  model.atom_norms = atoms.colwise().norm();
  for (int j = 0; j < model.atoms(); ++j) {
    if (std::abs(model.atom_norms(j) - 1.0) > 1e-8)
      throw std::invalid_argument("make_dictionary_model: atoms must be unit norm");
  }
  return model;
}

SparseCode top_k_sparsify(const Eigen::VectorXd& coeffs, int k) {
  const int j = static_cast<int>(coeffs.size());
  if (k < 1 || k > j) throw std::invalid_argument("top_k_sparsify: bad k");

  std::vector<int> idx(j);
  std::iota(idx.begin(), idx.end(), 0);
  // stable partial sort: equal magnitudes keep the lower index first
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::abs(coeffs(a)) > std::abs(coeffs(b));
  });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());

  SparseCode code;
  code.values = Eigen::VectorXd::Zero(j);
  code.pattern = Eigen::VectorXd::Zero(j);
  for (int i : idx) {
    if (coeffs(i) == 0.0) continue;  // keep pattern/value invariant exact
    code.values(i) = coeffs(i);
    code.pattern(i) = 1.0;
    code.support.push_back(i);
  }
  return code;
}

SparseCode make_sparse_code(const Eigen::VectorXd& dense) {
  SparseCode code;
  code.values = dense;
  code.pattern = Eigen::VectorXd::Zero(dense.size());
  for (int i = 0; i < dense.size(); ++i) {
    if (dense(i) != 0.0) {
      code.pattern(i) = 1.0;
      code.support.push_back(i);
    }
  }
  return code;
}

}  // namespace csrbm
