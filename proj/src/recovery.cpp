#include "csrbm/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace csrbm {

namespace {

inline double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

Eigen::VectorXd whiten(const RecoveryModel& model, const Eigen::VectorXd& y) {
  return model.noise.sigma_eta_factor.triangularView<Eigen::Lower>().solve(y);
}

}  // namespace

RecoveryModel make_recovery_model(SensingOperator sensing,
                                  SparsifyingModel sparsifier, NoiseModel noise,
                                  Eigen::VectorXd coeff_variances,
                                  std::vector<int> never_active, RbmModel rbm,
                                  int sparsity_k) {
  RecoveryModel model;
  model.xi = sensing.phi * sparsifier.synthesis;
  model.whitened_xi =
      noise.sigma_eta_factor.triangularView<Eigen::Lower>().solve(model.xi);
  model.sensing = std::move(sensing);
  model.sparsifier = std::move(sparsifier);
  model.noise = std::move(noise);
  model.coeff_variances = std::move(coeff_variances);
  model.never_active = std::move(never_active);
  model.rbm = std::move(rbm);
  model.sparsity_k = sparsity_k;
  if (model.coeff_variances.size() != model.xi.cols())
    throw std::invalid_argument("make_recovery_model: coeff_variances length mismatch");
  if (model.rbm.n_visible() != model.xi.cols())
    throw std::invalid_argument("make_recovery_model: RBM visible size != atom count");
  // atoms with zero prior variance cannot enter Sigma_theta^-1
  for (int i = 0; i < model.coeff_variances.size(); ++i) {
    if (model.coeff_variances(i) <= 0.0 &&
        std::find(model.never_active.begin(), model.never_active.end(), i) ==
            model.never_active.end())
      model.never_active.push_back(i);
  }
  std::sort(model.never_active.begin(), model.never_active.end());
  return model;
}

double support_log_posterior(const RecoveryModel& model, const Eigen::VectorXd& y,
                             const std::vector<int>& theta) {
  if (theta.empty()) throw std::invalid_argument("support_log_posterior: empty support");
  const int k = static_cast<int>(theta.size());
  const int j_atoms = static_cast<int>(model.xi.cols());

  Eigen::VectorXd pattern = Eigen::VectorXd::Zero(j_atoms);
  double log_sigma_sum = 0.0;
  Eigen::MatrixXd xw(model.whitened_xi.rows(), k);
  Eigen::VectorXd inv_var(k);
  for (int c = 0; c < k; ++c) {
    const int i = theta[c];
    if (i < 0 || i >= j_atoms)
      throw std::invalid_argument("support_log_posterior: index out of range");
    const double var = model.coeff_variances(i);
    if (var <= 0.0) throw CandidateRejected("atom has zero prior variance");
    pattern(i) = 1.0;
    log_sigma_sum += std::log(var);
    inv_var(c) = 1.0 / var;
    xw.col(c) = model.whitened_xi.col(i);
  }

  Eigen::MatrixXd p_mat = xw.transpose() * xw;
  p_mat.diagonal() += inv_var;
  Eigen::LLT<Eigen::MatrixXd> llt(p_mat);
  if (llt.info() != Eigen::Success)
    throw CandidateRejected("P factorization failed");

  Eigen::VectorXd b = xw.transpose() * whiten(model, y);
  Eigen::VectorXd z = llt.matrixL().solve(b);
  const double quad = 0.5 * z.squaredNorm();

  double log_det_p = 0.0;
  for (int c = 0; c < k; ++c) log_det_p += 2.0 * std::log(llt.matrixL()(c, c));

  return quad - 0.5 * (log_det_p + log_sigma_sum) +
         prior_log_score(model.rbm, pattern);
}

namespace {

// State shared across greedy iterations for the incremental scoring path:
// Cholesky factor of P on the current support and the forward-solved rhs.
struct GreedyState {
  Eigen::MatrixXd chol;   // lower factor of P_theta
  Eigen::VectorXd z;      // chol^-1 (Xw_theta^T yw)
  double log_det_p = 0.0;
  double log_sigma_sum = 0.0;
};

// Score theta + {cand} by extending the factor one row; O(K^2).
double score_extension(const RecoveryModel& model, const GreedyState& st,
                       const std::vector<int>& theta, int cand,
                       const Eigen::VectorXd& yw, double prior_term,
                       Eigen::VectorXd* out_l, double* out_lambda,
                       double* out_znew) {
  const int k = static_cast<int>(theta.size());
  const auto& xw = model.whitened_xi;
  const double var = model.coeff_variances(cand);

  Eigen::VectorXd cross(k);
  for (int c = 0; c < k; ++c) cross(c) = xw.col(theta[c]).dot(xw.col(cand));
  const double diag = xw.col(cand).squaredNorm() + 1.0 / var;

  Eigen::VectorXd l(k);
  if (k > 0)
    l = st.chol.topLeftCorner(k, k).triangularView<Eigen::Lower>().solve(cross);
  const double rem = diag - l.squaredNorm();
  if (rem <= 0.0 || !std::isfinite(rem))
    throw CandidateRejected("P extension not positive definite");
  const double lambda = std::sqrt(rem);

  const double b_new = xw.col(cand).dot(yw);
  const double z_new = (b_new - (k > 0 ? l.dot(st.z.head(k)) : 0.0)) / lambda;

  const double quad = 0.5 * (st.z.head(k).squaredNorm() + z_new * z_new);
  const double log_det_p = st.log_det_p + 2.0 * std::log(lambda);
  const double log_sigma_sum = st.log_sigma_sum + std::log(var);

  if (out_l) *out_l = l;
  if (out_lambda) *out_lambda = lambda;
  if (out_znew) *out_znew = z_new;
  return quad - 0.5 * (log_det_p + log_sigma_sum) + prior_term;
}

}  // namespace

RecoveryResult rbm_omp_like(const RecoveryModel& model, const Eigen::VectorXd& y,
                            const RecoveryOptions& opts) {
  const int j_atoms = static_cast<int>(model.xi.cols());
  const int k_max = std::min(model.sparsity_k, j_atoms);
  if (k_max < 1) throw std::invalid_argument("rbm_omp_like: sparsity threshold must be >= 1");

  std::vector<char> eligible(j_atoms, 1);
  for (int i : model.never_active) eligible[i] = 0;

  const Eigen::VectorXd yw = whiten(model, y);

  std::vector<int> theta;
  Eigen::VectorXd pattern = Eigen::VectorXd::Zero(j_atoms);
  // incremental prior bookkeeping: hidden activations of the current pattern
  Eigen::VectorXd hidden_act = model.rbm.hidden_bias;
  double bias_sum = 0.0;

  GreedyState st;
  st.chol.resize(k_max, k_max);
  st.z.resize(k_max);

  RecoveryResult result;

  for (int it = 0; it < k_max; ++it) {
    const int k = static_cast<int>(theta.size());
    std::vector<double> scores(j_atoms, -std::numeric_limits<double>::infinity());

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8) if (opts.parallel)
#endif
    for (int cand = 0; cand < j_atoms; ++cand) {
      if (!eligible[cand]) continue;
      // prior term for pattern + e_cand
      double prior = bias_sum + model.rbm.visible_bias(cand);
      for (int j = 0; j < model.rbm.n_hidden(); ++j)
        prior += softplus(hidden_act(j) + model.rbm.weights(cand, j));
      try {
        if (opts.fast_scoring) {
          scores[cand] =
              score_extension(model, st, theta, cand, yw, prior, nullptr, nullptr, nullptr);
        } else {
          std::vector<int> trial = theta;
          trial.push_back(cand);
          scores[cand] = support_log_posterior(model, y, trial);
        }
      } catch (const CandidateRejected&) {
        // leave -inf
      }
    }

    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int cand = 0; cand < j_atoms; ++cand) {
      if (scores[cand] > best_score) {  // strict: ties go to the lowest index
        best_score = scores[cand];
        best = cand;
      }
    }
    if (best < 0) {
      result.truncated = true;
      break;
    }

    // commit: extend the factor with the winner
    Eigen::VectorXd l;
    double lambda, z_new;
    score_extension(model, st, theta, best, yw, 0.0, &l, &lambda, &z_new);
    if (k > 0) st.chol.block(k, 0, 1, k) = l.transpose();
    st.chol(k, k) = lambda;
    st.z(k) = z_new;
    st.log_det_p += 2.0 * std::log(lambda);
    st.log_sigma_sum += std::log(model.coeff_variances(best));

    theta.push_back(best);
    eligible[best] = 0;
    pattern(best) = 1.0;
    bias_sum += model.rbm.visible_bias(best);
    hidden_act += model.rbm.weights.row(best).transpose();
  }

  result.support = theta;
  std::sort(result.support.begin(), result.support.end());

  result.code.values = Eigen::VectorXd::Zero(j_atoms);
  result.code.pattern = Eigen::VectorXd::Zero(j_atoms);
  if (!result.support.empty()) {
    Eigen::VectorXd vals = map_coefficients(model, y, result.support);
    for (size_t c = 0; c < result.support.size(); ++c) {
      const int i = result.support[c];
      result.code.values(i) = vals(static_cast<Eigen::Index>(c));
      if (vals(static_cast<Eigen::Index>(c)) != 0.0) {
        result.code.pattern(i) = 1.0;
        result.code.support.push_back(i);
      }
    }
  }
  result.x_hat = model.sparsifier.synthesis * result.code.values;
  return result;
}

Eigen::VectorXd map_coefficients(const RecoveryModel& model,
                                 const Eigen::VectorXd& y,
                                 const std::vector<int>& theta) {
  const int k = static_cast<int>(theta.size());
  if (k == 0) return Eigen::VectorXd();
  Eigen::MatrixXd xw(model.whitened_xi.rows(), k);
  Eigen::VectorXd inv_var(k);
  for (int c = 0; c < k; ++c) {
    xw.col(c) = model.whitened_xi.col(theta[c]);
    const double var = model.coeff_variances(theta[c]);
    if (var <= 0.0) throw std::invalid_argument("map_coefficients: zero prior variance atom");
    inv_var(c) = 1.0 / var;
  }
  Eigen::MatrixXd p_mat = xw.transpose() * xw;
  p_mat.diagonal() += inv_var;
  Eigen::LLT<Eigen::MatrixXd> llt(p_mat);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("map_coefficients: P solve failed");
  return llt.solve(xw.transpose() * whiten(model, y));
}

Eigen::VectorXd map_coefficients_full(const RecoveryModel& model,
                                      const Eigen::VectorXd& y,
                                      const std::vector<int>& theta) {
  const int k = static_cast<int>(theta.size());
  if (k == 0) return Eigen::VectorXd();
  Eigen::MatrixXd xi_t(model.xi.rows(), k);
  Eigen::VectorXd var(k);
  for (int c = 0; c < k; ++c) {
    xi_t.col(c) = model.xi.col(theta[c]);
    var(c) = model.coeff_variances(theta[c]);
  }
  Eigen::MatrixXd cov = xi_t * var.asDiagonal() * xi_t.transpose() + model.noise.sigma_eta;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("map_coefficients_full: SPD solve failed");
  return var.asDiagonal() * (xi_t.transpose() * llt.solve(y));
}

RecoveryResult omp_recover(const RecoveryModel& model, const Eigen::VectorXd& y,
                           int k) {
  if (k < 1) throw std::invalid_argument("omp_recover: k must be >= 1");
  const Eigen::MatrixXd& xi = model.xi;
  const int j_atoms = static_cast<int>(xi.cols());

  std::vector<int> support;
  std::vector<char> used(j_atoms, 0);
  Eigen::VectorXd residual = y;
  Eigen::VectorXd coeffs;
  const double y_norm = y.norm();

  for (int it = 0; it < k && it < j_atoms; ++it) {
    if (residual.norm() <= 1e-12 * std::max(1.0, y_norm)) break;

    Eigen::VectorXd corr = xi.transpose() * residual;
    std::vector<int> order;
    for (int i = 0; i < j_atoms; ++i)
      if (!used[i]) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      double ca = std::abs(corr(a)), cb = std::abs(corr(b));
      return ca != cb ? ca > cb : a < b;
    });

    bool added = false;
    for (int cand : order) {
      std::vector<int> trial = support;
      trial.push_back(cand);
      const int kk = static_cast<int>(trial.size());
      Eigen::MatrixXd sub(xi.rows(), kk);
      for (int c = 0; c < kk; ++c) sub.col(c) = xi.col(trial[c]);
      Eigen::LLT<Eigen::MatrixXd> llt(sub.transpose() * sub);
      if (llt.info() != Eigen::Success) continue;
      Eigen::VectorXd c = llt.solve(sub.transpose() * y);
      if (!c.allFinite()) continue;
      support = std::move(trial);
      used[cand] = 1;
      coeffs = std::move(c);
      residual = y - sub * coeffs;
      added = true;
      break;
    }
    if (!added) break;
  }

  RecoveryResult result;
  result.code.values = Eigen::VectorXd::Zero(j_atoms);
  result.code.pattern = Eigen::VectorXd::Zero(j_atoms);
  for (size_t i = 0; i < support.size(); ++i)
    result.code.values(support[i]) = coeffs(static_cast<Eigen::Index>(i));
  std::sort(support.begin(), support.end());
  result.support = support;
  for (int idx : support) {
    if (result.code.values(idx) == 0.0) continue;
    result.code.pattern(idx) = 1.0;
    result.code.support.push_back(idx);
  }
  result.x_hat = model.sparsifier.synthesis * result.code.values;
  return result;
}

Eigen::VectorXd reconstruct_signal(const SparsifyingModel& sparsifier,
                                   const SparseCode& code) {
  if (code.values.size() != sparsifier.atoms())
    throw std::invalid_argument("reconstruct_signal: code length mismatch");
  return sparsifier.synthesis * code.values;
}

}  // namespace csrbm
