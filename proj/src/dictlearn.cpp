#include "csrbm/dictlearn.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace csrbm {

SparseCode omp_code(const SparsifyingModel& dict, const Eigen::VectorXd& g, int k) {
  const Eigen::MatrixXd& D = dict.synthesis;
  if (g.size() != D.rows()) throw std::invalid_argument("omp_code: sample length mismatch");
  if (k < 1) throw std::invalid_argument("omp_code: k must be >= 1");
  const int j_atoms = static_cast<int>(D.cols());

  std::vector<int> support;
  std::vector<char> used(j_atoms, 0);
  Eigen::VectorXd residual = g;
  Eigen::VectorXd coeffs;
  const double g_norm = g.norm();

  for (int it = 0; it < k && it < j_atoms; ++it) {
    if (residual.norm() <= 1e-12 * std::max(1.0, g_norm)) break;

    Eigen::VectorXd corr = D.transpose() * residual;
    // candidates ordered by |correlation|; fall through on singular fits
    std::vector<int> order;
    order.reserve(j_atoms);
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
      Eigen::MatrixXd sub(D.rows(), kk);
      for (int c = 0; c < kk; ++c) sub.col(c) = D.col(trial[c]);
      Eigen::MatrixXd gram = sub.transpose() * sub;
      Eigen::LLT<Eigen::MatrixXd> llt(gram);
      if (llt.info() != Eigen::Success) continue;
      Eigen::VectorXd c = llt.solve(sub.transpose() * g);
      if (!c.allFinite()) continue;
      support = std::move(trial);
      used[cand] = 1;
      coeffs = std::move(c);
      residual = g - sub * coeffs;
      added = true;
      break;
    }
    if (!added) break;
  }

  SparseCode code;
  code.values = Eigen::VectorXd::Zero(j_atoms);
  code.pattern = Eigen::VectorXd::Zero(j_atoms);
  for (size_t i = 0; i < support.size(); ++i) {
    code.values(support[i]) = coeffs.size() ? coeffs(static_cast<Eigen::Index>(i)) : 0.0;
  }
  std::sort(support.begin(), support.end());
  for (int idx : support) {
    if (code.values(idx) == 0.0) continue;
    code.pattern(idx) = 1.0;
    code.support.push_back(idx);
  }
  return code;
}

namespace {

double objective(const Eigen::MatrixXd& G, const Eigen::MatrixXd& D,
                 const Eigen::MatrixXd& A) {
  return (G - D * A).norm();
}

// sparse-code every column; parallel flag switches the OpenMP path, results
// are combined by column index so both paths match exactly. A column keeps
// its previous code when the greedy recode comes out worse, which makes the
// coding stage non-increasing in the objective.
void code_all(const SparsifyingModel& dict, const Eigen::MatrixXd& G, int k,
              Eigen::MatrixXd& A, bool parallel) {
  const int b = static_cast<int>(G.cols());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (int j = 0; j < b; ++j) {
    Eigen::VectorXd fresh = omp_code(dict, G.col(j), k).values;
    const double old_err = (G.col(j) - dict.synthesis * A.col(j)).squaredNorm();
    const double new_err = (G.col(j) - dict.synthesis * fresh).squaredNorm();
    if (new_err <= old_err) A.col(j) = std::move(fresh);
  }
#ifndef _OPENMP
  (void)parallel;
#endif
}

int worst_represented(const Eigen::MatrixXd& G, const Eigen::MatrixXd& D,
                      const Eigen::MatrixXd& A) {
  Eigen::VectorXd errs = (G - D * A).colwise().squaredNorm();
  int worst = 0;
  errs.maxCoeff(&worst);
  return worst;
}

}  // namespace

KsvdResult ksvd_train(const TrainingSet& train, int j_atoms, int k, int iters,
                      std::uint64_t seed, bool parallel,
                      const Eigen::MatrixXd* init_dict) {
  const Eigen::MatrixXd& G = train.samples;
  const int n = static_cast<int>(G.rows());
  const int b = static_cast<int>(G.cols());
  if (iters < 1) throw std::invalid_argument("ksvd_train: iters must be >= 1");
  if (j_atoms <= n) throw std::invalid_argument("ksvd_train: dictionary must be overcomplete (J > N)");
  if (G.norm() == 0.0) throw std::invalid_argument("ksvd_train: degenerate training set");

  // init from J distinct training columns with nonzero norm
  std::mt19937_64 rng(seed);
  std::vector<int> perm(b);
  for (int i = 0; i < b; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);

  Eigen::MatrixXd D(n, j_atoms);
  std::normal_distribution<double> gauss(0.0, 1.0);
  if (init_dict) {
    if (init_dict->rows() != n || init_dict->cols() != j_atoms)
      throw std::invalid_argument("ksvd_train: init dictionary shape mismatch");
    D = *init_dict;
    for (int c = 0; c < j_atoms; ++c) D.col(c).normalize();
  } else {
    int taken = 0;
    for (int i = 0; i < b && taken < j_atoms; ++i) {
      double nrm = G.col(perm[i]).norm();
      if (nrm > 1e-12) D.col(taken++) = G.col(perm[i]) / nrm;
    }
    while (taken < j_atoms) {  // fewer usable columns than atoms
      Eigen::VectorXd r(n);
      for (int i = 0; i < n; ++i) r(i) = gauss(rng);
      D.col(taken++) = r.normalized();
    }
  }

  SparsifyingModel dict;
  dict.kind = TransformKind::dictionary;
  dict.synthesis = D;
  dict.atom_norms = Eigen::VectorXd::Ones(j_atoms);

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(j_atoms, b);
  code_all(dict, G, k, A, parallel);

  KsvdResult result;
  result.objective_history.push_back(objective(G, dict.synthesis, A));

  for (int it = 0; it < iters; ++it) {
    const Eigen::MatrixXd prev_dict = dict.synthesis;
    const Eigen::MatrixXd prev_codes = A;
    const double prev_obj = result.objective_history.back();
    // atom-wise updates, sequential sweep
    for (int atom = 0; atom < j_atoms; ++atom) {
      std::vector<int> users;
      for (int j = 0; j < b; ++j)
        if (A(atom, j) != 0.0) users.push_back(j);

      if (users.empty()) {
        int worst = worst_represented(G, dict.synthesis, A);
        double nrm = G.col(worst).norm();
        if (nrm > 1e-12) dict.synthesis.col(atom) = G.col(worst) / nrm;
        continue;
      }

      // residual of the users without this atom's contribution
      Eigen::MatrixXd E(n, users.size());
      for (size_t c = 0; c < users.size(); ++c) {
        const int j = users[c];
        E.col(c) = G.col(j) - dict.synthesis * A.col(j) +
                   dict.synthesis.col(atom) * A(atom, j);
      }
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(E, Eigen::ComputeThinU | Eigen::ComputeThinV);
      dict.synthesis.col(atom) = svd.matrixU().col(0);
      const double s0 = svd.singularValues()(0);
      for (size_t c = 0; c < users.size(); ++c)
        A(atom, users[c]) = s0 * svd.matrixV()(static_cast<Eigen::Index>(c), 0);
    }

    // demote near-duplicate atoms
    for (int i = 0; i < j_atoms; ++i) {
      for (int j = i + 1; j < j_atoms; ++j) {
        if (std::abs(dict.synthesis.col(i).dot(dict.synthesis.col(j))) > 0.99) {
          int worst = worst_represented(G, dict.synthesis, A);
          double nrm = G.col(worst).norm();
          if (nrm > 1e-12) dict.synthesis.col(j) = G.col(worst) / nrm;
        }
      }
    }

    code_all(dict, G, k, A, parallel);

    // atom demotion can occasionally cost more than the sweep gained; reject
    // such an iteration outright so the objective never climbs
    double obj = objective(G, dict.synthesis, A);
    if (obj > prev_obj) {
      dict.synthesis = prev_dict;
      A = prev_codes;
      obj = prev_obj;
    }
    result.objective_history.push_back(obj);
  }

  dict.atom_norms = dict.synthesis.colwise().norm();
  result.dict = std::move(dict);
  result.codes = std::move(A);
  return result;
}

std::pair<Eigen::VectorXd, std::vector<int>> estimate_coeff_variances(
    const Eigen::MatrixXd& codes) {
  const int j_atoms = static_cast<int>(codes.rows());
  Eigen::VectorXd var = Eigen::VectorXd::Zero(j_atoms);
  std::vector<int> never_active;
  for (int i = 0; i < j_atoms; ++i) {
    double ssq = 0.0;
    int count = 0;
    for (int j = 0; j < codes.cols(); ++j) {
      if (codes(i, j) != 0.0) {
        ssq += codes(i, j) * codes(i, j);
        ++count;
      }
    }
    if (count == 0)
      never_active.push_back(i);
    else
      var(i) = ssq / count;
  }
  return {var, never_active};
}

Eigen::VectorXd estimate_repr_error_variances(const TrainingSet& train,
                                              const SparsifyingModel& dict,
                                              const Eigen::MatrixXd& codes) {
  Eigen::MatrixXd E = train.samples - dict.synthesis * codes;
  return E.array().square().rowwise().mean();
}

Eigen::MatrixXd extract_support_patterns(const Eigen::MatrixXd& codes) {
  return (codes.array() != 0.0).cast<double>();
}

TrainingStatistics compute_training_statistics(const TrainingSet& train,
                                               const SparsifyingModel& dict,
                                               const Eigen::MatrixXd& codes) {
  TrainingStatistics stats;
  stats.codes = codes;
  stats.patterns = extract_support_patterns(codes);
  std::tie(stats.coeff_variances, stats.never_active) = estimate_coeff_variances(codes);
  stats.repr_error_variances = estimate_repr_error_variances(train, dict, codes);
  return stats;
}

}  // namespace csrbm
