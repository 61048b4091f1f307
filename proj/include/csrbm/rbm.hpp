#ifndef CSRBM_RBM_HPP
#define CSRBM_RBM_HPP

#include <cstdint>
#include <Eigen/Core>

namespace csrbm {

// Bernoulli-Bernoulli RBM over support patterns.
struct RbmModel {
  Eigen::MatrixXd weights;      // J x P
  Eigen::VectorXd visible_bias; // length J
  Eigen::VectorXd hidden_bias;  // length P

  int n_visible() const { return static_cast<int>(visible_bias.size()); }
  int n_hidden() const { return static_cast<int>(hidden_bias.size()); }
};

struct CdHyperparams {
  double learning_rate = 0.05;
  int batch_size = 100;
  int epochs = 50;
  double momentum_early = 0.5;
  double momentum_late = 0.9;
  int momentum_switch_epoch = 5;
  double weight_decay = 1e-4;
  double weight_init_std = 0.01;
};

// E(v) = -sum_j softplus(W_.j^T v + b_h,j) - b_v^T v
double free_energy(const RbmModel& rbm, const Eigen::VectorXd& v);

// -E(v) = log p(v) + log Z; score differences are exact log-probability ratios
double prior_log_score(const RbmModel& rbm, const Eigen::VectorXd& pattern);

Eigen::VectorXd hidden_probs(const RbmModel& rbm, const Eigen::VectorXd& v);
Eigen::VectorXd visible_probs(const RbmModel& rbm, const Eigen::VectorXd& h);

// CD-1 with minibatches; deterministic given seed.
RbmModel cd_train(const Eigen::MatrixXd& patterns, int n_hidden,
                  const CdHyperparams& hyper, std::uint64_t seed);

// Brute force over all 2^J visible states, J <= 20. Test oracle.
double exact_log_partition(const RbmModel& rbm);

}  // namespace csrbm

#endif
