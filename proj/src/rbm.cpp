#include "csrbm/rbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <stdexcept>
#include <vector>

namespace csrbm {

namespace {

inline double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

inline double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

void check_binary(const Eigen::VectorXd& v, const char* who) {
  for (int i = 0; i < v.size(); ++i)
    if (v(i) != 0.0 && v(i) != 1.0)
      throw std::invalid_argument(std::string(who) + ": input must be binary");
}

}  // namespace

double free_energy(const RbmModel& rbm, const Eigen::VectorXd& v) {
  check_binary(v, "free_energy");
  Eigen::VectorXd act = rbm.weights.transpose() * v + rbm.hidden_bias;
  double e = -rbm.visible_bias.dot(v);
  for (int j = 0; j < act.size(); ++j) e -= softplus(act(j));
  return e;
}

double prior_log_score(const RbmModel& rbm, const Eigen::VectorXd& pattern) {
  return -free_energy(rbm, pattern);
}

Eigen::VectorXd hidden_probs(const RbmModel& rbm, const Eigen::VectorXd& v) {
  check_binary(v, "hidden_probs");
  Eigen::VectorXd act = rbm.weights.transpose() * v + rbm.hidden_bias;
  for (int j = 0; j < act.size(); ++j) act(j) = sigmoid(act(j));
  return act;
}

Eigen::VectorXd visible_probs(const RbmModel& rbm, const Eigen::VectorXd& h) {
  check_binary(h, "visible_probs");
  Eigen::VectorXd act = rbm.weights * h + rbm.visible_bias;
  for (int i = 0; i < act.size(); ++i) act(i) = sigmoid(act(i));
  return act;
}

RbmModel cd_train(const Eigen::MatrixXd& patterns, int n_hidden,
                  const CdHyperparams& hyper, std::uint64_t seed) {
  const int j_vis = static_cast<int>(patterns.rows());
  const int b = static_cast<int>(patterns.cols());
  if (b < 1 || n_hidden < 1) throw std::invalid_argument("cd_train: empty data or no hidden units");
  if (((patterns.array() != 0.0) && (patterns.array() != 1.0)).any())
    throw std::invalid_argument("cd_train: patterns must be binary");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, hyper.weight_init_std);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  RbmModel rbm;
  rbm.weights.resize(j_vis, n_hidden);
  for (int i = 0; i < j_vis; ++i)
    for (int j = 0; j < n_hidden; ++j) rbm.weights(i, j) = gauss(rng);
  rbm.hidden_bias = Eigen::VectorXd::Zero(n_hidden);

  // visible bias from empirical activation log-odds, clamped away from 0/1
  rbm.visible_bias.resize(j_vis);
  for (int i = 0; i < j_vis; ++i) {
    double p = patterns.row(i).mean();
    p = std::clamp(p, 1.0 / b, 1.0 - 1.0 / b);
    rbm.visible_bias(i) = std::log(p / (1.0 - p));
  }

  Eigen::MatrixXd w_mom = Eigen::MatrixXd::Zero(j_vis, n_hidden);
  Eigen::VectorXd bv_mom = Eigen::VectorXd::Zero(j_vis);
  Eigen::VectorXd bh_mom = Eigen::VectorXd::Zero(n_hidden);

  std::vector<int> order(b);
  for (int i = 0; i < b; ++i) order[i] = i;

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    const double momentum = epoch < hyper.momentum_switch_epoch
                                ? hyper.momentum_early
                                : hyper.momentum_late;
    std::shuffle(order.begin(), order.end(), rng);

    for (int start = 0; start < b; start += hyper.batch_size) {
      const int bs = std::min(hyper.batch_size, b - start);
      Eigen::MatrixXd w_grad = Eigen::MatrixXd::Zero(j_vis, n_hidden);
      Eigen::VectorXd bv_grad = Eigen::VectorXd::Zero(j_vis);
      Eigen::VectorXd bh_grad = Eigen::VectorXd::Zero(n_hidden);

      for (int t = 0; t < bs; ++t) {
        Eigen::VectorXd v0 = patterns.col(order[start + t]);
        Eigen::VectorXd ph0 = hidden_probs(rbm, v0);

        Eigen::VectorXd h0(n_hidden);
        for (int j = 0; j < n_hidden; ++j) h0(j) = unif(rng) < ph0(j) ? 1.0 : 0.0;

        Eigen::VectorXd pv1 = visible_probs(rbm, h0);
        Eigen::VectorXd v1(j_vis);
        for (int i = 0; i < j_vis; ++i) v1(i) = unif(rng) < pv1(i) ? 1.0 : 0.0;
        Eigen::VectorXd ph1 = hidden_probs(rbm, v1);

        w_grad.noalias() += v0 * ph0.transpose() - v1 * ph1.transpose();
        bv_grad += v0 - v1;
        bh_grad += ph0 - ph1;
      }

      const double lr = hyper.learning_rate / bs;
      w_mom = momentum * w_mom + lr * (w_grad - hyper.weight_decay * bs * rbm.weights);
      bv_mom = momentum * bv_mom + lr * bv_grad;
      bh_mom = momentum * bh_mom + lr * bh_grad;
      rbm.weights += w_mom;
      rbm.visible_bias += bv_mom;
      rbm.hidden_bias += bh_mom;
    }
  }

  if (!rbm.weights.allFinite() || !rbm.visible_bias.allFinite() ||
      !rbm.hidden_bias.allFinite())
    throw std::runtime_error("cd_train: parameters diverged");
  return rbm;
}

double exact_log_partition(const RbmModel& rbm) {
  const int j_vis = rbm.n_visible();
  if (j_vis > 20) throw std::invalid_argument("exact_log_partition: J > 20 refused");

  // stable log-sum-exp over all 2^J states
  const std::uint64_t states = 1ull << j_vis;
  double max_neg_e = -std::numeric_limits<double>::infinity();
  std::vector<double> neg_e(states);
  Eigen::VectorXd v(j_vis);
  for (std::uint64_t s = 0; s < states; ++s) {
    for (int i = 0; i < j_vis; ++i) v(i) = (s >> i) & 1ull ? 1.0 : 0.0;
    neg_e[s] = -free_energy(rbm, v);
    max_neg_e = std::max(max_neg_e, neg_e[s]);
  }
  double sum = 0.0;
  for (std::uint64_t s = 0; s < states; ++s) sum += std::exp(neg_e[s] - max_neg_e);
  return max_neg_e + std::log(sum);
}

}  // namespace csrbm
