#ifndef CSRBM_EVAL_HPP
#define CSRBM_EVAL_HPP

#include <vector>
#include <Eigen/Core>

namespace csrbm {

struct PeakMatchResult {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  double precision = 0.0;  // NaN when TP+FP == 0
  double recall = 0.0;     // NaN when TP+FN == 0
};

// 10 log10(||x||^2 / ||x - x_hat||^2); +inf when x_hat == x exactly.
double r_snr(const Eigen::VectorXd& x, const Eigen::VectorXd& x_hat);

// Non-overlapping windows; a trailing remainder shorter than n is dropped.
std::vector<Eigen::VectorXd> segment(const Eigen::VectorXd& x, int n);
Eigen::VectorXd concatenate(const std::vector<Eigen::VectorXd>& segments);

// Pan-Tompkins style R-peak detector: band-pass difference filters,
// derivative, squaring, 150 ms moving-window integration, adaptive dual
// thresholds with a 200 ms refractory period.
std::vector<int> detect_qrs(const Eigen::VectorXd& x, double fs);

// Greedy one-to-one matching in index order; a test peak within +-tol
// samples of an unmatched reference peak counts as TP.
PeakMatchResult match_peaks(const std::vector<int>& ref,
                            const std::vector<int>& test, int tol = 4);

// PSim = 100 - |orig - recon| / orig * 100; may be negative.
double psim(double orig_metric, double recon_metric);

}  // namespace csrbm

#endif
