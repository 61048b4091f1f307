#include "csrbm/eval.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace csrbm {

double r_snr(const Eigen::VectorXd& x, const Eigen::VectorXd& x_hat) {
  if (x.size() != x_hat.size()) throw std::invalid_argument("r_snr: length mismatch");
  const double sig = x.squaredNorm();
  if (sig == 0.0) throw std::invalid_argument("r_snr: reference signal is zero");
  const double err = (x - x_hat).squaredNorm();
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(sig / err);
}

std::vector<Eigen::VectorXd> segment(const Eigen::VectorXd& x, int n) {
  if (n < 1) throw std::invalid_argument("segment: window must be >= 1");
  std::vector<Eigen::VectorXd> out;
  const Eigen::Index count = x.size() / n;
  out.reserve(count);
  for (Eigen::Index i = 0; i < count; ++i) out.push_back(x.segment(i * n, n));
  return out;
}

Eigen::VectorXd concatenate(const std::vector<Eigen::VectorXd>& segments) {
  Eigen::Index total = 0;
  for (const auto& s : segments) total += s.size();
  Eigen::VectorXd out(total);
  Eigen::Index pos = 0;
  for (const auto& s : segments) {
    out.segment(pos, s.size()) = s;
    pos += s.size();
  }
  return out;
}

PeakMatchResult match_peaks(const std::vector<int>& ref,
                            const std::vector<int>& test, int tol) {
  PeakMatchResult r;
  std::vector<char> ref_used(ref.size(), 0);
  for (int t : test) {
    bool matched = false;
    for (size_t i = 0; i < ref.size(); ++i) {
      if (!ref_used[i] && std::abs(t - ref[i]) <= tol) {
        ref_used[i] = 1;
        matched = true;
        break;
      }
    }
    matched ? ++r.tp : ++r.fp;
  }
  for (size_t i = 0; i < ref.size(); ++i)
    if (!ref_used[i]) ++r.fn;

  r.precision = (r.tp + r.fp) > 0 ? double(r.tp) / (r.tp + r.fp)
                                  : std::numeric_limits<double>::quiet_NaN();
  r.recall = (r.tp + r.fn) > 0 ? double(r.tp) / (r.tp + r.fn)
                               : std::numeric_limits<double>::quiet_NaN();
  return r;
}

double psim(double orig_metric, double recon_metric) {
  if (orig_metric == 0.0) throw std::invalid_argument("psim: original metric is zero");
  return 100.0 - std::abs(orig_metric - recon_metric) / orig_metric * 100.0;
}

}  // namespace csrbm
