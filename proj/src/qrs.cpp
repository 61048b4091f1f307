#include "csrbm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace csrbm {

namespace {

// centered moving average, width w (odd not required); periodic-free,
// edges use the available window
Eigen::VectorXd moving_average(const Eigen::VectorXd& x, int w) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd out(n);
  double acc = 0.0;
  int lo = 0, hi = -1;
  for (int i = 0; i < n; ++i) {
    const int want_lo = std::max(0, i - w / 2);
    const int want_hi = std::min(n - 1, i + w / 2);
    while (hi < want_hi) acc += x(++hi);
    while (lo < want_lo) acc -= x(lo++);
    out(i) = acc / (want_hi - want_lo + 1);
  }
  return out;
}

}  // namespace

std::vector<int> detect_qrs(const Eigen::VectorXd& x, double fs) {
  const int n = static_cast<int>(x.size());
  if (fs <= 0) throw std::invalid_argument("detect_qrs: fs must be positive");
  if (n < 8) return {};

  // band-pass ~5-15 Hz from two moving-average difference filters
  const int w_lp = std::max(2, static_cast<int>(std::lround(fs / 15.0)));
  const int w_hp = std::max(3, static_cast<int>(std::lround(fs / 5.0)));
  Eigen::VectorXd lp = moving_average(x, w_lp);
  Eigen::VectorXd bp = lp - moving_average(lp, w_hp);

  // derivative, squaring, 150 ms integration
  Eigen::VectorXd deriv = Eigen::VectorXd::Zero(n);
  for (int i = 1; i < n - 1; ++i) deriv(i) = 0.5 * (bp(i + 1) - bp(i - 1));
  Eigen::VectorXd sq = deriv.array().square();
  const int w_mwi = std::max(2, static_cast<int>(std::lround(0.150 * fs)));
  Eigen::VectorXd mwi = moving_average(sq, w_mwi);

  const double mwi_max = mwi.maxCoeff();
  if (mwi_max <= 0.0) return {};

  const int refractory = static_cast<int>(std::lround(0.200 * fs));
  const int refine_w = static_cast<int>(std::lround(0.075 * fs));

  // adaptive dual thresholds seeded from the first 2 s
  const int init_len = std::min(n, static_cast<int>(std::lround(2.0 * fs)));
  double spki = 0.5 * mwi.head(init_len).maxCoeff();
  double npki = mwi.head(init_len).mean();
  if (spki <= npki) spki = 2.0 * npki + 1e-30;

  std::vector<int> peaks;
  int last_peak = -refractory - 1;
  for (int i = 1; i + 1 < n; ++i) {
    if (!(mwi(i) >= mwi(i - 1) && mwi(i) > mwi(i + 1))) continue;  // local max
    const double thr = npki + 0.25 * (spki - npki);
    if (mwi(i) > thr && i - last_peak > refractory) {
      spki = 0.125 * mwi(i) + 0.875 * spki;
      // refine to the largest band-passed deflection near the integrated peak
      int lo = std::max(0, i - refine_w);
      int hi = std::min(n - 1, i + refine_w);
      int best = lo;
      for (int j = lo + 1; j <= hi; ++j)
        if (std::abs(bp(j)) > std::abs(bp(best))) best = j;
      peaks.push_back(best);
      last_peak = i;
    } else {
      npki = 0.125 * mwi(i) + 0.875 * npki;
    }
  }
  // refinement can reorder or duplicate nearby indices
  std::sort(peaks.begin(), peaks.end());
  peaks.erase(std::unique(peaks.begin(), peaks.end()), peaks.end());
  return peaks;
}

}  // namespace csrbm
