#include "csrbm/synthetic_ecg.hpp"

#include <cmath>
#include <random>

namespace csrbm {

namespace {

void add_bump(Eigen::VectorXd& x, double center, double width, double amp,
              double fs) {
  const int n = static_cast<int>(x.size());
  const int lo = std::max(0, static_cast<int>((center - 4 * width) * fs));
  const int hi = std::min(n - 1, static_cast<int>((center + 4 * width) * fs));
  for (int i = lo; i <= hi; ++i) {
    const double t = i / fs - center;
    x(i) += amp * std::exp(-t * t / (2 * width * width));
  }
}

}  // namespace

Eigen::VectorXd synthetic_ecg(const SyntheticEcgParams& params, std::uint64_t seed,
                              std::vector<int>* r_peaks_out) {
  const int n = static_cast<int>(params.duration_s * params.fs);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-params.rr_jitter_s, params.rr_jitter_s);

  if (r_peaks_out) r_peaks_out->clear();
  double t = 0.4;
  while (t < params.duration_s - 0.4) {
    if (r_peaks_out) r_peaks_out->push_back(static_cast<int>(std::lround(t * params.fs)));
    // P wave, QRS, T wave relative to the R peak at t
    add_bump(x, t - 0.16, 0.025, 0.15 * params.qrs_amplitude, params.fs);
    add_bump(x, t, 0.012, params.qrs_amplitude, params.fs);
    add_bump(x, t + 0.04, 0.018, -0.2 * params.qrs_amplitude, params.fs);
    add_bump(x, t + 0.25, 0.05, 0.3 * params.qrs_amplitude, params.fs);
    t += params.mean_rr_s + jitter(rng);
  }
  return x;
}

}  // namespace csrbm
