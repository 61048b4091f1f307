#ifndef CSRBM_SYNTHETIC_ECG_HPP
#define CSRBM_SYNTHETIC_ECG_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace csrbm {

struct SyntheticEcgParams {
  double fs = 360.0;
  double duration_s = 60.0;
  double mean_rr_s = 0.8;
  double rr_jitter_s = 0.05;
  double qrs_amplitude = 1.0;
};

// Sum of Gaussian bumps for the P, QRS, and T waves with jittered RR
// intervals. Deterministic given seed; good enough for desk-scale tests
// without any database download. When r_peaks_out is given it receives the
// R-peak sample indices.
Eigen::VectorXd synthetic_ecg(const SyntheticEcgParams& params, std::uint64_t seed,
                              std::vector<int>* r_peaks_out = nullptr);

}  // namespace csrbm

#endif
