#ifndef CSRBM_WFDB_HPP
#define CSRBM_WFDB_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace csrbm {

struct SignalSpec {
  std::string filename;
  int format = 0;
  double gain = 200.0;  // adu per mV
  int baseline = 0;
  int adc_resolution = 12;
  int adc_zero = 0;
  std::string description;
};

struct RecordMeta {
  std::string record_name;
  int n_signals = 0;
  double sampling_freq = 0.0;
  long n_samples = 0;
  std::vector<SignalSpec> signals;
};

struct WfdbParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

RecordMeta parse_wfdb_header(const std::string& text);

// PhysioNet format 212: two 12-bit two's-complement samples per 3 bytes,
// interleaved across signals.
std::vector<std::vector<int>> decode_format212(const std::vector<std::uint8_t>& bytes,
                                               int n_signals = 2);
std::vector<std::uint8_t> encode_format212(const std::vector<int>& s0,
                                           const std::vector<int>& s1);

// physical = (adu - baseline) / gain, millivolts
Eigen::VectorXd to_millivolts(const std::vector<int>& adu, const RecordMeta& meta,
                              int signal_index);

// Reads <dir>/<record>.hea and the referenced .dat, returning one mV trace.
Eigen::VectorXd load_wfdb_signal(const std::string& dir, const std::string& record,
                                 int signal_index, RecordMeta* meta_out = nullptr);

}  // namespace csrbm

#endif
