#include "csrbm/wfdb.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace csrbm {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream iss(line);
  std::vector<std::string> tok;
  std::string t;
  while (iss >> t) tok.push_back(t);
  return tok;
}

[[noreturn]] void fail(int line_no, const std::string& what) {
  throw WfdbParseError("wfdb header line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

RecordMeta parse_wfdb_header(const std::string& text) {
  RecordMeta meta;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool have_record_line = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;

    auto tok = tokenize(line);
    if (tok.empty()) continue;

    if (!have_record_line) {
      if (tok.size() < 4) fail(line_no, "expected 'name n_signals fs n_samples'");
      try {
        // record name may carry a /segments suffix; keep the name part
        meta.record_name = tok[0].substr(0, tok[0].find('/'));
        meta.n_signals = std::stoi(tok[1]);
        meta.sampling_freq = std::stod(tok[2]);
        meta.n_samples = std::stol(tok[3]);
      } catch (const std::exception&) {
        fail(line_no, "malformed record line");
      }
      have_record_line = true;
      continue;
    }

    if (static_cast<int>(meta.signals.size()) >= meta.n_signals) break;

    if (tok.size() < 2) fail(line_no, "expected 'filename format ...'");
    SignalSpec spec;
    spec.filename = tok[0];
    try {
      spec.format = std::stoi(tok[1]);  // ignores rate/offset modifiers
    } catch (const std::exception&) {
      fail(line_no, "malformed format code");
    }

    bool have_baseline = false;
    if (tok.size() > 2) {
      // gain field: gain, gain(baseline), gain/units or combinations
      std::string g = tok[2];
      auto slash = g.find('/');
      if (slash != std::string::npos) g = g.substr(0, slash);
      auto paren = g.find('(');
      try {
        if (paren != std::string::npos) {
          auto close = g.find(')');
          if (close == std::string::npos || close < paren) fail(line_no, "unbalanced baseline parens");
          spec.baseline = std::stoi(g.substr(paren + 1, close - paren - 1));
          have_baseline = true;
          g = g.substr(0, paren);
        }
        double gain = g.empty() ? 0.0 : std::stod(g);
        spec.gain = gain != 0.0 ? gain : 200.0;
      } catch (const WfdbParseError&) {
        throw;
      } catch (const std::exception&) {
        fail(line_no, "malformed gain field");
      }
    }
    if (spec.gain <= 0) fail(line_no, "gain must be positive");

    try {
      if (tok.size() > 3) spec.adc_resolution = std::stoi(tok[3]);
      if (tok.size() > 4) spec.adc_zero = std::stoi(tok[4]);
    } catch (const std::exception&) {
      fail(line_no, "malformed adc fields");
    }
    if (!have_baseline) spec.baseline = spec.adc_zero;
    if (tok.size() > 8) spec.description = tok.back();

    meta.signals.push_back(spec);
  }

  if (!have_record_line) throw WfdbParseError("wfdb header: empty header");
  if (static_cast<int>(meta.signals.size()) != meta.n_signals)
    throw WfdbParseError("wfdb header: signal spec count does not match n_signals");
  return meta;
}

std::vector<std::vector<int>> decode_format212(const std::vector<std::uint8_t>& bytes,
                                               int n_signals) {
  if (bytes.size() % 3 != 0)
    throw std::invalid_argument("decode_format212: byte length not divisible by 3");
  if (n_signals < 1) throw std::invalid_argument("decode_format212: n_signals < 1");

  std::vector<int> flat;
  flat.reserve(bytes.size() / 3 * 2);
  for (size_t i = 0; i + 2 < bytes.size(); i += 3) {
    const int b0 = bytes[i], b1 = bytes[i + 1], b2 = bytes[i + 2];
    int s0 = ((b1 & 0x0F) << 8) | b0;
    int s1 = ((b1 & 0xF0) << 4) | b2;
    if (s0 >= 2048) s0 -= 4096;
    if (s1 >= 2048) s1 -= 4096;
    flat.push_back(s0);
    flat.push_back(s1);
  }

  std::vector<std::vector<int>> out(n_signals);
  for (size_t i = 0; i < flat.size(); ++i)
    out[i % n_signals].push_back(flat[i]);
  return out;
}

std::vector<std::uint8_t> encode_format212(const std::vector<int>& s0,
                                           const std::vector<int>& s1) {
  if (s0.size() != s1.size())
    throw std::invalid_argument("encode_format212: channel length mismatch");
  std::vector<std::uint8_t> bytes;
  bytes.reserve(s0.size() * 3);
  for (size_t i = 0; i < s0.size(); ++i) {
    int a = s0[i], b = s1[i];
    if (a < -2048 || a > 2047 || b < -2048 || b > 2047)
      throw std::invalid_argument("encode_format212: sample out of 12-bit range");
    const unsigned ua = static_cast<unsigned>(a & 0xFFF);
    const unsigned ub = static_cast<unsigned>(b & 0xFFF);
    bytes.push_back(static_cast<std::uint8_t>(ua & 0xFF));
    bytes.push_back(static_cast<std::uint8_t>(((ua >> 8) & 0x0F) | ((ub >> 8) << 4)));
    bytes.push_back(static_cast<std::uint8_t>(ub & 0xFF));
  }
  return bytes;
}

Eigen::VectorXd to_millivolts(const std::vector<int>& adu, const RecordMeta& meta,
                              int signal_index) {
  if (signal_index < 0 || signal_index >= static_cast<int>(meta.signals.size()))
    throw std::invalid_argument("to_millivolts: signal index out of range");
  const SignalSpec& spec = meta.signals[signal_index];
  Eigen::VectorXd mv(adu.size());
  for (size_t i = 0; i < adu.size(); ++i)
    mv(static_cast<Eigen::Index>(i)) = (adu[i] - spec.baseline) / spec.gain;
  return mv;
}

Eigen::VectorXd load_wfdb_signal(const std::string& dir, const std::string& record,
                                 int signal_index, RecordMeta* meta_out) {
  std::ifstream hea(dir + "/" + record + ".hea");
  if (!hea) throw std::runtime_error("load_wfdb_signal: cannot open " + record + ".hea");
  std::stringstream buf;
  buf << hea.rdbuf();
  RecordMeta meta = parse_wfdb_header(buf.str());

  if (signal_index < 0 || signal_index >= meta.n_signals)
    throw std::invalid_argument("load_wfdb_signal: signal index out of range");
  if (meta.signals[signal_index].format != 212)
    throw std::runtime_error("load_wfdb_signal: only format 212 is supported");

  std::ifstream dat(dir + "/" + meta.signals[signal_index].filename, std::ios::binary);
  if (!dat) throw std::runtime_error("load_wfdb_signal: cannot open data file");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(dat)),
                                  std::istreambuf_iterator<char>());
  bytes.resize(bytes.size() - bytes.size() % 3);

  auto channels = decode_format212(bytes, meta.n_signals);
  if (meta_out) *meta_out = meta;
  return to_millivolts(channels[signal_index], meta, signal_index);
}

}  // namespace csrbm
