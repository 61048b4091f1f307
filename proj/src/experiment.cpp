#include "csrbm/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "csrbm/dictlearn.hpp"
#include "csrbm/eval.hpp"
#include "csrbm/recovery.hpp"
#include "csrbm/sensing.hpp"
#include "csrbm/synthetic_ecg.hpp"
#include "csrbm/wfdb.hpp"

namespace csrbm {

namespace {

struct SourceData {
  std::vector<std::string> names;
  std::vector<Eigen::VectorXd> signals;
  double fs = 360.0;
};

SourceData load_source(const Config& cfg) {
  SourceData src;
  const std::string source = cfg.get_string("source", "synthetic");
  if (source == "synthetic") {
    const int count = static_cast<int>(cfg.get_int("synthetic_records", 2));
    SyntheticEcgParams params;
    params.fs = cfg.get_double("fs", 360.0);
    params.duration_s = cfg.get_double("synthetic_duration_s", 60.0);
    src.fs = params.fs;
    const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
    for (int i = 0; i < count; ++i) {
      src.names.push_back("syn" + std::to_string(i));
      src.signals.push_back(synthetic_ecg(params, seed + 1000 * i));
    }
  } else if (source == "wfdb") {
    const std::string dir = cfg.get_string("data_dir");
    auto records = cfg.get_string_list("records");
    if (records.empty()) throw ConfigError("records list is empty");
    // fail before any computation if anything is missing
    for (const auto& r : records) {
      if (!std::filesystem::exists(dir + "/" + r + ".hea"))
        throw std::runtime_error("missing record header: " + dir + "/" + r + ".hea");
    }
    for (const auto& r : records) {
      RecordMeta meta;
      src.signals.push_back(load_wfdb_signal(dir, r, 0, &meta));
      src.names.push_back(r);
      src.fs = meta.sampling_freq;
    }
  } else {
    throw ConfigError("source must be 'synthetic' or 'wfdb'");
  }
  return src;
}

// overlapping windows with the configured stride from the leading portion
// of every record
TrainingSet extract_training(const SourceData& src, int n, int stride,
                             int max_segments, double train_fraction) {
  std::vector<Eigen::VectorXd> segs;
  for (const auto& x : src.signals) {
    const long train_len = static_cast<long>(train_fraction * x.size());
    for (long start = 0; start + n <= train_len; start += stride) {
      segs.push_back(x.segment(start, n));
      if (static_cast<int>(segs.size()) >= max_segments) break;
    }
    if (static_cast<int>(segs.size()) >= max_segments) break;
  }
  if (segs.empty()) throw std::runtime_error("no training segments extracted");
  TrainingSet train;
  train.samples.resize(n, segs.size());
  for (size_t i = 0; i < segs.size(); ++i)
    train.samples.col(static_cast<Eigen::Index>(i)) = segs[i];
  return train;
}

double clamp_snr(double snr) { return std::min(snr, 300.0); }

}  // namespace

ModelBundle train_from_config(const Config& cfg) {
  const int n = static_cast<int>(cfg.get_int("window", 128));
  const std::string transform = cfg.get_string("transform", "wavelet");
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));

  SourceData src = load_source(cfg);
  const int stride = static_cast<int>(cfg.get_int("train_stride", n / 4));
  const int max_train = static_cast<int>(cfg.get_int("max_train_segments", 2000));
  const double train_fraction = cfg.get_double("train_fraction", 0.5);
  TrainingSet train = extract_training(src, n, stride, max_train, train_fraction);

  ModelBundle bundle;
  Eigen::MatrixXd codes;

  if (transform == "wavelet") {
    const int levels = static_cast<int>(cfg.get_int("levels", 4));
    const int k = static_cast<int>(cfg.get_int("sparsity_k", std::max(1, n / 10)));
    bundle.sparsifier = make_wavelet_model(n, levels);
    codes.resize(n, train.count());
    for (int j = 0; j < train.count(); ++j) {
      auto code = top_k_sparsify(dwt_forward(train.samples.col(j), levels), k);
      codes.col(j) = code.values;
    }
  } else if (transform == "dictionary") {
    const int j_atoms = static_cast<int>(cfg.get_int("atoms", 3 * n));
    const int k = static_cast<int>(cfg.get_int("sparsity_k",
                                               std::max(1, static_cast<int>(0.08 * n))));
    const int iters = static_cast<int>(cfg.get_int("ksvd_iters", 30));
    auto ksvd = ksvd_train(train, j_atoms, k, iters, seed);
    bundle.sparsifier = ksvd.dict;
    codes = ksvd.codes;
  } else {
    throw ConfigError("transform must be 'wavelet' or 'dictionary'");
  }

  auto stats = compute_training_statistics(train, bundle.sparsifier, codes);
  bundle.coeff_variances = stats.coeff_variances;
  bundle.repr_error_variances = stats.repr_error_variances;

  CdHyperparams hyper;
  hyper.epochs = static_cast<int>(cfg.get_int("rbm_epochs", 50));
  hyper.learning_rate = cfg.get_double("rbm_learning_rate", 0.05);
  hyper.batch_size = static_cast<int>(cfg.get_int("rbm_batch_size", 100));
  const int n_hidden =
      static_cast<int>(cfg.get_int("hidden_units", bundle.sparsifier.atoms()));
  bundle.rbm = cd_train(stats.patterns, n_hidden, hyper, seed + 17);

  for (const auto& [k, v] : cfg.entries()) bundle.config_echo[k] = v;
  return bundle;
}

void write_csv_row(std::ostream& out, const ExperimentRow& row) {
  out << row.algorithm << ',' << row.transform << ',' << row.m_over_n << ','
      << row.repetition << ',' << row.record << ',' << row.r_snr_mean << ','
      << row.precision << ',' << row.recall << ',' << row.psim_precision << ','
      << row.psim_recall << ',' << row.wall_time_ms << '\n';
}

std::vector<ExperimentRow> run_experiment(const Config& cfg, std::ostream& csv_out) {
  const int n = static_cast<int>(cfg.get_int("window", 128));
  const double sigma_n_sq = cfg.get_double("sigma_n_sq", 0.25);
  const int repetitions = static_cast<int>(cfg.get_int("repetitions", 1));
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  auto m_over_n_list = cfg.get_double_list("m_over_n_list");
  auto algorithms = cfg.get_string_list("algorithms");
  if (algorithms.empty()) throw ConfigError("algorithms list is empty");
  for (const auto& a : algorithms)
    if (a != "rbm-omp-like" && a != "omp")
      throw ConfigError("unknown algorithm: " + a);

  SourceData src = load_source(cfg);
  ModelBundle bundle = train_from_config(cfg);
  const std::string transform = cfg.get_string("transform", "wavelet");
  const int sparsity_k =
      static_cast<int>(cfg.get_int("sparsity_k",
                                   transform == "wavelet"
                                       ? std::max(1, n / 10)
                                       : std::max(1, static_cast<int>(0.08 * n))));
  const int max_test = static_cast<int>(cfg.get_int("max_test_segments", 50));
  const double train_fraction = cfg.get_double("train_fraction", 0.5);

  auto [coeff_var, never_active] = std::pair<Eigen::VectorXd, std::vector<int>>{
      bundle.coeff_variances, {}};
  for (int i = 0; i < coeff_var.size(); ++i)
    if (coeff_var(i) <= 0.0) never_active.push_back(i);

  // non-overlapping test segments from the tail portion of every record
  std::vector<std::vector<Eigen::VectorXd>> test_segments(src.signals.size());
  for (size_t r = 0; r < src.signals.size(); ++r) {
    const auto& x = src.signals[r];
    long start = static_cast<long>(train_fraction * x.size());
    start = (start + n - 1) / n * n;  // align
    int taken = 0;
    while (start + n <= x.size() && taken < max_test) {
      test_segments[r].push_back(x.segment(start, n));
      start += n;
      ++taken;
    }
  }

  std::vector<ExperimentRow> rows;
  csv_out << kCsvHeader << '\n';

  for (const auto& algorithm : algorithms) {
    for (size_t mi = 0; mi < m_over_n_list.size(); ++mi) {
      const double m_over_n = m_over_n_list[mi];
      const int m = std::max(1, static_cast<int>(std::lround(m_over_n * n)));
      for (int rep = 0; rep < repetitions; ++rep) {
        const std::uint64_t phi_seed = seed + 100000 * (mi + 1) + rep;
        auto phi = gen_bernoulli_matrix(m, n, phi_seed);
        auto noise = build_noise_model(phi, bundle.repr_error_variances, sigma_n_sq);
        auto model = make_recovery_model(phi, bundle.sparsifier, noise, coeff_var,
                                         never_active, bundle.rbm, sparsity_k);

        for (size_t r = 0; r < src.signals.size(); ++r) {
          const auto t0 = std::chrono::steady_clock::now();
          std::vector<Eigen::VectorXd> recon;
          double snr_sum = 0.0;
          int snr_count = 0;
          for (size_t s = 0; s < test_segments[r].size(); ++s) {
            const auto& x = test_segments[r][s];
            const std::uint64_t noise_seed =
                phi_seed ^ (0x9e3779b97f4a7c15ull + 7919 * r + 31 * s);
            Eigen::VectorXd y = measure(phi, x, sigma_n_sq, noise_seed);
            RecoveryResult res = algorithm == "omp"
                                     ? omp_recover(model, y, sparsity_k)
                                     : rbm_omp_like(model, y);
            recon.push_back(res.x_hat);
            if (x.squaredNorm() > 0) {
              snr_sum += clamp_snr(r_snr(x, res.x_hat));
              ++snr_count;
            }
          }
          const auto t1 = std::chrono::steady_clock::now();

          ExperimentRow row;
          row.algorithm = algorithm;
          row.transform = transform;
          row.m_over_n = m_over_n;
          row.repetition = rep;
          row.record = src.names[r];
          row.r_snr_mean = snr_count ? snr_sum / snr_count : 0.0;

          Eigen::VectorXd orig = concatenate(test_segments[r]);
          Eigen::VectorXd rec = concatenate(recon);
          auto ref_peaks = detect_qrs(orig, src.fs);
          auto test_peaks = detect_qrs(rec, src.fs);
          auto match = match_peaks(ref_peaks, test_peaks, 4);
          row.precision = match.precision;
          row.recall = match.recall;
          // ground truth is detection on the original, so the original's own
          // precision/recall are 1
          row.psim_precision = std::isnan(match.precision) ? 0.0 : psim(1.0, match.precision);
          row.psim_recall = std::isnan(match.recall) ? 0.0 : psim(1.0, match.recall);
          row.wall_time_ms =
              std::chrono::duration<double, std::milli>(t1 - t0).count();

          write_csv_row(csv_out, row);
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

}  // namespace csrbm
