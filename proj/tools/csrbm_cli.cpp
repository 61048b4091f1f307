#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "csrbm/config.hpp"
#include "csrbm/dictlearn.hpp"
#include "csrbm/eval.hpp"
#include "csrbm/experiment.hpp"
#include "csrbm/model_io.hpp"
#include "csrbm/recovery.hpp"
#include "csrbm/sensing.hpp"
#include "csrbm/wfdb.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

// convert: WFDB record -> plain text sample file (one mV value per line)
int cmd_convert(const std::string& dir, const std::string& record, int channel,
                const std::string& out_path) {
  csrbm::RecordMeta meta;
  Eigen::VectorXd mv = csrbm::load_wfdb_signal(dir, record, channel, &meta);
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open output file " + out_path);
  out.precision(17);
  out << "# record " << meta.record_name << " fs " << meta.sampling_freq
      << " samples " << mv.size() << "\n";
  for (Eigen::Index i = 0; i < mv.size(); ++i) out << mv(i) << "\n";
  std::cout << "wrote " << mv.size() << " samples to " << out_path << "\n";
  return kExitOk;
}

int cmd_train(const std::string& config_path, const std::string& out_path) {
  auto cfg = csrbm::Config::load(config_path);
  auto bundle = csrbm::train_from_config(cfg);
  csrbm::save_model(out_path, bundle);
  std::cout << "model saved to " << out_path << " (atoms "
            << bundle.sparsifier.atoms() << ", hidden " << bundle.rbm.n_hidden()
            << ")\n";
  return kExitOk;
}

int cmd_reconstruct(const std::string& model_path, const std::string& config_path,
                    const std::string& out_path) {
  auto cfg = csrbm::Config::load(config_path);
  auto bundle = csrbm::load_model(model_path);

  const int n = bundle.sparsifier.signal_dim();
  const double m_over_n = cfg.get_double("m_over_n", 0.3);
  const int m = std::max(1, static_cast<int>(std::lround(m_over_n * n)));
  const double sigma_n_sq = cfg.get_double("sigma_n_sq", 0.25);
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  const int k = static_cast<int>(cfg.get_int("sparsity_k", std::max(1, n / 10)));

  std::ifstream in(cfg.get_string("input"));
  if (!in) throw std::runtime_error("cannot open input sample file");
  std::vector<double> samples;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    samples.push_back(std::stod(line));
  }
  Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(samples.data(),
                                                  static_cast<Eigen::Index>(samples.size()));

  auto phi = csrbm::gen_bernoulli_matrix(m, n, seed);
  auto noise = csrbm::build_noise_model(phi, bundle.repr_error_variances, sigma_n_sq);
  std::vector<int> never_active;
  for (int i = 0; i < bundle.coeff_variances.size(); ++i)
    if (bundle.coeff_variances(i) <= 0.0) never_active.push_back(i);
  auto model = csrbm::make_recovery_model(phi, bundle.sparsifier, noise,
                                          bundle.coeff_variances, never_active,
                                          bundle.rbm, k);

  auto segments = csrbm::segment(x, n);
  std::vector<Eigen::VectorXd> recon;
  for (size_t s = 0; s < segments.size(); ++s) {
    Eigen::VectorXd y = csrbm::measure(phi, segments[s], sigma_n_sq, seed + s + 1);
    recon.push_back(csrbm::rbm_omp_like(model, y).x_hat);
  }
  Eigen::VectorXd xr = csrbm::concatenate(recon);

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open output file " + out_path);
  out.precision(17);
  for (Eigen::Index i = 0; i < xr.size(); ++i) out << xr(i) << "\n";
  std::cout << "reconstructed " << segments.size() << " segments";
  if (!segments.empty()) {
    Eigen::VectorXd orig = csrbm::concatenate(segments);
    std::cout << ", R-SNR " << csrbm::r_snr(orig, xr) << " dB";
  }
  std::cout << "\n";
  return kExitOk;
}

int cmd_evaluate(const std::string& orig_path, const std::string& recon_path,
                 double fs) {
  auto read = [](const std::string& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot open " + p);
    std::vector<double> v;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      v.push_back(std::stod(line));
    }
    return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())).eval();
  };
  Eigen::VectorXd x = read(orig_path);
  Eigen::VectorXd xr = read(recon_path);
  if (x.size() != xr.size()) {
    const Eigen::Index n = std::min(x.size(), xr.size());
    x.conservativeResize(n);
    xr.conservativeResize(n);
  }
  std::cout << "r_snr_db," << csrbm::r_snr(x, xr) << "\n";
  auto ref = csrbm::detect_qrs(x, fs);
  auto test = csrbm::detect_qrs(xr, fs);
  auto match = csrbm::match_peaks(ref, test, 4);
  std::cout << "precision," << match.precision << "\nrecall," << match.recall
            << "\npsim_precision," << csrbm::psim(1.0, match.precision)
            << "\npsim_recall," << csrbm::psim(1.0, match.recall) << "\n";
  return kExitOk;
}

int cmd_experiment(const std::string& config_path, const std::string& out_path) {
  auto cfg = csrbm::Config::load(config_path);
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open output file " + out_path);
  auto rows = csrbm::run_experiment(cfg, out);
  std::cout << "wrote " << rows.size() << " result rows to " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressed-sensing ECG toolkit with an RBM support prior"};
  app.require_subcommand(1);

  std::string data_dir, record, out_path = "out.txt", config_path, model_path;
  std::string orig_path, recon_path;
  int channel = 0;
  double fs = 360.0;

  auto* convert = app.add_subcommand("convert", "WFDB record to plain sample file");
  convert->add_option("--data-dir", data_dir)->required();
  convert->add_option("--record", record)->required();
  convert->add_option("--channel", channel);
  convert->add_option("--output", out_path);

  auto* train_dict = app.add_subcommand("train-dict", "K-SVD dictionary + statistics + RBM");
  train_dict->add_option("--config", config_path)->required();
  train_dict->add_option("--output", out_path);

  auto* train_rbm = app.add_subcommand("train-rbm", "wavelet codes + statistics + RBM");
  train_rbm->add_option("--config", config_path)->required();
  train_rbm->add_option("--output", out_path);

  auto* reconstruct = app.add_subcommand("reconstruct", "recover a sample file from measurements");
  reconstruct->add_option("--model", model_path)->required();
  reconstruct->add_option("--config", config_path)->required();
  reconstruct->add_option("--output", out_path);

  auto* evaluate = app.add_subcommand("evaluate", "metrics between original and reconstruction");
  evaluate->add_option("--original", orig_path)->required();
  evaluate->add_option("--reconstructed", recon_path)->required();
  evaluate->add_option("--fs", fs);

  auto* experiment = app.add_subcommand("experiment", "full (M, repetition) sweep to CSV");
  experiment->add_option("--config", config_path)->required();
  experiment->add_option("--output", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (convert->parsed()) return cmd_convert(data_dir, record, channel, out_path);
    if (train_dict->parsed()) {
      auto cfg = csrbm::Config::load(config_path);
      if (cfg.get_string("transform", "dictionary") != "dictionary")
        throw csrbm::ConfigError("train-dict requires transform = dictionary");
      return cmd_train(config_path, out_path);
    }
    if (train_rbm->parsed()) return cmd_train(config_path, out_path);
    if (reconstruct->parsed()) return cmd_reconstruct(model_path, config_path, out_path);
    if (evaluate->parsed()) return cmd_evaluate(orig_path, recon_path, fs);
    if (experiment->parsed()) return cmd_experiment(config_path, out_path);
  } catch (const csrbm::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const csrbm::WfdbParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const csrbm::ModelIoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    const std::string what = e.what();
    std::cerr << "error: " << what << "\n";
    if (what.find("cannot open") != std::string::npos ||
        what.find("missing") != std::string::npos)
      return kExitData;
    return kExitNumerical;
  }
  return kExitUsage;
}
