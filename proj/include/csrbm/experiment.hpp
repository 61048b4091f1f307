#ifndef CSRBM_EXPERIMENT_HPP
#define CSRBM_EXPERIMENT_HPP

#include <ostream>
#include <string>
#include <vector>

#include "csrbm/config.hpp"
#include "csrbm/model_io.hpp"

namespace csrbm {

struct ExperimentRow {
  std::string algorithm;
  std::string transform;
  double m_over_n = 0.0;
  int repetition = 0;
  std::string record;
  double r_snr_mean = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double psim_precision = 0.0;
  double psim_recall = 0.0;
  double wall_time_ms = 0.0;
};

inline constexpr const char* kCsvHeader =
    "algorithm,transform,M_over_N,repetition,record,r_snr_mean,precision,"
    "recall,psim_precision,psim_recall,wall_time_ms";

// Trains on the configured source, then sweeps (M, repetition) with a fresh
// sensing matrix per repetition. Rows come back ordered by
// (algorithm, M, repetition, record) and are echoed to csv_out with header.
std::vector<ExperimentRow> run_experiment(const Config& config, std::ostream& csv_out);

// Training half of the pipeline, shared with the CLI train subcommands.
ModelBundle train_from_config(const Config& config);

void write_csv_row(std::ostream& out, const ExperimentRow& row);

}  // namespace csrbm

#endif
