#ifndef CSRBM_MODEL_IO_HPP
#define CSRBM_MODEL_IO_HPP

#include <map>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "csrbm/rbm.hpp"
#include "csrbm/wavelet.hpp"

namespace csrbm {

struct ModelIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Everything the reconstruction side needs from a training run.
struct ModelBundle {
  SparsifyingModel sparsifier;
  RbmModel rbm;
  Eigen::VectorXd coeff_variances;
  Eigen::VectorXd repr_error_variances;
  std::map<std::string, std::string> config_echo;
};

// Container: magic "CSRBM1", then per-array records of
// (name, rank, dims, row-major little-endian doubles). Bit-exact round trip.
void save_model(const std::string& path, const ModelBundle& bundle);
ModelBundle load_model(const std::string& path);

}  // namespace csrbm

#endif
