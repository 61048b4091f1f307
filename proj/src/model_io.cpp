#include "csrbm/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

namespace csrbm {

namespace {

constexpr char kMagic[] = "CSRBM1";

// little-endian on every supported target; asserted here rather than swapped
static_assert(std::endian::native == std::endian::little,
              "model container assumes a little-endian host");

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 4);
  if (!in) throw ModelIoError("model file truncated");
  return v;
}

void write_string(std::ostream& out, const std::string& s) {
  write_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
  const std::uint32_t len = read_u32(in);
  if (len > (1u << 20)) throw ModelIoError("model file: implausible string length");
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (!in) throw ModelIoError("model file truncated");
  return s;
}

void write_array(std::ostream& out, const std::string& name,
                 const Eigen::MatrixXd& a) {
  write_string(out, name);
  write_u32(out, 2);
  write_u32(out, static_cast<std::uint32_t>(a.rows()));
  write_u32(out, static_cast<std::uint32_t>(a.cols()));
  // row-major stream
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double v = a(i, j);
      out.write(reinterpret_cast<const char*>(&v), 8);
    }
}

void write_vector(std::ostream& out, const std::string& name,
                  const Eigen::VectorXd& v) {
  write_string(out, name);
  write_u32(out, 1);
  write_u32(out, static_cast<std::uint32_t>(v.size()));
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * 8));
}

struct RawArray {
  std::uint32_t rank = 0;
  std::vector<std::uint32_t> dims;
  std::vector<double> data;
};

const RawArray& get(const std::map<std::string, RawArray>& arrays,
                    const std::string& name) {
  auto it = arrays.find(name);
  if (it == arrays.end()) throw ModelIoError("model file: missing array " + name);
  return it->second;
}

Eigen::MatrixXd as_matrix(const RawArray& a) {
  if (a.rank != 2) throw ModelIoError("model file: expected rank-2 array");
  Eigen::MatrixXd m(a.dims[0], a.dims[1]);
  for (std::uint32_t i = 0; i < a.dims[0]; ++i)
    for (std::uint32_t j = 0; j < a.dims[1]; ++j)
      m(i, j) = a.data[static_cast<size_t>(i) * a.dims[1] + j];
  return m;
}

Eigen::VectorXd as_vector(const RawArray& a) {
  if (a.rank != 1) throw ModelIoError("model file: expected rank-1 array");
  return Eigen::Map<const Eigen::VectorXd>(a.data.data(),
                                           static_cast<Eigen::Index>(a.data.size()));
}

}  // namespace

void save_model(const std::string& path, const ModelBundle& bundle) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelIoError("save_model: cannot open " + path);
  out.write(kMagic, 6);

  Eigen::VectorXd kind_levels(2);
  kind_levels << (bundle.sparsifier.kind == TransformKind::wavelet ? 1.0 : 0.0),
      static_cast<double>(bundle.sparsifier.levels);
  write_vector(out, "sparsifier_kind_levels", kind_levels);
  write_array(out, "synthesis", bundle.sparsifier.synthesis);
  write_vector(out, "atom_norms", bundle.sparsifier.atom_norms);
  write_array(out, "rbm_weights", bundle.rbm.weights);
  write_vector(out, "rbm_visible_bias", bundle.rbm.visible_bias);
  write_vector(out, "rbm_hidden_bias", bundle.rbm.hidden_bias);
  write_vector(out, "coeff_variances", bundle.coeff_variances);
  write_vector(out, "repr_error_variances", bundle.repr_error_variances);

  // config echo rides along as named strings
  write_string(out, "__config__");
  write_u32(out, static_cast<std::uint32_t>(bundle.config_echo.size()));
  for (const auto& [k, v] : bundle.config_echo) {
    write_string(out, k);
    write_string(out, v);
  }
  if (!out) throw ModelIoError("save_model: write failed");
}

ModelBundle load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelIoError("load_model: cannot open " + path);
  char magic[6];
  in.read(magic, 6);
  if (!in || std::memcmp(magic, kMagic, 6) != 0) {
    if (in && std::memcmp(magic, "CSRBM", 5) == 0)
      throw ModelIoError("load_model: unsupported container version");
    throw ModelIoError("load_model: bad magic");
  }

  // arrays stream until the config sentinel
  std::map<std::string, RawArray> arrays;
  std::map<std::string, std::string> config;
  while (in.peek() != EOF) {
    std::string name = read_string(in);
    if (name == "__config__") {
      const std::uint32_t count = read_u32(in);
      for (std::uint32_t i = 0; i < count; ++i) {
        std::string k = read_string(in);
        config[k] = read_string(in);
      }
      break;
    }
    RawArray a;
    a.rank = read_u32(in);
    if (a.rank > 2) throw ModelIoError("model file: unsupported array rank");
    std::uint64_t total = 1;
    for (std::uint32_t d = 0; d < a.rank; ++d) {
      a.dims.push_back(read_u32(in));
      total *= a.dims.back();
    }
    if (total > (1ull << 28)) throw ModelIoError("model file: implausible array size");
    a.data.resize(total);
    in.read(reinterpret_cast<char*>(a.data.data()),
            static_cast<std::streamsize>(total * 8));
    if (!in) throw ModelIoError("model file truncated");
    arrays[name] = std::move(a);
  }

  ModelBundle bundle;
  Eigen::VectorXd kl = as_vector(get(arrays, "sparsifier_kind_levels"));
  bundle.sparsifier.kind =
      kl(0) == 1.0 ? TransformKind::wavelet : TransformKind::dictionary;
  bundle.sparsifier.levels = static_cast<int>(kl(1));
  bundle.sparsifier.synthesis = as_matrix(get(arrays, "synthesis"));
  bundle.sparsifier.atom_norms = as_vector(get(arrays, "atom_norms"));
  bundle.rbm.weights = as_matrix(get(arrays, "rbm_weights"));
  bundle.rbm.visible_bias = as_vector(get(arrays, "rbm_visible_bias"));
  bundle.rbm.hidden_bias = as_vector(get(arrays, "rbm_hidden_bias"));
  bundle.coeff_variances = as_vector(get(arrays, "coeff_variances"));
  bundle.repr_error_variances = as_vector(get(arrays, "repr_error_variances"));
  bundle.config_echo = std::move(config);
  return bundle;
}

}  // namespace csrbm
