#ifndef CSRBM_CONFIG_HPP
#define CSRBM_CONFIG_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace csrbm {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key = value text format. '#' starts a comment, blank lines ignored.
class Config {
 public:
  Config() = default;
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return kv_.count(key) > 0; }
  void set(const std::string& key, const std::string& value) { kv_[key] = value; }

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& def) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long def) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double def) const;
  // comma-separated
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<std::string> get_string_list(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace csrbm

#endif
