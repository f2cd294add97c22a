#pragma once

#include <map>
#include <string>
#include <vector>

namespace weyllab::cli {

/// Flat key=value configuration (INI-like); JSON files with the same keys are
/// accepted as an alternative. Unknown keys are rejected so typos surface.
struct RunConfig {
  std::string experiment;
  std::map<std::string, std::string> kv;

  static RunConfig from_file(const std::string& path);
  static RunConfig from_text(const std::string& text);

  bool has(const std::string& key) const { return kv.count(key) > 0; }
  void set(const std::string& key, const std::string& value) { kv[key] = value; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Comma-separated values, or the shorthand geom:lo:hi:count.
  std::vector<double> get_grid(const std::string& key, std::vector<double> fallback) const;

  void validate() const;  // throws ConfigError with field-level messages
};

struct ExperimentInfo {
  std::string name;
  std::string claim;
};
const std::vector<ExperimentInfo>& experiment_list();

/// Runs one experiment, writing <experiment_id>.csv and
/// <experiment_id>.verdict.json (plus measure files where natural) into
/// output_dir. Returns 0 when every verdict passes, 2 otherwise; execution
/// errors propagate as exceptions.
int run(const RunConfig& config);

}  // namespace weyllab::cli
