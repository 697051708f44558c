#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace wsgeo {

// Declarative run configuration: `key = value` lines, '#' comments, one
// documented schema per task. Unknown keys are errors, never silently
// absorbed. A resolved config has every schema key materialized (defaults
// filled in) and serializes to the run manifest, which reloads to an
// identical resolved config.
class RunConfig {
 public:
  static constexpr int kSchemaVersion = 1;

  static RunConfig parse(const std::string& text, const std::string& origin = "<config>");
  static RunConfig load_file(const std::string& file);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  // Validates against the task schema, fills defaults, checks required keys
  // and referenced files. Returns the resolved copy.
  RunConfig resolved() const;

  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  int64_t get_int(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  uint64_t get_seed(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;

  std::string task() const { return get("task"); }
  std::string manifest() const;  // sorted key = value lines

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace wsgeo
