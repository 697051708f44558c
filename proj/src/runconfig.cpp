#include "wsgeo/runconfig.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "wsgeo/error.hpp"
#include "wsgeo/io.hpp"

namespace wsgeo {

namespace {

enum class KeyType { Str, Int, Real, Bool, RealList, File, Seed };

struct KeySpec {
  std::string key;
  KeyType type;
  std::string def;  // default value; ignored when required
  bool required;
};

const std::vector<KeySpec> kCommonKeys = {
    {"schema_version", KeyType::Int, "1", false},
    {"task", KeyType::Str, "", true},
    {"seed", KeyType::Seed, "", true},
    {"out_dir", KeyType::Str, "", true},
};

std::vector<KeySpec> data_keys(const std::string& p, bool required_kind) {
  return {
      {p + "kind", KeyType::Str, "", required_kind},  // two_moons | blobs | idx
      {p + "n", KeyType::Int, "400", false},
      {p + "noise", KeyType::Real, "0.1", false},
      {p + "classes", KeyType::Int, "3", false},
      {p + "images", KeyType::File, "", false},
      {p + "labels", KeyType::File, "", false},
      {p + "downsample", KeyType::Int, "28", false},
      {p + "normalize", KeyType::Bool, "true", false},
      {p + "test_fraction", KeyType::Real, "0.25", false},
      {p + "permute", KeyType::Seed, "0", false},
      {p + "train_subset", KeyType::Int, "0", false},
      {p + "seed", KeyType::Seed, "0", false},
  };
}

const std::vector<KeySpec> kWalkKeys = {
    {"walk.beta", KeyType::RealList, "10", false},
    {"walk.radius", KeyType::Real, "0.1", false},
    {"walk.eps_rel", KeyType::Real, "0.001", false},
    {"walk.eps_abs", KeyType::Real, "0", false},
    {"walk.max_steps", KeyType::Int, "500", false},
    {"walk.batch", KeyType::Int, "64", false},
    {"walk.resample", KeyType::Bool, "false", false},
    {"walk.eval_every", KeyType::Int, "1", false},
    {"walk.clamp_radius", KeyType::Bool, "true", false},
};

std::vector<KeySpec> schema_for(const std::string& task) {
  std::vector<KeySpec> schema = kCommonKeys;
  auto add = [&schema](const std::vector<KeySpec>& ks) {
    schema.insert(schema.end(), ks.begin(), ks.end());
  };
  if (task == "train") {
    add(data_keys("data.", true));
    add({{"net.layers", KeyType::Str, "", true},
         {"net.activation", KeyType::Str, "tanh", false},
         {"net.output", KeyType::Str, "identity", false},
         {"train.lr", KeyType::Real, "0.1", false},
         {"train.epochs", KeyType::Int, "50", false},
         {"train.batch", KeyType::Int, "32", false},
         {"train.init", KeyType::Str, "random", false}});
  } else if (task == "sparsify") {
    add(data_keys("data.", true));
    add(kWalkKeys);
    add({{"checkpoint", KeyType::File, "", true},
         {"plane.p", KeyType::Real, "0.5", false},
         {"plane.rule", KeyType::Str, "magnitude", false},
         {"plane.exempt_biases", KeyType::Bool, "true", false},
         {"baseline.enabled", KeyType::Bool, "false", false},
         {"baseline.prune_per_cycle", KeyType::Int, "1", false},
         {"baseline.epochs_per_cycle", KeyType::Int, "10", false},
         {"baseline.lr", KeyType::Real, "0.1", false},
         {"baseline.batch", KeyType::Int, "32", false}});
  } else if (task == "merge") {
    add(data_keys("data.", true));
    add(data_keys("data2.", true));
    add(kWalkKeys);
    add({{"checkpoint1", KeyType::File, "", true},
         {"checkpoint2", KeyType::File, "", true},
         {"merge.manifold", KeyType::Int, "1", false}});
  } else if (task == "evaluate") {
    add(data_keys("data.", true));
    add(data_keys("data2.", false));
    add({{"path_file", KeyType::File, "", true}});
  } else if (task == "emit-plot-data") {
    add({{"path_file", KeyType::File, "", true}});
  } else {
    raise(ErrorKind::Config,
          "unknown task '" + task + "' (train|sparsify|merge|evaluate|emit-plot-data)");
  }
  return schema;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  size_t b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

void check_type(const KeySpec& spec, const std::string& value) {
  const std::string& key = spec.key;
  const auto fail = [&](const char* want) {
    raise(ErrorKind::Config, "config key '" + key + "' = '" + value + "' is not a " + want);
  };
  errno = 0;
  char* end = nullptr;
  switch (spec.type) {
    case KeyType::Str:
      break;
    case KeyType::Int: {
      const long long v = std::strtoll(value.c_str(), &end, 10);
      (void)v;
      if (errno || end != value.c_str() + value.size() || value.empty()) fail("whole number");
      break;
    }
    case KeyType::Seed: {
      const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
      (void)v;
      if (errno || end != value.c_str() + value.size() || value.empty()) fail("seed value");
      break;
    }
    case KeyType::Real: {
      const double v = std::strtod(value.c_str(), &end);
      (void)v;
      if (errno || end != value.c_str() + value.size() || value.empty()) fail("number");
      break;
    }
    case KeyType::Bool:
      if (value != "true" && value != "false") fail("bool (true|false)");
      break;
    case KeyType::RealList: {
      std::stringstream ss(value);
      std::string item;
      bool any = false;
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        const double v = std::strtod(item.c_str(), &end);
        (void)v;
        if (errno || item.empty() || end != item.c_str() + item.size()) fail("number list");
        any = true;
      }
      if (!any) fail("number list");
      break;
    }
    case KeyType::File:
      if (!value.empty() && !std::filesystem::exists(value))
        raise(ErrorKind::Config, "config key '" + key + "' refers to missing file '" + value + "'");
      break;
  }
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      raise(ErrorKind::Config,
            origin + ":" + std::to_string(lineno) + ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      raise(ErrorKind::Config, origin + ":" + std::to_string(lineno) + ": empty key");
    if (cfg.values_.count(key))
      raise(ErrorKind::Config,
            origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    cfg.values_[key] = value;
  }
  return cfg;
}

RunConfig RunConfig::load_file(const std::string& file) {
  return parse(read_file(file), file);
}

void RunConfig::set(const std::string& key, const std::string& value) { values_[key] = value; }

bool RunConfig::has(const std::string& key) const { return values_.count(key) > 0; }

RunConfig RunConfig::resolved() const {
  auto it = values_.find("task");
  if (it == values_.end()) raise(ErrorKind::Config, "config is missing the 'task' key");
  const std::vector<KeySpec> schema = schema_for(it->second);

  // reject unknown keys first: typos must never be silently absorbed
  for (const auto& [key, value] : values_) {
    const bool known = std::any_of(schema.begin(), schema.end(),
                                   [&key](const KeySpec& s) { return key == s.key; });
    if (!known)
      raise(ErrorKind::Config, "unknown config key '" + key + "' for task '" + it->second + "'");
  }

  RunConfig out;
  for (const KeySpec& spec : schema) {
    const auto found = values_.find(spec.key);
    if (found != values_.end()) {
      check_type(spec, found->second);
      out.values_[spec.key] = found->second;
    } else if (spec.required) {
      raise(ErrorKind::Config, "config is missing required key '" + spec.key + "'");
    } else {
      out.values_[spec.key] = spec.def;
    }
  }
  if (out.get_int("schema_version") != kSchemaVersion)
    raise(ErrorKind::Config, "unsupported schema_version " + out.get("schema_version"));
  return out;
}

const std::string& RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) raise(ErrorKind::Config, "config key '" + key + "' not set");
  return it->second;
}

std::string RunConfig::get_or(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

int64_t RunConfig::get_int(const std::string& key) const {
  return std::strtoll(get(key).c_str(), nullptr, 10);
}

double RunConfig::get_double(const std::string& key) const {
  return std::strtod(get(key).c_str(), nullptr);
}

bool RunConfig::get_bool(const std::string& key) const { return get(key) == "true"; }

uint64_t RunConfig::get_seed(const std::string& key) const {
  return std::strtoull(get(key).c_str(), nullptr, 10);
}

std::vector<double> RunConfig::get_double_list(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(get(key));
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::strtod(item.c_str(), nullptr));
  return out;
}

std::string RunConfig::manifest() const {
  std::ostringstream out;
  for (const auto& [key, value] : values_) out << key << " = " << value << "\n";
  return out.str();
}

}  // namespace wsgeo
