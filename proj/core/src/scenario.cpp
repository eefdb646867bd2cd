// SPDX-License-Identifier: Apache-2.0
#include "riseig/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace riseig {

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Eigenvalue: return "eigenvalue";
    case ExperimentKind::SnrSweep: return "snr_sweep";
    case ExperimentKind::ElementSweep: return "element_sweep";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  if (name == "eigenvalue") return ExperimentKind::Eigenvalue;
  if (name == "snr_sweep") return ExperimentKind::SnrSweep;
  if (name == "element_sweep") return ExperimentKind::ElementSweep;
  throw DomainError("unknown experiment kind '" + name + "'");
}

void ScenarioConfig::validate() const {
  dimensions.validate();
  if (ris_positions.size() != dimensions.n_ris_elements.size()) {
    throw DomainError("ScenarioConfig: one RIS position per surface is required");
  }
  if (!(user_disk_radius >= 0.0)) {
    throw DomainError("ScenarioConfig: user_disk_radius must be >= 0");
  }
  if (n_trials < 1) throw DomainError("ScenarioConfig: n_trials must be >= 1");
  if (extra_loss_db < 0.0) throw DomainError("ScenarioConfig: extra_loss_db must be >= 0");
  for (int k : extra_loss_users) {
    if (k < 0 || k >= dimensions.n_users) {
      throw DomainError("ScenarioConfig: extra_loss user index out of range");
    }
  }
  for (const PathLossParams* p : {&pathloss.direct, &pathloss.reflect, &pathloss.bs_ris}) {
    if (!(p->beta > 0.0)) throw DomainError("ScenarioConfig: path-loss beta must be > 0");
  }
  if (n_threads < 0) throw DomainError("ScenarioConfig: n_threads must be >= 0");
}

namespace {

ScenarioConfig base_scenario() {
  ScenarioConfig config;
  config.dimensions = SystemDimensions{16, 1, 6, {256}};
  config.bs_position = {0.0, 0.0};
  config.ris_positions = {{200.0, 0.0}};
  config.user_disk_center = {200.0, 30.0};
  config.user_disk_radius = 10.0;
  config.pathloss.direct = {30.0, 3.76};
  config.pathloss.reflect = {30.0, 3.76};
  config.pathloss.bs_ris = {30.0, 2.2};
  config.fading.direct = {FadingKind::Rayleigh};
  config.fading.reflect = {FadingKind::Rayleigh};
  config.fading.bs_ris = {FadingKind::Rayleigh};
  config.noise_dbm = -100.0;
  config.n_trials = 100;
  config.seed = 1;
  return config;
}

ScenarioConfig fig1_scenario(int rank, double beta_reflect) {
  ScenarioConfig config = base_scenario();
  config.experiment = ExperimentKind::Eigenvalue;
  // 512 elements give the full-rank feeder enough budget to lift all three
  // penalized eigenvalues clear of the 10 dB mark.
  config.dimensions.n_ris_elements = {512};
  config.pathloss.reflect.beta = beta_reflect;
  config.fading.bs_ris = {FadingKind::KroneckerRank, 6.0, rank};
  config.extra_loss_db = 20.0;
  config.extra_loss_users = {3, 4, 5};
  config.rank_grid = {rank};
  return config;
}

ScenarioConfig rate_scenario(FadingKind feeder_kind) {
  ScenarioConfig config = base_scenario();
  config.pathloss.reflect.beta = 2.2;
  config.fading.bs_ris.kind = feeder_kind;
  config.fading.bs_ris.rician_factor_db = 6.0;
  return config;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fig1a", "fig1b", "fig1c", "fig1d", "fig3a", "fig3b", "fig4a", "fig4b"};
}

ScenarioConfig preset(const std::string& name) {
  ScenarioConfig config;
  if (name == "fig1a") {
    config = fig1_scenario(1, 3.76);
  } else if (name == "fig1b") {
    config = fig1_scenario(2, 3.76);
  } else if (name == "fig1c") {
    config = fig1_scenario(6, 3.76);
  } else if (name == "fig1d") {
    config = fig1_scenario(6, 2.2);
  } else if (name == "fig3a" || name == "fig3b") {
    config = rate_scenario(name == "fig3a" ? FadingKind::Rayleigh : FadingKind::Rician);
    config.experiment = ExperimentKind::SnrSweep;
    for (int dbm = -10; dbm <= 40; dbm += 5) {
      config.power_grid_dbm.push_back(static_cast<double>(dbm));
    }
  } else if (name == "fig4a" || name == "fig4b") {
    config = rate_scenario(name == "fig4a" ? FadingKind::Rayleigh : FadingKind::Rician);
    config.experiment = ExperimentKind::ElementSweep;
    config.ris_element_grid = {1, 4, 16, 64, 256};
    config.element_sweep_power_dbm = 40.0;
  } else {
    throw DomainError("unknown preset '" + name + "'");
  }
  config.name = name;
  return config;
}

// ---------------------------------------------------------------------------
// Config file reader: TOML-style sections with scalar, string, boolean and
// (possibly nested) array values, one key per line.
// ---------------------------------------------------------------------------

namespace {

struct TomlValue {
  enum class Kind { String, Number, Boolean, Array };
  Kind kind = Kind::Number;
  std::string str;
  double num = 0.0;
  bool boolean = false;
  std::vector<TomlValue> array;
};

void skip_ws(const std::string& s, std::size_t& pos) {
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
}

TomlValue parse_value(const std::string& s, std::size_t& pos, const std::string& where) {
  skip_ws(s, pos);
  if (pos >= s.size()) throw DomainError(where + ": missing value");
  TomlValue value;
  if (s[pos] == '[') {
    ++pos;
    value.kind = TomlValue::Kind::Array;
    skip_ws(s, pos);
    if (pos < s.size() && s[pos] == ']') {
      ++pos;
      return value;
    }
    while (true) {
      value.array.push_back(parse_value(s, pos, where));
      skip_ws(s, pos);
      if (pos >= s.size()) throw DomainError(where + ": unterminated array");
      if (s[pos] == ',') {
        ++pos;
        continue;
      }
      if (s[pos] == ']') {
        ++pos;
        return value;
      }
      throw DomainError(where + ": expected ',' or ']' in array");
    }
  }
  if (s[pos] == '"') {
    ++pos;
    value.kind = TomlValue::Kind::String;
    while (pos < s.size() && s[pos] != '"') value.str.push_back(s[pos++]);
    if (pos >= s.size()) throw DomainError(where + ": unterminated string");
    ++pos;
    return value;
  }
  if (s.compare(pos, 4, "true") == 0) {
    value.kind = TomlValue::Kind::Boolean;
    value.boolean = true;
    pos += 4;
    return value;
  }
  if (s.compare(pos, 5, "false") == 0) {
    value.kind = TomlValue::Kind::Boolean;
    value.boolean = false;
    pos += 5;
    return value;
  }
  const char* begin = s.c_str() + pos;
  char* end = nullptr;
  value.num = std::strtod(begin, &end);
  if (end == begin) throw DomainError(where + ": cannot parse value");
  value.str.assign(begin, static_cast<std::size_t>(end - begin));  // exact token
  pos += static_cast<std::size_t>(end - begin);
  return value;
}

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

class ConfigReader {
 public:
  ConfigReader(const std::string& text, const std::string& origin) : origin_(origin) {
    std::istringstream stream(text);
    std::string raw;
    std::string prefix;
    int line_no = 0;
    while (std::getline(stream, raw)) {
      ++line_no;
      const std::string line = trim(strip_comment(raw));
      if (line.empty()) continue;
      const std::string where = origin_ + ":" + std::to_string(line_no);
      if (line.front() == '[') {
        if (line.back() != ']') throw DomainError(where + ": malformed section header");
        prefix = trim(line.substr(1, line.size() - 2));
        if (prefix.empty()) throw DomainError(where + ": empty section name");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw DomainError(where + ": expected key = value");
      const std::string key = trim(line.substr(0, eq));
      if (key.empty()) throw DomainError(where + ": empty key");
      std::string full_key = prefix.empty() ? key : prefix + "." + key;
      std::size_t pos = eq + 1;
      const TomlValue value = parse_value(line, pos, where);
      skip_ws(line, pos);
      if (pos != line.size()) throw DomainError(where + ": trailing characters after value");
      if (!values_.emplace(full_key, value).second) {
        throw DomainError(where + ": duplicate key '" + full_key + "'");
      }
    }
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return expect(key, TomlValue::Kind::Number).num;
  }

  int integer(const std::string& key, int fallback) {
    return static_cast<int>(number(key, static_cast<double>(fallback)));
  }

  /// Full 64-bit parse of an integral token; doubles would truncate seeds
  /// above 2^53.
  std::uint64_t u64(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const TomlValue& value = expect(key, TomlValue::Kind::Number);
    if (value.str.find_first_of(".eE") == std::string::npos) {
      return std::strtoull(value.str.c_str(), nullptr, 10);
    }
    return static_cast<std::uint64_t>(value.num);
  }

  std::string string_value(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    return expect(key, TomlValue::Kind::String).str;
  }

  std::string required_string(const std::string& key) {
    if (!has(key)) throw DomainError(origin_ + ": missing required key '" + key + "'");
    return expect(key, TomlValue::Kind::String).str;
  }

  std::vector<double> number_list(const std::string& key) {
    std::vector<double> out;
    if (!has(key)) return out;
    for (const auto& item : expect(key, TomlValue::Kind::Array).array) {
      if (item.kind != TomlValue::Kind::Number) {
        throw DomainError(origin_ + ": '" + key + "' must be a list of numbers");
      }
      out.push_back(item.num);
    }
    return out;
  }

  std::vector<int> int_list(const std::string& key) {
    std::vector<int> out;
    for (double v : number_list(key)) out.push_back(static_cast<int>(v));
    return out;
  }

  Point2 point(const std::string& key, Point2 fallback) {
    if (!has(key)) return fallback;
    const auto list = number_list(key);
    if (list.size() != 2) throw DomainError(origin_ + ": '" + key + "' must be [x, y]");
    return Point2{list[0], list[1]};
  }

  std::vector<Point2> point_list(const std::string& key, std::vector<Point2> fallback) {
    if (!has(key)) return fallback;
    const TomlValue& value = expect(key, TomlValue::Kind::Array);
    std::vector<Point2> out;
    if (!value.array.empty() && value.array.front().kind == TomlValue::Kind::Number) {
      // A flat [x, y] means a single position.
      if (value.array.size() != 2) {
        throw DomainError(origin_ + ": '" + key + "' must be [x, y] or a list of them");
      }
      out.push_back({value.array[0].num, value.array[1].num});
      return out;
    }
    for (const auto& item : value.array) {
      if (item.kind != TomlValue::Kind::Array || item.array.size() != 2 ||
          item.array[0].kind != TomlValue::Kind::Number ||
          item.array[1].kind != TomlValue::Kind::Number) {
        throw DomainError(origin_ + ": '" + key + "' entries must be [x, y]");
      }
      out.push_back({item.array[0].num, item.array[1].num});
    }
    return out;
  }

  void check_all_consumed() const {
    std::vector<std::string> unknown;
    for (const auto& [key, value] : values_) {
      if (consumed_.count(key) == 0) unknown.push_back(key);
    }
    if (!unknown.empty()) {
      std::string message = origin_ + ": unknown keys:";
      for (const auto& key : unknown) message += " " + key;
      throw DomainError(message);
    }
  }

 private:
  const TomlValue& expect(const std::string& key, TomlValue::Kind kind) {
    const auto it = values_.find(key);
    const auto& value = it->second;
    if (value.kind != kind) {
      throw DomainError(origin_ + ": key '" + key + "' has the wrong type");
    }
    consumed_.insert(key);
    return value;
  }

  std::string origin_;
  std::map<std::string, TomlValue> values_;
  std::set<std::string> consumed_;
};

FadingSpec read_fading(ConfigReader& reader, const std::string& section,
                       FadingSpec fallback) {
  FadingSpec spec = fallback;
  const std::string kind = reader.string_value(section + ".kind", "");
  if (!kind.empty()) {
    if (kind == "rayleigh") {
      spec.kind = FadingKind::Rayleigh;
    } else if (kind == "rician") {
      spec.kind = FadingKind::Rician;
    } else if (kind == "kronecker_rank") {
      spec.kind = FadingKind::KroneckerRank;
    } else {
      throw DomainError("config: unknown fading kind '" + kind + "'");
    }
  }
  spec.rician_factor_db = reader.number(section + ".rician_factor_db", spec.rician_factor_db);
  spec.rank = reader.integer(section + ".rank", spec.rank);
  return spec;
}

}  // namespace

ScenarioConfig parse_config_text(const std::string& text, const std::string& origin) {
  ConfigReader reader(text, origin);
  ScenarioConfig config = base_scenario();
  config.n_trials = 1000;  // explicit config files default to full scale

  config.experiment = experiment_kind_from_string(reader.required_string("experiment"));
  config.name = reader.string_value("name", "custom");
  config.seed = reader.u64("seed", 1);
  config.n_trials = reader.integer("trials", config.n_trials);
  config.n_threads = reader.integer("threads", 0);
  config.output_dir = reader.string_value("output_dir", config.output_dir);
  config.noise_dbm = reader.number("noise_dbm", config.noise_dbm);

  config.dimensions.n_bs = reader.integer("dimensions.n_bs", config.dimensions.n_bs);
  config.dimensions.n_ms = reader.integer("dimensions.n_ms", config.dimensions.n_ms);
  config.dimensions.n_users = reader.integer("dimensions.n_users", config.dimensions.n_users);
  if (reader.has("dimensions.n_ris_elements")) {
    config.dimensions.n_ris_elements = reader.int_list("dimensions.n_ris_elements");
  }

  config.bs_position = reader.point("geometry.bs", config.bs_position);
  config.ris_positions = reader.point_list("geometry.ris", config.ris_positions);
  config.user_disk_center = reader.point("geometry.user_disk_center", config.user_disk_center);
  config.user_disk_radius = reader.number("geometry.user_disk_radius", config.user_disk_radius);

  const auto read_pathloss = [&](const std::string& section, PathLossParams& params) {
    params.alpha_db = reader.number(section + ".alpha_db", params.alpha_db);
    params.beta = reader.number(section + ".beta", params.beta);
  };
  read_pathloss("pathloss.direct", config.pathloss.direct);
  read_pathloss("pathloss.reflect", config.pathloss.reflect);
  read_pathloss("pathloss.bs_ris", config.pathloss.bs_ris);

  config.fading.direct = read_fading(reader, "fading.direct", config.fading.direct);
  config.fading.reflect = read_fading(reader, "fading.reflect", config.fading.reflect);
  config.fading.bs_ris = read_fading(reader, "fading.bs_ris", config.fading.bs_ris);

  config.extra_loss_db = reader.number("extra_loss.loss_db", 0.0);
  config.extra_loss_users.clear();
  for (int user : reader.int_list("extra_loss.users")) {
    if (user < 1 || user > config.dimensions.n_users) {
      throw DomainError("config: extra_loss.users entries are 1-based user indices");
    }
    config.extra_loss_users.push_back(user - 1);
  }

  config.power_grid_dbm = reader.number_list("grid.power_dbm");
  config.ris_element_grid = reader.int_list("grid.ris_elements");
  config.rank_grid = reader.int_list("grid.ranks");
  config.element_sweep_power_dbm =
      reader.number("grid.element_sweep_power_dbm", config.element_sweep_power_dbm);

  // Grid defaults for the experiment being run.
  if (config.experiment == ExperimentKind::SnrSweep && config.power_grid_dbm.empty()) {
    for (int dbm = -10; dbm <= 40; dbm += 5) {
      config.power_grid_dbm.push_back(static_cast<double>(dbm));
    }
  }
  if (config.experiment == ExperimentKind::ElementSweep &&
      config.ris_element_grid.empty()) {
    config.ris_element_grid = {1, 4, 16, 64, 256};
  }
  if (config.experiment == ExperimentKind::Eigenvalue && config.rank_grid.empty()) {
    config.rank_grid = {1, 2, 6};
  }

  reader.check_all_consumed();
  config.validate();
  return config;
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream stream(path);
  if (!stream) throw DomainError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << stream.rdbuf();
  return parse_config_text(buffer.str(), path);
}

}  // namespace riseig
