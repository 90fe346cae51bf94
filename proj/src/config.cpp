#include "rcm/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace rcm {

using nlohmann::json;

namespace {

void require_keys(const json& j, std::string_view where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(fmt::format("config field '{}' must be an object", where));
  const std::set<std::string> known(keys.begin(), keys.end());
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) {
      throw ConfigError(fmt::format("config field '{}{}{}' is not recognized", where,
                                    where.empty() ? "" : ".", key));
    }
  }
  for (const char* key : keys) {
    if (!j.contains(key)) {
      throw ConfigError(fmt::format("config field '{}{}{}' is missing", where,
                                    where.empty() ? "" : ".", key));
    }
  }
}

std::string path_of(std::string_view where, std::string_view key) {
  return where.empty() ? std::string(key) : fmt::format("{}.{}", where, key);
}

template <typename T>
T field(const json& j, std::string_view where, const char* key) {
  const json& value = j.at(key);
  const std::string path = path_of(where, key);
  if constexpr (std::is_same_v<T, std::string>) {
    if (!value.is_string()) throw ConfigError(fmt::format("config field '{}' must be a string", path));
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    if (!value.is_number_unsigned()) {
      throw ConfigError(fmt::format("config field '{}' must be a non-negative integer", path));
    }
  } else if constexpr (std::is_integral_v<T>) {
    if (!value.is_number_integer()) {
      throw ConfigError(fmt::format("config field '{}' must be an integer", path));
    }
  } else {
    if (!value.is_number()) throw ConfigError(fmt::format("config field '{}' must be a number", path));
  }
  return value.get<T>();
}

}  // namespace

void RunConfig::validate() const {
  scenario.validate();
  if (detectors.empty()) throw ConfigError("config field 'detectors' must name at least one detector");
  if (!(pfa > 0 && pfa < 1)) throw ConfigError("config field 'pfa' must lie in (0, 1)");
  for (std::size_t i = 1; i < sinr_grid.size(); ++i) {
    if (!(sinr_grid[i] > sinr_grid[i - 1])) {
      throw ConfigError(fmt::format("config field 'sinr_grid' must be strictly increasing (entry {})", i));
    }
  }
  if (trials.calibrate < 1 || trials.pd < 1 || trials.mvmp < 1 || trials.benchmark < 1) {
    throw ConfigError("config field 'trials' entries must be positive");
  }
  if (output_dir.empty()) throw ConfigError("config field 'output_dir' must not be empty");
}

RunConfig default_run_config() {
  RunConfig cfg;
  for (int s = 0; s <= 30; s += 2) cfg.sinr_grid.push_back(s);
  return cfg;
}

json to_json(const Scenario& scn) {
  json j;
  j["n_antennas"] = scn.n_antennas;
  j["n_pulses"] = scn.n_pulses;
  j["n_training"] = scn.n_training;
  j["spatial_frequency"] = scn.spatial_frequency;
  j["true_hypothesis"] =
      scn.true_hypothesis ? json{{"l", scn.true_hypothesis->l}, {"h", scn.true_hypothesis->h}}
                          : json(nullptr);
  j["sinr_db"] = scn.sinr_db;
  j["covariance_params"] = {{"clutter_power", scn.covariance_params.clutter_power},
                            {"one_lag_correlation", scn.covariance_params.one_lag_correlation},
                            {"noise_power", scn.covariance_params.noise_power}};
  if (scn.kinematics) {
    j["kinematics"] = {{"v_t", scn.kinematics->v_t},
                       {"prt", scn.kinematics->prt},
                       {"range_resolution", scn.kinematics->range_resolution},
                       {"taper_pulses", scn.kinematics->taper_pulses}};
  } else {
    j["kinematics"] = nullptr;
  }
  return j;
}

Scenario scenario_from_json(const json& j) {
  constexpr std::string_view where = "scenario";
  require_keys(j, where,
               {"n_antennas", "n_pulses", "n_training", "spatial_frequency", "true_hypothesis",
                "sinr_db", "covariance_params", "kinematics"});
  Scenario scn;
  scn.n_antennas = field<int>(j, where, "n_antennas");
  scn.n_pulses = field<int>(j, where, "n_pulses");
  scn.n_training = field<int>(j, where, "n_training");
  scn.spatial_frequency = field<double>(j, where, "spatial_frequency");
  scn.sinr_db = field<double>(j, where, "sinr_db");

  const json& th = j.at("true_hypothesis");
  if (th.is_null()) {
    scn.true_hypothesis.reset();
  } else {
    require_keys(th, "scenario.true_hypothesis", {"l", "h"});
    scn.true_hypothesis = HypothesisIndex{field<int>(th, "scenario.true_hypothesis", "l"),
                                          field<int>(th, "scenario.true_hypothesis", "h")};
  }

  const json& cp = j.at("covariance_params");
  require_keys(cp, "scenario.covariance_params", {"clutter_power", "one_lag_correlation", "noise_power"});
  scn.covariance_params = {field<double>(cp, "scenario.covariance_params", "clutter_power"),
                           field<double>(cp, "scenario.covariance_params", "one_lag_correlation"),
                           field<double>(cp, "scenario.covariance_params", "noise_power")};

  const json& kin = j.at("kinematics");
  if (kin.is_null()) {
    scn.kinematics.reset();
  } else {
    constexpr std::string_view kw = "scenario.kinematics";
    require_keys(kin, kw, {"v_t", "prt", "range_resolution", "taper_pulses"});
    scn.kinematics = Kinematics{field<double>(kin, kw, "v_t"), field<double>(kin, kw, "prt"),
                                field<double>(kin, kw, "range_resolution"),
                                field<int>(kin, kw, "taper_pulses")};
  }
  scn.validate();
  return scn;
}

json to_json(const RunConfig& cfg) {
  json j;
  j["scenario"] = to_json(cfg.scenario);
  j["detectors"] = json::array();
  for (DetectorKind kind : cfg.detectors) j["detectors"].push_back(std::string(to_string(kind)));
  j["pfa"] = cfg.pfa;
  j["sinr_grid"] = cfg.sinr_grid;
  j["trials"] = {{"calibrate", cfg.trials.calibrate},
                 {"pd", cfg.trials.pd},
                 {"mvmp", cfg.trials.mvmp},
                 {"benchmark", cfg.trials.benchmark}};
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  return j;
}

RunConfig run_config_from_json(const json& j) {
  require_keys(j, "", {"scenario", "detectors", "pfa", "sinr_grid", "trials", "seed", "output_dir"});
  RunConfig cfg;
  cfg.scenario = scenario_from_json(j.at("scenario"));

  const json& det = j.at("detectors");
  if (!det.is_array()) throw ConfigError("config field 'detectors' must be an array of names");
  cfg.detectors.clear();
  for (std::size_t i = 0; i < det.size(); ++i) {
    const std::string path = fmt::format("detectors[{}]", i);
    if (!det[i].is_string() || det[i].get<std::string>().empty()) {
      throw ConfigError(fmt::format("config field '{}' must be a detector name", path));
    }
    try {
      cfg.detectors.push_back(parse_detector_kind(det[i].get<std::string>()));
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("config field '{}': {}", path, e.what()));
    }
  }

  cfg.pfa = field<double>(j, "", "pfa");
  const json& grid = j.at("sinr_grid");
  if (!grid.is_array()) throw ConfigError("config field 'sinr_grid' must be an array of numbers");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid[i].is_number()) {
      throw ConfigError(fmt::format("config field 'sinr_grid[{}]' must be a number", i));
    }
    cfg.sinr_grid.push_back(grid[i].get<double>());
  }

  const json& tr = j.at("trials");
  require_keys(tr, "trials", {"calibrate", "pd", "mvmp", "benchmark"});
  cfg.trials = {field<std::int64_t>(tr, "trials", "calibrate"), field<std::int64_t>(tr, "trials", "pd"),
                field<std::int64_t>(tr, "trials", "mvmp"),
                field<std::int64_t>(tr, "trials", "benchmark")};
  cfg.seed = field<std::uint64_t>(j, "", "seed");
  cfg.output_dir = field<std::string>(j, "", "output_dir");
  cfg.validate();
  return cfg;
}

RunConfig parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError(fmt::format("config syntax error at line {}, column {}: {}", line, column,
                                  e.what()));
  }
  return run_config_from_json(j);
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str());
}

std::string serialize_run_config(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  nlohmann::json j = to_json(cfg);
  j.erase("output_dir");
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace rcm
