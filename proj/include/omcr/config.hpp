#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "omcr/expkit.hpp"

namespace omcr {

// Configuration files are JSON documents whose keys carry their units.
// Unknown keys are rejected so typos cannot silently fall back to defaults.

namespace detail {

inline void expect_known_keys(const nlohmann::json& j, const std::string& path) {
  static const char* known[] = {
      "n_sites",       "radius_km",      "eta_years",   "beta_regular", "beta_rapid",
      "mttr_hours",    "cr_dollars",     "cp_per_hour", "horizons_months", "capacities",
      "speed_kmh",     "cd_per_km",      "ct_per_hour", "replications", "seed",
      "window_ratio",  "depot_methods",  "threads"};
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known)
      if (key == k) ok = true;
    if (!ok) throw std::runtime_error(path + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw std::runtime_error(path + ": key '" + std::string(key) + "' has the wrong type");
  }
}

inline std::vector<double> get_number_list(const nlohmann::json& j, const char* key,
                                           std::vector<double> fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
    return out;
  }
  if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number())
        throw std::runtime_error(path + ": key '" + std::string(key) + "' must hold numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  throw std::runtime_error(path + ": key '" + std::string(key) + "' must be a number or list");
}

}  // namespace detail

inline ScenarioConfig config_from_json(const nlohmann::json& j, const std::string& path) {
  detail::expect_known_keys(j, path);
  ScenarioConfig c;
  c.n_sites = detail::get_or(j, "n_sites", c.n_sites, path);
  c.radius_km = detail::get_or(j, "radius_km", c.radius_km, path);
  c.eta_years = detail::get_or(j, "eta_years", c.eta_years, path);
  c.beta_regular = detail::get_or(j, "beta_regular", c.beta_regular, path);
  c.beta_rapid = detail::get_or(j, "beta_rapid", c.beta_rapid, path);
  c.mttr_h = detail::get_or(j, "mttr_hours", c.mttr_h, path);
  c.cr = detail::get_or(j, "cr_dollars", c.cr, path);
  c.cp_values = detail::get_number_list(j, "cp_per_hour", c.cp_values, path);
  c.horizons_months = detail::get_number_list(j, "horizons_months", c.horizons_months, path);
  {
    auto caps = detail::get_number_list(j, "capacities", {}, path);
    if (!caps.empty()) {
      c.capacities.clear();
      for (double q : caps) c.capacities.push_back(static_cast<int>(q));
    }
  }
  c.speed_kmh = detail::get_or(j, "speed_kmh", c.speed_kmh, path);
  c.cd_per_km = detail::get_or(j, "cd_per_km", c.cd_per_km, path);
  c.ct_per_h = detail::get_or(j, "ct_per_hour", c.ct_per_h, path);
  c.replications = detail::get_or(j, "replications", c.replications, path);
  c.seed = detail::get_or(j, "seed", c.seed, path);
  c.window_ratio = detail::get_or(j, "window_ratio", c.window_ratio, path);
  c.depot_methods = detail::get_or(j, "depot_methods", c.depot_methods, path);
  c.threads = detail::get_or(j, "threads", c.threads, path);

  auto fail = [&](const char* key, const char* why) {
    throw std::runtime_error(path + ": key '" + std::string(key) + "' " + why);
  };
  if (c.n_sites < 1) fail("n_sites", "must be >= 1");
  if (!(c.radius_km > 0.0)) fail("radius_km", "must be > 0");
  if (!(c.eta_years > 0.0)) fail("eta_years", "must be > 0");
  if (c.beta_regular < 1.0 || c.beta_rapid < 1.0) fail("beta_regular", "must be >= 1");
  if (!(c.mttr_h > 0.0)) fail("mttr_hours", "must be > 0");
  if (c.cr < 0.0) fail("cr_dollars", "must be >= 0");
  for (double cp : c.cp_values)
    if (cp < 0.0) fail("cp_per_hour", "must be >= 0");
  if (c.horizons_months.empty()) fail("horizons_months", "must not be empty");
  for (double m : c.horizons_months)
    if (!(m > 0.0) || months_to_hours(m) > years_to_hours(2.0) + 1e-9)
      fail("horizons_months", "must lie in (0, 24] months");
  if (c.capacities.empty()) fail("capacities", "must not be empty");
  for (int q : c.capacities)
    if (q < 1) fail("capacities", "must be >= 1");
  if (!(c.speed_kmh > 0.0)) fail("speed_kmh", "must be > 0");
  if (c.cd_per_km < 0.0) fail("cd_per_km", "must be >= 0");
  if (c.ct_per_h < 0.0) fail("ct_per_hour", "must be >= 0");
  if (c.replications < 1) fail("replications", "must be >= 1");
  if (!(c.window_ratio > 0.0) || c.window_ratio > 0.5) fail("window_ratio", "must be in (0, 0.5]");
  for (const auto& m : c.depot_methods)
    if (m != "barycentre" && m != "near_site") fail("depot_methods", "must be barycentre|near_site");
  return c;
}

inline nlohmann::json config_to_json(const ScenarioConfig& c) {
  nlohmann::json j;
  j["n_sites"] = c.n_sites;
  j["radius_km"] = c.radius_km;
  j["eta_years"] = c.eta_years;
  j["beta_regular"] = c.beta_regular;
  j["beta_rapid"] = c.beta_rapid;
  j["mttr_hours"] = c.mttr_h;
  j["cr_dollars"] = c.cr;
  j["cp_per_hour"] = c.cp_values;
  j["horizons_months"] = c.horizons_months;
  j["capacities"] = c.capacities;
  j["speed_kmh"] = c.speed_kmh;
  j["cd_per_km"] = c.cd_per_km;
  j["ct_per_hour"] = c.ct_per_h;
  j["replications"] = c.replications;
  j["seed"] = c.seed;
  j["window_ratio"] = c.window_ratio;
  j["depot_methods"] = c.depot_methods;
  j["threads"] = c.threads;
  return j;
}

inline ScenarioConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open config file");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": malformed JSON: " + e.what());
  }
  if (!j.is_object()) throw std::runtime_error(path + ": top level must be an object");
  return config_from_json(j, path);
}

// FNV-1a over the canonical (key-sorted) serialization, so the digest does
// not depend on key order in the input file.
inline std::string config_digest(const ScenarioConfig& c) {
  const std::string dump = config_to_json(c).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

struct RunManifest {
  std::string command;
  std::string config_digest;
  std::uint64_t seed = 0;
  std::string tool_version;
  std::vector<std::string> outputs;
};

inline nlohmann::json manifest_to_json(const RunManifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["config_digest"] = m.config_digest;
  j["seed"] = m.seed;
  j["tool_version"] = m.tool_version;
  j["outputs"] = m.outputs;
  return j;
}

}  // namespace omcr
