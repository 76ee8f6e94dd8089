#include "scenario.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "units.hpp"

namespace hstn {

using nlohmann::json;

double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

void ScenarioConfig::validate() const {
  if (n_bs < 1) throw ConfigError("config error: n_bs must be >= 1");
  if (n_pairs < 1) throw ConfigError("config error: n_pairs must be >= 1");
  if (n_antennas < 1) throw ConfigError("config error: n_antennas must be >= 1");
  if (!(noise_power > 0.0) || !std::isfinite(noise_power))
    throw ConfigError("config error: noise_power_dbm must be finite");
  const std::size_t k = static_cast<std::size_t>(n_pairs);
  if (power_budget.size() != k)
    throw ConfigError("config error: power_budget_dbm must have length n_pairs");
  if (leak_threshold.size() != k)
    throw ConfigError("config error: leak_threshold_dbm must have length n_pairs");
  if (sat_interference.size() != k)
    throw ConfigError("config error: sat_interference_dbm must be n_pairs x n_pairs");
  for (const auto& row : sat_interference)
    if (row.size() != k)
      throw ConfigError("config error: sat_interference_dbm must be n_pairs x n_pairs");
  if (suppression.size() != k)
    throw ConfigError("config error: suppression_db must have length n_pairs");
  for (double v : power_budget)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ConfigError("config error: power_budget_dbm entries must be finite");
  for (double v : leak_threshold)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ConfigError("config error: leak_threshold_dbm entries must be finite");
  for (const auto& row : sat_interference)
    for (double v : row)
      if (!(v >= 0.0) || !std::isfinite(v))
        throw ConfigError("config error: sat_interference_dbm entries must be finite");
  for (double v : suppression)
    if (!(v > 0.0) || v > 1.0)
      throw ConfigError("config error: suppression_db must be in (-inf, 0] dB");
  if (!(path_loss_exponent > 0.0))
    throw ConfigError("config error: path_loss_exponent must be > 0");
  if (!(shadow_std_db >= 0.0) || !std::isfinite(shadow_std_db))
    throw ConfigError("config error: shadow_std_db must be finite and >= 0");
  if (!(d_ref > 0.0)) throw ConfigError("config error: d_ref_m must be > 0");
  if (!(d_min >= 0.0)) throw ConfigError("config error: d_min_m must be >= 0");
  if (!(region.width > 0.0) || !(region.height > 0.0))
    throw ConfigError("config error: region_m width and height must be > 0");
}

ScenarioConfig default_config() {
  ScenarioConfig cfg;
  cfg.n_bs = 4;
  cfg.n_pairs = 3;
  cfg.n_antennas = 4;
  cfg.noise_power = dbm_to_mw(-107.0);
  cfg.power_budget.assign(3, dbm_to_mw(20.0));
  cfg.leak_threshold.assign(3, dbm_to_mw(-117.0));
  cfg.sat_interference.assign(3, std::vector<double>(3, cfg.noise_power));
  cfg.suppression.assign(3, std::sqrt(db_to_lin(-20.0)));
  cfg.path_loss_exponent = 4.0;
  cfg.shadow_std_db = 8.0;
  cfg.d_ref = 100.0;
  cfg.d_min = 10.0;
  cfg.region = {0.0, 0.0, 2000.0, 2000.0};
  return cfg;
}

namespace {

Point sample_point(const Region& r, RngStream& rng) {
  Point p;
  p.x = rng.uniform(r.x0, r.x0 + r.width);
  p.y = rng.uniform(r.y0, r.y0 + r.height);
  return p;
}

Point sample_point_away_from(const Region& r, const std::vector<Point>& anchors, double d_min,
                             RngStream& rng) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const Point p = sample_point(r, rng);
    bool ok = true;
    for (const Point& a : anchors)
      if (distance(p, a) < d_min) {
        ok = false;
        break;
      }
    if (ok) return p;
  }
  throw ConfigError("config error: region_m too small to honor d_min_m");
}

}  // namespace

Geometry sample_geometry(const ScenarioConfig& cfg, const Region& region, RngStream& rng) {
  if (!(region.width > 0.0) || !(region.height > 0.0))
    throw ConfigError("config error: region_m width and height must be > 0");

  Geometry g;
  g.bs_positions.reserve(cfg.n_bs);
  for (int n = 0; n < cfg.n_bs; ++n) g.bs_positions.push_back(sample_point(region, rng));

  g.terr_mt_positions.reserve(cfg.n_pairs);
  for (int i = 0; i < cfg.n_pairs; ++i)
    g.terr_mt_positions.push_back(
        sample_point_away_from(region, g.bs_positions, cfg.d_min, rng));

  // Satellite MTs sit in the offshore square next to the terrestrial one.
  Region offshore = region;
  offshore.x0 = region.x0 + region.width;
  g.sat_mt_positions.reserve(cfg.n_pairs);
  for (int j = 0; j < cfg.n_pairs; ++j)
    g.sat_mt_positions.push_back(
        sample_point_away_from(offshore, g.bs_positions, cfg.d_min, rng));
  return g;
}

LargeScaleState derive_large_scale(const Geometry& geom, const ScenarioConfig& cfg,
                                   RngStream& rng) {
  const int k = cfg.n_pairs;
  const int nb = cfg.n_bs;
  LargeScaleState ls;
  ls.n_pairs = k;
  ls.n_bs = nb;
  ls.terr_gain.resize(static_cast<std::size_t>(k) * k * nb);
  ls.sat_gain.resize(static_cast<std::size_t>(k) * nb);

  auto amplitude = [&](double d) {
    const double shadow_db = rng.normal(0.0, cfg.shadow_std_db);
    const double gain_sq =
        std::pow(d / cfg.d_ref, -cfg.path_loss_exponent) * db_to_lin(shadow_db);
    return std::sqrt(gain_sq);
  };

  std::size_t idx = 0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      for (int n = 0; n < nb; ++n)
        ls.terr_gain[idx++] =
            amplitude(distance(geom.bs_positions[n], geom.terr_mt_positions[i]));

  idx = 0;
  for (int j = 0; j < k; ++j)
    for (int n = 0; n < nb; ++n)
      ls.sat_gain[idx++] =
          amplitude(distance(geom.bs_positions[n], geom.sat_mt_positions[j]));
  return ls;
}

namespace {

const std::set<std::string> kKnownKeys = {
    "n_bs",           "n_pairs",          "n_antennas",       "noise_power_dbm",
    "power_budget_dbm", "leak_threshold_dbm", "sat_interference_dbm", "suppression_db",
    "path_loss_exponent", "shadow_std_db", "d_ref_m",          "d_min_m",
    "region_m",       "geometry_seed"};

double require_number(const json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError("config error: missing key '" + key + "'");
  if (!j[key].is_number()) throw ConfigError("config error: '" + key + "' must be a number");
  return j[key].get<double>();
}

int require_count(const json& j, const std::string& key) {
  const double v = require_number(j, key);
  if (v < 1 || v != std::floor(v))
    throw ConfigError("config error: '" + key + "' must be a positive integer");
  return static_cast<int>(v);
}

double number_or(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError("config error: '" + key + "' must be a number");
  return j[key].get<double>();
}

// Scalar broadcast or explicit per-channel array.
std::vector<double> dbm_vector(const json& j, const std::string& key, int k) {
  if (!j.contains(key)) throw ConfigError("config error: missing key '" + key + "'");
  const json& v = j[key];
  std::vector<double> out;
  if (v.is_number()) {
    out.assign(k, v.get<double>());
  } else if (v.is_array()) {
    if (static_cast<int>(v.size()) != k)
      throw ConfigError("config error: '" + key + "' must have length n_pairs (" +
                        std::to_string(k) + "), got " + std::to_string(v.size()));
    for (const auto& e : v) {
      if (!e.is_number())
        throw ConfigError("config error: '" + key + "' entries must be numbers");
      out.push_back(e.get<double>());
    }
  } else {
    throw ConfigError("config error: '" + key + "' must be a number or array");
  }
  return out;
}

}  // namespace

ScenarioConfig config_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config error: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config error: top level must be an object");
  for (const auto& item : j.items())
    if (kKnownKeys.find(item.key()) == kKnownKeys.end())
      throw ConfigError("config error: unknown key '" + item.key() + "'");

  ScenarioConfig cfg;
  cfg.n_bs = require_count(j, "n_bs");
  cfg.n_pairs = require_count(j, "n_pairs");
  cfg.n_antennas = require_count(j, "n_antennas");
  const int k = cfg.n_pairs;

  cfg.noise_power = dbm_to_mw(require_number(j, "noise_power_dbm"));

  for (double v : dbm_vector(j, "power_budget_dbm", k)) cfg.power_budget.push_back(dbm_to_mw(v));
  for (double v : dbm_vector(j, "leak_threshold_dbm", k))
    cfg.leak_threshold.push_back(dbm_to_mw(v));

  if (j.contains("sat_interference_dbm")) {
    const json& m = j["sat_interference_dbm"];
    if (!m.is_array() || static_cast<int>(m.size()) != k)
      throw ConfigError("config error: 'sat_interference_dbm' must be an n_pairs x n_pairs array");
    for (const auto& row : m) {
      if (!row.is_array() || static_cast<int>(row.size()) != k)
        throw ConfigError(
            "config error: 'sat_interference_dbm' must be an n_pairs x n_pairs array");
      std::vector<double> out;
      for (const auto& e : row) {
        if (!e.is_number())
          throw ConfigError("config error: 'sat_interference_dbm' entries must be numbers");
        out.push_back(dbm_to_mw(e.get<double>()));
      }
      cfg.sat_interference.push_back(std::move(out));
    }
  } else {
    cfg.sat_interference.assign(k, std::vector<double>(k, cfg.noise_power));
  }

  if (j.contains("suppression_db")) {
    for (double v : dbm_vector(j, "suppression_db", k)) {
      if (v > 0.0)
        throw ConfigError("config error: 'suppression_db' must be <= 0 dB");
      cfg.suppression.push_back(std::sqrt(db_to_lin(v)));
    }
  } else {
    cfg.suppression.assign(k, std::sqrt(db_to_lin(-20.0)));
  }

  cfg.path_loss_exponent = number_or(j, "path_loss_exponent", 4.0);
  cfg.shadow_std_db = number_or(j, "shadow_std_db", 8.0);
  cfg.d_ref = number_or(j, "d_ref_m", 100.0);
  cfg.d_min = number_or(j, "d_min_m", 10.0);

  if (j.contains("region_m")) {
    const json& r = j["region_m"];
    if (!r.is_object()) throw ConfigError("config error: 'region_m' must be an object");
    cfg.region.x0 = number_or(r, "x", 0.0);
    cfg.region.y0 = number_or(r, "y", 0.0);
    cfg.region.width = require_number(r, "width");
    cfg.region.height = require_number(r, "height");
  }

  cfg.validate();
  return cfg;
}

std::string config_to_json(const ScenarioConfig& cfg) {
  json j;
  j["n_bs"] = cfg.n_bs;
  j["n_pairs"] = cfg.n_pairs;
  j["n_antennas"] = cfg.n_antennas;
  j["noise_power_dbm"] = mw_to_dbm(cfg.noise_power);
  json budgets = json::array(), thresholds = json::array(), nu = json::array();
  for (double v : cfg.power_budget) budgets.push_back(mw_to_dbm(v));
  for (double v : cfg.leak_threshold) thresholds.push_back(mw_to_dbm(v));
  for (double v : cfg.suppression) nu.push_back(lin_to_db(v * v));
  j["power_budget_dbm"] = budgets;
  j["leak_threshold_dbm"] = thresholds;
  j["suppression_db"] = nu;
  json sat = json::array();
  for (const auto& row : cfg.sat_interference) {
    json r = json::array();
    for (double v : row) r.push_back(mw_to_dbm(v));
    sat.push_back(r);
  }
  j["sat_interference_dbm"] = sat;
  j["path_loss_exponent"] = cfg.path_loss_exponent;
  j["shadow_std_db"] = cfg.shadow_std_db;
  j["d_ref_m"] = cfg.d_ref;
  j["d_min_m"] = cfg.d_min;
  j["region_m"] = {{"x", cfg.region.x0},
                   {"y", cfg.region.y0},
                   {"width", cfg.region.width},
                   {"height", cfg.region.height}};
  return j.dump(2);
}

}  // namespace hstn
