#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "rng.hpp"

namespace hstn {

// Config-level validation failure; the message names the offending key.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct Region {
  double x0 = 0.0;
  double y0 = 0.0;
  double width = 0.0;
  double height = 0.0;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// All static problem parameters, stored in linear mW / amplitude units.
struct ScenarioConfig {
  int n_bs = 0;       // N
  int n_pairs = 0;    // K: channels = terrestrial MTs = satellite MTs
  int n_antennas = 0; // M per terrestrial MT
  double noise_power = 0.0;                         // sigma^2, mW
  std::vector<double> power_budget;                 // P_i, mW, length K
  std::vector<double> leak_threshold;               // mW, length K
  std::vector<std::vector<double>> sat_interference;// K x K, mW
  std::vector<double> suppression;                  // nu per channel, amplitude
  double path_loss_exponent = 4.0;
  double shadow_std_db = 8.0;
  double d_ref = 100.0;  // meters
  double d_min = 10.0;   // meters
  Region region{0.0, 0.0, 2000.0, 2000.0};  // terrestrial square; satellite
                                            // MTs occupy the x-adjacent square

  void validate() const;  // throws ConfigError
};

struct Geometry {
  std::vector<Point> bs_positions;       // N
  std::vector<Point> terr_mt_positions;  // K
  std::vector<Point> sat_mt_positions;   // K
};

// Large-scale amplitude gains.
struct LargeScaleState {
  int n_pairs = 0;
  int n_bs = 0;
  std::vector<double> terr_gain;  // l^t[user i][channel j][bs n], K*K*N
  std::vector<double> sat_gain;   // l^s[channel j][bs n], K*N

  double terr(int i, int j, int n) const {
    return terr_gain[(static_cast<std::size_t>(i) * n_pairs + j) * n_bs + n];
  }
  double sat(int j, int n) const {
    return sat_gain[static_cast<std::size_t>(j) * n_bs + n];
  }
};

// Scenario with the values reported for the reference simulation setup:
// N=4, K=3, M=4, noise -107 dBm, leakage cap -117 dBm, nu^2 = -20 dB,
// path loss exponent 4, shadowing 8 dB. Budget defaults to 20 dBm.
ScenarioConfig default_config();

// Uniform deployment: BSs and terrestrial MTs in `region`, satellite MTs in
// the adjacent offshore square. MT positions are redrawn until every
// BS<->MT distance is at least cfg.d_min.
Geometry sample_geometry(const ScenarioConfig& cfg, const Region& region, RngStream& rng);

// Log-distance path loss with log-normal shadowing on the power gain:
// l^2 = (d/d_ref)^-alpha * 10^(X/10), X ~ N(0, shadow_std_db^2) per link.
LargeScaleState derive_large_scale(const Geometry& geom, const ScenarioConfig& cfg,
                                   RngStream& rng);

// JSON round trip. Power-like keys are in dBm, suppression in dB (power),
// distances in meters. Unknown or malformed keys raise ConfigError naming
// the key.
ScenarioConfig config_from_json(const std::string& json_text);
std::string config_to_json(const ScenarioConfig& cfg);

double distance(const Point& a, const Point& b);

}  // namespace hstn
