#pragma once

#include <cstdint>
#include <string>

#include "noma/model.hpp"

namespace noma {

// Cellular uplink scenario: devices dropped uniformly in a square cell with
// the base station at the center, urban macro path loss with antenna and
// penetration corrections, unit-mean Rayleigh fading power redrawn per
// (device, slot, frame), and thermal noise over one RB bandwidth.
struct ScenarioParams {
  int num_devices = 100;
  int num_slots = 10;
  int num_frames = 1;
  int group_cap = 2;
  int power_level = 1;  // tau for every device

  double area_side_m = 1000.0;
  double total_bandwidth_hz = 200e3;  // split evenly over num_slots RBs
  double max_power_dbm = 23.0;
  std::int64_t l_max_bits = 100000;  // packet sizes are uniform on {0..l_max}
  double noise_psd_dbm_hz = -174.0;
  double noise_figure_db = 5.0;
  double antenna_gain_db = -4.0;
  double penetration_loss_db = 10.0;

  std::uint64_t seed = 0;
};

double dbm_to_watt(double dbm);
double watt_to_dbm(double w);

// 120.9 + 37.6 log10(d_km) plus antenna gain and penetration loss, in dB.
// Distances are clamped below at one meter.
double path_loss_db(double dist_m, const ScenarioParams& p);

// Thermal noise power over one RB (watts), including the noise figure.
double noise_power_w(const ScenarioParams& p);

// Deterministic for a given seed, and stable per device: growing num_devices
// appends devices without changing the draws of existing ones.
Instance generate_instance(const ScenarioParams& p);

// JSON (de)serialization. Round trips are exact: every double survives
// save/load bit for bit. load_instance validates shape and invariants and
// throws std::runtime_error naming the offending field.
void save_instance(const Instance& inst, const std::string& path);
Instance load_instance(const std::string& path);
std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);

}  // namespace noma
