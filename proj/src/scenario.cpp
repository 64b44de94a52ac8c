#include "noma/scenario.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "noma/rng.hpp"

namespace noma {

using nlohmann::json;

namespace {
constexpr std::uint64_t kTagPosition = 1;
constexpr std::uint64_t kTagDemand = 2;
constexpr std::uint64_t kTagFading = 3;
}  // namespace

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

double path_loss_db(double dist_m, const ScenarioParams& p) {
  double d_km = std::max(dist_m, 1.0) / 1000.0;
  return 120.9 + 37.6 * std::log10(d_km) + p.antenna_gain_db + p.penetration_loss_db;
}

double noise_power_w(const ScenarioParams& p) {
  double w_rb = p.total_bandwidth_hz / p.num_slots;
  double dbm = p.noise_psd_dbm_hz + 10.0 * std::log10(w_rb) + p.noise_figure_db;
  return dbm_to_watt(dbm);
}

Instance generate_instance(const ScenarioParams& p) {
  if (p.num_devices <= 0 || p.num_slots <= 0 || p.num_frames <= 0)
    throw std::invalid_argument("generate_instance: dimensions must be positive");
  if (p.group_cap <= 0 || p.power_level <= 0)
    throw std::invalid_argument("generate_instance: group_cap and power_level must be positive");
  if (p.l_max_bits < 0)
    throw std::invalid_argument("generate_instance: l_max_bits must be nonnegative");

  Instance inst;
  inst.num_devices = p.num_devices;
  inst.num_slots = p.num_slots;
  inst.num_frames = p.num_frames;
  inst.group_cap = p.group_cap;
  inst.rb_bandwidth_hz = p.total_bandwidth_hz / p.num_slots;
  inst.channels.resize(p.num_devices, p.num_slots, p.num_frames);

  const double cx = p.area_side_m / 2.0, cy = p.area_side_m / 2.0;
  const double e_max = dbm_to_watt(p.max_power_dbm);
  const double noise_w = noise_power_w(p);

  inst.devices.resize(p.num_devices);
  inst.demands.assign(p.num_devices, std::vector<FrameDemand>(p.num_frames));

  for (int i = 0; i < p.num_devices; ++i) {
    DeviceProfile& dev = inst.devices[i];
    dev.id = i;
    dev.max_energy = e_max;
    dev.power_level = p.power_level;
    Rng pos(derive_stream(p.seed, kTagPosition, std::uint64_t(i)));
    dev.pos_x = p.area_side_m * pos.uniform01();
    dev.pos_y = p.area_side_m * pos.uniform01();

    double dist = std::hypot(dev.pos_x - cx, dev.pos_y - cy);
    double chan = std::pow(10.0, -path_loss_db(dist, p) / 10.0) / noise_w;

    for (int t = 0; t < p.num_frames; ++t) {
      Rng dr(derive_stream(p.seed, kTagDemand, std::uint64_t(i), std::uint64_t(t)));
      FrameDemand& d = inst.demands[i][t];
      d.packet_bits = dr.uniform_int(0, p.l_max_bits);
      d.arrival_slot = int(dr.uniform_int(1, p.num_slots));
      d.deadline_slot = int(dr.uniform_int(d.arrival_slot + 1, p.num_slots + 1));
      for (int j = 0; j < p.num_slots; ++j) {
        Rng fr(derive_stream(p.seed, kTagFading, std::uint64_t(i), std::uint64_t(j),
                             std::uint64_t(t)));
        inst.channels.at(i, j, t) = fr.exponential1() * chan;
      }
    }
  }
  return inst;
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& why) {
  throw std::runtime_error("instance " + where + ": " + why);
}

void check_instance(const Instance& inst) {
  const int m = inst.num_devices, n = inst.num_slots, k = inst.num_frames;
  if (m <= 0) fail("params.num_devices", "must be positive");
  if (n <= 0) fail("params.num_slots", "must be positive");
  if (k <= 0) fail("params.num_frames", "must be positive");
  if (inst.group_cap <= 0) fail("params.group_cap", "must be positive");
  if (!(inst.rb_bandwidth_hz > 0.0)) fail("params.rb_bandwidth_hz", "must be positive");
  if (int(inst.devices.size()) != m) fail("devices", "length must equal num_devices");
  if (int(inst.demands.size()) != m) fail("demands", "length must equal num_devices");
  for (int i = 0; i < m; ++i) {
    const auto& dev = inst.devices[i];
    std::string at = "devices[" + std::to_string(i) + "]";
    if (dev.id != i) fail(at + ".id", "ids must be 0..m-1 in order");
    if (!(dev.max_energy > 0.0) || !std::isfinite(dev.max_energy))
      fail(at + ".max_energy_w", "must be positive and finite");
    if (dev.power_level < 1) fail(at + ".power_level", "must be at least 1");
    if (int(inst.demands[i].size()) != k)
      fail("demands[" + std::to_string(i) + "]", "length must equal num_frames");
    for (int t = 0; t < k; ++t) {
      const FrameDemand& d = inst.demands[i][t];
      std::string dt = "demands[" + std::to_string(i) + "][" + std::to_string(t) + "]";
      if (d.packet_bits < 0) fail(dt + ".packet_bits", "must be nonnegative");
      if (d.arrival_slot < 1 || d.arrival_slot > n)
        fail(dt + ".arrival_slot", "must be in 1..num_slots");
      if (d.deadline_slot <= d.arrival_slot || d.deadline_slot > n + 1)
        fail(dt + ".deadline_slot", "must be in arrival_slot+1..num_slots+1");
    }
  }
  if (inst.channels.devices != m || inst.channels.slots != n || inst.channels.frames != k)
    fail("gains", "dimensions must match params");
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      for (int t = 0; t < k; ++t) {
        double g = inst.channels.at(i, j, t);
        if (!(g > 0.0) || !std::isfinite(g))
          fail("gains[" + std::to_string(i) + "][" + std::to_string(j) + "][" +
                   std::to_string(t) + "]",
               "must be positive and finite");
      }
}

}  // namespace

std::string instance_to_json(const Instance& inst) {
  json j;
  j["format"] = "noma-instance-v1";
  j["params"] = {{"num_devices", inst.num_devices},
                 {"num_slots", inst.num_slots},
                 {"num_frames", inst.num_frames},
                 {"group_cap", inst.group_cap},
                 {"rb_bandwidth_hz", inst.rb_bandwidth_hz}};
  j["devices"] = json::array();
  for (const auto& dev : inst.devices)
    j["devices"].push_back({{"id", dev.id},
                            {"max_energy_w", dev.max_energy},
                            {"power_level", dev.power_level},
                            {"position", {dev.pos_x, dev.pos_y}}});
  j["demands"] = json::array();
  for (const auto& row : inst.demands) {
    json fr = json::array();
    for (const FrameDemand& d : row)
      fr.push_back({{"packet_bits", d.packet_bits},
                    {"arrival_slot", d.arrival_slot},
                    {"deadline_slot", d.deadline_slot}});
    j["demands"].push_back(std::move(fr));
  }
  json gains = json::array();
  for (int i = 0; i < inst.num_devices; ++i) {
    json per_slot = json::array();
    for (int jj = 0; jj < inst.num_slots; ++jj) {
      json per_frame = json::array();
      for (int t = 0; t < inst.num_frames; ++t)
        per_frame.push_back(inst.channels.at(i, jj, t));
      per_slot.push_back(std::move(per_frame));
    }
    gains.push_back(std::move(per_slot));
  }
  j["gains"] = std::move(gains);
  return j.dump(1);
}

Instance instance_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("instance: not valid JSON: ") + e.what());
  }
  Instance inst;
  try {
    const json& p = j.at("params");
    inst.num_devices = p.at("num_devices").get<int>();
    inst.num_slots = p.at("num_slots").get<int>();
    inst.num_frames = p.at("num_frames").get<int>();
    inst.group_cap = p.at("group_cap").get<int>();
    inst.rb_bandwidth_hz = p.at("rb_bandwidth_hz").get<double>();
    if (inst.num_devices <= 0 || inst.num_slots <= 0 || inst.num_frames <= 0)
      fail("params", "dimensions must be positive");

    const json& devs = j.at("devices");
    for (const json& d : devs) {
      DeviceProfile dev;
      dev.id = d.at("id").get<int>();
      dev.max_energy = d.at("max_energy_w").get<double>();
      dev.power_level = d.at("power_level").get<int>();
      const json& pos = d.at("position");
      if (!pos.is_array() || pos.size() != 2)
        fail("devices[" + std::to_string(inst.devices.size()) + "].position",
             "must be [x, y]");
      dev.pos_x = pos[0].get<double>();
      dev.pos_y = pos[1].get<double>();
      inst.devices.push_back(dev);
    }

    for (const json& row : j.at("demands")) {
      std::vector<FrameDemand> frames;
      for (const json& d : row) {
        FrameDemand fd;
        fd.packet_bits = d.at("packet_bits").get<std::int64_t>();
        fd.arrival_slot = d.at("arrival_slot").get<int>();
        fd.deadline_slot = d.at("deadline_slot").get<int>();
        frames.push_back(fd);
      }
      inst.demands.push_back(std::move(frames));
    }

    const json& gains = j.at("gains");
    if (int(gains.size()) != inst.num_devices) fail("gains", "length must equal num_devices");
    inst.channels.resize(inst.num_devices, inst.num_slots, inst.num_frames);
    for (int i = 0; i < inst.num_devices; ++i) {
      const json& per_slot = gains[i];
      if (int(per_slot.size()) != inst.num_slots)
        fail("gains[" + std::to_string(i) + "]", "length must equal num_slots");
      for (int jj = 0; jj < inst.num_slots; ++jj) {
        const json& per_frame = per_slot[jj];
        if (int(per_frame.size()) != inst.num_frames)
          fail("gains[" + std::to_string(i) + "][" + std::to_string(jj) + "]",
               "length must equal num_frames");
        for (int t = 0; t < inst.num_frames; ++t)
          inst.channels.at(i, jj, t) = per_frame[t].get<double>();
      }
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("instance: malformed field: ") + e.what());
  }
  check_instance(inst);
  return inst;
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_instance: cannot open " + path);
  out << instance_to_json(inst);
  if (!out) throw std::runtime_error("save_instance: write failed for " + path);
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_instance: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return instance_from_json(text);
}

}  // namespace noma
