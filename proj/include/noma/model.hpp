#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace noma {

struct DeviceProfile {
  int id = 0;
  double max_energy = 0.0;  // watts; cap per transmission and over the horizon
  int power_level = 1;      // lattice resolution: allowed powers are multiples of max_energy/power_level
  double pos_x = 0.0;       // meters
  double pos_y = 0.0;
};

struct FrameDemand {
  std::int64_t packet_bits = 0;  // 0 means no packet this frame
  int arrival_slot = 1;          // 1-based, first usable slot
  int deadline_slot = 2;         // exclusive: usable slots are {arrival .. deadline-1}
};

// Noise-normalized linear channel gains, indexed [device][slot][frame].
struct ChannelTensor {
  int devices = 0, slots = 0, frames = 0;
  std::vector<double> g;

  void resize(int m, int n, int k) {
    devices = m;
    slots = n;
    frames = k;
    g.assign(std::size_t(m) * n * k, 0.0);
  }
  double& at(int i, int j, int t) {
    return g[(std::size_t(i) * slots + j) * frames + t];
  }
  double at(int i, int j, int t) const {
    return g[(std::size_t(i) * slots + j) * frames + t];
  }
};

struct Instance {
  int num_devices = 0;
  int num_slots = 0;
  int num_frames = 0;
  int group_cap = 1;             // max devices decodable on one RB
  double rb_bandwidth_hz = 0.0;  // per-RB bandwidth W
  std::vector<DeviceProfile> devices;
  std::vector<std::vector<FrameDemand>> demands;  // [device][frame]
  ChannelTensor channels;

  double gain(int i, int j, int t) const { return channels.at(i, j, t); }
  const FrameDemand& demand(int i, int t) const { return demands[i][t]; }
  // slot j is 0-based here; demand windows are stored 1-based
  bool in_window(int i, int j, int t) const {
    const FrameDemand& d = demands[i][t];
    return j + 1 >= d.arrival_slot && j + 1 < d.deadline_slot;
  }
  double threshold(int i, int t) const;  // SINR threshold for full delivery in one slot
};

// Binary serve flags x, transmit powers p and served indicators z with the
// same [device][slot][frame] layout as ChannelTensor.
struct Schedule {
  int devices = 0, slots = 0, frames = 0;
  std::vector<std::uint8_t> x;
  std::vector<double> p;
  std::vector<std::uint8_t> z;  // [device][frame]

  void resize(int m, int n, int k) {
    devices = m;
    slots = n;
    frames = k;
    x.assign(std::size_t(m) * n * k, 0);
    p.assign(std::size_t(m) * n * k, 0.0);
    z.assign(std::size_t(m) * k, 0);
  }
  std::size_t idx(int i, int j, int t) const {
    return (std::size_t(i) * slots + j) * frames + t;
  }
  std::uint8_t& x_at(int i, int j, int t) { return x[idx(i, j, t)]; }
  double& p_at(int i, int j, int t) { return p[idx(i, j, t)]; }
  std::uint8_t& z_at(int i, int t) { return z[std::size_t(i) * frames + t]; }
  std::uint8_t x_at(int i, int j, int t) const { return x[idx(i, j, t)]; }
  double p_at(int i, int j, int t) const { return p[idx(i, j, t)]; }
  std::uint8_t z_at(int i, int t) const { return z[std::size_t(i) * frames + t]; }
};

// One RB's accepted members for a given (slot, frame), sorted ascending by
// (gain, id). budgets[r] is the transmit power of members[r].
struct NomaGroup {
  int slot = 0;
  int frame = 0;
  std::vector<int> members;
  std::vector<double> budgets;
};

// SINR threshold 2^(L/W) - 1 for delivering L bits in one unit slot on
// bandwidth W.
double rate_threshold(double packet_bits, double rb_bandwidth_hz);

// a >= b up to 1e-9 relative slack; all feasibility checks go through this so
// borderline groups are judged the same way everywhere.
bool feasible_geq(double a, double b);

// Achievable rate (bits/s) of the member at member_index, with gains/powers of
// all co-RB members. Decoding is in descending gain order, so interference
// comes only from strictly lower-gain members.
double compute_rate(std::span<const double> gains, std::span<const double> powers,
                    std::size_t member_index, double rb_bandwidth_hz);

// Whether every member of a candidate group can deliver its packet at its
// budget. Arrays run in the canonical member order (ascending gain, ties by
// id); a tied member counts toward the interference of members after it, which
// matches the decode order the algorithms use.
bool group_feasible(std::span<const double> gains, std::span<const double> budgets,
                    std::span<const double> thresholds);

struct Violation {
  int constraint = 0;  // numbering follows the problem statement: 5 rate, 6 power-serve link,
                       // 7 energy budget, 8 window, 9 slot/frame link, 10 group cap, 11 demand link
  int device = -1;
  int slot = -1;
  int frame = -1;
  std::string detail;
};

// Checks a schedule against every constraint of the grouping/scheduling/power
// allocation problem. Empty result means feasible. Throws std::invalid_argument
// on dimension mismatch.
std::vector<Violation> validate_schedule(const Instance& inst, const Schedule& s);

// Total number of served devices over all frames.
long count_served(const Schedule& s);

}  // namespace noma
