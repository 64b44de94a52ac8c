#include "noma/model.hpp"

#include <cmath>
#include <stdexcept>

namespace noma {

double rate_threshold(double packet_bits, double rb_bandwidth_hz) {
  if (rb_bandwidth_hz <= 0.0)
    throw std::invalid_argument("rate_threshold: bandwidth must be positive");
  if (packet_bits < 0.0)
    throw std::invalid_argument("rate_threshold: negative packet size");
  return std::exp2(packet_bits / rb_bandwidth_hz) - 1.0;
}

double Instance::threshold(int i, int t) const {
  return rate_threshold(double(demands[i][t].packet_bits), rb_bandwidth_hz);
}

bool feasible_geq(double a, double b) {
  double scale = std::max(std::fabs(a), std::fabs(b));
  return a >= b - 1e-9 * scale;
}

double compute_rate(std::span<const double> gains, std::span<const double> powers,
                    std::size_t member_index, double rb_bandwidth_hz) {
  if (gains.size() != powers.size())
    throw std::invalid_argument("compute_rate: gains/powers size mismatch");
  if (member_index >= gains.size())
    throw std::invalid_argument("compute_rate: member index out of range");
  double own = gains[member_index];
  double interference = 0.0;
  for (std::size_t r = 0; r < gains.size(); ++r)
    if (gains[r] < own) interference += powers[r] * gains[r];
  double sinr = powers[member_index] * own / (1.0 + interference);
  return rb_bandwidth_hz * std::log2(1.0 + sinr);
}

bool group_feasible(std::span<const double> gains, std::span<const double> budgets,
                    std::span<const double> thresholds) {
  if (gains.size() != budgets.size() || gains.size() != thresholds.size())
    throw std::invalid_argument("group_feasible: array size mismatch");
  double x = 0.0;  // received power already decoded below this member
  for (std::size_t r = 0; r < gains.size(); ++r) {
    double recv = budgets[r] * gains[r];
    if (!feasible_geq(recv, thresholds[r] * (1.0 + x))) return false;
    x += recv;
  }
  return true;
}

std::vector<Violation> validate_schedule(const Instance& inst, const Schedule& s) {
  if (s.devices != inst.num_devices || s.slots != inst.num_slots ||
      s.frames != inst.num_frames)
    throw std::invalid_argument("validate_schedule: schedule dimensions do not match instance");

  std::vector<Violation> out;
  const int m = inst.num_devices, n = inst.num_slots, k = inst.num_frames;

  for (int t = 0; t < k; ++t) {
    // per-slot transmitter sets, needed for the rate checks
    std::vector<std::vector<int>> slot_members(n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < m; ++i)
        if (s.x_at(i, j, t)) slot_members[j].push_back(i);

    for (int j = 0; j < n; ++j) {
      if (int(slot_members[j].size()) > inst.group_cap)
        out.push_back({10, -1, j, t,
                       "slot holds " + std::to_string(slot_members[j].size()) +
                           " devices, cap is " + std::to_string(inst.group_cap)});
    }

    for (int i = 0; i < m; ++i) {
      const FrameDemand& d = inst.demands[i][t];
      bool served = s.z_at(i, t) != 0;
      if (served && d.packet_bits == 0)
        out.push_back({11, i, -1, t, "served but has no packet"});

      double achieved = 0.0;
      for (int j = 0; j < n; ++j) {
        bool on = s.x_at(i, j, t) != 0;
        double p = s.p_at(i, j, t);
        if (p < 0.0 || (p > 0.0) != on)
          out.push_back({6, i, j, t, "power " + std::to_string(p) +
                                         " inconsistent with serve flag"});
        if (on && p > inst.devices[i].max_energy * (1.0 + 1e-9))
          out.push_back({6, i, j, t, "power exceeds device cap"});
        if (on && !inst.in_window(i, j, t))
          out.push_back({8, i, j, t, "transmission outside arrival/deadline window"});
        if (on && !served)
          out.push_back({9, i, j, t, "transmits in a frame it is not served in"});
        if (on) {
          const auto& mem = slot_members[j];
          std::vector<double> gg(mem.size()), pp(mem.size());
          std::size_t self = 0;
          for (std::size_t r = 0; r < mem.size(); ++r) {
            gg[r] = inst.gain(mem[r], j, t);
            pp[r] = s.p_at(mem[r], j, t);
            if (mem[r] == i) self = r;
          }
          achieved += compute_rate(gg, pp, self, inst.rb_bandwidth_hz);
        }
      }
      if (served && !feasible_geq(achieved, double(d.packet_bits)))
        out.push_back({5, i, -1, t,
                       "delivers " + std::to_string(achieved) + " of " +
                           std::to_string(d.packet_bits) + " bits"});
    }
  }

  for (int i = 0; i < m; ++i) {
    double total = 0.0;
    for (int j = 0; j < n; ++j)
      for (int t = 0; t < k; ++t) total += s.p_at(i, j, t);
    if (!feasible_geq(inst.devices[i].max_energy, total))
      out.push_back({7, i, -1, -1, "total transmit energy " + std::to_string(total) +
                                       " exceeds budget " +
                                       std::to_string(inst.devices[i].max_energy)});
  }
  return out;
}

long count_served(const Schedule& s) {
  long c = 0;
  for (std::uint8_t v : s.z) c += v;
  return c;
}

}  // namespace noma
