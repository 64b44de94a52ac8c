#include "noma/ilp.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace noma {

namespace {

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string export_ilp(const Instance& inst) {
  const int m = inst.num_devices, n = inst.num_slots, k = inst.num_frames;
  for (const auto& dev : inst.devices)
    if (dev.power_level != 1)
      throw std::invalid_argument(
          "export_ilp: device " + std::to_string(dev.id) +
          " has a power lattice; only binary-power instances can be exported");

  // candidate transmissions: window open, packet present, decodable alone
  auto candidate = [&](int i, int j, int t) {
    if (!inst.in_window(i, j, t)) return false;
    if (inst.demands[i][t].packet_bits <= 0) return false;
    double recv = inst.devices[i].max_energy * inst.gain(i, j, t);
    return feasible_geq(recv, inst.threshold(i, t));
  };

  std::vector<std::vector<std::vector<bool>>> has_x(
      m, std::vector<std::vector<bool>>(n, std::vector<bool>(k, false)));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      for (int t = 0; t < k; ++t) has_x[i][j][t] = candidate(i, j, t);

  auto xname = [](int i, int j, int t) {
    return "x_" + std::to_string(i) + "_" + std::to_string(j) + "_" + std::to_string(t);
  };
  auto zname = [](int i, int t) {
    return "z_" + std::to_string(i) + "_" + std::to_string(t);
  };

  std::ostringstream lp;
  lp << "\\ binary-power device scheduling, max served devices\n";
  lp << "Maximize\n obj:";
  bool any_z = false;
  for (int i = 0; i < m; ++i)
    for (int t = 0; t < k; ++t)
      if (inst.demands[i][t].packet_bits > 0) {
        lp << (any_z ? " + " : " ") << zname(i, t);
        any_z = true;
      }
  if (!any_z) lp << " 0 z_none";
  lp << "\nSubject To\n";

  // z only counts when some transmission carries it; each transmission needs z
  for (int i = 0; i < m; ++i)
    for (int t = 0; t < k; ++t) {
      if (inst.demands[i][t].packet_bits <= 0) continue;
      lp << " serve_" << i << "_" << t << ": " << zname(i, t);
      for (int j = 0; j < n; ++j)
        if (has_x[i][j][t]) lp << " - " << xname(i, j, t);
      lp << " <= 0\n";
      for (int j = 0; j < n; ++j)
        if (has_x[i][j][t])
          lp << " link_" << i << "_" << j << "_" << t << ": " << xname(i, j, t)
             << " - " << zname(i, t) << " <= 0\n";
    }

  // full energy per transmission, so at most one transmission over the horizon
  for (int i = 0; i < m; ++i) {
    bool any = false;
    std::ostringstream row;
    for (int j = 0; j < n; ++j)
      for (int t = 0; t < k; ++t)
        if (has_x[i][j][t]) {
          row << (any ? " + " : " ") << xname(i, j, t);
          any = true;
        }
    if (any) lp << " energy_" << i << ":" << row.str() << " <= 1\n";
  }

  // per-slot group size
  for (int j = 0; j < n; ++j)
    for (int t = 0; t < k; ++t) {
      bool any = false;
      std::ostringstream row;
      for (int i = 0; i < m; ++i)
        if (has_x[i][j][t]) {
          row << (any ? " + " : " ") << xname(i, j, t);
          any = true;
        }
      if (any)
        lp << " cap_" << j << "_" << t << ":" << row.str()
           << " <= " << inst.group_cap << "\n";
    }

  // decoding condition per candidate transmission, deactivated by big-M when
  // the device stays silent
  for (int t = 0; t < k; ++t)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < m; ++i) {
        if (!has_x[i][j][t]) continue;
        double own = inst.devices[i].max_energy * inst.gain(i, j, t);
        double bi = inst.threshold(i, t);
        double gi = inst.gain(i, j, t);

        // interferers: candidates decoded after i (strictly lower gain, ties by id)
        std::vector<int> lower;
        double sum_all = 0.0;
        for (int u = 0; u < m; ++u) {
          if (u == i || !has_x[u][j][t]) continue;
          double gu = inst.gain(u, j, t);
          sum_all += inst.devices[u].max_energy * gu;
          if (gu < gi || (gu == gi && u < i)) lower.push_back(u);
        }
        if (lower.empty()) continue;  // solo condition already met by construction
        double big_m = bi * (1.0 + sum_all);
        lp << " sinr_" << i << "_" << j << "_" << t << ":";
        for (std::size_t r = 0; r < lower.size(); ++r) {
          int u = lower[r];
          double coef = bi * inst.devices[u].max_energy * inst.gain(u, j, t);
          lp << (r ? " + " : " ") << num(coef) << " " << xname(u, j, t);
        }
        lp << " + " << num(big_m) << " " << xname(i, j, t)
           << " <= " << num(big_m + own - bi) << "\n";
      }

  lp << "Binaries\n";
  for (int i = 0; i < m; ++i)
    for (int t = 0; t < k; ++t) {
      if (inst.demands[i][t].packet_bits > 0) lp << " " << zname(i, t) << "\n";
      for (int j = 0; j < n; ++j)
        if (has_x[i][j][t]) lp << " " << xname(i, j, t) << "\n";
    }
  if (!any_z) lp << " z_none\n";
  lp << "End\n";
  return lp.str();
}

}  // namespace noma
