#include "noma/online.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace noma {
namespace online {

SlotContext make_slot_context(const Instance& inst, int slot, int frame,
                              std::span<const double> budgets,
                              const std::vector<char>& served) {
  if (!budgets.empty() && int(budgets.size()) != inst.num_devices)
    throw std::invalid_argument("make_slot_context: budgets size mismatch");
  SlotContext ctx;
  ctx.slot = slot;
  ctx.frame = frame;
  std::vector<int> order;
  for (int i = 0; i < inst.num_devices; ++i) {
    if (!served.empty() && served[i]) continue;
    if (!inst.in_window(i, slot, frame)) continue;
    if (inst.demands[i][frame].packet_bits <= 0) continue;
    double budget = budgets.empty() ? inst.devices[i].max_energy : budgets[i];
    if (budget <= 0.0) continue;
    if (!feasible_geq(budget * inst.gain(i, slot, frame), inst.threshold(i, frame)))
      continue;
    order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double ga = inst.gain(a, slot, frame), gb = inst.gain(b, slot, frame);
    if (ga != gb) return ga < gb;
    return a < b;
  });
  for (int i : order) {
    ctx.ids.push_back(i);
    ctx.gains.push_back(inst.gain(i, slot, frame));
    ctx.budgets.push_back(budgets.empty() ? inst.devices[i].max_energy : budgets[i]);
    ctx.thresholds.push_back(inst.threshold(i, frame));
  }
  return ctx;
}

NomaGroup bm_j(const SlotContext& ctx, int cap) {
  if (cap < 0) throw std::invalid_argument("bm_j: negative cap");
  NomaGroup group;
  group.slot = ctx.slot;
  group.frame = ctx.frame;
  double x = 0.0;
  for (std::size_t r = 0; r < ctx.size(); ++r) {
    double recv = ctx.budgets[r] * ctx.gains[r];
    if (feasible_geq(recv, ctx.thresholds[r] * (1.0 + x))) {
      group.members.push_back(ctx.ids[r]);
      group.budgets.push_back(ctx.budgets[r]);
      x += recv;
    }
  }
  if (int(group.members.size()) > cap) {
    group.members.resize(cap);
    group.budgets.resize(cap);
  }
  return group;
}

FrameResult bms(const Instance& inst, int frame, std::span<const double> budgets) {
  FrameResult fr;
  std::vector<char> served(inst.num_devices, 0);
  for (int j = 0; j < inst.num_slots; ++j) {
    SlotContext ctx = make_slot_context(inst, j, frame, budgets, served);
    NomaGroup g = bm_j(ctx, inst.group_cap);
    for (int i : g.members) served[i] = 1;
    fr.groups.push_back(std::move(g));
  }
  for (int i = 0; i < inst.num_devices; ++i)
    if (served[i]) fr.served.push_back(i);
  fr.served_count = int(fr.served.size());
  return fr;
}

FrameResult ranking_m1(const Instance& inst, int frame, std::span<const int> priority) {
  if (inst.group_cap != 1)
    throw std::invalid_argument("ranking_m1: requires group_cap == 1");
  if (int(priority.size()) != inst.num_devices)
    throw std::invalid_argument("ranking_m1: priority size mismatch");
  FrameResult fr;
  std::vector<char> served(inst.num_devices, 0);
  for (int j = 0; j < inst.num_slots; ++j) {
    SlotContext ctx = make_slot_context(inst, j, frame, {}, served);
    NomaGroup g;
    g.slot = j;
    g.frame = frame;
    int best = -1;
    for (int i : ctx.ids)
      if (best < 0 || priority[i] < priority[best]) best = i;
    if (best >= 0) {
      g.members.push_back(best);
      g.budgets.push_back(inst.devices[best].max_energy);
      served[best] = 1;
    }
    fr.groups.push_back(std::move(g));
  }
  for (int i = 0; i < inst.num_devices; ++i)
    if (served[i]) fr.served.push_back(i);
  fr.served_count = int(fr.served.size());
  return fr;
}

FrameResult selfish_frame(const Instance& inst, int frame) {
  FrameResult fr;
  std::vector<char> served(inst.num_devices, 0);
  for (int j = 0; j < inst.num_slots; ++j) {
    // everyone eligible transmits; transmitters below a device raise the bar
    // it must clear
    SlotContext ctx = make_slot_context(inst, j, frame, {}, served);
    NomaGroup g;
    g.slot = j;
    g.frame = frame;
    double x = 0.0;
    for (std::size_t r = 0; r < ctx.size(); ++r) {
      double recv = ctx.budgets[r] * ctx.gains[r];
      if (feasible_geq(recv, ctx.thresholds[r] * (1.0 + x))) {
        g.members.push_back(ctx.ids[r]);
        g.budgets.push_back(ctx.budgets[r]);
      }
      x += recv;  // decoded or not, the transmission interferes
    }
    if (int(g.members.size()) > inst.group_cap) {
      // the receiver runs out of decoder stages after cap successes, and it
      // works down from the strongest signal (the back of the canonical order)
      g.members.erase(g.members.begin(), g.members.end() - inst.group_cap);
      g.budgets.erase(g.budgets.begin(), g.budgets.end() - inst.group_cap);
    }
    for (int i : g.members) served[i] = 1;
    fr.groups.push_back(std::move(g));
  }
  for (int i = 0; i < inst.num_devices; ++i)
    if (served[i]) fr.served.push_back(i);
  fr.served_count = int(fr.served.size());
  return fr;
}

void apply_to_schedule(const FrameResult& fr, Schedule& s) {
  for (const NomaGroup& g : fr.groups)
    for (std::size_t r = 0; r < g.members.size(); ++r) {
      s.x_at(g.members[r], g.slot, g.frame) = 1;
      s.p_at(g.members[r], g.slot, g.frame) = g.budgets[r];
      s.z_at(g.members[r], g.frame) = 1;
    }
}

}  // namespace online
}  // namespace noma
