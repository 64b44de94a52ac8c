#pragma once

#include <span>
#include <vector>

#include "noma/model.hpp"

namespace noma {
namespace online {

// Candidates for one RB: devices that still have a packet, are inside their
// window, and could decode alone at their budget. Arrays are parallel and run
// in the canonical order (ascending gain, ties by id).
struct SlotContext {
  int slot = 0;
  int frame = 0;
  std::vector<int> ids;
  std::vector<double> gains;
  std::vector<double> budgets;
  std::vector<double> thresholds;

  std::size_t size() const { return ids.size(); }
};

// Builds the slot context from an instance, per-device budgets and the set of
// devices already served this frame.
SlotContext make_slot_context(const Instance& inst, int slot, int frame,
                              std::span<const double> budgets,
                              const std::vector<char>& served);

// Largest decodable group on one RB: walk candidates from the weakest gain up,
// admitting each device whose received power still clears its threshold on top
// of everything admitted below it. The admitted set has maximum cardinality
// among all feasible subsets; if it exceeds cap, only the first cap members
// (the weakest gains) are kept.
NomaGroup bm_j(const SlotContext& ctx, int cap);

struct FrameResult {
  std::vector<NomaGroup> groups;  // one per slot, possibly empty
  std::vector<int> served;        // device ids, ascending
  int served_count = 0;
};

// Online scheduler for one frame: serves slots in order, each with the largest
// decodable group among devices not yet served. budgets may be empty (every
// device spends max_energy) or give one transmit power per device.
FrameResult bms(const Instance& inst, int frame, std::span<const double> budgets = {});

// Random-priority scheduler for single-device RBs: among the devices that
// could be served in the slot, pick the one the permutation ranks first.
// priority[i] is the rank of device i; lower goes first. Throws unless the
// instance has group_cap == 1.
FrameResult ranking_m1(const Instance& inst, int frame, std::span<const int> priority);

// Uncoordinated behavior: every unserved device transmits at full power in
// any slot it could decode alone in; the receiver keeps whoever still decodes
// under the resulting interference. Kept as a baseline for how much the
// grouping coordination buys.
FrameResult selfish_frame(const Instance& inst, int frame);

// Copies a frame result into schedule slots (x, p, z) for the given frame.
void apply_to_schedule(const FrameResult& fr, Schedule& s);

}  // namespace online
}  // namespace noma
