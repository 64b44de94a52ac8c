#pragma once

#include <span>
#include <vector>

#include "noma/model.hpp"

namespace noma {
namespace exact {

// Size guards: the enumerative solvers refuse instances above these sizes
// unless the caller overrides them knowingly.
struct Guards {
  int frame_max_devices = 10;
  int frame_max_slots = 5;
  int horizon_max_devices = 4;
  int horizon_max_frames = 3;
  int horizon_max_level = 3;
  bool overridden = false;
};

// Exact optimum for single-device RBs in one frame, via maximum bipartite
// matching between slots and the devices servable in them. Polynomial, no
// size guard. Returns the served count and one optimal assignment
// (slot -> device id, -1 for idle slots).
struct MatchingSolution {
  int served_count = 0;
  std::vector<int> slot_device;
};
MatchingSolution opt_matching_m1(const Instance& inst, int frame);

// Exhaustive optimum for one frame with arbitrary group cap: every way of
// packing not-yet-served devices into per-slot decodable groups, explored
// slot by slot with memoization on (slot, unserved set) plus two upper
// bounds (per-slot greedy sums and a capacity-respecting matching). budgets
// as in bms. Exponential worst case; guarded.
struct FrameSolution {
  int served_count = 0;
  std::vector<NomaGroup> groups;
  std::vector<int> served;
};
FrameSolution opt_bruteforce_frame(const Instance& inst, int frame,
                                   std::span<const double> budgets = {},
                                   const Guards& guards = {});

// Exhaustive optimum over the whole horizon: enumerates every split of each
// device's energy across frames on its power lattice, solving each frame with
// opt_bruteforce_frame (memoized per frame and budget profile). Tightly
// guarded; intended for cross-checking the learners on toy instances.
int opt_bruteforce_horizon(const Instance& inst, const Guards& guards = {});

}  // namespace exact
}  // namespace noma
