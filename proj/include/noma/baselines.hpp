#pragma once

#include <vector>

#include "noma/model.hpp"
#include "noma/online.hpp"

namespace noma {
namespace baselines {

// Gain-stride clustering: per slot, rank the unserved devices by descending
// gain and deal them into ceil(m/cap) clusters round-robin style, so each
// cluster mixes one strong device with progressively weaker ones. Clusters are
// pruned (window, packet, decode condition) and the slot serves the largest
// surviving cluster, ties going to the lowest cluster index.
online::FrameResult ath_frame(const Instance& inst, int frame);

// Conflict-graph scheduler for pair-sized RBs (requires group_cap == 2).
// Candidate nodes are (group, slot) pairs: every decodable singleton and
// every decodable pair. Nodes conflict when they share a slot or a device.
// Each pair node is split into two mutually non-adjacent copies inheriting
// all neighbors, and a minimum-degree greedy independent set on the split
// graph picks the schedule. Offline: it sees all slots at once.
online::FrameResult zz_frame(const Instance& inst, int frame);

}  // namespace baselines
}  // namespace noma
