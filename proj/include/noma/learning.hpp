#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "noma/model.hpp"
#include "noma/rng.hpp"

namespace noma {
namespace learning {

// Layered DAG of one device's energy states across frames. Node (level, layer)
// means "level * max_energy / power_level joules left when frame `layer-1`
// begins"; an edge dropping `level_drop` levels spends that much power in the
// edge's frame. Layer 1 holds only the start node (full energy); layers
// 2..k+1 hold every level; the final hop to the terminal node spends nothing.
// Every start-terminal path has exactly k+1 edges and is a complete power
// plan for the horizon.
struct TgEdge {
  int u = 0, v = 0;
  int level_drop = 0;
  int frame = 1;  // 1..k are spending frames; k+1 is the terminal hop
};

struct TransitionGraph {
  int device_id = 0;
  int k = 0;             // frames
  int tau = 0;           // lattice resolution
  double max_energy = 0;
  int num_nodes = 0;
  std::vector<TgEdge> edges;
  std::vector<std::vector<int>> out_edges;  // per node, edge indices

  int start() const { return 0; }
  int terminal() const { return num_nodes - 1; }
  // nodes of layer t (2..k+1) are contiguous, level 0..tau
  int node_of(int level, int layer) const { return 1 + (layer - 2) * (tau + 1) + level; }
  int level_of(int node) const;
  int layer_of(int node) const;
  double edge_power(int e) const {
    return max_energy * edges[e].level_drop / double(tau);
  }
  std::uint64_t path_count() const;  // C(k + tau, k)
};

TransitionGraph build_tg(const DeviceProfile& dev, int num_frames);

using TgPath = std::vector<int>;  // edge indices, length k+1

// Deterministic set of paths that together touch every edge: for each edge,
// the path that stays at full energy until the edge's tail, crosses it, then
// holds the head's level to the end. Duplicates are removed.
std::vector<TgPath> covering_paths(const TransitionGraph& tg);

// Mixture path distribution: with probability gamma a uniform draw from the
// covering set, otherwise a weight-proportional draw layer by layer. q[e] is
// the probability that a sampled path crosses edge e; positive for every edge.
struct PathDistribution {
  const TransitionGraph* tg = nullptr;
  const std::vector<TgPath>* covering = nullptr;
  double gamma = 0.0;
  std::vector<double> w;  // normalized linear weights
  std::vector<double> z;  // per node, weight mass of all continuations to terminal
  std::vector<double> q;

  TgPath sample(Rng& rng) const;
  double path_probability(const TgPath& path) const;
};

PathDistribution edge_probabilities(const TransitionGraph& tg,
                                    std::span<const double> weights, double gamma,
                                    const std::vector<TgPath>& covering);

struct LearnerConfig {
  double gamma = 0.5;    // exploration share of the path mixture
  double beta = 0.01;    // optimism bias in the reward estimate
  double eta = 0.0;      // learning rate; 0 means the per-device default
                         // gamma / (2 (k+1) path_count)
  double alpha = 0.5;    // value-update step for the tabular learner
  double epsilon = 0.1;  // greedy exploration rate for the tabular learner
  int rounds = 100;
  std::uint64_t seed = 0;
};

// Per-round trace of a training run. frame_nsd and frame_mean_power are
// [round][frame]; chosen_levels keeps each device's level drops per frame.
struct RunRecord {
  int num_frames = 0;
  int num_devices = 0;
  std::vector<double> frame_nsd;         // rounds * frames
  std::vector<double> frame_mean_power;  // rounds * frames
  std::vector<std::vector<std::vector<int>>> chosen_levels;  // [round][device][frame]

  int rounds() const {
    return num_frames == 0 ? 0 : int(frame_nsd.size()) / num_frames;
  }
  double nsd_at(int round, int frame) const {
    return frame_nsd[std::size_t(round) * num_frames + frame];
  }
  double power_at(int round, int frame) const {
    return frame_mean_power[std::size_t(round) * num_frames + frame];
  }
  double round_total_nsd(int round) const;
  // one line per (round, frame): round,frame,nsd,mean_pc
  std::string to_csv() const;
};

struct FrameEval {
  int nsd = 0;
  std::vector<NomaGroup> groups;
  std::vector<int> served;
};

// Runs the online scheduler for one frame with the given per-device transmit
// powers as budgets. Throws if a power is negative or above the device cap.
FrameEval evaluate_power_plan(const Instance& inst, int frame,
                              std::span<const double> powers);

// Adversarial-bandit path learner: every device samples a plan from its
// mixture distribution, all plans are evaluated jointly frame by frame, and
// each edge weight moves by an importance-weighted estimate of the frame
// reward (served count normalized by the device population).
RunRecord pl_train(const Instance& inst, const LearnerConfig& cfg);

// Tabular value learner on the same state space: epsilon-greedy level drops
// per frame, one-step value backup from the jointly evaluated frame reward.
RunRecord ql_train(const Instance& inst, const LearnerConfig& cfg);

// No learning at all: every device picks a uniformly random lattice drop from
// whatever energy it has left, each round. The floor the learners must beat.
RunRecord rl_policy(const Instance& inst, std::uint64_t seed, int rounds = 1);

}  // namespace learning
}  // namespace noma
