#include "noma/baselines.hpp"

#include <algorithm>
#include <stdexcept>

namespace noma {
namespace baselines {

using online::FrameResult;

namespace {

// decode check for a cluster ordered ascending by (gain, id); returns the
// index of the weakest member whose condition fails, or -1 if all pass
int first_failing(const Instance& inst, int slot, int frame, const std::vector<int>& members) {
  double x = 0.0;
  for (std::size_t r = 0; r < members.size(); ++r) {
    int i = members[r];
    double recv = inst.devices[i].max_energy * inst.gain(i, slot, frame);
    if (!feasible_geq(recv, inst.threshold(i, frame) * (1.0 + x))) return int(r);
    x += recv;
  }
  return -1;
}

void sort_canonical(const Instance& inst, int slot, int frame, std::vector<int>& members) {
  std::sort(members.begin(), members.end(), [&](int a, int b) {
    double ga = inst.gain(a, slot, frame), gb = inst.gain(b, slot, frame);
    if (ga != gb) return ga < gb;
    return a < b;
  });
}

void finish(const Instance& inst, std::vector<char>& served, FrameResult& fr) {
  for (int i = 0; i < inst.num_devices; ++i)
    if (served[i]) fr.served.push_back(i);
  fr.served_count = int(fr.served.size());
}

}  // namespace

FrameResult ath_frame(const Instance& inst, int frame) {
  FrameResult fr;
  std::vector<char> served(inst.num_devices, 0);
  for (int j = 0; j < inst.num_slots; ++j) {
    std::vector<int> ranked;
    for (int i = 0; i < inst.num_devices; ++i)
      if (!served[i]) ranked.push_back(i);
    std::sort(ranked.begin(), ranked.end(), [&](int a, int b) {
      double ga = inst.gain(a, j, frame), gb = inst.gain(b, j, frame);
      if (ga != gb) return ga > gb;
      return a < b;
    });

    int remaining = int(ranked.size());
    NomaGroup best;
    best.slot = j;
    best.frame = frame;
    if (remaining > 0) {
      int clusters = (remaining + inst.group_cap - 1) / inst.group_cap;
      std::vector<int> best_members;
      for (int c = 0; c < clusters; ++c) {
        std::vector<int> cluster;
        for (int r = c; r < remaining; r += clusters) {
          int i = ranked[r];
          if (!inst.in_window(i, j, frame)) continue;
          if (inst.demands[i][frame].packet_bits <= 0) continue;
          cluster.push_back(i);
        }
        sort_canonical(inst, j, frame, cluster);
        // drop the weakest offender until the whole cluster decodes
        while (!cluster.empty()) {
          int bad = first_failing(inst, j, frame, cluster);
          if (bad < 0) break;
          cluster.erase(cluster.begin() + bad);
        }
        if (int(cluster.size()) > int(best_members.size())) best_members = cluster;
      }
      best.members = best_members;
      for (int i : best.members) {
        best.budgets.push_back(inst.devices[i].max_energy);
        served[i] = 1;
      }
    }
    fr.groups.push_back(std::move(best));
  }
  finish(inst, served, fr);
  return fr;
}

namespace {

struct ZzNode {
  std::vector<int> members;  // 1 or 2 device ids, canonical order for the slot
  int slot = 0;
  int copy = 0;  // pair nodes are split into copies 0 and 1
};

bool nodes_conflict(const ZzNode& a, const ZzNode& b) {
  if (a.slot == b.slot) return true;
  for (int u : a.members)
    for (int v : b.members)
      if (u == v) return true;
  return false;
}

}  // namespace

FrameResult zz_frame(const Instance& inst, int frame) {
  if (inst.group_cap != 2)
    throw std::invalid_argument("zz_frame: requires group_cap == 2");

  // candidate groups per slot
  std::vector<ZzNode> nodes;
  for (int j = 0; j < inst.num_slots; ++j) {
    std::vector<int> elig;
    for (int i = 0; i < inst.num_devices; ++i) {
      if (!inst.in_window(i, j, frame)) continue;
      if (inst.demands[i][frame].packet_bits <= 0) continue;
      elig.push_back(i);
    }
    sort_canonical(inst, j, frame, elig);
    std::vector<int> solo;
    for (int i : elig)
      if (feasible_geq(inst.devices[i].max_energy * inst.gain(i, j, frame),
                       inst.threshold(i, frame)))
        solo.push_back(i);
    for (int i : solo) nodes.push_back({{i}, j, 0});
    for (std::size_t a = 0; a < solo.size(); ++a)
      for (std::size_t b = a + 1; b < solo.size(); ++b) {
        std::vector<int> pair = {solo[a], solo[b]};
        if (first_failing(inst, j, frame, pair) < 0) {
          nodes.push_back({pair, j, 0});
          nodes.push_back({pair, j, 1});
        }
      }
  }

  // adjacency on the split graph: copies of one pair never conflict
  const int nn = int(nodes.size());
  std::vector<std::vector<int>> adj(nn);
  for (int a = 0; a < nn; ++a)
    for (int b = a + 1; b < nn; ++b) {
      if (nodes[a].slot == nodes[b].slot && nodes[a].members == nodes[b].members)
        continue;
      if (nodes_conflict(nodes[a], nodes[b])) {
        adj[a].push_back(b);
        adj[b].push_back(a);
      }
    }

  // minimum-degree greedy independent set, deterministic tie order
  std::vector<char> removed(nn, 0), selected(nn, 0);
  std::vector<int> degree(nn);
  for (int a = 0; a < nn; ++a) degree[a] = int(adj[a].size());
  int alive = nn;
  while (alive > 0) {
    int pick = -1;
    for (int a = 0; a < nn; ++a) {
      if (removed[a]) continue;
      if (pick < 0) {
        pick = a;
        continue;
      }
      const ZzNode& x = nodes[a];
      const ZzNode& y = nodes[pick];
      auto key = [&](const ZzNode& z, int deg) {
        return std::tuple<int, int, int, int, int>(
            deg, z.slot, z.members.front(), z.members.back(), z.copy);
      };
      if (key(x, degree[a]) < key(y, degree[pick])) pick = a;
    }
    selected[pick] = 1;
    removed[pick] = 1;
    --alive;
    for (int b : adj[pick])
      if (!removed[b]) {
        removed[b] = 1;
        --alive;
        for (int c : adj[b])
          if (!removed[c]) --degree[c];
      }
  }

  FrameResult fr;
  fr.groups.assign(inst.num_slots, NomaGroup{});
  for (int j = 0; j < inst.num_slots; ++j) {
    fr.groups[j].slot = j;
    fr.groups[j].frame = frame;
  }
  std::vector<char> served(inst.num_devices, 0);
  for (int a = 0; a < nn; ++a) {
    if (!selected[a]) continue;
    NomaGroup& g = fr.groups[nodes[a].slot];
    if (!g.members.empty()) continue;  // the twin copy of this pair already landed
    for (int i : nodes[a].members) {
      g.members.push_back(i);
      g.budgets.push_back(inst.devices[i].max_energy);
      served[i] = 1;
    }
  }
  finish(inst, served, fr);
  return fr;
}

}  // namespace baselines
}  // namespace noma
