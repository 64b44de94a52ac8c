#include "noma/exact.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <unordered_map>

#include "noma/online.hpp"

namespace noma {
namespace exact {

namespace {

// max bipartite matching (Hopcroft-Karp), left vertices adj -> right vertices
class BipartiteMatcher {
 public:
  BipartiteMatcher(int n_left, int n_right)
      : n_left_(n_left), n_right_(n_right), adj_(n_left) {}

  void add_edge(int l, int r) { adj_[l].push_back(r); }

  int solve() {
    match_l_.assign(n_left_, -1);
    match_r_.assign(n_right_, -1);
    int matched = 0;
    while (bfs()) {
      for (int l = 0; l < n_left_; ++l)
        if (match_l_[l] < 0 && dfs(l)) ++matched;
    }
    return matched;
  }

  int matched_right(int l) const { return match_l_[l]; }

 private:
  bool bfs() {
    std::queue<int> q;
    dist_.assign(n_left_, -1);
    for (int l = 0; l < n_left_; ++l)
      if (match_l_[l] < 0) {
        dist_[l] = 0;
        q.push(l);
      }
    bool found = false;
    while (!q.empty()) {
      int l = q.front();
      q.pop();
      for (int r : adj_[l]) {
        int l2 = match_r_[r];
        if (l2 < 0)
          found = true;
        else if (dist_[l2] < 0) {
          dist_[l2] = dist_[l] + 1;
          q.push(l2);
        }
      }
    }
    return found;
  }

  bool dfs(int l) {
    for (int r : adj_[l]) {
      int l2 = match_r_[r];
      if (l2 < 0 || (dist_[l2] == dist_[l] + 1 && dfs(l2))) {
        match_l_[l] = r;
        match_r_[r] = l;
        return true;
      }
    }
    dist_[l] = -1;
    return false;
  }

  int n_left_, n_right_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> match_l_, match_r_, dist_;
};

bool servable_alone(const Instance& inst, int i, int j, int t, double budget) {
  if (!inst.in_window(i, j, t)) return false;
  if (inst.demands[i][t].packet_bits <= 0) return false;
  if (budget <= 0.0) return false;
  return feasible_geq(budget * inst.gain(i, j, t), inst.threshold(i, t));
}

}  // namespace

MatchingSolution opt_matching_m1(const Instance& inst, int frame) {
  if (inst.group_cap != 1)
    throw std::invalid_argument("opt_matching_m1: requires group_cap == 1");
  BipartiteMatcher matcher(inst.num_slots, inst.num_devices);
  for (int j = 0; j < inst.num_slots; ++j)
    for (int i = 0; i < inst.num_devices; ++i)
      if (servable_alone(inst, i, j, frame, inst.devices[i].max_energy))
        matcher.add_edge(j, i);
  MatchingSolution sol;
  sol.served_count = matcher.solve();
  sol.slot_device.resize(inst.num_slots);
  for (int j = 0; j < inst.num_slots; ++j) sol.slot_device[j] = matcher.matched_right(j);
  return sol;
}

namespace {

struct SlotCandidates {
  std::vector<int> ids;  // canonical order
  std::vector<double> gains, budgets, thresholds;
  std::vector<int> bit;  // bit index of each candidate
};

struct FrameSearch {
  const Instance& inst;
  int frame;
  int cap;
  int n;
  std::vector<SlotCandidates> slots;
  std::uint64_t all_mask = 0;

  int best = -1;
  std::vector<std::vector<int>> best_pick;     // per slot, candidate indices
  std::vector<std::vector<int>> current_pick;  // along the DFS path

  // states that already failed to improve the incumbent: value from the state
  // can't exceed the stored bound
  std::unordered_map<std::uint64_t, int> ceiling;

  explicit FrameSearch(const Instance& i, int f, std::span<const double> budgets)
      : inst(i), frame(f), cap(i.group_cap), n(i.num_slots) {
    slots.resize(n);
    for (int j = 0; j < n; ++j) {
      online::SlotContext ctx = online::make_slot_context(
          inst, j, frame, budgets, std::vector<char>(inst.num_devices, 0));
      SlotCandidates& sc = slots[j];
      sc.ids = ctx.ids;
      sc.gains = ctx.gains;
      sc.budgets = ctx.budgets;
      sc.thresholds = ctx.thresholds;
    }
    // one bit per device that is a candidate anywhere
    std::vector<int> bit_of(inst.num_devices, -1);
    int next = 0;
    for (int j = 0; j < n; ++j)
      for (int id : slots[j].ids)
        if (bit_of[id] < 0) bit_of[id] = next++;
    if (next > 57)
      throw std::invalid_argument("opt_bruteforce_frame: more than 57 candidate devices");
    if (n > 63)
      throw std::invalid_argument("opt_bruteforce_frame: more than 63 slots");
    for (int j = 0; j < n; ++j) {
      for (int id : slots[j].ids) slots[j].bit.push_back(bit_of[id]);
    }
    all_mask = (next == 0) ? 0 : (next >= 64 ? ~0ull : ((1ull << next) - 1));
    current_pick.assign(n, {});
  }

  // capacity-respecting matching between remaining slots and unserved
  // candidates, ignoring decode interference: a valid upper bound
  int matching_bound(int from_slot, std::uint64_t unserved) {
    int left = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<int> right_of(64, -1);
    int rights = 0;
    for (int j = from_slot; j < n; ++j) {
      const SlotCandidates& sc = slots[j];
      bool any = false;
      for (std::size_t r = 0; r < sc.ids.size(); ++r)
        if (unserved & (1ull << sc.bit[r])) {
          if (right_of[sc.bit[r]] < 0) right_of[sc.bit[r]] = rights++;
          any = true;
        }
      if (!any) continue;
      for (int c = 0; c < cap; ++c) {
        for (std::size_t r = 0; r < sc.ids.size(); ++r)
          if (unserved & (1ull << sc.bit[r]))
            edges.push_back({left, right_of[sc.bit[r]]});
        ++left;
      }
    }
    if (left == 0) return 0;
    BipartiteMatcher matcher(left, rights);
    for (auto [l, r] : edges) matcher.add_edge(l, r);
    return matcher.solve();
  }

  // all decodable subsets of the slot's unserved candidates, up to cap members
  void enumerate_groups(const SlotCandidates& sc, std::uint64_t unserved,
                        std::vector<std::vector<int>>& out) {
    std::vector<int> pick;
    enumerate_rec(sc, unserved, 0, 0.0, pick, out);
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });
  }

  void enumerate_rec(const SlotCandidates& sc, std::uint64_t unserved, std::size_t r,
                     double x, std::vector<int>& pick,
                     std::vector<std::vector<int>>& out) {
    if (r == sc.ids.size()) {
      out.push_back(pick);
      return;
    }
    enumerate_rec(sc, unserved, r + 1, x, pick, out);
    if (int(pick.size()) >= cap) return;
    if (!(unserved & (1ull << sc.bit[r]))) return;
    double recv = sc.budgets[r] * sc.gains[r];
    if (!feasible_geq(recv, sc.thresholds[r] * (1.0 + x))) return;
    pick.push_back(int(r));
    enumerate_rec(sc, unserved, r + 1, x + recv, pick, out);
    pick.pop_back();
  }

  void dfs(int j, std::uint64_t unserved, int served) {
    if (j == n) {
      if (served > best) {
        best = served;
        best_pick = current_pick;
      }
      return;
    }
    // cheap bounds first, matching only when they fail to prune
    int future = 0;
    std::uint64_t reachable = 0;
    for (int jj = j; jj < n; ++jj) {
      const SlotCandidates& sc = slots[jj];
      int here = 0;
      for (std::size_t r = 0; r < sc.ids.size(); ++r)
        if (unserved & (1ull << sc.bit[r])) {
          reachable |= 1ull << sc.bit[r];
          ++here;
        }
      future += std::min(here, cap);
    }
    int ub = std::min(future, int(std::popcount(reachable)));
    if (served + ub <= best) return;
    std::uint64_t key = (unserved << 6) | std::uint64_t(j);
    auto it = ceiling.find(key);
    if (it != ceiling.end() && served + it->second <= best) return;
    ub = std::min(ub, matching_bound(j, unserved));
    if (served + ub <= best) {
      remember(key, ub);
      return;
    }

    std::vector<std::vector<int>> groups;
    enumerate_groups(slots[j], unserved, groups);
    for (const auto& g : groups) {
      std::uint64_t next = unserved;
      for (int r : g) next &= ~(1ull << slots[j].bit[r]);
      current_pick[j] = g;
      dfs(j + 1, next, served + int(g.size()));
    }
    current_pick[j].clear();
    remember(key, best - served);  // subtree fully explored, could not beat this
  }

  void remember(std::uint64_t key, int bound) {
    if (ceiling.size() < (1u << 22)) ceiling[key] = bound;
  }
};

}  // namespace

FrameSolution opt_bruteforce_frame(const Instance& inst, int frame,
                                   std::span<const double> budgets,
                                   const Guards& guards) {
  if (!guards.overridden) {
    if (inst.num_devices > guards.frame_max_devices)
      throw std::invalid_argument("opt_bruteforce_frame: " +
                                  std::to_string(inst.num_devices) +
                                  " devices exceeds guard");
    if (inst.num_slots > guards.frame_max_slots)
      throw std::invalid_argument("opt_bruteforce_frame: " +
                                  std::to_string(inst.num_slots) +
                                  " slots exceeds guard");
  }

  FrameSearch search(inst, frame, budgets);
  // seed the incumbent with the online scheduler so pruning bites immediately
  online::FrameResult greedy = online::bms(inst, frame, budgets);
  search.best = greedy.served_count - 1;
  search.dfs(0, search.all_mask, 0);

  FrameSolution sol;
  if (search.best < greedy.served_count) {
    // greedy was already optimal; reuse its groups
    sol.served_count = greedy.served_count;
    sol.groups = greedy.groups;
    sol.served = greedy.served;
    return sol;
  }
  sol.served_count = search.best;
  for (int j = 0; j < inst.num_slots; ++j) {
    NomaGroup g;
    g.slot = j;
    g.frame = frame;
    if (j < int(search.best_pick.size()))
      for (int r : search.best_pick[j]) {
        g.members.push_back(search.slots[j].ids[r]);
        g.budgets.push_back(search.slots[j].budgets[r]);
        sol.served.push_back(search.slots[j].ids[r]);
      }
    sol.groups.push_back(std::move(g));
  }
  std::sort(sol.served.begin(), sol.served.end());
  return sol;
}

int opt_bruteforce_horizon(const Instance& inst, const Guards& guards) {
  const int m = inst.num_devices, k = inst.num_frames;
  int max_level = 0;
  for (const auto& d : inst.devices) max_level = std::max(max_level, d.power_level);
  if (!guards.overridden) {
    if (m > guards.horizon_max_devices)
      throw std::invalid_argument("opt_bruteforce_horizon: device count exceeds guard");
    if (k > guards.horizon_max_frames)
      throw std::invalid_argument("opt_bruteforce_horizon: frame count exceeds guard");
    if (max_level > guards.horizon_max_level)
      throw std::invalid_argument("opt_bruteforce_horizon: power lattice exceeds guard");
  }
  if (m > 10 || max_level > 7)
    throw std::invalid_argument("opt_bruteforce_horizon: instance too large even overridden");

  // per device: every split of its lattice levels across frames
  std::vector<std::vector<std::vector<int>>> splits(m);
  for (int i = 0; i < m; ++i) {
    std::vector<int> cur(k, 0);
    int tau = inst.devices[i].power_level;
    // depth-first composition enumeration
    struct Gen {
      int k, tau;
      std::vector<std::vector<int>>& out;
      std::vector<int>& cur;
      void rec(int t, int left) {
        if (t == k) {
          out.push_back(cur);
          return;
        }
        for (int c = 0; c <= left; ++c) {
          cur[t] = c;
          rec(t + 1, left - c);
        }
        cur[t] = 0;
      }
    } gen{k, tau, splits[i], cur};
    gen.rec(0, tau);
  }

  // frame optimum cache keyed by (frame, per-device levels), 3 bits per device
  std::unordered_map<std::uint64_t, int> cache;
  Guards frame_guards = guards;
  auto frame_value = [&](int t, const std::vector<int>& levels) {
    std::uint64_t key = std::uint64_t(t);
    for (int i = 0; i < m; ++i) key = key * 11 + std::uint64_t(levels[i]);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<double> budgets(m);
    for (int i = 0; i < m; ++i)
      budgets[i] = inst.devices[i].max_energy * levels[i] / inst.devices[i].power_level;
    int v = opt_bruteforce_frame(inst, t, budgets, frame_guards).served_count;
    cache.emplace(key, v);
    return v;
  };

  std::vector<std::size_t> pick(m, 0);
  int best = 0;
  std::vector<int> levels(m);
  while (true) {
    int total = 0;
    for (int t = 0; t < k; ++t) {
      for (int i = 0; i < m; ++i) levels[i] = splits[i][pick[i]][t];
      total += frame_value(t, levels);
    }
    best = std::max(best, total);
    int i = 0;
    for (; i < m; ++i) {
      if (++pick[i] < splits[i].size()) break;
      pick[i] = 0;
    }
    if (i == m) break;
  }
  return best;
}

}  // namespace exact
}  // namespace noma
