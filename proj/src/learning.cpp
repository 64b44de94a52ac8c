#include "noma/learning.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include <charconv>

#include "noma/online.hpp"

namespace noma {
namespace learning {

namespace {
constexpr std::uint64_t kTagPlSample = 10;
constexpr std::uint64_t kTagQlAction = 11;
constexpr std::uint64_t kTagRlAction = 12;

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}
}  // namespace

int TransitionGraph::level_of(int node) const {
  if (node == start()) return tau;
  if (node == terminal()) return 0;
  return (node - 1) % (tau + 1);
}

int TransitionGraph::layer_of(int node) const {
  if (node == start()) return 1;
  if (node == terminal()) return k + 2;
  return 2 + (node - 1) / (tau + 1);
}

std::uint64_t TransitionGraph::path_count() const {
  // C(k + tau, k)
  std::uint64_t r = 1;
  for (int i = 1; i <= tau; ++i) r = r * std::uint64_t(k + i) / std::uint64_t(i);
  return r;
}

TransitionGraph build_tg(const DeviceProfile& dev, int num_frames) {
  if (num_frames < 1) throw std::invalid_argument("build_tg: need at least one frame");
  if (dev.power_level < 1) throw std::invalid_argument("build_tg: power_level must be >= 1");
  TransitionGraph tg;
  tg.device_id = dev.id;
  tg.k = num_frames;
  tg.tau = dev.power_level;
  tg.max_energy = dev.max_energy;
  tg.num_nodes = 2 + num_frames * (dev.power_level + 1);

  auto add = [&](int u, int v, int drop, int frame) {
    tg.edges.push_back({u, v, drop, frame});
  };
  for (int l = tg.tau; l >= 0; --l) add(tg.start(), tg.node_of(l, 2), tg.tau - l, 1);
  for (int layer = 2; layer <= tg.k; ++layer)
    for (int l = 0; l <= tg.tau; ++l)
      for (int l2 = l; l2 >= 0; --l2)
        add(tg.node_of(l, layer), tg.node_of(l2, layer + 1), l - l2, layer);
  for (int l = 0; l <= tg.tau; ++l)
    add(tg.node_of(l, tg.k + 1), tg.terminal(), 0, tg.k + 1);

  tg.out_edges.assign(tg.num_nodes, {});
  for (int e = 0; e < int(tg.edges.size()); ++e)
    tg.out_edges[tg.edges[e].u].push_back(e);
  return tg;
}

std::vector<TgPath> covering_paths(const TransitionGraph& tg) {
  std::map<std::pair<int, int>, int> edge_of;
  for (int e = 0; e < int(tg.edges.size()); ++e)
    edge_of[{tg.edges[e].u, tg.edges[e].v}] = e;
  auto find_edge = [&](int u, int v) { return edge_of.at({u, v}); };

  std::vector<TgPath> out;
  std::map<TgPath, bool> seen;
  for (int e = 0; e < int(tg.edges.size()); ++e) {
    TgPath path;
    int u = tg.edges[e].u;
    // hold full energy until the tail of e
    if (u != tg.start()) {
      int layer_u = tg.layer_of(u);
      int cur = tg.start();
      for (int layer = 2; layer < layer_u; ++layer) {
        int nxt = tg.node_of(tg.tau, layer);
        path.push_back(find_edge(cur, nxt));
        cur = nxt;
      }
      path.push_back(find_edge(cur, u));
    }
    path.push_back(e);
    // hold the landing level to the end
    int v = tg.edges[e].v;
    if (v != tg.terminal()) {
      int cur = v;
      for (int layer = tg.layer_of(v); layer <= tg.k; ++layer) {
        int nxt = tg.node_of(tg.level_of(cur), layer + 1);
        path.push_back(find_edge(cur, nxt));
        cur = nxt;
      }
      path.push_back(find_edge(cur, tg.terminal()));
    }
    if (!seen.count(path)) {
      seen[path] = true;
      out.push_back(std::move(path));
    }
  }
  return out;
}

PathDistribution edge_probabilities(const TransitionGraph& tg,
                                    std::span<const double> weights, double gamma,
                                    const std::vector<TgPath>& covering) {
  const int ne = int(tg.edges.size());
  if (int(weights.size()) != ne)
    throw std::invalid_argument("edge_probabilities: weight count mismatch");
  if (gamma < 0.0 || gamma > 1.0)
    throw std::invalid_argument("edge_probabilities: gamma must be in [0, 1]");
  if (gamma > 0.0 && covering.empty())
    throw std::invalid_argument("edge_probabilities: empty covering set");
  double wmax = 0.0;
  for (double v : weights) {
    if (!(v > 0.0)) throw std::invalid_argument("edge_probabilities: weights must be positive");
    wmax = std::max(wmax, v);
  }

  PathDistribution dist;
  dist.tg = &tg;
  dist.covering = &covering;
  dist.gamma = gamma;
  dist.w.resize(ne);
  for (int e = 0; e < ne; ++e) dist.w[e] = weights[e] / wmax;

  // continuation mass per node, then traversal probability per edge
  dist.z.assign(tg.num_nodes, 0.0);
  dist.z[tg.terminal()] = 1.0;
  for (int u = tg.num_nodes - 2; u >= 0; --u)
    for (int e : tg.out_edges[u]) dist.z[u] += dist.w[e] * dist.z[tg.edges[e].v];

  std::vector<double> reach(tg.num_nodes, 0.0);
  reach[tg.start()] = 1.0;
  for (int u = 0; u < tg.num_nodes; ++u)
    for (int e : tg.out_edges[u]) reach[tg.edges[e].v] += reach[u] * dist.w[e];

  dist.q.assign(ne, 0.0);
  for (int e = 0; e < ne; ++e) {
    double pw = reach[tg.edges[e].u] * dist.w[e] * dist.z[tg.edges[e].v] /
                dist.z[tg.start()];
    dist.q[e] = (1.0 - gamma) * pw;
  }
  if (gamma > 0.0) {
    for (const TgPath& p : covering)
      for (int e : p) dist.q[e] += gamma / double(covering.size());
  }
  return dist;
}

TgPath PathDistribution::sample(Rng& rng) const {
  if (gamma > 0.0 && rng.uniform01() < gamma) {
    std::size_t pick = std::size_t(rng.uniform_int(0, std::int64_t(covering->size()) - 1));
    return (*covering)[pick];
  }
  TgPath path;
  int u = tg->start();
  while (u != tg->terminal()) {
    double r = rng.uniform01() * z[u];
    double acc = 0.0;
    int chosen = tg->out_edges[u].back();
    for (int e : tg->out_edges[u]) {
      acc += w[e] * z[tg->edges[e].v];
      if (r < acc) {
        chosen = e;
        break;
      }
    }
    path.push_back(chosen);
    u = tg->edges[chosen].v;
  }
  return path;
}

double PathDistribution::path_probability(const TgPath& path) const {
  double prod = 1.0;
  for (int e : path) prod *= w[e];
  double pw = prod / z[tg->start()];
  double pc = 0.0;
  for (const TgPath& p : *covering)
    if (p == path) {
      pc = 1.0 / double(covering->size());
      break;
    }
  return gamma * pc + (1.0 - gamma) * pw;
}

double RunRecord::round_total_nsd(int round) const {
  double s = 0.0;
  for (int t = 0; t < num_frames; ++t) s += nsd_at(round, t);
  return s;
}

std::string RunRecord::to_csv() const {
  std::ostringstream out;
  out << "round,frame,nsd,mean_pc\n";
  for (int r = 0; r < rounds(); ++r)
    for (int t = 0; t < num_frames; ++t)
      out << r + 1 << "," << t + 1 << "," << num(nsd_at(r, t)) << ","
          << num(power_at(r, t)) << "\n";
  return out.str();
}

FrameEval evaluate_power_plan(const Instance& inst, int frame,
                              std::span<const double> powers) {
  if (int(powers.size()) != inst.num_devices)
    throw std::invalid_argument("evaluate_power_plan: powers size mismatch");
  for (int i = 0; i < inst.num_devices; ++i) {
    if (powers[i] < 0.0)
      throw std::invalid_argument("evaluate_power_plan: negative power for device " +
                                  std::to_string(i));
    if (!feasible_geq(inst.devices[i].max_energy, powers[i]))
      throw std::invalid_argument("evaluate_power_plan: power above cap for device " +
                                  std::to_string(i));
  }
  online::FrameResult fr = online::bms(inst, frame, powers);
  return {fr.served_count, std::move(fr.groups), std::move(fr.served)};
}

namespace {

struct RoundBuffers {
  std::vector<TgPath> paths;                // per device
  std::vector<std::vector<int>> drops;      // per device, per frame
  std::vector<std::vector<char>> on_path;   // per device, per edge
};

void record_frame(RunRecord& rec, double nsd, double mean_power) {
  rec.frame_nsd.push_back(nsd);
  rec.frame_mean_power.push_back(mean_power);
}

}  // namespace

RunRecord pl_train(const Instance& inst, const LearnerConfig& cfg) {
  const int m = inst.num_devices, k = inst.num_frames;
  if (cfg.rounds < 0) throw std::invalid_argument("pl_train: negative round count");

  std::vector<TransitionGraph> tgs;
  std::vector<std::vector<TgPath>> covers;
  std::vector<std::vector<double>> logw;
  std::vector<double> eta(m);
  for (int i = 0; i < m; ++i) {
    tgs.push_back(build_tg(inst.devices[i], k));
    covers.push_back(covering_paths(tgs[i]));
    logw.emplace_back(tgs[i].edges.size(), 0.0);
    eta[i] = cfg.eta > 0.0
                 ? cfg.eta
                 : cfg.gamma / (2.0 * (k + 1) * double(tgs[i].path_count()));
  }

  RunRecord rec;
  rec.num_frames = k;
  rec.num_devices = m;

  std::vector<PathDistribution> dists(m);
  RoundBuffers buf;
  buf.paths.resize(m);
  buf.drops.assign(m, std::vector<int>(k, 0));
  buf.on_path.resize(m);

  for (int round = 0; round < cfg.rounds; ++round) {
    // independent per-device sampling; the per-(device, round) streams keep
    // results identical for any thread count
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i) {
      std::vector<double> w(tgs[i].edges.size());
      double mx = *std::max_element(logw[i].begin(), logw[i].end());
      for (std::size_t e = 0; e < w.size(); ++e) w[e] = std::exp(logw[i][e] - mx);
      dists[i] = edge_probabilities(tgs[i], w, cfg.gamma, covers[i]);
      Rng rng(derive_stream(cfg.seed, kTagPlSample, std::uint64_t(i),
                            std::uint64_t(round)));
      buf.paths[i] = dists[i].sample(rng);
      std::fill(buf.drops[i].begin(), buf.drops[i].end(), 0);
      buf.on_path[i].assign(tgs[i].edges.size(), 0);
      for (int e : buf.paths[i]) {
        buf.on_path[i][e] = 1;
        const TgEdge& edge = tgs[i].edges[e];
        if (edge.frame <= k) buf.drops[i][edge.frame - 1] = edge.level_drop;
      }
    }

    std::vector<double> frame_reward(k, 0.0);
    std::vector<double> powers(m);
    for (int t = 0; t < k; ++t) {
      double total_p = 0.0;
      for (int i = 0; i < m; ++i) {
        powers[i] = tgs[i].max_energy * buf.drops[i][t] / double(tgs[i].tau);
        total_p += powers[i];
      }
      FrameEval ev = evaluate_power_plan(inst, t, powers);
      frame_reward[t] = double(ev.nsd) / double(m);
      record_frame(rec, double(ev.nsd), total_p / double(m));
    }

#pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i) {
      for (std::size_t e = 0; e < tgs[i].edges.size(); ++e) {
        int f = tgs[i].edges[e].frame;
        double r = (f <= k) ? frame_reward[f - 1] : 0.0;
        double est = (cfg.beta + r * (buf.on_path[i][e] ? 1.0 : 0.0)) / dists[i].q[e];
        logw[i][e] += eta[i] * est;
      }
      double mx = *std::max_element(logw[i].begin(), logw[i].end());
      // floor so even a whole path of floored edges multiplies to a positive
      // double: (k+2) edge factors of exp(floor) must stay above ~1e-308
      double floor = -700.0 / double(k + 2);
      for (double& v : logw[i]) {
        v -= mx;
        if (v < floor) v = floor;
      }
    }
    rec.chosen_levels.push_back(buf.drops);
  }
  return rec;
}

RunRecord ql_train(const Instance& inst, const LearnerConfig& cfg) {
  const int m = inst.num_devices, k = inst.num_frames;
  if (cfg.rounds < 0) throw std::invalid_argument("ql_train: negative round count");

  std::vector<TransitionGraph> tgs;
  for (int i = 0; i < m; ++i) tgs.push_back(build_tg(inst.devices[i], k));

  // value per (node, level drop); nodes in layers 1..k can act
  std::vector<std::vector<std::vector<double>>> qv(m);
  for (int i = 0; i < m; ++i) {
    qv[i].resize(tgs[i].num_nodes);
    for (int u = 0; u < tgs[i].num_nodes; ++u)
      if (tgs[i].layer_of(u) <= k || u == tgs[i].start())
        qv[i][u].assign(tgs[i].level_of(u) + 1, 0.0);
  }

  RunRecord rec;
  rec.num_frames = k;
  rec.num_devices = m;

  std::vector<int> node(m), act(m);
  std::vector<double> powers(m);
  for (int round = 0; round < cfg.rounds; ++round) {
    for (int i = 0; i < m; ++i) node[i] = tgs[i].start();
    std::vector<std::vector<int>> drops(m, std::vector<int>(k, 0));
    for (int t = 0; t < k; ++t) {
      double total_p = 0.0;
      for (int i = 0; i < m; ++i) {
        int level = tgs[i].level_of(node[i]);
        Rng rng(derive_stream(cfg.seed, kTagQlAction, std::uint64_t(i),
                              std::uint64_t(round), std::uint64_t(t)));
        if (rng.uniform01() < cfg.epsilon) {
          act[i] = int(rng.uniform_int(0, level));
        } else {
          const auto& row = qv[i][node[i]];
          act[i] = 0;
          for (int a = 1; a <= level; ++a)
            if (row[a] > row[act[i]]) act[i] = a;
        }
        drops[i][t] = act[i];
        powers[i] = tgs[i].max_energy * act[i] / double(tgs[i].tau);
        total_p += powers[i];
      }
      FrameEval ev = evaluate_power_plan(inst, t, powers);
      record_frame(rec, double(ev.nsd), total_p / double(m));
      for (int i = 0; i < m; ++i) {
        int level = tgs[i].level_of(node[i]);
        int next = tgs[i].node_of(level - act[i], t + 2);
        double future = 0.0;
        if (t + 1 < k)
          for (double v : qv[i][next]) future = std::max(future, v);
        double& cell = qv[i][node[i]][act[i]];
        cell += cfg.alpha * (double(ev.nsd) + future - cell);
        node[i] = next;
      }
    }
    rec.chosen_levels.push_back(std::move(drops));
  }
  return rec;
}

RunRecord rl_policy(const Instance& inst, std::uint64_t seed, int rounds) {
  const int m = inst.num_devices, k = inst.num_frames;
  if (rounds < 0) throw std::invalid_argument("rl_policy: negative round count");
  RunRecord rec;
  rec.num_frames = k;
  rec.num_devices = m;
  std::vector<int> level(m);
  std::vector<double> powers(m);
  for (int round = 0; round < rounds; ++round) {
    for (int i = 0; i < m; ++i) level[i] = inst.devices[i].power_level;
    std::vector<std::vector<int>> drops(m, std::vector<int>(k, 0));
    for (int t = 0; t < k; ++t) {
      double total_p = 0.0;
      for (int i = 0; i < m; ++i) {
        Rng rng(derive_stream(seed, kTagRlAction, std::uint64_t(i),
                              std::uint64_t(round), std::uint64_t(t)));
        int a = int(rng.uniform_int(0, level[i]));
        drops[i][t] = a;
        level[i] -= a;
        powers[i] = inst.devices[i].max_energy * a / double(inst.devices[i].power_level);
        total_p += powers[i];
      }
      FrameEval ev = evaluate_power_plan(inst, t, powers);
      record_frame(rec, double(ev.nsd), total_p / double(m));
    }
    rec.chosen_levels.push_back(std::move(drops));
  }
  return rec;
}

}  // namespace learning
}  // namespace noma
