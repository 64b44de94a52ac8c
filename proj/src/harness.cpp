#include "noma/harness.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "noma/baselines.hpp"
#include "noma/exact.hpp"
#include "noma/online.hpp"
#include "noma/rng.hpp"
#include "noma/svg.hpp"

namespace noma {
namespace harness {

using nlohmann::json;

namespace {

constexpr std::uint64_t kTagCell = 20;
constexpr std::uint64_t kTagLearner = 21;
constexpr std::uint64_t kTagRanking = 22;

const std::vector<std::string> kKnownAlgorithms = {
    "bms", "ath", "zz", "ranking", "selfish", "opt", "pl", "ql", "rl"};
const std::vector<std::string> kKnownAxes = {"m", "n", "e", "l_max", "M", "k"};

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void apply_axis(ScenarioParams& p, const std::string& axis, double value) {
  if (axis == "m")
    p.num_devices = int(std::llround(value));
  else if (axis == "n")
    p.num_slots = int(std::llround(value));
  else if (axis == "e")
    p.max_power_dbm = value;
  else if (axis == "l_max")
    p.l_max_bits = std::llround(value);
  else if (axis == "M")
    p.group_cap = int(std::llround(value));
  else if (axis == "k")
    p.num_frames = int(std::llround(value));
  else
    throw std::invalid_argument("unknown sweep axis: " + axis);
}

bool is_learner(const std::string& alg) {
  return alg == "pl" || alg == "ql" || alg == "rl";
}

Schedule schedule_from_frames(const Instance& inst,
                              const std::vector<online::FrameResult>& frames) {
  Schedule s;
  s.resize(inst.num_devices, inst.num_slots, inst.num_frames);
  for (const auto& fr : frames) online::apply_to_schedule(fr, s);
  return s;
}

CellResult run_cell(const ExperimentSpec& spec, std::size_t value_idx,
                    std::size_t rep_idx, const std::string& alg) {
  CellResult cell;
  cell.axis_value = spec.values[value_idx];
  cell.algorithm = alg;
  cell.seed = spec.seeds[rep_idx];

  ScenarioParams params = spec.scenario;
  apply_axis(params, spec.axis, cell.axis_value);
  // keyed by seed value, not list position: reordering or extending the
  // seed list never changes an existing cell's outcome
  std::uint64_t cell_seed =
      derive_stream(spec.seeds[rep_idx], kTagCell,
                    std::bit_cast<std::uint64_t>(cell.axis_value));
  params.seed = cell_seed;

  try {
    Instance inst = generate_instance(params);
    auto start = std::chrono::steady_clock::now();

    if (is_learner(alg)) {
      learning::LearnerConfig cfg = spec.learner;
      cfg.seed = derive_stream(cell_seed, kTagLearner);
      if (cfg.rounds < 1) throw std::invalid_argument("learner needs rounds >= 1");
      learning::RunRecord rec;
      if (alg == "pl")
        rec = learning::pl_train(inst, cfg);
      else if (alg == "ql")
        rec = learning::ql_train(inst, cfg);
      else
        rec = learning::rl_policy(inst, cfg.seed, cfg.rounds);

      int last = rec.rounds() - 1;
      cell.nsd = rec.round_total_nsd(last);
      cell.frame_mean_pc.assign(inst.num_frames, 0.0);
      for (int r = 0; r < rec.rounds(); ++r)
        for (int t = 0; t < inst.num_frames; ++t)
          cell.frame_mean_pc[t] += rec.power_at(r, t) / rec.rounds();
      if (spec.dump_records) cell.record_csv = rec.to_csv();

      // replay the final round to check the plan it settled on is feasible
      std::vector<online::FrameResult> frames;
      for (int t = 0; t < inst.num_frames; ++t) {
        std::vector<double> powers(inst.num_devices);
        for (int i = 0; i < inst.num_devices; ++i)
          powers[i] = inst.devices[i].max_energy *
                      rec.chosen_levels[last][i][t] /
                      double(inst.devices[i].power_level);
        learning::FrameEval ev = learning::evaluate_power_plan(inst, t, powers);
        online::FrameResult fr;
        fr.groups = std::move(ev.groups);
        fr.served = std::move(ev.served);
        fr.served_count = ev.nsd;
        frames.push_back(std::move(fr));
      }
      Schedule s = schedule_from_frames(inst, frames);
      auto bad = validate_schedule(inst, s);
      if (!bad.empty())
        throw std::runtime_error("learner schedule violates constraint " +
                                 std::to_string(bad.front().constraint));
    } else if (alg == "opt") {
      exact::Guards guards;
      guards.overridden = spec.guard_override;
      int total = 0;
      if (inst.num_frames == 1) {
        exact::FrameSolution sol = exact::opt_bruteforce_frame(inst, 0, {}, guards);
        std::vector<online::FrameResult> frames(1);
        frames[0].groups = sol.groups;
        frames[0].served = sol.served;
        frames[0].served_count = sol.served_count;
        Schedule s = schedule_from_frames(inst, frames);
        auto bad = validate_schedule(inst, s);
        if (!bad.empty())
          throw std::runtime_error("oracle schedule violates constraint " +
                                   std::to_string(bad.front().constraint));
        total = sol.served_count;
      } else {
        total = exact::opt_bruteforce_horizon(inst, guards);
      }
      cell.nsd = total;
    } else {
      if (inst.num_frames != 1)
        throw std::invalid_argument(alg + " schedules one frame; set k = 1");
      online::FrameResult fr;
      if (alg == "bms") {
        fr = online::bms(inst, 0);
      } else if (alg == "ath") {
        fr = baselines::ath_frame(inst, 0);
      } else if (alg == "zz") {
        fr = baselines::zz_frame(inst, 0);
      } else if (alg == "selfish") {
        fr = online::selfish_frame(inst, 0);
      } else if (alg == "ranking") {
        std::vector<int> perm(inst.num_devices);
        for (int i = 0; i < inst.num_devices; ++i) perm[i] = i;
        Rng rng(derive_stream(cell_seed, kTagRanking));
        for (int i = inst.num_devices - 1; i > 0; --i)
          std::swap(perm[i], perm[rng.uniform_int(0, i)]);
        std::vector<int> priority(inst.num_devices);
        for (int r = 0; r < inst.num_devices; ++r) priority[perm[r]] = r;
        fr = online::ranking_m1(inst, 0, priority);
      } else {
        throw std::invalid_argument("unknown algorithm: " + alg);
      }
      Schedule s = schedule_from_frames(inst, {fr});
      auto bad = validate_schedule(inst, s);
      if (!bad.empty())
        throw std::runtime_error(alg + " schedule violates constraint " +
                                 std::to_string(bad.front().constraint));
      cell.nsd = fr.served_count;
    }

    auto stop = std::chrono::steady_clock::now();
    cell.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  } catch (const std::exception& e) {
    cell.error = e.what();
  }
  return cell;
}

}  // namespace

ResultTable run_experiment(const ExperimentSpec& spec, int jobs) {
  if (spec.algorithms.empty())
    throw std::invalid_argument("run_experiment: no algorithms listed");
  if (spec.values.empty()) throw std::invalid_argument("run_experiment: no axis values");
  if (spec.seeds.empty()) throw std::invalid_argument("run_experiment: no seeds");
  for (const auto& alg : spec.algorithms)
    if (std::find(kKnownAlgorithms.begin(), kKnownAlgorithms.end(), alg) ==
        kKnownAlgorithms.end())
      throw std::invalid_argument("run_experiment: unknown algorithm " + alg);
  if (std::find(kKnownAxes.begin(), kKnownAxes.end(), spec.axis) == kKnownAxes.end())
    throw std::invalid_argument("run_experiment: unknown axis " + spec.axis);

  struct CellKey {
    std::size_t value_idx, rep_idx, alg_idx;
  };
  std::vector<CellKey> keys;
  for (std::size_t v = 0; v < spec.values.size(); ++v)
    for (std::size_t a = 0; a < spec.algorithms.size(); ++a)
      for (std::size_t r = 0; r < spec.seeds.size(); ++r) keys.push_back({v, r, a});

  ResultTable table;
  table.spec = spec;
  table.cells.resize(keys.size());

  if (jobs == 1) {
    // serial reference path, bitwise identical to the pooled one
    for (std::size_t c = 0; c < keys.size(); ++c)
      table.cells[c] = run_cell(spec, keys[c].value_idx, keys[c].rep_idx,
                                spec.algorithms[keys[c].alg_idx]);
  } else if (jobs <= 0) {
#pragma omp parallel for schedule(dynamic)
    for (std::size_t c = 0; c < keys.size(); ++c)
      table.cells[c] = run_cell(spec, keys[c].value_idx, keys[c].rep_idx,
                                spec.algorithms[keys[c].alg_idx]);
  } else {
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (std::size_t c = 0; c < keys.size(); ++c)
      table.cells[c] = run_cell(spec, keys[c].value_idx, keys[c].rep_idx,
                                spec.algorithms[keys[c].alg_idx]);
  }
  return table;
}

ExperimentSpec spec_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("experiment spec: not valid JSON: ") + e.what());
  }
  ExperimentSpec spec;
  try {
    if (j.contains("scenario")) {
      const json& s = j["scenario"];
      ScenarioParams& p = spec.scenario;
      p.num_devices = s.value("num_devices", p.num_devices);
      p.num_slots = s.value("num_slots", p.num_slots);
      p.num_frames = s.value("num_frames", p.num_frames);
      p.group_cap = s.value("group_cap", p.group_cap);
      p.power_level = s.value("power_level", p.power_level);
      p.area_side_m = s.value("area_side_m", p.area_side_m);
      p.total_bandwidth_hz = s.value("total_bandwidth_hz", p.total_bandwidth_hz);
      p.max_power_dbm = s.value("max_power_dbm", p.max_power_dbm);
      p.l_max_bits = s.value("l_max_bits", p.l_max_bits);
      p.noise_psd_dbm_hz = s.value("noise_psd_dbm_hz", p.noise_psd_dbm_hz);
      p.noise_figure_db = s.value("noise_figure_db", p.noise_figure_db);
      p.antenna_gain_db = s.value("antenna_gain_db", p.antenna_gain_db);
      p.penetration_loss_db = s.value("penetration_loss_db", p.penetration_loss_db);
    }
    spec.algorithms = j.at("algorithms").get<std::vector<std::string>>();
    spec.axis = j.value("axis", spec.axis);
    spec.values = j.at("values").get<std::vector<double>>();
    spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("learner")) {
      const json& l = j["learner"];
      learning::LearnerConfig& c = spec.learner;
      c.gamma = l.value("gamma", c.gamma);
      c.beta = l.value("beta", c.beta);
      c.eta = l.value("eta", c.eta);
      c.alpha = l.value("alpha", c.alpha);
      c.epsilon = l.value("epsilon", c.epsilon);
      c.rounds = l.value("rounds", c.rounds);
    }
    spec.guard_override = j.value("guard_override", false);
    spec.dump_records = j.value("dump_records", false);
    spec.out_dir = j.value("out_dir", spec.out_dir);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("experiment spec: malformed field: ") + e.what());
  }
  return spec;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_spec: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return spec_from_json(text);
}

namespace {

struct SeriesStats {
  std::vector<double> xs, mean, lo, hi;
};

std::map<std::string, SeriesStats> collect_series(const ResultTable& table) {
  std::map<std::string, SeriesStats> out;
  for (const std::string& alg : table.spec.algorithms) {
    SeriesStats st;
    for (double v : table.spec.values) {
      double sum = 0, sum2 = 0;
      int cnt = 0;
      for (const CellResult& c : table.cells) {
        if (c.algorithm != alg || c.axis_value != v || !c.error.empty()) continue;
        sum += c.nsd;
        sum2 += c.nsd * c.nsd;
        ++cnt;
      }
      if (cnt == 0) continue;
      double mean = sum / cnt;
      double var = std::max(0.0, sum2 / cnt - mean * mean);
      st.xs.push_back(v);
      st.mean.push_back(mean);
      st.lo.push_back(mean - std::sqrt(var));
      st.hi.push_back(mean + std::sqrt(var));
    }
    if (!st.xs.empty()) out[alg] = st;
  }
  return out;
}

}  // namespace

std::vector<std::string> emit_report(const ResultTable& table) {
  namespace fs = std::filesystem;
  if (table.cells.empty()) throw std::runtime_error("emit_report: empty result table");
  fs::create_directories(table.spec.out_dir);
  std::vector<std::string> written;
  const std::string axis = table.spec.axis;

  auto write_file = [&](const std::string& name, const std::string& content) {
    fs::path p = fs::path(table.spec.out_dir) / name;
    std::ofstream out(p);
    if (!out) throw std::runtime_error("emit_report: cannot write " + p.string());
    out << content;
    written.push_back(p.string());
  };

  std::ostringstream csv;
  csv << "axis_value,algorithm,seed,nsd,runtime_ms\n";
  for (const CellResult& c : table.cells) {
    if (!c.error.empty()) continue;
    csv << num(c.axis_value) << "," << c.algorithm << "," << c.seed << ","
        << num(c.nsd) << "," << num(c.runtime_ms) << "\n";
  }
  write_file("results_" + axis + ".csv", csv.str());

  bool any_error = false;
  std::ostringstream errs;
  errs << "axis_value,algorithm,seed,error\n";
  for (const CellResult& c : table.cells)
    if (!c.error.empty()) {
      any_error = true;
      std::string msg = c.error;
      for (char& ch : msg)
        if (ch == ',' || ch == '\n') ch = ';';
      errs << num(c.axis_value) << "," << c.algorithm << "," << c.seed << "," << msg
           << "\n";
    }
  if (any_error) write_file("errors_" + axis + ".csv", errs.str());

  bool any_pc = false;
  std::ostringstream pc;
  pc << "axis_value,algorithm,seed,frame,mean_pc\n";
  for (const CellResult& c : table.cells) {
    if (c.frame_mean_pc.empty() || !c.error.empty()) continue;
    any_pc = true;
    for (std::size_t t = 0; t < c.frame_mean_pc.size(); ++t)
      pc << num(c.axis_value) << "," << c.algorithm << "," << c.seed << "," << t + 1
         << "," << num(c.frame_mean_pc[t]) << "\n";
  }
  if (any_pc) write_file("pc_" + axis + ".csv", pc.str());

  if (table.spec.dump_records)
    for (const CellResult& c : table.cells)
      if (!c.record_csv.empty())
        write_file("record_" + c.algorithm + "_v" + num(c.axis_value) + "_s" +
                       std::to_string(c.seed) + ".csv",
                   c.record_csv);

  auto series_map = collect_series(table);
  std::vector<SvgSeries> series;
  for (const auto& [alg, st] : series_map)
    series.push_back({alg, st.xs, st.mean, st.lo, st.hi});
  if (!series.empty())
    write_file("nsd_" + axis + ".svg",
               render_line_plot("served devices vs " + axis, axis, "served devices",
                                series));

  if (any_pc) {
    // per-frame power profile, one series per algorithm and axis value
    std::vector<SvgSeries> pcs;
    for (const std::string& alg : table.spec.algorithms) {
      for (double v : table.spec.values) {
        std::vector<double> acc;
        int cnt = 0;
        for (const CellResult& c : table.cells) {
          if (c.algorithm != alg || c.axis_value != v || c.frame_mean_pc.empty() ||
              !c.error.empty())
            continue;
          if (acc.empty()) acc.assign(c.frame_mean_pc.size(), 0.0);
          for (std::size_t t = 0; t < c.frame_mean_pc.size(); ++t)
            acc[t] += c.frame_mean_pc[t];
          ++cnt;
        }
        if (cnt == 0) continue;
        SvgSeries s;
        s.label = alg + " " + axis + "=" + num(v);
        for (std::size_t t = 0; t < acc.size(); ++t) {
          s.x.push_back(double(t + 1));
          s.y.push_back(acc[t] / cnt);
        }
        pcs.push_back(std::move(s));
      }
    }
    if (!pcs.empty())
      write_file("pc_" + axis + ".svg",
                 render_line_plot("per-frame mean transmit power", "frame",
                                  "mean power (W)", pcs));
  }
  return written;
}

std::vector<std::string> report_from_csv(const std::string& results_csv,
                                         const std::string& out_dir) {
  std::ifstream in(results_csv);
  if (!in) throw std::runtime_error("report_from_csv: cannot open " + results_csv);
  std::string line;
  if (!std::getline(in, line) || line != "axis_value,algorithm,seed,nsd,runtime_ms")
    throw std::runtime_error("report_from_csv: unexpected header in " + results_csv);

  std::map<std::string, std::map<double, std::pair<double, int>>> agg;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string f0, alg, f2, f3, f4;
    if (!std::getline(row, f0, ',') || !std::getline(row, alg, ',') ||
        !std::getline(row, f2, ',') || !std::getline(row, f3, ',') ||
        !std::getline(row, f4))
      throw std::runtime_error("report_from_csv: malformed row: " + line);
    double v = std::stod(f0), nsd = std::stod(f3);
    auto& cell = agg[alg][v];
    cell.first += nsd;
    cell.second += 1;
  }
  std::vector<SvgSeries> series;
  for (auto& [alg, by_value] : agg) {
    SvgSeries s;
    s.label = alg;
    for (auto& [v, acc] : by_value) {
      s.x.push_back(v);
      s.y.push_back(acc.first / acc.second);
    }
    series.push_back(std::move(s));
  }
  std::filesystem::create_directories(out_dir);
  std::filesystem::path p = std::filesystem::path(out_dir) / "nsd_replot.svg";
  std::ofstream out(p);
  if (!out) throw std::runtime_error("report_from_csv: cannot write " + p.string());
  out << render_line_plot("served devices", "value", "served devices", series);
  return {p.string()};
}

}  // namespace harness
}  // namespace noma
