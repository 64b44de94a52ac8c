// command-line front end: generate instances, run experiment sweeps,
// re-render reports, export MILP models, and query the exact oracle
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "noma/exact.hpp"
#include "noma/harness.hpp"
#include "noma/ilp.hpp"
#include "noma/scenario.hpp"

namespace {

noma::ScenarioParams scenario_from_file(const std::string& path) {
  // reuse the experiment-spec parser for the scenario block
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  std::string wrapped = std::string("{\"scenario\":") + text +
                        ",\"algorithms\":[\"bms\"],\"values\":[1],\"seeds\":[1]}";
  return noma::harness::spec_from_json(wrapped).scenario;
}

int cmd_gen(const std::string& config, std::uint64_t seed, bool seed_set,
            const std::string& out) {
  noma::ScenarioParams params;
  if (!config.empty()) params = scenario_from_file(config);
  if (seed_set) params.seed = seed;
  noma::Instance inst = noma::generate_instance(params);
  noma::save_instance(inst, out);
  std::cout << "wrote " << out << " (" << inst.num_devices << " devices, "
            << inst.num_slots << " slots, " << inst.num_frames << " frames)\n";
  return 0;
}

int cmd_run(const std::string& config, int jobs, const std::string& out,
            bool guard_override, bool strict) {
  noma::harness::ExperimentSpec spec = noma::harness::load_spec(config);
  if (guard_override) spec.guard_override = true;
  if (!out.empty()) spec.out_dir = out;
  noma::harness::ResultTable table = noma::harness::run_experiment(spec, jobs);

  // console summary: mean served count per (axis value, algorithm)
  std::map<std::pair<double, std::string>, std::pair<double, int>> agg;
  int failed = 0;
  for (const auto& c : table.cells) {
    if (!c.error.empty()) {
      ++failed;
      std::cerr << "cell " << spec.axis << "=" << c.axis_value << " " << c.algorithm
                << " seed=" << c.seed << ": " << c.error << "\n";
      continue;
    }
    auto& a = agg[{c.axis_value, c.algorithm}];
    a.first += c.nsd;
    a.second += 1;
  }
  for (const auto& [key, acc] : agg)
    std::cout << spec.axis << "=" << key.first << " " << key.second
              << " mean_served=" << acc.first / acc.second << " (" << acc.second
              << " seeds)\n";
  for (const std::string& f : noma::harness::emit_report(table))
    std::cout << "wrote " << f << "\n";
  if (failed > 0) {
    std::cerr << failed << " cell(s) failed\n";
    if (strict) return 2;
  }
  return 0;
}

int cmd_report(const std::string& config, const std::string& out) {
  for (const std::string& f :
       noma::harness::report_from_csv(config, out.empty() ? "results" : out))
    std::cout << "wrote " << f << "\n";
  return 0;
}

int cmd_export_lp(const std::string& config, const std::string& out) {
  noma::Instance inst = noma::load_instance(config);
  std::string lp = noma::export_ilp(inst);
  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot write " + out);
  os << lp;
  std::cout << "wrote " << out << "\n";
  return 0;
}

int cmd_oracle(const std::string& config, bool guard_override) {
  noma::Instance inst = noma::load_instance(config);
  noma::exact::Guards guards;
  guards.overridden = guard_override;
  int opt = 0;
  if (inst.num_frames == 1)
    opt = noma::exact::opt_bruteforce_frame(inst, 0, {}, guards).served_count;
  else
    opt = noma::exact::opt_bruteforce_horizon(inst, guards);
  std::cout << "opt " << opt << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NOMA uplink grouping / scheduling / power-allocation toolkit"};
  app.require_subcommand(1);

  std::string config, out;
  std::uint64_t seed = 0;
  int jobs = 0;
  bool guard_override = false, strict = false;

  auto* gen = app.add_subcommand("gen", "generate a random instance and save it");
  auto* gen_cfg = gen->add_option("--config", config, "scenario parameter JSON");
  auto* gen_seed = gen->add_option("--seed", seed, "override the scenario seed");
  gen->add_option("--out", out, "instance JSON to write")->required();

  auto* run = app.add_subcommand("run", "run an experiment sweep and write reports");
  run->add_option("--config", config, "experiment spec JSON")->required();
  run->add_option("--jobs", jobs, "worker threads (1 = serial, 0 = all cores)");
  run->add_option("--out", out, "output directory (overrides spec out_dir)");
  run->add_flag("--guard-override", guard_override,
                "lift the exact-oracle size guards");
  run->add_flag("--strict", strict, "exit nonzero if any cell fails");

  auto* rep = app.add_subcommand("report", "re-render plots from a results CSV");
  rep->add_option("--config", config, "results CSV written by run")->required();
  rep->add_option("--out", out, "output directory");

  auto* exp = app.add_subcommand("export-lp", "write a MILP model for an instance");
  exp->add_option("--config", config, "instance JSON")->required();
  exp->add_option("--out", out, "LP file to write")->required();

  auto* orc = app.add_subcommand("oracle", "exact optimum served count for an instance");
  orc->add_option("--config", config, "instance JSON")->required();
  orc->add_flag("--guard-override", guard_override,
                "lift the exact-oracle size guards");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return cmd_gen(gen_cfg->count() ? config : "", seed, gen_seed->count() > 0, out);
    if (run->parsed()) return cmd_run(config, jobs, out, guard_override, strict);
    if (rep->parsed()) return cmd_report(config, out);
    if (exp->parsed()) return cmd_export_lp(config, out);
    if (orc->parsed()) return cmd_oracle(config, guard_override);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
