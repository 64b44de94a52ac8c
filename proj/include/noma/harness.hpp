#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "noma/learning.hpp"
#include "noma/scenario.hpp"

namespace noma {
namespace harness {

// One sweep: vary a single scenario knob over `values`, run each listed
// algorithm on every (value, seed) cell. Cell seeds are derived by hashing
// (seed value, axis value), so adding values or seeds never reshuffles
// existing cells.
struct ExperimentSpec {
  ScenarioParams scenario;
  std::vector<std::string> algorithms;  // bms ath zz ranking selfish opt pl ql rl
  std::string axis = "m";               // m n e l_max M k
  std::vector<double> values;
  std::vector<std::uint64_t> seeds;
  learning::LearnerConfig learner;
  bool guard_override = false;
  bool dump_records = false;  // per-cell learner traces as CSV
  std::string out_dir = "results";
};

ExperimentSpec load_spec(const std::string& path);
ExperimentSpec spec_from_json(const std::string& text);

struct CellResult {
  double axis_value = 0;
  std::string algorithm;
  std::uint64_t seed = 0;
  double nsd = 0;
  double runtime_ms = 0;
  std::string error;  // nonempty when the cell was refused or failed
  std::vector<double> frame_mean_pc;  // learners only, averaged over rounds
  std::string record_csv;             // learners only, when dump_records is on
};

struct ResultTable {
  ExperimentSpec spec;
  std::vector<CellResult> cells;  // spec order: values, then algorithms, then seeds
};

// Runs every cell; jobs > 1 distributes cells over an OpenMP pool, jobs == 1
// is the plain serial loop. Both orders produce identical tables. jobs == 0
// uses the OpenMP default.
ResultTable run_experiment(const ExperimentSpec& spec, int jobs = 1);

// Writes results_<axis>.csv, pc_<axis>.csv (when learners ran), matching SVG
// plots and optional per-cell traces into out_dir. Returns the file names
// written. The CSV content is deterministic except for the runtime column.
std::vector<std::string> emit_report(const ResultTable& table);

// Re-renders the SVG plots from a previously written results CSV.
std::vector<std::string> report_from_csv(const std::string& results_csv,
                                         const std::string& out_dir);

}  // namespace harness
}  // namespace noma
