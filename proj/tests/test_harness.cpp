#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "noma/harness.hpp"
#include "noma/svg.hpp"

using namespace noma;
using namespace noma::harness;

namespace {

ExperimentSpec tiny_spec() {
  ExperimentSpec spec;
  spec.scenario.num_devices = 6;
  spec.scenario.num_slots = 4;
  spec.scenario.group_cap = 2;
  spec.algorithms = {"bms", "ath"};
  spec.axis = "m";
  spec.values = {6, 9};
  spec.seeds = {1, 2};
  return spec;
}

bool same_but_runtime(const ResultTable& a, const ResultTable& b) {
  if (a.cells.size() != b.cells.size()) return false;
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    const CellResult& x = a.cells[i];
    const CellResult& y = b.cells[i];
    if (x.axis_value != y.axis_value || x.algorithm != y.algorithm ||
        x.seed != y.seed || x.nsd != y.nsd || x.error != y.error ||
        x.frame_mean_pc != y.frame_mean_pc || x.record_csv != y.record_csv)
      return false;
  }
  return true;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// strips the runtime_ms column (the last one) off every data row
std::string drop_runtime(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!first) {
      std::size_t comma = line.rfind(',');
      if (comma != std::string::npos) line = line.substr(0, comma);
    }
    first = false;
    out << line << "\n";
  }
  return out.str();
}

}  // namespace

TEST_CASE("experiment spec parses with defaults and rejects junk") {
  ExperimentSpec spec = spec_from_json(R"({
    "scenario": {"num_devices": 12, "num_slots": 5, "group_cap": 1},
    "algorithms": ["bms", "ranking"],
    "axis": "n",
    "values": [5, 10],
    "seeds": [7],
    "learner": {"rounds": 9},
    "guard_override": true,
    "out_dir": "out_here"
  })");
  CHECK(spec.scenario.num_devices == 12);
  CHECK(spec.scenario.group_cap == 1);
  CHECK(spec.scenario.max_power_dbm == 23.0);  // untouched default
  CHECK(spec.axis == "n");
  CHECK(spec.values == std::vector<double>{5, 10});
  CHECK(spec.learner.rounds == 9);
  CHECK(spec.guard_override);
  CHECK(spec.out_dir == "out_here");

  CHECK_THROWS_WITH_AS((void)spec_from_json("{"), doctest::Contains("not valid JSON"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS((void)spec_from_json("{}"),
                       doctest::Contains("malformed field"), std::runtime_error);
}

TEST_CASE("runner rejects impossible sweeps up front") {
  ExperimentSpec spec = tiny_spec();
  spec.algorithms = {};
  CHECK_THROWS_AS((void)run_experiment(spec), std::invalid_argument);
  spec = tiny_spec();
  spec.algorithms = {"definitely_not_real"};
  CHECK_THROWS_AS((void)run_experiment(spec), std::invalid_argument);
  spec = tiny_spec();
  spec.axis = "q";
  CHECK_THROWS_AS((void)run_experiment(spec), std::invalid_argument);
  spec = tiny_spec();
  spec.values = {};
  CHECK_THROWS_AS((void)run_experiment(spec), std::invalid_argument);
  spec = tiny_spec();
  spec.seeds = {};
  CHECK_THROWS_AS((void)run_experiment(spec), std::invalid_argument);
}

TEST_CASE("serial and pooled runs produce identical tables") {
  ExperimentSpec spec = tiny_spec();
  ResultTable serial = run_experiment(spec, 1);
  ResultTable pooled = run_experiment(spec, 3);
  CHECK(same_but_runtime(serial, pooled));
  REQUIRE(serial.cells.size() == 8);  // 2 values x 2 algorithms x 2 seeds
  for (const CellResult& c : serial.cells) {
    CHECK(c.error.empty());
    CHECK(c.nsd >= 0);
  }
}

TEST_CASE("existing cells are unchanged when the sweep grows") {
  ExperimentSpec small = tiny_spec();
  small.values = {6};
  small.seeds = {1};
  ExperimentSpec big = tiny_spec();  // adds value 9 and seed 2
  ResultTable a = run_experiment(small);
  ResultTable b = run_experiment(big);
  for (const CellResult& cell : a.cells) {
    bool found = false;
    for (const CellResult& other : b.cells)
      if (other.axis_value == cell.axis_value && other.algorithm == cell.algorithm &&
          other.seed == cell.seed) {
        found = true;
        CHECK(other.nsd == cell.nsd);
      }
    CHECK(found);
  }
}

TEST_CASE("frame schedulers refuse multi-frame sweeps cell by cell") {
  ExperimentSpec spec = tiny_spec();
  spec.scenario.num_frames = 3;
  spec.values = {6};
  spec.seeds = {1};
  ResultTable table = run_experiment(spec);
  REQUIRE(table.cells.size() == 2);
  for (const CellResult& c : table.cells) {
    CHECK_FALSE(c.error.empty());
    CHECK(c.error.find("k = 1") != std::string::npos);
  }
}

TEST_CASE("capacity mismatches become cell errors, not crashes") {
  ExperimentSpec spec = tiny_spec();
  spec.algorithms = {"ranking", "zz"};
  spec.values = {6};
  spec.seeds = {1};
  ResultTable table = run_experiment(spec);  // cap is 2: ranking must fail
  REQUIRE(table.cells.size() == 2);
  CHECK_FALSE(table.cells[0].error.empty());  // ranking
  CHECK(table.cells[1].error.empty());        // zz fits
  spec.scenario.group_cap = 1;
  table = run_experiment(spec);
  CHECK(table.cells[0].error.empty());
  CHECK_FALSE(table.cells[1].error.empty());
}

TEST_CASE("the exact oracle slots into sweeps and dominates the scheduler") {
  ExperimentSpec spec = tiny_spec();
  spec.algorithms = {"bms", "opt"};
  spec.values = {5, 8};
  spec.seeds = {1, 2, 3};
  ResultTable table = run_experiment(spec, 0);
  for (double v : spec.values)
    for (std::uint64_t s : spec.seeds) {
      double bms_nsd = -1, opt_nsd = -1;
      for (const CellResult& c : table.cells) {
        if (c.axis_value != v || c.seed != s) continue;
        REQUIRE(c.error.empty());
        (c.algorithm == "bms" ? bms_nsd : opt_nsd) = c.nsd;
      }
      CHECK(bms_nsd >= 0);
      CHECK(opt_nsd >= bms_nsd);
      CHECK(opt_nsd <= 2 * bms_nsd);
    }
}

TEST_CASE("learner cells carry traces and per-frame power") {
  ExperimentSpec spec;
  spec.scenario.num_devices = 4;
  spec.scenario.num_slots = 3;
  spec.scenario.num_frames = 2;
  spec.scenario.group_cap = 2;
  spec.scenario.power_level = 2;
  spec.learner.rounds = 6;
  spec.algorithms = {"pl", "ql", "rl"};
  spec.values = {4};
  spec.seeds = {5};
  spec.dump_records = true;
  spec.out_dir = "harness_test_out/learners";
  ResultTable table = run_experiment(spec);
  REQUIRE(table.cells.size() == 3);
  for (const CellResult& c : table.cells) {
    INFO(c.algorithm << ": " << c.error);
    CHECK(c.error.empty());
    CHECK(c.frame_mean_pc.size() == 2);
    CHECK(c.record_csv.rfind("round,frame,nsd,mean_pc\n", 0) == 0);
  }
  auto files = emit_report(table);
  bool has_pc = false, has_record = false;
  for (const std::string& f : files) {
    has_pc |= f.find("pc_m.csv") != std::string::npos;
    has_record |= f.find("record_") != std::string::npos;
  }
  CHECK(has_pc);
  CHECK(has_record);
  std::filesystem::remove_all("harness_test_out");
}

TEST_CASE("reports rewrite identically apart from runtimes") {
  ExperimentSpec spec = tiny_spec();
  spec.out_dir = "harness_test_out/a";
  ResultTable t1 = run_experiment(spec);
  auto files1 = emit_report(t1);
  spec.out_dir = "harness_test_out/b";
  ResultTable t2 = run_experiment(spec, 2);
  auto files2 = emit_report(t2);
  REQUIRE(files1.size() == files2.size());
  std::string csv_a, csv_b, svg_a, svg_b;
  for (const auto& f : files1) {
    if (f.find("results_m.csv") != std::string::npos) csv_a = f;
    if (f.find("nsd_m.svg") != std::string::npos) svg_a = f;
  }
  for (const auto& f : files2) {
    if (f.find("results_m.csv") != std::string::npos) csv_b = f;
    if (f.find("nsd_m.svg") != std::string::npos) svg_b = f;
  }
  REQUIRE_FALSE(csv_a.empty());
  REQUIRE_FALSE(svg_a.empty());
  std::string a = slurp(csv_a), b = slurp(csv_b);
  CHECK(a.rfind("axis_value,algorithm,seed,nsd,runtime_ms\n", 0) == 0);
  CHECK(drop_runtime(a) == drop_runtime(b));
  CHECK(slurp(svg_a) == slurp(svg_b));  // plots carry no timing

  // errors file only appears when something failed
  for (const auto& f : files1) CHECK(f.find("errors_m.csv") == std::string::npos);

  // and the CSV is enough to re-render a plot
  auto replot = report_from_csv(csv_a, "harness_test_out/replot");
  REQUIRE(replot.size() == 1);
  std::string svg = slurp(replot[0]);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("bms") != std::string::npos);
  std::filesystem::remove_all("harness_test_out");
}

TEST_CASE("failed cells land in the error listing instead of the results") {
  ExperimentSpec spec = tiny_spec();
  spec.algorithms = {"bms", "zz", "ranking"};  // ranking needs cap 1, cap is 2
  spec.values = {6};
  spec.seeds = {1};
  spec.out_dir = "harness_test_out/errs";
  ResultTable table = run_experiment(spec);
  auto files = emit_report(table);
  std::string errs;
  for (const auto& f : files)
    if (f.find("errors_m.csv") != std::string::npos) errs = f;
  REQUIRE_FALSE(errs.empty());
  std::string content = slurp(errs);
  CHECK(content.find("ranking") != std::string::npos);
  for (const auto& f : files)
    if (f.find("results_m.csv") != std::string::npos)
      CHECK(slurp(f).find("ranking") == std::string::npos);
  std::filesystem::remove_all("harness_test_out");
}

TEST_CASE("report parser rejects foreign CSVs") {
  std::filesystem::create_directories("harness_test_out");
  {
    std::ofstream out("harness_test_out/bogus.csv");
    out << "wrong,header\n1,2\n";
  }
  CHECK_THROWS_WITH_AS(
      (void)report_from_csv("harness_test_out/bogus.csv", "harness_test_out"),
      doctest::Contains("unexpected header"), std::runtime_error);
  CHECK_THROWS_AS((void)report_from_csv("no_such.csv", "harness_test_out"),
                  std::runtime_error);
  std::filesystem::remove_all("harness_test_out");
}

TEST_CASE("line plots are standalone SVG documents") {
  SvgSeries s;
  s.label = "demo";
  s.x = {1, 2, 3};
  s.y = {2, 1, 4};
  std::string svg = render_line_plot("title here", "x", "y", {s});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("demo") != std::string::npos);
  CHECK(svg.find("title here") != std::string::npos);
  // self-contained: no scripts, links or embedded resources
  CHECK(svg.find("<script") == std::string::npos);
  CHECK(svg.find("href") == std::string::npos);
  CHECK(svg.find("<image") == std::string::npos);
}
