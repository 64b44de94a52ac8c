#include <vector>

#include <doctest.h>

#include "builders.hpp"
#include "noma/exact.hpp"
#include "noma/online.hpp"
#include "noma/scenario.hpp"
#include "oracles.hpp"

using namespace noma;

TEST_CASE("matching optimum equals assignment enumeration for single-device RBs") {
  refo::CorpusParams cp;
  cp.max_devices = 7;
  cp.max_slots = 4;
  cp.max_cap = 1;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Instance inst = refo::random_instance(seed, cp);
    inst.group_cap = 1;
    exact::MatchingSolution sol = exact::opt_matching_m1(inst, 0);
    CHECK(sol.served_count == refo::frame_opt(inst, 0));
    // the reported assignment is consistent
    int assigned = 0;
    for (int j = 0; j < inst.num_slots; ++j)
      if (sol.slot_device[j] >= 0) ++assigned;
    CHECK(assigned == sol.served_count);
  }
}

TEST_CASE("frame search equals assignment enumeration for grouped RBs") {
  refo::CorpusParams cp;
  for (std::uint64_t seed = 200; seed < 350; ++seed) {
    Instance inst = refo::random_instance(seed, cp);
    exact::FrameSolution sol = exact::opt_bruteforce_frame(inst, 0);
    CHECK(sol.served_count == refo::frame_opt(inst, 0));
    // returned schedule is genuinely feasible
    Schedule s;
    s.resize(inst.num_devices, inst.num_slots, inst.num_frames);
    online::FrameResult fr;
    fr.groups = sol.groups;
    fr.served = sol.served;
    fr.served_count = sol.served_count;
    online::apply_to_schedule(fr, s);
    CHECK(validate_schedule(inst, s).empty());
    CHECK(long(sol.served.size()) == long(sol.served_count));
  }
}

TEST_CASE("frame search dominates every scheduler and respects custom budgets") {
  refo::CorpusParams cp;
  for (std::uint64_t seed = 400; seed < 450; ++seed) {
    Instance inst = refo::random_instance(seed, cp);
    int opt = exact::opt_bruteforce_frame(inst, 0).served_count;
    CHECK(online::bms(inst, 0).served_count <= opt);
    CHECK(online::selfish_frame(inst, 0).served_count <= opt);
    CHECK(2 * online::bms(inst, 0).served_count >= opt);

    // halving every budget can only hurt
    std::vector<double> half(inst.num_devices);
    for (int i = 0; i < inst.num_devices; ++i)
      half[i] = inst.devices[i].max_energy / 2.0;
    int opt_half = exact::opt_bruteforce_frame(inst, 0, half).served_count;
    CHECK(opt_half <= opt);
    CHECK(opt_half == refo::frame_opt(inst, 0, half));
  }
}

TEST_CASE("optimum is monotone in the transmit power cap") {
  refo::CorpusParams cp;
  for (std::uint64_t seed = 500; seed < 520; ++seed) {
    Instance inst = refo::random_instance(seed, cp);
    int base = exact::opt_bruteforce_frame(inst, 0).served_count;
    for (auto& dev : inst.devices) dev.max_energy *= 2.0;
    CHECK(exact::opt_bruteforce_frame(inst, 0).served_count >= base);
  }
}

TEST_CASE("size guards refuse big instances unless overridden") {
  ScenarioParams p;
  p.num_devices = 11;
  p.num_slots = 4;
  p.seed = 3;
  Instance inst = generate_instance(p);
  CHECK_THROWS_WITH_AS((void)exact::opt_bruteforce_frame(inst, 0),
                       doctest::Contains("guard"), std::invalid_argument);
  exact::Guards loose;
  loose.overridden = true;
  CHECK_NOTHROW((void)exact::opt_bruteforce_frame(inst, 0, {}, loose));

  p.num_devices = 3;
  p.num_frames = 4;
  p.power_level = 2;
  Instance h = generate_instance(p);
  CHECK_THROWS_WITH_AS((void)exact::opt_bruteforce_horizon(h),
                       doctest::Contains("guard"), std::invalid_argument);
  CHECK_NOTHROW((void)exact::opt_bruteforce_horizon(h, loose));
}

TEST_CASE("horizon search equals the joint plan enumeration") {
  refo::CorpusParams cp;
  cp.max_devices = 3;
  cp.max_slots = 2;
  cp.max_frames = 2;
  cp.max_level = 2;
  cp.max_cap = 2;
  for (std::uint64_t seed = 600; seed < 640; ++seed) {
    Instance inst = refo::random_instance(seed, cp);
    CHECK(exact::opt_bruteforce_horizon(inst) == refo::horizon_opt(inst));
  }
}

TEST_CASE("horizon search sees gains a single frame cannot") {
  // one device, two frames, both trivially decodable at half power: splitting
  // the lattice serves both frames
  Instance inst = builders::flat_instance(1, 1, 2, 1, 1.0, 1);
  inst.devices[0].power_level = 2;
  inst.channels.at(0, 0, 0) = 4.0;  // half power: 2 >= 1
  inst.channels.at(0, 0, 1) = 4.0;
  CHECK(exact::opt_bruteforce_horizon(inst) == 2);
  CHECK(refo::horizon_opt(inst) == 2);
  // with a coarse lattice the device can only fire once
  inst.devices[0].power_level = 1;
  CHECK(exact::opt_bruteforce_horizon(inst) == 1);
}
