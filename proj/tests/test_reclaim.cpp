#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <vector>

#include "dvfsim/errors.hpp"
#include "dvfsim/processor_model.hpp"
#include "dvfsim/reclaim.hpp"
#include "dvfsim/schedule.hpp"
#include "dvfsim/task_graph.hpp"

using namespace dvfsim;

namespace {

struct TestRng {
  std::uint64_t s;
  explicit TestRng(std::uint64_t seed) : s(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform(double lo, double hi) {
    return lo + static_cast<double>(next() >> 11) * 0x1.0p-53 * (hi - lo);
  }
};

const ProcessorModel& crusoe() {
  static const ProcessorModel model = preset("transmeta_crusoe");
  return model;
}

SlackWindow window(double t_os, double allotted) { return {0, t_os, allotted, 0.0}; }

void check_assignment(const FrequencyAssignment& a, double cycles, double T,
                      const ProcessorModel& m) {
  double sum_t = 0, sum_ft = 0, energy = 0;
  for (const Segment& s : a.segments) {
    CHECK(s.duration_s >= 0.0);
    sum_t += s.duration_s;
    sum_ft += s.freq_mhz * s.duration_s;
    energy += m.segment_energy(s.freq_mhz, s.duration_s);
  }
  CHECK(a.idle_tail >= 0.0);
  energy += m.idle_energy(a.idle_tail);
  CHECK(sum_t + a.idle_tail == doctest::Approx(T).epsilon(1e-9));
  CHECK(sum_ft == doctest::Approx(cycles).epsilon(1e-9));
  CHECK(a.energy == doctest::Approx(energy).epsilon(1e-12));
  // execution order is highest frequency first
  for (std::size_t i = 1; i < a.segments.size(); ++i) {
    CHECK(a.segments[i].freq_mhz < a.segments[i - 1].freq_mhz);
  }
}

double original_energy(const ProcessorModel& m, double cycles, double T) {
  const double t_os = cycles / m.f_max();
  return m.segment_energy(m.f_max(), t_os) + m.idle_energy(T - t_os);
}

}  // namespace

TEST_CASE("continuous bound on the worked example") {
  const auto oc = opt_continuous(window(6.0, 10.0), 4002, crusoe());
  CHECK(oc.f_opt == doctest::Approx(400.2).epsilon(1e-12));
  CHECK(oc.energy == doctest::Approx(12479.0).epsilon(1e-3));
}

TEST_CASE("continuous bound with zero slack is the original energy") {
  const auto oc = opt_continuous(window(6.0, 6.0), 4002, crusoe());
  CHECK(oc.f_opt == doctest::Approx(crusoe().f_max()).epsilon(1e-12));
  CHECK(oc.energy == doctest::Approx(crusoe().dynamic_power(667) * 6.0).epsilon(1e-12));
}

TEST_CASE("continuous frequency times window always equals the cycles") {
  TestRng rng(8);
  for (int it = 0; it < 500; ++it) {
    const double T = rng.uniform(0.01, 50);
    const double cycles = rng.uniform(0.05, 1.0) * crusoe().f_max() * T;
    const auto oc = opt_continuous(window(cycles / crusoe().f_max(), T), cycles, crusoe());
    CHECK(oc.f_opt * T == doctest::Approx(cycles).epsilon(1e-12));
    CHECK(oc.f_opt <= crusoe().f_max() * (1 + 1e-12));
  }
}

TEST_CASE("infeasible window is rejected") {
  CHECK_THROWS_AS(opt_continuous(window(6.0, 5.0), 4002, crusoe()), InfeasibleError);
  CHECK_THROWS_AS(rdvfs(window(6.0, 5.0), 4002, crusoe()), InfeasibleError);
  CHECK_THROWS_AS(mmf_dvfs(window(6.0, 5.0), 4002, crusoe()), InfeasibleError);
  CHECK_THROWS_AS(mfs_dvfs(window(6.0, 5.0), 4002, crusoe()), InfeasibleError);
}

TEST_CASE("single-frequency reclamation on the worked example") {
  const FrequencyAssignment a = rdvfs(window(6.0, 10.0), 4002, crusoe());
  REQUIRE(a.segments.size() == 1);
  CHECK(a.segments[0].freq_mhz == 533.0);
  CHECK(a.segments[0].duration_s == doctest::Approx(7.5084).epsilon(1e-4));
  CHECK(a.energy == doctest::Approx(23405.0).epsilon(1e-3));
  check_assignment(a, 4002, 10.0, crusoe());
}

TEST_CASE("the chosen level is the smallest at or above the continuous optimum") {
  TestRng rng(21);
  for (int it = 0; it < 1000; ++it) {
    const double T = rng.uniform(0.01, 40);
    const double cycles = rng.uniform(0.02, 1.0) * crusoe().f_max() * T;
    const FrequencyAssignment a = rdvfs(window(cycles / crusoe().f_max(), T), cycles, crusoe());
    const double f_rd = a.segments[0].freq_mhz;
    const double f_opt = cycles / T;

    double expected = crusoe().f_min();
    if (f_opt > crusoe().f_min()) {
      for (const auto& lv : crusoe().levels()) {
        if (lv.freq_mhz >= f_opt * (1 - 1e-9)) {
          expected = lv.freq_mhz;
          break;
        }
      }
    }
    CHECK(f_rd == expected);
    CHECK(cycles / f_rd <= T * (1 + 1e-9));  // it fits
  }
}

TEST_CASE("an exact level match leaves no idle tail") {
  // f_opt = 533 exactly
  const double T = 10.0;
  const double cycles = 533.0 * T;
  const FrequencyAssignment a = rdvfs(window(cycles / crusoe().f_max(), T), cycles, crusoe());
  REQUIRE(a.segments.size() == 1);
  CHECK(a.segments[0].freq_mhz == 533.0);
  CHECK(a.idle_tail == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("zero slack keeps original execution") {
  const FrequencyAssignment a = rdvfs(window(6.0, 6.0), 4002, crusoe());
  REQUIRE(a.segments.size() == 1);
  CHECK(a.segments[0].freq_mhz == crusoe().f_max());
  CHECK(a.energy == doctest::Approx(original_energy(crusoe(), 4002, 6.0)).epsilon(1e-9));
}

TEST_CASE("below the lowest level the task runs there and idles") {
  const double T = 10.0;
  const double cycles = 100.0 * T;  // f_opt = 100 < 300
  const FrequencyAssignment a = rdvfs(window(cycles / crusoe().f_max(), T), cycles, crusoe());
  REQUIRE(a.segments.size() == 1);
  CHECK(a.segments[0].freq_mhz == 300.0);
  CHECK(a.idle_tail > 0);
  check_assignment(a, cycles, T, crusoe());
}

TEST_CASE("max/min mix on the worked example") {
  const FrequencyAssignment a = mmf_dvfs(window(6.0, 10.0), 4002, crusoe());
  REQUIRE(a.segments.size() == 2);
  CHECK(a.segments[0].freq_mhz == 667.0);
  CHECK(a.segments[0].duration_s == doctest::Approx(2.7302).epsilon(1e-4));
  CHECK(a.segments[1].freq_mhz == 300.0);
  CHECK(a.segments[1].duration_s == doctest::Approx(7.2698).epsilon(1e-4));
  CHECK(a.energy == doctest::Approx(19569.0).epsilon(1e-3));
  check_assignment(a, 4002, 10.0, crusoe());
}

TEST_CASE("max/min mix degenerates at zero slack") {
  const FrequencyAssignment a = mmf_dvfs(window(6.0, 6.0), 4002, crusoe());
  REQUIRE(a.segments.size() == 1);
  CHECK(a.segments[0].freq_mhz == crusoe().f_max());
  CHECK(a.segments[0].duration_s == doctest::Approx(6.0).epsilon(1e-9));
}

TEST_CASE("max/min mix at the lower boundary runs entirely at f_min") {
  const double T = 10.0;
  const double cycles = crusoe().f_min() * T;
  const FrequencyAssignment a = mmf_dvfs(window(cycles / crusoe().f_max(), T), cycles, crusoe());
  REQUIRE(a.segments.size() == 1);
  CHECK(a.segments[0].freq_mhz == crusoe().f_min());
  CHECK(a.segments[0].duration_s == doctest::Approx(T).epsilon(1e-9));
  CHECK(a.idle_tail == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("max/min mix falls back to the single frequency when it costs more") {
  // f_opt = 500: rounding to 533 wastes little, while the 667/300 mix pays
  // the convexity premium. The mix must not be kept.
  const double T = 10.0;
  const double cycles = 500.0 * T;
  const FrequencyAssignment mix = mmf_dvfs(window(cycles / crusoe().f_max(), T), cycles, crusoe());
  const FrequencyAssignment single = rdvfs(window(cycles / crusoe().f_max(), T), cycles, crusoe());
  CHECK(mix.energy == doctest::Approx(single.energy).epsilon(1e-12));
  REQUIRE(mix.segments.size() == 1);
  CHECK(mix.segments[0].freq_mhz == 533.0);
  check_assignment(mix, cycles, T, crusoe());
}

TEST_CASE("multi-frequency solution on the worked example") {
  const FrequencyAssignment a = mfs_dvfs(window(6.0, 10.0), 4002, crusoe());
  REQUIRE(a.segments.size() == 2);
  CHECK(a.segments[0].freq_mhz == 533.0);
  CHECK(a.segments[0].duration_s == doctest::Approx(0.015038).epsilon(1e-4));
  CHECK(a.segments[1].freq_mhz == 400.0);
  CHECK(a.segments[1].duration_s == doctest::Approx(9.98496).epsilon(1e-4));
  CHECK(a.energy == doctest::Approx(12486.0).epsilon(1e-3));
  check_assignment(a, 4002, 10.0, crusoe());
}

TEST_CASE("multi-frequency solution collapses to one level when f_opt is discrete") {
  const double T = 10.0;
  const double cycles = 533.0 * T;
  const SlackWindow w = window(cycles / crusoe().f_max(), T);
  const FrequencyAssignment a = mfs_dvfs(w, cycles, crusoe());
  REQUIRE(a.segments.size() == 1);
  CHECK(a.segments[0].freq_mhz == 533.0);
  CHECK(a.energy == doctest::Approx(rdvfs(w, cycles, crusoe()).energy).epsilon(1e-9));
}

TEST_CASE("multi-frequency solution at zero slack is the original execution") {
  const FrequencyAssignment a = mfs_dvfs(window(6.0, 6.0), 4002, crusoe());
  REQUIRE(a.segments.size() == 1);
  CHECK(a.segments[0].freq_mhz == crusoe().f_max());
  CHECK(a.segments[0].duration_s == doctest::Approx(6.0).epsilon(1e-9));
}

TEST_CASE("per-task energies obey the algorithm chain") {
  TestRng rng(4242);
  for (int it = 0; it < 4000; ++it) {
    const ProcessorModel& m =
        it % 2 == 0 ? crusoe() : preset("intel_xscale");
    const double T = rng.uniform(0.005, 60);
    const double f_target = rng.uniform(0.2 * m.f_min(), m.f_max());
    const double cycles = f_target * T;
    const SlackWindow w = window(cycles / m.f_max(), T);

    const double e_orig = original_energy(m, cycles, T);
    const double e_rd = rdvfs(w, cycles, m).energy;
    const double e_mmf = mmf_dvfs(w, cycles, m).energy;
    const double e_mfs = mfs_dvfs(w, cycles, m).energy;
    const double e_opt = opt_continuous(w, cycles, m).energy;

    const auto leq = [](double a, double b) { return a <= b + 1e-9 * std::max(a, b) + 1e-12; };
    CHECK(leq(e_opt, e_mfs));
    CHECK(leq(e_mfs, e_mmf));
    CHECK(leq(e_mmf, e_rd));
    CHECK(leq(e_rd, e_orig));
  }
}

TEST_CASE("assignments conserve cycles and window time") {
  TestRng rng(555);
  for (int it = 0; it < 2000; ++it) {
    const ProcessorModel& m = it % 2 == 0 ? crusoe() : preset("intel_xscale");
    const double T = rng.uniform(0.005, 60);
    const double cycles = rng.uniform(0.2 * m.f_min(), m.f_max()) * T;
    const SlackWindow w = window(cycles / m.f_max(), T);
    check_assignment(rdvfs(w, cycles, m), cycles, T, m);
    check_assignment(mmf_dvfs(w, cycles, m), cycles, T, m);
    check_assignment(mfs_dvfs(w, cycles, m), cycles, T, m);
  }
}

TEST_CASE("multi-frequency support is at most two bracketing adjacent levels") {
  TestRng rng(808);
  for (int it = 0; it < 2000; ++it) {
    const ProcessorModel& m = it % 2 == 0 ? crusoe() : preset("intel_xscale");
    const double T = rng.uniform(0.01, 50);
    const double f_target = rng.uniform(m.f_min(), m.f_max());
    const double cycles = f_target * T;
    const FrequencyAssignment a = mfs_dvfs(window(cycles / m.f_max(), T), cycles, m);
    REQUIRE(a.segments.size() <= 2);
    if (a.segments.size() == 2) {
      // descending order; find the level indices
      const auto& lv = m.levels();
      std::size_t hi = 0, lo = 0;
      for (std::size_t i = 0; i < lv.size(); ++i) {
        if (lv[i].freq_mhz == a.segments[0].freq_mhz) hi = i;
        if (lv[i].freq_mhz == a.segments[1].freq_mhz) lo = i;
      }
      CHECK(hi == lo + 1);
      CHECK(lv[lo].freq_mhz <= f_target * (1 + 1e-9));
      CHECK(lv[hi].freq_mhz >= f_target * (1 - 1e-9));
    }
  }
}

// ---- whole-schedule reclamation ----

namespace {

// four independent tasks on two processors; only task 3 ends up with slack
TaskGraph four_task_graph() {
  const double f = crusoe().f_max();
  return TaskGraph({{1, 4 * f}, {2, 3 * f}, {3, 2 * f}, {4, 6 * f}}, {}, "four");
}

}  // namespace

TEST_CASE("baseline energy matches the closed form") {
  const TaskGraph g = four_task_graph();
  const Schedule s = list_schedule(g, 2, crusoe(), Priority::Fifo);
  const ReclaimedSchedule r = reclaim_schedule(s, g, crusoe(), Algorithm::None);

  double sum_tos = 0;
  for (const Task& t : g.tasks()) sum_tos += t.cycles / crusoe().f_max();
  const double expect = crusoe().dynamic_power(crusoe().f_max()) * sum_tos +
                        crusoe().p_idle() * (2 * s.makespan - sum_tos);
  CHECK(r.total_energy == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("every algorithm matches baseline on a zero-slack schedule") {
  // one processor, one chain: every window is exactly t_os
  const double f = crusoe().f_max();
  const TaskGraph g({{1, 2 * f}, {2, 3 * f}}, {{1, 2, 0.0}}, "chain");
  const Schedule s = list_schedule(g, 1, crusoe(), Priority::Fifo);
  const double base = reclaim_schedule(s, g, crusoe(), Algorithm::None).total_energy;
  for (Algorithm a : {Algorithm::Rdvfs, Algorithm::Mmf, Algorithm::Mfs, Algorithm::OptCont}) {
    CHECK(reclaim_schedule(s, g, crusoe(), a).total_energy == doctest::Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("whole-schedule energies obey the chain") {
  const TaskGraph g = four_task_graph();
  const Schedule s = list_schedule(g, 2, crusoe(), Priority::Fifo);
  const double e_none = reclaim_schedule(s, g, crusoe(), Algorithm::None).total_energy;
  const double e_rd = reclaim_schedule(s, g, crusoe(), Algorithm::Rdvfs).total_energy;
  const double e_mmf = reclaim_schedule(s, g, crusoe(), Algorithm::Mmf).total_energy;
  const double e_mfs = reclaim_schedule(s, g, crusoe(), Algorithm::Mfs).total_energy;
  const double e_opt = reclaim_schedule(s, g, crusoe(), Algorithm::OptCont).total_energy;
  CHECK(e_opt <= e_mfs * (1 + 1e-9));
  CHECK(e_mfs <= e_mmf * (1 + 1e-9));
  CHECK(e_mmf <= e_rd * (1 + 1e-9));
  CHECK(e_rd <= e_none * (1 + 1e-9));
  CHECK(e_opt < e_none);  // task 3 has real slack to exploit
}

TEST_CASE("short windows are not reclaimed") {
  // windows below 20x the transition time keep the f_max execution
  const double f = crusoe().f_max();
  const double t_os = 0.5e-3;  // 0.5 ms < 2 ms threshold
  const TaskGraph g({{1, t_os * f}, {2, 3 * t_os * f}}, {}, "short");
  const Schedule s = list_schedule(g, 1, crusoe(), Priority::Fifo);
  const ReclaimedSchedule r = reclaim_schedule(s, g, crusoe(), Algorithm::Mfs);
  // task 1 is followed immediately by task 2, so its window is t_os (short);
  // task 2's window runs to the makespan and is also short (1.5 + 0.5 ms)
  for (const auto& a : r.assignments) {
    REQUIRE(a.segments.size() == 1);
    CHECK(a.segments[0].freq_mhz == crusoe().f_max());
  }
  CHECK(r.total_energy ==
        doctest::Approx(reclaim_schedule(s, g, crusoe(), Algorithm::None).total_energy)
            .epsilon(1e-12));
}

TEST_CASE("reclaimed execution never exceeds its window") {
  const TaskGraph g = gen_random(60, 13, 5, 10, 6, 0.25, 0.001, 0.005);
  const Schedule s = list_schedule(g, 4, crusoe(), Priority::Lpt);
  const auto windows = slack_windows(s, g);
  std::map<int, SlackWindow> by_id;
  for (const auto& w : windows) by_id[w.task_id] = w;
  for (Algorithm alg : {Algorithm::Rdvfs, Algorithm::Mmf, Algorithm::Mfs, Algorithm::OptCont}) {
    const ReclaimedSchedule r = reclaim_schedule(s, g, crusoe(), alg);
    REQUIRE(r.assignments.size() == g.size());
    for (const auto& a : r.assignments) {
      double busy = 0;
      for (const auto& seg : a.segments) busy += seg.duration_s;
      CHECK(busy <= by_id[a.task_id].allotted * (1 + 1e-9));
    }
    // stretched-to-window execution preserves the makespan
    Schedule stretched = s;
    for (auto& e : stretched.entries) e.finish = e.start + by_id[e.task_id].allotted;
    validate_schedule(stretched, g);
  }
}

TEST_CASE("assignment CSV lists one row per segment") {
  const TaskGraph g = four_task_graph();
  const Schedule s = list_schedule(g, 2, crusoe(), Priority::Fifo);
  const ReclaimedSchedule r = reclaim_schedule(s, g, crusoe(), Algorithm::Mmf);
  const std::string path = "/tmp/dvfsim_test_assign.csv";
  write_assignments_csv(path, r);
  std::size_t rows = 0;
  for (const auto& a : r.assignments) rows += a.segments.size();
  std::ifstream in(path);
  std::string line;
  std::size_t count = 0;
  REQUIRE(std::getline(in, line));
  CHECK(line == "task_id,freq,duration,idle_tail,energy");
  while (std::getline(in, line)) {
    if (!line.empty()) ++count;
  }
  CHECK(count == rows);
}
