#include "dvfsim/reclaim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "dvfsim/errors.hpp"
#include "dvfsim/freq_lp.hpp"
#include "text_format.hpp"

namespace dvfsim {

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "none") return Algorithm::None;
  if (s == "rdvfs") return Algorithm::Rdvfs;
  if (s == "mmf") return Algorithm::Mmf;
  if (s == "mfs") return Algorithm::Mfs;
  if (s == "opt") return Algorithm::OptCont;
  throw ParameterError("unknown algorithm \"" + s + "\" (expected none|rdvfs|mmf|mfs|opt)");
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::None: return "none";
    case Algorithm::Rdvfs: return "rdvfs";
    case Algorithm::Mmf: return "mmf";
    case Algorithm::Mfs: return "mfs";
    case Algorithm::OptCont: return "opt";
  }
  return "?";
}

namespace {

constexpr double kRelTol = 1e-9;

void check_window(const SlackWindow& window, double cycles, const ProcessorModel& model) {
  if (cycles <= 0) throw ParameterError("reclaim: cycles must be positive");
  const double t_os = cycles / model.f_max();
  if (window.allotted < t_os * (1.0 - kRelTol)) {
    throw InfeasibleError("window of " + std::to_string(window.allotted) +
                          " s cannot fit " + std::to_string(t_os) + " s of work at f_max");
  }
}

double finish_energy(const ProcessorModel& model, const FrequencyAssignment& a) {
  double e = 0.0;
  for (const Segment& s : a.segments) e += model.segment_energy(s.freq_mhz, s.duration_s);
  return e + model.idle_energy(a.idle_tail);
}

// Run at f_min and idle: the only choice once the window is too long for
// even the lowest frequency to fill it.
FrequencyAssignment floor_assignment(const SlackWindow& window, double cycles,
                                     const ProcessorModel& model) {
  FrequencyAssignment a;
  a.task_id = window.task_id;
  const double t = cycles / model.f_min();
  a.segments = {{model.f_min(), t}};
  a.idle_tail = std::max(0.0, window.allotted - t);
  a.energy = finish_energy(model, a);
  return a;
}

}  // namespace

OptContinuous opt_continuous(const SlackWindow& window, double cycles,
                             const ProcessorModel& model) {
  check_window(window, cycles, model);
  OptContinuous r;
  r.f_opt = cycles / window.allotted;  // = f_max * t_os / T
  r.energy = model.dynamic_power(r.f_opt) * window.allotted;
  return r;
}

FrequencyAssignment rdvfs(const SlackWindow& window, double cycles,
                          const ProcessorModel& model) {
  check_window(window, cycles, model);
  const double f_opt = cycles / window.allotted;

  double f_rd = model.f_max();
  for (const FrequencyLevel& lv : model.levels()) {
    if (lv.freq_mhz >= f_opt * (1.0 - kRelTol)) {
      f_rd = lv.freq_mhz;
      break;
    }
  }

  FrequencyAssignment a;
  a.task_id = window.task_id;
  const double t_rd = cycles / f_rd;
  a.segments = {{f_rd, t_rd}};
  a.idle_tail = std::max(0.0, window.allotted - t_rd);
  a.energy = finish_energy(model, a);
  return a;
}

FrequencyAssignment mmf_dvfs(const SlackWindow& window, double cycles,
                             const ProcessorModel& model) {
  check_window(window, cycles, model);
  const double f1 = model.f_min();
  const double fN = model.f_max();
  const double T = window.allotted;

  if (cycles < f1 * T * (1.0 - kRelTol)) {
    return floor_assignment(window, cycles, model);
  }

  // t_N + t_1 = T with f_N t_N + f_1 t_1 = cycles
  double t_n = (cycles - f1 * T) / (fN - f1);
  double t_1 = (fN * T - cycles) / (fN - f1);
  t_n = std::max(t_n, 0.0);
  t_1 = std::max(t_1, 0.0);

  FrequencyAssignment a;
  a.task_id = window.task_id;
  if (t_n > 0) a.segments.push_back({fN, t_n});
  if (t_1 > 0) a.segments.push_back({f1, t_1});
  a.idle_tail = 0.0;
  a.energy = finish_energy(model, a);

  // The extreme-frequency mix can cost more than the rounded single
  // frequency (snug windows); in that worst case fall back to it.
  FrequencyAssignment single = rdvfs(window, cycles, model);
  return single.energy < a.energy ? single : a;
}

FrequencyAssignment mfs_dvfs(const SlackWindow& window, double cycles,
                             const ProcessorModel& model) {
  check_window(window, cycles, model);
  const double T = window.allotted;

  if (cycles < model.f_min() * T * (1.0 - kRelTol)) {
    return floor_assignment(window, cycles, model);
  }

  std::vector<double> freqs, powers;
  freqs.reserve(model.levels().size());
  powers.reserve(model.levels().size());
  for (const FrequencyLevel& lv : model.levels()) {
    freqs.push_back(lv.freq_mhz);
    powers.push_back(model.dynamic_power(lv.freq_mhz));
  }
  const TaskLP lp(std::move(freqs), std::move(powers), cycles, T);
  const LPSolution sol = solve(lp);

  FrequencyAssignment a;
  a.task_id = window.task_id;
  for (std::size_t i = lp.n(); i-- > 0;) {
    if (sol.times[i] > 0.0) a.segments.push_back({lp.freqs()[i], sol.times[i]});
  }
  a.idle_tail = 0.0;
  a.energy = finish_energy(model, a);
  return a;
}

ReclaimedSchedule reclaim_schedule(const Schedule& schedule, const TaskGraph& graph,
                                   const ProcessorModel& model, Algorithm algorithm) {
  validate_schedule(schedule, graph);

  ReclaimedSchedule out;
  out.base = schedule;
  out.algorithm = algorithm;

  const std::vector<SlackWindow> windows = slack_windows(schedule, graph);
  double window_total = 0.0;

  for (const SlackWindow& w : windows) {
    const double cycles = graph.task(w.task_id).cycles;
    window_total += w.allotted;
    try {
      FrequencyAssignment a;
      const bool eligible = w.allotted >= 20.0 * model.transition_time();
      if (algorithm == Algorithm::None || !eligible) {
        a.task_id = w.task_id;
        a.segments = {{model.f_max(), w.t_os}};
        a.idle_tail = std::max(0.0, w.allotted - w.t_os);
        a.energy = model.segment_energy(model.f_max(), w.t_os) + model.idle_energy(a.idle_tail);
      } else {
        switch (algorithm) {
          case Algorithm::Rdvfs: a = rdvfs(w, cycles, model); break;
          case Algorithm::Mmf: a = mmf_dvfs(w, cycles, model); break;
          case Algorithm::Mfs: a = mfs_dvfs(w, cycles, model); break;
          case Algorithm::OptCont: {
            const OptContinuous oc = opt_continuous(w, cycles, model);
            a.task_id = w.task_id;
            a.segments = {{oc.f_opt, w.allotted}};
            a.idle_tail = 0.0;
            a.energy = oc.energy;
            break;
          }
          case Algorithm::None: break;  // handled above
        }
      }
      out.total_energy += a.energy;
      out.assignments.push_back(std::move(a));
    } catch (const Error& e) {
      throw InfeasibleError("task " + std::to_string(w.task_id) + ": " + e.what());
    }
  }

  const double gap = static_cast<double>(schedule.n_processors) * schedule.makespan - window_total;
  out.total_energy += model.idle_energy(std::max(0.0, gap));
  return out;
}

void write_assignments_csv(const std::string& path, const ReclaimedSchedule& reclaimed) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write assignment file: " + path);
  out << "task_id,freq,duration,idle_tail,energy\n";
  for (const FrequencyAssignment& a : reclaimed.assignments) {
    for (const Segment& s : a.segments) {
      out << a.task_id << ',' << detail::fmt_double(s.freq_mhz) << ','
          << detail::fmt_double(s.duration_s) << ',' << detail::fmt_double(a.idle_tail) << ','
          << detail::fmt_double(a.energy) << "\n";
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace dvfsim
