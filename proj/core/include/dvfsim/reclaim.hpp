#pragma once

#include <string>
#include <vector>

#include "dvfsim/processor_model.hpp"
#include "dvfsim/schedule.hpp"
#include "dvfsim/task_graph.hpp"

namespace dvfsim {

/// Slack-reclamation strategy.
enum class Algorithm { None, Rdvfs, Mmf, Mfs, OptCont };

Algorithm algorithm_from_string(const std::string& s);
std::string to_string(Algorithm a);

/// One stint at a fixed frequency.
struct Segment {
  double freq_mhz = 0.0;
  double duration_s = 0.0;
};

/// How one task fills its slack window: frequency segments in descending
/// frequency order, then an idle tail. Invariants (up to 1e-9 relative):
///   sum duration + idle_tail = allotted window,
///   sum freq * duration     = task cycles,
///   energy = sum segment energies + idle energy of the tail.
struct FrequencyAssignment {
  int task_id = 0;
  std::vector<Segment> segments;
  double idle_tail = 0.0;  ///< seconds
  double energy = 0.0;     ///< mJ
};

/// Continuous-frequency lower bound: the single frequency f_max * t_os / T
/// that exactly fills the window, and its energy (alpha f^3 + gamma) * T.
struct OptContinuous {
  double f_opt = 0.0;  ///< MHz, in (0, f_max]
  double energy = 0.0; ///< mJ
};
OptContinuous opt_continuous(const SlackWindow& window, double cycles,
                             const ProcessorModel& model);

/// Single-frequency reclamation: run at the smallest discrete level that is
/// >= f_opt (the lowest level when f_opt falls below it) and idle for the
/// remainder of the window.
FrequencyAssignment rdvfs(const SlackWindow& window, double cycles,
                          const ProcessorModel& model);

/// Two-frequency reclamation: the max/min-frequency mix that fills the
/// window exactly while conserving cycles. When cycles < f_min * T the mix
/// is infeasible and the task runs at f_min with an idle tail. When the mix
/// costs more than the single-frequency choice, the single-frequency
/// assignment is kept (the mix helps only when rounding up wastes energy).
FrequencyAssignment mmf_dvfs(const SlackWindow& window, double cycles,
                             const ProcessorModel& model);

/// Multi-frequency reclamation: the exact minimizer over all level mixes
/// that fill the window and conserve cycles, with the same f_min fallback
/// as mmf_dvfs when the window cannot be filled.
FrequencyAssignment mfs_dvfs(const SlackWindow& window, double cycles,
                             const ProcessorModel& model);

/// A schedule with per-task frequency assignments and system-level energy:
/// total_energy = sum of task energies
///              + p_idle * (P * makespan - sum of window lengths).
struct ReclaimedSchedule {
  Schedule base;
  std::vector<FrequencyAssignment> assignments;  ///< sorted by task id
  double total_energy = 0.0;                     ///< mJ
  Algorithm algorithm = Algorithm::None;
};

/// Applies one strategy to every task of a schedule. Tasks whose window is
/// shorter than 20x the frequency transition time keep the original f_max
/// execution, as do all tasks under Algorithm::None. OptCont records the
/// continuous bound as a single-segment pseudo-assignment. Per-task errors
/// propagate with the task id attached.
ReclaimedSchedule reclaim_schedule(const Schedule& schedule, const TaskGraph& graph,
                                   const ProcessorModel& model, Algorithm algorithm);

/// CSV dump, one row per segment (columns task_id,freq,duration,idle_tail,
/// energy; idle_tail and energy are the per-task totals repeated on each of
/// the task's rows).
void write_assignments_csv(const std::string& path, const ReclaimedSchedule& reclaimed);

}  // namespace dvfsim
