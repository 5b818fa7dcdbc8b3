#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dvfsim/processor_model.hpp"
#include "dvfsim/task_graph.hpp"

namespace dvfsim {

/// Ready-task ordering rule for list scheduling.
enum class Priority { Fifo, Lpt, Spt };

Priority priority_from_string(const std::string& s);
std::string to_string(Priority p);

struct ScheduleEntry {
  int task_id = 0;
  int processor = 0;
  double start = 0.0;
  double finish = 0.0;  ///< start + cycles / f_max (tasks run at f_max)
};

struct Schedule {
  std::vector<ScheduleEntry> entries;  ///< in placement order
  int n_processors = 0;
  double makespan = 0.0;

  const ScheduleEntry& entry(int task_id) const;
};

/// The whole interval a processor can devote to one task without delaying
/// anything: [start, start + allotted], with allotted >= t_os.
struct SlackWindow {
  int task_id = 0;
  double t_os = 0.0;     ///< execution time at f_max, seconds
  double allotted = 0.0; ///< window length, seconds
  double start = 0.0;
};

/// Classic insertion-free list scheduling of `graph` onto `n_processors`
/// identical processors, all tasks at f_max. The highest-priority ready task
/// goes to the processor offering the earliest start (respecting per-edge
/// communication delays across processors); ties break toward the lower
/// processor index. FIFO orders ready tasks by readiness time, LPT by
/// descending and SPT by ascending execution time; every rule breaks ties by
/// ascending task id.
Schedule list_schedule(const TaskGraph& graph, int n_processors,
                       const ProcessorModel& model, Priority priority);

/// Per-task slack windows of a schedule. For task k,
///   allotted = deadline - start,
///   deadline = min( start of next entry on the same processor
///                     (makespan if none),
///                   min over successors s of start(s) - comm(k,s) if s runs
///                     on a different processor, else start(s) ).
/// Stretching any task to fill its window delays no successor and no
/// same-processor neighbor, so the makespan is preserved.
/// Windows are returned sorted by task id.
std::vector<SlackWindow> slack_windows(const Schedule& schedule, const TaskGraph& graph);

/// Checks schedule invariants: every task exactly once, processors in range,
/// per-processor non-overlap, precedence feasibility with communication
/// delays, makespan = max finish. With a model, additionally checks
/// finish = start + cycles / f_max. Throws ValidationError on violation.
void validate_schedule(const Schedule& schedule, const TaskGraph& graph,
                       const ProcessorModel* model = nullptr);

/// CSV persistence (columns task_id,processor,start,finish,T).
void write_schedule_csv(const std::string& path, const Schedule& schedule,
                        const std::vector<SlackWindow>& windows);
std::pair<Schedule, std::vector<SlackWindow>> read_schedule_csv(const std::string& path);

}  // namespace dvfsim
