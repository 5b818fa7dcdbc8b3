#include "dvfsim/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "dvfsim/errors.hpp"
#include "text_format.hpp"

namespace dvfsim {

Priority priority_from_string(const std::string& s) {
  if (s == "fifo") return Priority::Fifo;
  if (s == "lpt") return Priority::Lpt;
  if (s == "spt") return Priority::Spt;
  throw ParameterError("unknown scheduler \"" + s + "\" (expected fifo|lpt|spt)");
}

std::string to_string(Priority p) {
  switch (p) {
    case Priority::Fifo: return "fifo";
    case Priority::Lpt: return "lpt";
    case Priority::Spt: return "spt";
  }
  return "?";
}

const ScheduleEntry& Schedule::entry(int task_id) const {
  for (const auto& e : entries) {
    if (e.task_id == task_id) return e;
  }
  throw ValidationError("schedule has no entry for task " + std::to_string(task_id));
}

namespace {

struct ReadyTask {
  double key = 0.0;  // readiness time (FIFO) or +-t_os (LPT/SPT)
  int id = 0;
};

struct ReadyOrder {
  bool operator()(const ReadyTask& a, const ReadyTask& b) const {
    // priority_queue is a max-heap; invert for "smallest key first"
    if (a.key != b.key) return a.key > b.key;
    return a.id > b.id;
  }
};

}  // namespace

Schedule list_schedule(const TaskGraph& graph, int n_processors,
                       const ProcessorModel& model, Priority priority) {
  if (n_processors < 1) throw ParameterError("list_schedule: n_processors must be >= 1");

  Schedule out;
  out.n_processors = n_processors;
  if (graph.empty()) return out;

  std::unordered_map<int, double> t_os;
  std::unordered_map<int, int> remaining_preds;
  for (const Task& t : graph.tasks()) {
    t_os[t.id] = model.exec_time(t.cycles, model.f_max());
    remaining_preds[t.id] = static_cast<int>(graph.predecessors(t.id).size());
  }

  std::unordered_map<int, double> finish_time;
  std::unordered_map<int, int> placed_on;
  std::vector<double> proc_avail(static_cast<std::size_t>(n_processors), 0.0);

  auto ready_key = [&](int id) {
    switch (priority) {
      case Priority::Fifo: {
        double r = 0.0;
        for (int p : graph.predecessors(id)) r = std::max(r, finish_time[p]);
        return r;
      }
      case Priority::Lpt: return -t_os[id];
      case Priority::Spt: return t_os[id];
    }
    return 0.0;
  };

  std::priority_queue<ReadyTask, std::vector<ReadyTask>, ReadyOrder> ready;
  for (const Task& t : graph.tasks()) {
    if (remaining_preds[t.id] == 0) ready.push({ready_key(t.id), t.id});
  }

  out.entries.reserve(graph.size());
  while (!ready.empty()) {
    const int id = ready.top().id;
    ready.pop();

    int best_proc = 0;
    double best_start = std::numeric_limits<double>::infinity();
    for (int p = 0; p < n_processors; ++p) {
      double est = proc_avail[static_cast<std::size_t>(p)];
      for (int pred : graph.predecessors(id)) {
        const double arrival =
            finish_time[pred] + (placed_on[pred] == p ? 0.0 : graph.comm(pred, id));
        est = std::max(est, arrival);
      }
      if (est < best_start) {
        best_start = est;
        best_proc = p;
      }
    }

    const double finish = best_start + t_os[id];
    out.entries.push_back({id, best_proc, best_start, finish});
    proc_avail[static_cast<std::size_t>(best_proc)] = finish;
    finish_time[id] = finish;
    placed_on[id] = best_proc;
    out.makespan = std::max(out.makespan, finish);

    for (int s : graph.successors(id)) {
      if (--remaining_preds[s] == 0) ready.push({ready_key(s), s});
    }
  }
  return out;
}

std::vector<SlackWindow> slack_windows(const Schedule& schedule, const TaskGraph& graph) {
  std::unordered_map<int, const ScheduleEntry*> by_id;
  std::vector<std::vector<const ScheduleEntry*>> per_proc(
      static_cast<std::size_t>(schedule.n_processors));
  for (const auto& e : schedule.entries) {
    by_id[e.task_id] = &e;
    per_proc[static_cast<std::size_t>(e.processor)].push_back(&e);
  }
  for (auto& v : per_proc) {
    std::sort(v.begin(), v.end(),
              [](const ScheduleEntry* a, const ScheduleEntry* b) { return a->start < b->start; });
  }
  std::unordered_map<int, double> next_local_start;
  for (const auto& v : per_proc) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      next_local_start[v[i]->task_id] =
          (i + 1 < v.size()) ? v[i + 1]->start : schedule.makespan;
    }
  }

  std::vector<SlackWindow> out;
  out.reserve(schedule.entries.size());
  for (const auto& e : schedule.entries) {
    double deadline = next_local_start[e.task_id];
    for (int s : graph.successors(e.task_id)) {
      const ScheduleEntry* se = by_id.at(s);
      const double bound =
          se->processor == e.processor ? se->start : se->start - graph.comm(e.task_id, s);
      deadline = std::min(deadline, bound);
    }
    out.push_back({e.task_id, e.finish - e.start, deadline - e.start, e.start});
  }
  std::sort(out.begin(), out.end(),
            [](const SlackWindow& a, const SlackWindow& b) { return a.task_id < b.task_id; });
  return out;
}

void validate_schedule(const Schedule& schedule, const TaskGraph& graph,
                       const ProcessorModel* model) {
  constexpr double kTol = 1e-9;
  std::unordered_map<int, const ScheduleEntry*> by_id;
  for (const auto& e : schedule.entries) {
    if (!graph.has_task(e.task_id)) {
      throw ValidationError("schedule entry for unknown task " + std::to_string(e.task_id));
    }
    if (!by_id.emplace(e.task_id, &e).second) {
      throw ValidationError("task " + std::to_string(e.task_id) + " scheduled twice");
    }
    if (e.processor < 0 || e.processor >= schedule.n_processors) {
      throw ValidationError("task " + std::to_string(e.task_id) + ": processor out of range");
    }
    if (e.start < 0 || e.finish < e.start - kTol) {
      throw ValidationError("task " + std::to_string(e.task_id) + ": bad start/finish");
    }
    if (model != nullptr) {
      const double expect = model->exec_time(graph.task(e.task_id).cycles, model->f_max());
      const double got = e.finish - e.start;
      if (std::abs(got - expect) > kTol * std::max(1.0, expect)) {
        throw ValidationError("task " + std::to_string(e.task_id) +
                              ": duration differs from cycles / f_max");
      }
    }
  }
  if (by_id.size() != graph.size()) {
    throw ValidationError("schedule does not cover every task");
  }

  std::vector<std::vector<const ScheduleEntry*>> per_proc(
      static_cast<std::size_t>(schedule.n_processors));
  double max_finish = 0.0;
  for (const auto& e : schedule.entries) {
    per_proc[static_cast<std::size_t>(e.processor)].push_back(&e);
    max_finish = std::max(max_finish, e.finish);
  }
  for (auto& v : per_proc) {
    std::sort(v.begin(), v.end(),
              [](const ScheduleEntry* a, const ScheduleEntry* b) { return a->start < b->start; });
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i]->start < v[i - 1]->finish - kTol) {
        throw ValidationError("overlap on processor " + std::to_string(v[i]->processor) +
                              " between tasks " + std::to_string(v[i - 1]->task_id) + " and " +
                              std::to_string(v[i]->task_id));
      }
    }
  }
  if (!schedule.entries.empty() &&
      std::abs(schedule.makespan - max_finish) > kTol * std::max(1.0, max_finish)) {
    throw ValidationError("makespan is not the max finish time");
  }
  for (const Edge& e : graph.edges()) {
    const ScheduleEntry* a = by_id.at(e.src);
    const ScheduleEntry* b = by_id.at(e.dst);
    const double required = a->finish + (a->processor == b->processor ? 0.0 : e.comm);
    if (b->start < required - kTol) {
      throw ValidationError("precedence violation on edge " + std::to_string(e.src) + "->" +
                            std::to_string(e.dst));
    }
  }
}

void write_schedule_csv(const std::string& path, const Schedule& schedule,
                        const std::vector<SlackWindow>& windows) {
  std::unordered_map<int, const SlackWindow*> by_id;
  for (const auto& w : windows) by_id[w.task_id] = &w;

  std::ofstream out(path);
  if (!out) throw IoError("cannot write schedule file: " + path);
  out << "task_id,processor,start,finish,T\n";
  auto sorted = schedule.entries;
  std::sort(sorted.begin(), sorted.end(),
            [](const ScheduleEntry& a, const ScheduleEntry& b) { return a.task_id < b.task_id; });
  for (const auto& e : sorted) {
    auto it = by_id.find(e.task_id);
    const double allotted = it == by_id.end() ? e.finish - e.start : it->second->allotted;
    out << e.task_id << ',' << e.processor << ',' << detail::fmt_double(e.start) << ','
        << detail::fmt_double(e.finish) << ',' << detail::fmt_double(allotted) << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

std::pair<Schedule, std::vector<SlackWindow>> read_schedule_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open schedule file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "task_id,processor,start,finish,T") {
    throw ParseError(path + ":1: expected header task_id,processor,start,finish,T");
  }
  Schedule sched;
  std::vector<SlackWindow> windows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    int task_id = 0, proc = 0;
    double start = 0, finish = 0, allotted = 0;
    if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf,%lf", &task_id, &proc, &start, &finish,
                    &allotted) != 5) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": malformed schedule row");
    }
    sched.entries.push_back({task_id, proc, start, finish});
    windows.push_back({task_id, finish - start, allotted, start});
    sched.n_processors = std::max(sched.n_processors, proc + 1);
    sched.makespan = std::max(sched.makespan, finish);
  }
  return {std::move(sched), std::move(windows)};
}

}  // namespace dvfsim
