#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace dvfsim {

/// A schedulable unit of work. `cycles` counts processor tick cycles in
/// megacycles (1e6 cycles), so cycles / freq(MHz) is seconds.
struct Task {
  int id = 0;
  double cycles = 0.0;
};

/// Precedence edge with a communication cost in seconds, paid only when the
/// endpoints run on different processors.
struct Edge {
  int src = 0;
  int dst = 0;
  double comm = 0.0;
};

/// Immutable validated DAG of tasks. Construction checks id uniqueness,
/// positive cycles, referential integrity, duplicate edges and acyclicity;
/// instances are safe to share across threads.
class TaskGraph {
 public:
  TaskGraph() = default;
  TaskGraph(std::vector<Task> tasks, std::vector<Edge> edges, std::string label);

  const std::vector<Task>& tasks() const { return tasks_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::string& label() const { return label_; }
  std::size_t size() const { return tasks_.size(); }
  bool empty() const { return tasks_.empty(); }

  bool has_task(int id) const { return index_.count(id) != 0; }
  const Task& task(int id) const;
  const std::vector<int>& successors(int id) const;
  const std::vector<int>& predecessors(int id) const;
  /// Communication cost of edge src->dst; throws if the edge does not exist.
  double comm(int src, int dst) const;
  /// A topological order of task ids (computed at construction).
  const std::vector<int>& topological_order() const { return topo_; }

 private:
  std::vector<Task> tasks_;
  std::vector<Edge> edges_;
  std::string label_;
  std::unordered_map<int, std::size_t> index_;
  std::unordered_map<int, std::vector<int>> succ_;
  std::unordered_map<int, std::vector<int>> pred_;
  std::unordered_map<std::int64_t, double> comm_;
  std::vector<int> topo_;
};

/// Default per-task megacycles for the structured (LU / Gauss-Jordan)
/// generators: midpoint of the random generator's default cycle range.
inline constexpr double kDefaultStructuredCycles = 7.5;

/// Layered random DAG. Tasks are split into consecutive layers of at most
/// `layer_width`; each earlier-to-later layer pair becomes an edge with
/// probability `edge_prob`. Cycles are uniform in [cycle_lo, cycle_hi]
/// megacycles, communication costs uniform in [comm_lo, comm_hi] seconds.
/// Deterministic for a fixed seed.
TaskGraph gen_random(int n_tasks, std::uint64_t seed, double cycle_lo = 5.0,
                     double cycle_hi = 10.0, int layer_width = 4, double edge_prob = 0.3,
                     double comm_lo = 1.0, double comm_hi = 5.0);

/// Gauss-Jordan elimination wavefront: level l (1..L) holds one task per
/// column l..L, and task (l,c) feeds every task (l+1,c') with c' >= c.
/// Total tasks = L(L+1)/2. All edges carry `comm`; every task runs
/// `cycles_per_task` megacycles.
TaskGraph gen_gauss_jordan(int levels, double comm = 10.0,
                           double cycles_per_task = kDefaultStructuredCycles);

/// LU decomposition shape: level l holds one pivot plus L-l update tasks.
/// pivot(l) feeds each update(l,c); update(l,c) feeds pivot(l+1) and the
/// same-column update(l+1,c). Total tasks = L + L(L-1)/2.
TaskGraph gen_lu(int levels, double comm = 10.0,
                 double cycles_per_task = kDefaultStructuredCycles);

/// JSON persistence. The file is an object with "tasks", "edges" and
/// "label"; unknown fields are rejected. load(save(g)) is structurally
/// identical to g.
void save(const TaskGraph& graph, const std::string& path);
TaskGraph load(const std::string& path);

}  // namespace dvfsim
