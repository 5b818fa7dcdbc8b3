#include "dvfsim/task_graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

#include "dvfsim/errors.hpp"
#include "json.hpp"

namespace dvfsim {

namespace {

std::int64_t edge_key(int src, int dst) {
  return (static_cast<std::int64_t>(src) << 32) ^ static_cast<std::uint32_t>(dst);
}

// Deterministic uniforms on top of mt19937_64 output, independent of the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  double uniform(double lo, double hi) { return lo + unit() * (hi - lo); }
  bool bernoulli(double p) { return unit() < p; }

 private:
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  std::uint64_t next() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

TaskGraph::TaskGraph(std::vector<Task> tasks, std::vector<Edge> edges, std::string label)
    : tasks_(std::move(tasks)), edges_(std::move(edges)), label_(std::move(label)) {
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    const Task& t = tasks_[i];
    if (t.cycles <= 0) {
      throw ValidationError("task " + std::to_string(t.id) + ": cycles must be positive");
    }
    if (!index_.emplace(t.id, i).second) {
      throw ValidationError("duplicate task id " + std::to_string(t.id));
    }
  }
  for (const Edge& e : edges_) {
    if (e.src == e.dst) {
      throw ValidationError("self-edge on task " + std::to_string(e.src));
    }
    if (e.comm < 0) {
      throw ValidationError("edge " + std::to_string(e.src) + "->" + std::to_string(e.dst) +
                            ": negative communication cost");
    }
    if (!index_.count(e.src) || !index_.count(e.dst)) {
      throw ValidationError("edge " + std::to_string(e.src) + "->" + std::to_string(e.dst) +
                            " references a missing task id");
    }
    if (!comm_.emplace(edge_key(e.src, e.dst), e.comm).second) {
      throw ValidationError("duplicate edge " + std::to_string(e.src) + "->" +
                            std::to_string(e.dst));
    }
    succ_[e.src].push_back(e.dst);
    pred_[e.dst].push_back(e.src);
  }

  // Kahn's algorithm; doubles as the cycle check.
  std::unordered_map<int, int> indeg;
  for (const Task& t : tasks_) indeg[t.id] = 0;
  for (const Edge& e : edges_) ++indeg[e.dst];
  std::deque<int> ready;
  for (const Task& t : tasks_) {
    if (indeg[t.id] == 0) ready.push_back(t.id);
  }
  topo_.reserve(tasks_.size());
  while (!ready.empty()) {
    const int id = ready.front();
    ready.pop_front();
    topo_.push_back(id);
    auto it = succ_.find(id);
    if (it == succ_.end()) continue;
    for (int s : it->second) {
      if (--indeg[s] == 0) ready.push_back(s);
    }
  }
  if (topo_.size() != tasks_.size()) {
    throw ValidationError("task graph contains a cycle");
  }
}

const Task& TaskGraph::task(int id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw ValidationError("unknown task id " + std::to_string(id));
  }
  return tasks_[it->second];
}

namespace {
const std::vector<int> kNoNeighbors;
}

const std::vector<int>& TaskGraph::successors(int id) const {
  auto it = succ_.find(id);
  return it == succ_.end() ? kNoNeighbors : it->second;
}

const std::vector<int>& TaskGraph::predecessors(int id) const {
  auto it = pred_.find(id);
  return it == pred_.end() ? kNoNeighbors : it->second;
}

double TaskGraph::comm(int src, int dst) const {
  auto it = comm_.find(edge_key(src, dst));
  if (it == comm_.end()) {
    throw ValidationError("no edge " + std::to_string(src) + "->" + std::to_string(dst));
  }
  return it->second;
}

TaskGraph gen_random(int n_tasks, std::uint64_t seed, double cycle_lo, double cycle_hi,
                     int layer_width, double edge_prob, double comm_lo, double comm_hi) {
  if (n_tasks < 1) throw ParameterError("gen_random: n_tasks must be >= 1");
  if (cycle_lo <= 0 || cycle_lo > cycle_hi) {
    throw ParameterError("gen_random: need 0 < cycle_lo <= cycle_hi");
  }
  if (layer_width < 1) throw ParameterError("gen_random: layer_width must be >= 1");
  if (edge_prob < 0 || edge_prob > 1) {
    throw ParameterError("gen_random: edge_prob must be in [0,1]");
  }
  if (comm_lo < 0 || comm_lo > comm_hi) {
    throw ParameterError("gen_random: need 0 <= comm_lo <= comm_hi");
  }

  Rng rng(seed);
  std::vector<Task> tasks(n_tasks);
  std::vector<int> layer(n_tasks);
  for (int i = 0; i < n_tasks; ++i) {
    tasks[i] = {i, rng.uniform(cycle_lo, cycle_hi)};
    layer[i] = i / layer_width;
  }
  std::vector<Edge> edges;
  for (int i = 0; i < n_tasks; ++i) {
    for (int j = i + 1; j < n_tasks; ++j) {
      if (layer[i] == layer[j]) continue;
      if (rng.bernoulli(edge_prob)) {
        edges.push_back({i, j, rng.uniform(comm_lo, comm_hi)});
      }
    }
  }
  std::string label = "random(n=" + std::to_string(n_tasks) + ";w=" +
                      std::to_string(layer_width) + ";p=" + fmt(edge_prob) + ";cyc=" +
                      fmt(cycle_lo) + ".." + fmt(cycle_hi) + ";comm=" + fmt(comm_lo) + ".." +
                      fmt(comm_hi) + ";seed=" + std::to_string(seed) + ")";
  return TaskGraph(std::move(tasks), std::move(edges), std::move(label));
}

TaskGraph gen_gauss_jordan(int levels, double comm, double cycles_per_task) {
  if (levels < 1) throw ParameterError("gen_gauss_jordan: levels must be >= 1");
  if (comm < 0) throw ParameterError("gen_gauss_jordan: comm must be non-negative");
  if (cycles_per_task <= 0) throw ParameterError("gen_gauss_jordan: cycles must be positive");

  const int L = levels;
  std::vector<Task> tasks;
  std::vector<Edge> edges;
  // id of task at (level l, column c), both 1-based; columns run l..L
  auto id_of = [L](int l, int c) {
    // tasks of levels 1..l-1 come first
    int before = 0;
    for (int k = 1; k < l; ++k) before += L - k + 1;
    return before + (c - l);
  };
  for (int l = 1; l <= L; ++l) {
    for (int c = l; c <= L; ++c) {
      tasks.push_back({id_of(l, c), cycles_per_task});
    }
  }
  for (int l = 1; l < L; ++l) {
    for (int c = l; c <= L; ++c) {
      for (int c2 = std::max(c, l + 1); c2 <= L; ++c2) {
        edges.push_back({id_of(l, c), id_of(l + 1, c2), comm});
      }
    }
  }
  std::string label = "gauss_jordan(levels=" + std::to_string(L) + ";comm=" + fmt(comm) +
                      ";cycles=" + fmt(cycles_per_task) + ")";
  return TaskGraph(std::move(tasks), std::move(edges), std::move(label));
}

TaskGraph gen_lu(int levels, double comm, double cycles_per_task) {
  if (levels < 1) throw ParameterError("gen_lu: levels must be >= 1");
  if (comm < 0) throw ParameterError("gen_lu: comm must be non-negative");
  if (cycles_per_task <= 0) throw ParameterError("gen_lu: cycles must be positive");

  const int L = levels;
  std::vector<Task> tasks;
  std::vector<Edge> edges;
  // level l: pivot, then updates for columns l+1..L
  std::vector<int> pivot_id(L + 1, 0);
  // update_id[l][c] for c in l+1..L
  auto update_id = [L](int l, int c) {
    int before = 0;
    for (int k = 1; k < l; ++k) before += 1 + (L - k);
    return before + 1 + (c - l - 1);
  };
  {
    int before = 0;
    for (int l = 1; l <= L; ++l) {
      pivot_id[l] = before;
      before += 1 + (L - l);
    }
  }
  for (int l = 1; l <= L; ++l) {
    tasks.push_back({pivot_id[l], cycles_per_task});
    for (int c = l + 1; c <= L; ++c) {
      tasks.push_back({update_id(l, c), cycles_per_task});
    }
  }
  std::sort(tasks.begin(), tasks.end(), [](const Task& a, const Task& b) { return a.id < b.id; });
  for (int l = 1; l < L; ++l) {
    for (int c = l + 1; c <= L; ++c) {
      edges.push_back({pivot_id[l], update_id(l, c), comm});
      edges.push_back({update_id(l, c), pivot_id[l + 1], comm});
      if (c >= l + 2) {
        edges.push_back({update_id(l, c), update_id(l + 1, c), comm});
      }
    }
  }
  std::string label = "lu(levels=" + std::to_string(L) + ";comm=" + fmt(comm) + ";cycles=" +
                      fmt(cycles_per_task) + ")";
  return TaskGraph(std::move(tasks), std::move(edges), std::move(label));
}

namespace {

void check_fields(const nlohmann::json& obj, const char* where,
                  std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ParseError(std::string("unknown field \"") + item.key() + "\" in " + where);
    }
  }
  for (const char* k : allowed) {
    if (!obj.contains(k)) {
      throw ParseError(std::string("missing field \"") + k + "\" in " + where);
    }
  }
}

int line_of_offset(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

}  // namespace

void save(const TaskGraph& graph, const std::string& path) {
  nlohmann::json j;
  j["label"] = graph.label();
  j["tasks"] = nlohmann::json::array();
  for (const Task& t : graph.tasks()) {
    j["tasks"].push_back({{"id", t.id}, {"cycles", t.cycles}});
  }
  j["edges"] = nlohmann::json::array();
  for (const Edge& e : graph.edges()) {
    j["edges"].push_back({{"src", e.src}, {"dst", e.dst}, {"comm", e.comm}});
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write graph file: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

TaskGraph load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open graph file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ":" + std::to_string(line_of_offset(text, e.byte)) +
                     ": JSON parse error: " + e.what());
  }
  if (!j.is_object()) throw ParseError(path + ": top level must be an object");
  check_fields(j, "top-level object", {"tasks", "edges", "label"});
  if (!j["tasks"].is_array()) throw ParseError(path + ": \"tasks\" must be an array");
  if (!j["edges"].is_array()) throw ParseError(path + ": \"edges\" must be an array");
  if (!j["label"].is_string()) throw ParseError(path + ": \"label\" must be a string");

  std::vector<Task> tasks;
  std::size_t i = 0;
  for (const auto& t : j["tasks"]) {
    const std::string where = "tasks[" + std::to_string(i) + "]";
    if (!t.is_object()) throw ParseError(path + ": " + where + " must be an object");
    check_fields(t, where.c_str(), {"id", "cycles"});
    if (!t["id"].is_number_integer()) {
      throw ParseError(path + ": " + where + ".id must be an integer");
    }
    if (!t["cycles"].is_number()) {
      throw ParseError(path + ": " + where + ".cycles must be a number");
    }
    tasks.push_back({t["id"].get<int>(), t["cycles"].get<double>()});
    ++i;
  }
  std::vector<Edge> edges;
  i = 0;
  for (const auto& e : j["edges"]) {
    const std::string where = "edges[" + std::to_string(i) + "]";
    if (!e.is_object()) throw ParseError(path + ": " + where + " must be an object");
    check_fields(e, where.c_str(), {"src", "dst", "comm"});
    if (!e["src"].is_number_integer() || !e["dst"].is_number_integer()) {
      throw ParseError(path + ": " + where + ".src/.dst must be integers");
    }
    if (!e["comm"].is_number()) {
      throw ParseError(path + ": " + where + ".comm must be a number");
    }
    edges.push_back({e["src"].get<int>(), e["dst"].get<int>(), e["comm"].get<double>()});
    ++i;
  }
  return TaskGraph(std::move(tasks), std::move(edges), j["label"].get<std::string>());
}

}  // namespace dvfsim
