#include "dvfsim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "dvfsim/errors.hpp"
#include "json.hpp"
#include "text_format.hpp"

namespace dvfsim {

std::string to_string(GraphSource::Kind k) {
  switch (k) {
    case GraphSource::Kind::Random: return "random";
    case GraphSource::Kind::GaussJordan: return "gauss_jordan";
    case GraphSource::Kind::Lu: return "lu";
    case GraphSource::Kind::Files: return "files";
  }
  return "?";
}

GraphSource::Kind source_kind_from_string(const std::string& s) {
  if (s == "random") return GraphSource::Kind::Random;
  if (s == "gauss_jordan" || s == "gauss-jordan") return GraphSource::Kind::GaussJordan;
  if (s == "lu") return GraphSource::Kind::Lu;
  if (s == "files") return GraphSource::Kind::Files;
  throw ParameterError("unknown graph source kind \"" + s + "\"");
}

std::string family_of(const std::string& label) {
  const auto paren = label.find('(');
  if (paren == std::string::npos) return "file";
  const std::string head = label.substr(0, paren);
  if (head == "random" || head == "gauss_jordan" || head == "lu") return head;
  return "file";
}

int levels_for_size(int size) {
  if (size < 1) throw ParameterError("levels_for_size: size must be >= 1");
  int best = 1;
  long best_diff = std::abs(static_cast<long>(size) - 1);
  for (int L = 1;; ++L) {
    const long count = static_cast<long>(L) * (L + 1) / 2;
    const long diff = std::abs(count - static_cast<long>(size));
    if (diff < best_diff) {
      best = L;
      best_diff = diff;
    }
    if (count >= size) break;
  }
  return best;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

ProcessorModel resolve_cpu(const std::string& cpu) {
  if (is_preset(cpu)) return preset(cpu);
  return load_model(cpu);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

}  // namespace

void write_record_csv_header(std::ostream& out) {
  out << "label,size,processors,scheduler,algorithm,makespan,total_energy_mj,"
         "normalized_energy,savings_pct\n";
}

void write_record_csv_row(std::ostream& out, const CellRecord& r) {
  out << csv_escape(r.label) << ',' << r.size << ',' << r.processors << ','
      << to_string(r.scheduler) << ',' << to_string(r.algorithm) << ','
      << detail::fmt_double(r.makespan) << ',' << detail::fmt_double(r.total_energy) << ','
      << detail::fmt_double(r.normalized_energy) << ',' << detail::fmt_double(r.savings_pct)
      << "\n";
}

ExperimentResult run(const ExperimentConfig& config,
                     const std::function<void(const CellRecord&)>& on_record) {
  if (config.processors.empty() || config.sizes.empty() || config.schedulers.empty() ||
      config.algorithms.empty()) {
    throw ParameterError("experiment config: processors/sizes/schedulers/algorithms "
                         "must be non-empty");
  }
  if (config.repetitions < 1) {
    throw ParameterError("experiment config: repetitions must be >= 1");
  }
  if (config.source.kind == GraphSource::Kind::Files && config.source.files.empty()) {
    throw ParameterError("experiment config: file source lists no files");
  }
  for (int p : config.processors) {
    if (p < 1) throw ParameterError("experiment config: processor counts must be >= 1");
  }
  const ProcessorModel model = resolve_cpu(config.cpu);

  // canonical cell order
  std::vector<int> procs = config.processors;
  std::sort(procs.begin(), procs.end());
  std::vector<int> sizes = config.sizes;
  std::sort(sizes.begin(), sizes.end());
  std::vector<Priority> scheds = config.schedulers;
  std::sort(scheds.begin(), scheds.end());
  scheds.erase(std::unique(scheds.begin(), scheds.end()), scheds.end());
  std::vector<Algorithm> algs = config.algorithms;
  std::sort(algs.begin(), algs.end());
  algs.erase(std::unique(algs.begin(), algs.end()), algs.end());

  // materialize the graph list
  std::vector<TaskGraph> graphs;
  if (config.source.kind == GraphSource::Kind::Files) {
    for (const std::string& f : config.source.files) graphs.push_back(load(f));
  } else {
    for (std::size_t si = 0; si < sizes.size(); ++si) {
      for (int rep = 0; rep < config.repetitions; ++rep) {
        const std::uint64_t gseed =
            splitmix64(config.seed ^ splitmix64((si << 20) + static_cast<std::uint64_t>(rep)));
        switch (config.source.kind) {
          case GraphSource::Kind::Random:
            graphs.push_back(gen_random(sizes[si], gseed, config.source.cycle_lo,
                                        config.source.cycle_hi, config.source.layer_width,
                                        config.source.edge_prob, config.source.comm_lo,
                                        config.source.comm_hi));
            break;
          case GraphSource::Kind::GaussJordan:
            graphs.push_back(gen_gauss_jordan(levels_for_size(sizes[si]), config.source.comm,
                                              config.source.cycles));
            break;
          case GraphSource::Kind::Lu:
            graphs.push_back(gen_lu(levels_for_size(sizes[si]), config.source.comm,
                                    config.source.cycles));
            break;
          case GraphSource::Kind::Files: break;
        }
        // deterministic structured graphs: one instance per size is enough
        if (config.source.kind != GraphSource::Kind::Random) break;
      }
    }
  }

  ExperimentResult result;
  for (const TaskGraph& graph : graphs) {
    const int size = static_cast<int>(graph.size());
    for (int P : procs) {
      for (Priority sched : scheds) {
        try {
          const Schedule schedule = list_schedule(graph, P, model, sched);
          const double baseline =
              reclaim_schedule(schedule, graph, model, Algorithm::None).total_energy;
          for (Algorithm alg : algs) {
            const ReclaimedSchedule rs = reclaim_schedule(schedule, graph, model, alg);
            CellRecord rec;
            rec.label = graph.label();
            rec.size = size;
            rec.processors = P;
            rec.scheduler = sched;
            rec.algorithm = alg;
            rec.makespan = schedule.makespan;
            rec.total_energy = rs.total_energy;
            rec.normalized_energy = baseline > 0 ? rs.total_energy / baseline : 1.0;
            rec.savings_pct = 100.0 * (1.0 - rec.normalized_energy);
            if (on_record) on_record(rec);
            result.records.push_back(std::move(rec));
          }
        } catch (const std::exception& e) {
          result.errors.push_back("cell(" + graph.label() + ", P=" + std::to_string(P) +
                                  ", sched=" + to_string(sched) + "): " + e.what());
        }
      }
    }
  }
  return result;
}

void report_csv(const ExperimentResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write result file: " + path);
  write_record_csv_header(out);
  for (const CellRecord& r : result.records) write_record_csv_row(out, r);
  if (!out) throw IoError("write failed: " + path);
}

void report_json(const ExperimentResult& result, const std::string& path) {
  nlohmann::json arr = nlohmann::json::array();
  for (const CellRecord& r : result.records) {
    arr.push_back({{"label", r.label},
                   {"size", r.size},
                   {"processors", r.processors},
                   {"scheduler", to_string(r.scheduler)},
                   {"algorithm", to_string(r.algorithm)},
                   {"makespan", r.makespan},
                   {"total_energy_mj", r.total_energy},
                   {"normalized_energy", r.normalized_energy},
                   {"savings_pct", r.savings_pct}});
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write result file: " + path);
  out << arr.dump(2) << "\n";
}

namespace {

struct MeanAcc {
  double sum = 0.0;
  long n = 0;
  void add(double v) {
    sum += v;
    ++n;
  }
  double mean() const { return n == 0 ? 0.0 : sum / static_cast<double>(n); }
};

std::vector<Algorithm> summary_algorithms(const ExperimentResult& result) {
  std::set<Algorithm> present;
  for (const CellRecord& r : result.records) present.insert(r.algorithm);
  std::vector<Algorithm> algs;
  for (Algorithm a : present) {
    if (a != Algorithm::None) algs.push_back(a);
  }
  if (algs.empty() && present.count(Algorithm::None)) algs.push_back(Algorithm::None);
  return algs;
}

}  // namespace

void report_summary(const ExperimentResult& result, std::ostream& out) {
  const std::vector<Algorithm> algs = summary_algorithms(result);

  std::set<std::string> families;
  std::set<int> proc_counts;
  std::set<int> sizes;
  std::set<Priority> scheds;
  std::map<std::pair<std::string, Algorithm>, MeanAcc> fam_alg;
  std::map<std::pair<int, Algorithm>, MeanAcc> proc_alg;
  std::map<std::tuple<Priority, int, Algorithm>, MeanAcc> sched_size_alg;
  for (const CellRecord& r : result.records) {
    const std::string fam = family_of(r.label);
    families.insert(fam);
    proc_counts.insert(r.processors);
    sizes.insert(r.size);
    scheds.insert(r.scheduler);
    fam_alg[{fam, r.algorithm}].add(r.savings_pct);
    proc_alg[{r.processors, r.algorithm}].add(r.savings_pct);
    sched_size_alg[{r.scheduler, r.size, r.algorithm}].add(r.normalized_energy);
  }

  out << "== mean energy savings (%) by algorithm and graph family ==\n";
  out << std::left << std::setw(10) << "algorithm";
  for (const auto& f : families) out << std::right << std::setw(14) << f;
  out << "\n";
  for (Algorithm a : algs) {
    out << std::left << std::setw(10) << to_string(a);
    for (const auto& f : families) {
      out << std::right << std::setw(14) << std::fixed << std::setprecision(3)
          << fam_alg[{f, a}].mean();
    }
    out << "\n";
  }

  out << "\n== mean energy savings (%) by algorithm and processor count ==\n";
  out << std::left << std::setw(10) << "algorithm";
  for (int p : proc_counts) out << std::right << std::setw(10) << ("P=" + std::to_string(p));
  out << "\n";
  for (Algorithm a : algs) {
    out << std::left << std::setw(10) << to_string(a);
    for (int p : proc_counts) {
      out << std::right << std::setw(10) << std::fixed << std::setprecision(3)
          << proc_alg[{p, a}].mean();
    }
    out << "\n";
  }

  out << "\n== mean normalized energy by scheduler, graph size and algorithm ==\n";
  for (Priority s : scheds) {
    out << "-- scheduler " << to_string(s) << " --\n";
    out << std::left << std::setw(10) << "size";
    for (Algorithm a : algs) out << std::right << std::setw(10) << to_string(a);
    out << "\n";
    for (int sz : sizes) {
      out << std::left << std::setw(10) << sz;
      for (Algorithm a : algs) {
        out << std::right << std::setw(10) << std::fixed << std::setprecision(4)
            << sched_size_alg[{s, sz, a}].mean();
      }
      out << "\n";
    }
  }
}

void report_summary(const ExperimentResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write summary file: " + path);
  report_summary(result, out);
}

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

ExperimentResult read_result_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open result file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty result file");
  ExperimentResult result;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv_row(line);
    if (f.size() != 9) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected 9 fields");
    }
    CellRecord r;
    r.label = f[0];
    r.size = std::stoi(f[1]);
    r.processors = std::stoi(f[2]);
    r.scheduler = priority_from_string(f[3]);
    r.algorithm = algorithm_from_string(f[4]);
    r.makespan = std::stod(f[5]);
    r.total_energy = std::stod(f[6]);
    r.normalized_energy = std::stod(f[7]);
    r.savings_pct = std::stod(f[8]);
    result.records.push_back(std::move(r));
  }
  return result;
}

ExperimentResult read_result_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open result file: " + path);
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  ExperimentResult result;
  for (const auto& j : arr) {
    CellRecord r;
    r.label = j.at("label").get<std::string>();
    r.size = j.at("size").get<int>();
    r.processors = j.at("processors").get<int>();
    r.scheduler = priority_from_string(j.at("scheduler").get<std::string>());
    r.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
    r.makespan = j.at("makespan").get<double>();
    r.total_energy = j.at("total_energy_mj").get<double>();
    r.normalized_energy = j.at("normalized_energy").get<double>();
    r.savings_pct = j.at("savings_pct").get<double>();
    result.records.push_back(std::move(r));
  }
  return result;
}

namespace {

void reject_unknown(const nlohmann::json& obj, const char* where,
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
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  reject_unknown(j, "config",
                 {"source", "processors", "sizes", "repetitions", "seed", "cpu", "schedulers",
                  "algorithms", "output"});
  ExperimentConfig cfg;
  try {
    if (j.contains("source")) {
      const auto& s = j["source"];
      reject_unknown(s, "config.source",
                     {"kind", "layer_width", "edge_prob", "cycle_lo", "cycle_hi", "comm_lo",
                      "comm_hi", "comm", "cycles", "files"});
      cfg.source.kind = source_kind_from_string(s.value("kind", "random"));
      cfg.source.layer_width = s.value("layer_width", cfg.source.layer_width);
      cfg.source.edge_prob = s.value("edge_prob", cfg.source.edge_prob);
      cfg.source.cycle_lo = s.value("cycle_lo", cfg.source.cycle_lo);
      cfg.source.cycle_hi = s.value("cycle_hi", cfg.source.cycle_hi);
      cfg.source.comm_lo = s.value("comm_lo", cfg.source.comm_lo);
      cfg.source.comm_hi = s.value("comm_hi", cfg.source.comm_hi);
      cfg.source.comm = s.value("comm", cfg.source.comm);
      cfg.source.cycles = s.value("cycles", cfg.source.cycles);
      if (s.contains("files")) cfg.source.files = s["files"].get<std::vector<std::string>>();
    }
    if (j.contains("processors")) cfg.processors = j["processors"].get<std::vector<int>>();
    if (j.contains("sizes")) cfg.sizes = j["sizes"].get<std::vector<int>>();
    cfg.repetitions = j.value("repetitions", cfg.repetitions);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.cpu = j.value("cpu", cfg.cpu);
    if (j.contains("schedulers")) {
      cfg.schedulers.clear();
      for (const auto& s : j["schedulers"]) {
        cfg.schedulers.push_back(priority_from_string(s.get<std::string>()));
      }
    }
    if (j.contains("algorithms")) {
      cfg.algorithms.clear();
      for (const auto& s : j["algorithms"]) {
        cfg.algorithms.push_back(algorithm_from_string(s.get<std::string>()));
      }
    }
    cfg.output = j.value("output", cfg.output);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": config field error: " + e.what());
  }
  return cfg;
}

void save_config(const ExperimentConfig& config, const std::string& path) {
  nlohmann::json j;
  nlohmann::json s;
  s["kind"] = to_string(config.source.kind);
  switch (config.source.kind) {
    case GraphSource::Kind::Random:
      s["layer_width"] = config.source.layer_width;
      s["edge_prob"] = config.source.edge_prob;
      s["cycle_lo"] = config.source.cycle_lo;
      s["cycle_hi"] = config.source.cycle_hi;
      s["comm_lo"] = config.source.comm_lo;
      s["comm_hi"] = config.source.comm_hi;
      break;
    case GraphSource::Kind::GaussJordan:
    case GraphSource::Kind::Lu:
      s["comm"] = config.source.comm;
      s["cycles"] = config.source.cycles;
      break;
    case GraphSource::Kind::Files:
      s["files"] = config.source.files;
      break;
  }
  j["source"] = s;
  j["processors"] = config.processors;
  j["sizes"] = config.sizes;
  j["repetitions"] = config.repetitions;
  j["seed"] = config.seed;
  j["cpu"] = config.cpu;
  j["schedulers"] = nlohmann::json::array();
  for (Priority p : config.schedulers) j["schedulers"].push_back(to_string(p));
  j["algorithms"] = nlohmann::json::array();
  for (Algorithm a : config.algorithms) j["algorithms"].push_back(to_string(a));
  if (!config.output.empty()) j["output"] = config.output;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config file: " + path);
  out << j.dump(2) << "\n";
}

// Per-family processor bands: random tasks use the conventional power-of-two
// ladder; the Gauss-Jordan wavefront needs P >= its widest level to show the
// no-slack pathology; LU folds into multiple waves per level only while P is
// below the level widths, so its band tracks the mean parallelism (~L/2).
// Communication costs are milliseconds, matching millisecond task lengths.
std::vector<ExperimentConfig> quick_profile(std::uint64_t seed) {
  std::vector<ExperimentConfig> out;

  ExperimentConfig random;
  random.source.kind = GraphSource::Kind::Random;
  random.source.layer_width = 8;
  random.source.edge_prob = 0.3;
  random.source.comm_lo = 0.001;
  random.source.comm_hi = 0.005;
  random.sizes = {100, 200};
  random.processors = {2, 4, 8, 16};
  random.repetitions = 30;
  random.seed = seed;
  out.push_back(random);

  ExperimentConfig gj;
  gj.source.kind = GraphSource::Kind::GaussJordan;
  gj.source.comm = 10.0;
  gj.sizes = {105, 120};  // 14 and 15 levels
  gj.processors = {16};
  gj.repetitions = 1;
  gj.seed = seed;
  out.push_back(gj);

  ExperimentConfig lu;
  lu.source.kind = GraphSource::Kind::Lu;
  lu.source.comm = 0.002;
  lu.sizes = {105, 190};  // 14 and 19 levels
  lu.processors = {6, 8, 10};
  lu.repetitions = 1;
  lu.seed = seed;
  out.push_back(lu);

  return out;
}

std::vector<ExperimentConfig> full_profile(std::uint64_t seed) {
  std::vector<ExperimentConfig> out = quick_profile(seed);

  out[0].sizes = {100, 200, 300, 400, 500};
  out[0].processors = {2, 4, 8, 16, 32};
  out[0].repetitions = 300;

  out[1].sizes = {105, 190, 300, 406, 496};
  out[1].processors = {32};

  out[2].sizes = {105, 190, 300, 406, 496};
  out[2].processors = {6, 8, 10, 16};

  return out;
}

}  // namespace dvfsim
