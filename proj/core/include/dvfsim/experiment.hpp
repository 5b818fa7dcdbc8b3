#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dvfsim/reclaim.hpp"
#include "dvfsim/schedule.hpp"
#include "dvfsim/task_graph.hpp"

namespace dvfsim {

/// Where experiment graphs come from: one of the generators, or a list of
/// graph files.
struct GraphSource {
  enum class Kind { Random, GaussJordan, Lu, Files };
  Kind kind = Kind::Random;

  // random generator parameters
  int layer_width = 4;
  double edge_prob = 0.3;
  double cycle_lo = 5.0;
  double cycle_hi = 10.0;
  double comm_lo = 1.0;
  double comm_hi = 5.0;

  // structured (lu / gauss_jordan) parameters
  double comm = 10.0;
  double cycles = kDefaultStructuredCycles;

  std::vector<std::string> files;
};

std::string to_string(GraphSource::Kind k);
GraphSource::Kind source_kind_from_string(const std::string& s);

struct ExperimentConfig {
  GraphSource source;
  std::vector<int> processors = {2, 4, 8, 16, 32};
  std::vector<int> sizes = {100, 200, 300, 400, 500};
  int repetitions = 1;
  std::uint64_t seed = 0;
  std::string cpu = "transmeta_crusoe";  ///< preset name or model file path
  std::vector<Priority> schedulers = {Priority::Fifo, Priority::Lpt, Priority::Spt};
  std::vector<Algorithm> algorithms = {Algorithm::None, Algorithm::Rdvfs, Algorithm::Mmf,
                                       Algorithm::Mfs, Algorithm::OptCont};
  std::string output;  ///< optional result path (CLI convenience)
};

/// One (graph, processor count, scheduler, algorithm) measurement.
/// normalized_energy divides by the same cell's f_max-only baseline, so
/// the Algorithm::None row is exactly 1.
struct CellRecord {
  std::string label;
  int size = 0;
  int processors = 0;
  Priority scheduler = Priority::Fifo;
  Algorithm algorithm = Algorithm::None;
  double makespan = 0.0;
  double total_energy = 0.0;  ///< mJ
  double normalized_energy = 0.0;
  double savings_pct = 0.0;
};

struct ExperimentResult {
  std::vector<CellRecord> records;
  std::vector<std::string> errors;  ///< per-cell failures, with context
};

/// Graph family of a record ("random", "gauss_jordan", "lu" or "file"),
/// recovered from the label's generator prefix.
std::string family_of(const std::string& label);

/// Number of L levels whose Gauss-Jordan / LU task count L(L+1)/2 is closest
/// to `size` (ties toward fewer levels).
int levels_for_size(int size);

/// Runs the sweep: every (graph, P, scheduler) cell is evaluated under every
/// requested algorithm against the same base schedule. Deterministic given
/// config.seed; cells are processed in a canonical sorted order and
/// `on_record`, when given, sees records in that order as they are computed.
/// Per-cell failures are recorded in the result and the run continues.
ExperimentResult run(const ExperimentConfig& config,
                     const std::function<void(const CellRecord&)>& on_record = {});

/// Full per-cell records as CSV / JSON, and a three-table text summary
/// (mean savings per algorithm and family, mean savings per algorithm and
/// processor count, mean normalized energy per scheduler, size and
/// algorithm).
void report_csv(const ExperimentResult& result, const std::string& path);
void report_json(const ExperimentResult& result, const std::string& path);
void report_summary(const ExperimentResult& result, std::ostream& out);
void report_summary(const ExperimentResult& result, const std::string& path);

/// Record-level CSV/JSON readers (the report subcommand consumes these).
ExperimentResult read_result_csv(const std::string& path);
ExperimentResult read_result_json(const std::string& path);

void write_record_csv_header(std::ostream& out);
void write_record_csv_row(std::ostream& out, const CellRecord& r);

/// Experiment config file (JSON mirroring ExperimentConfig).
ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& config, const std::string& path);

/// Built-in sweeps. "quick" is a desk-scale run (~seconds); "full" mirrors
/// the published protocol's scale. Both return one config per graph family.
std::vector<ExperimentConfig> quick_profile(std::uint64_t seed);
std::vector<ExperimentConfig> full_profile(std::uint64_t seed);

}  // namespace dvfsim
