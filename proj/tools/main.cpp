// Command-line front end: graph generation, scheduling, slack reclamation,
// experiment sweeps and reporting.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dvfsim/errors.hpp"
#include "dvfsim/experiment.hpp"
#include "dvfsim/freq_lp.hpp"
#include "dvfsim/processor_model.hpp"
#include "dvfsim/reclaim.hpp"
#include "dvfsim/schedule.hpp"
#include "dvfsim/task_graph.hpp"

namespace {

dvfsim::ProcessorModel resolve_cpu(const std::string& cpu) {
  if (dvfsim::is_preset(cpu)) return dvfsim::preset(cpu);
  return dvfsim::load_model(cpu);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DVFS slack-reclamation simulator"};
  app.require_subcommand(1);

  // ---- generate ----
  auto* gen = app.add_subcommand("generate", "Generate a task graph file");
  std::string gen_kind = "random";
  int gen_tasks = 100;
  int gen_levels = 5;
  std::uint64_t gen_seed = 0;
  double cycle_lo = 5.0, cycle_hi = 10.0;
  int layer_width = 4;
  double edge_prob = 0.3;
  double comm_lo = 1.0, comm_hi = 5.0;
  double gen_comm = 10.0;
  double gen_cycles = dvfsim::kDefaultStructuredCycles;
  std::string gen_out = "graph.json";
  gen->add_option("--kind", gen_kind, "random|lu|gauss-jordan")->capture_default_str();
  gen->add_option("--tasks", gen_tasks, "task count (random)")->capture_default_str();
  gen->add_option("--levels", gen_levels, "level count (lu, gauss-jordan)")->capture_default_str();
  gen->add_option("--seed", gen_seed, "random seed")->capture_default_str();
  gen->add_option("--cycle-lo", cycle_lo, "min megacycles per task (random)")->capture_default_str();
  gen->add_option("--cycle-hi", cycle_hi, "max megacycles per task (random)")->capture_default_str();
  gen->add_option("--layer-width", layer_width, "max tasks per layer (random)")->capture_default_str();
  gen->add_option("--edge-prob", edge_prob, "cross-layer edge probability (random)")->capture_default_str();
  gen->add_option("--comm-lo", comm_lo, "min communication cost, seconds (random)")->capture_default_str();
  gen->add_option("--comm-hi", comm_hi, "max communication cost, seconds (random)")->capture_default_str();
  gen->add_option("--comm", gen_comm, "communication cost, seconds (lu, gauss-jordan)")->capture_default_str();
  gen->add_option("--cycles", gen_cycles, "megacycles per task (lu, gauss-jordan)")->capture_default_str();
  gen->add_option("--out", gen_out, "output graph file")->capture_default_str();

  // ---- schedule ----
  auto* sch = app.add_subcommand("schedule", "List-schedule a graph onto processors");
  std::string sch_graph;
  int sch_procs = 4;
  std::string sch_sched = "fifo";
  std::string sch_cpu = "transmeta_crusoe";
  std::string sch_out = "schedule.csv";
  sch->add_option("--graph", sch_graph, "input graph file")->required();
  sch->add_option("--procs", sch_procs, "processor count")->capture_default_str();
  sch->add_option("--sched", sch_sched, "fifo|lpt|spt")->capture_default_str();
  sch->add_option("--cpu", sch_cpu, "processor preset name or model file")->capture_default_str();
  sch->add_option("--out", sch_out, "output schedule CSV")->capture_default_str();

  // ---- reclaim ----
  auto* rec = app.add_subcommand("reclaim", "Apply a slack-reclamation algorithm to a schedule");
  std::string rec_graph, rec_schedule;
  std::string rec_alg = "mfs";
  std::string rec_cpu = "transmeta_crusoe";
  std::string rec_out = "assignments.csv";
  rec->add_option("--graph", rec_graph, "input graph file")->required();
  rec->add_option("--schedule", rec_schedule, "input schedule CSV")->required();
  rec->add_option("--alg", rec_alg, "none|rdvfs|mmf|mfs|opt")->capture_default_str();
  rec->add_option("--cpu", rec_cpu, "processor preset name or model file")->capture_default_str();
  rec->add_option("--out", rec_out, "output assignment CSV")->capture_default_str();

  // ---- experiment ----
  auto* exp = app.add_subcommand("experiment", "Run an experiment sweep");
  std::string exp_config;
  std::string exp_profile;
  std::string exp_family = "all";
  std::string exp_cpu;
  std::uint64_t exp_seed = 0;
  bool exp_seed_set = false;
  std::vector<int> exp_procs;
  std::vector<std::string> exp_scheds;
  std::vector<std::string> exp_algs;
  std::string exp_out;
  exp->add_option("--config", exp_config, "experiment config JSON");
  exp->add_option("--profile", exp_profile, "quick|full preset sweep");
  exp->add_option("--family", exp_family, "restrict a profile to random|lu|gauss-jordan")
      ->capture_default_str();
  exp->add_option("--cpu", exp_cpu, "override processor preset/model file");
  exp->add_option("--seed", exp_seed, "override seed")->each([&](const std::string&) {
    exp_seed_set = true;
  });
  exp->add_option("--procs", exp_procs, "override processor counts")->delimiter(',');
  exp->add_option("--sched", exp_scheds, "override schedulers")->delimiter(',');
  exp->add_option("--alg", exp_algs, "override algorithms")->delimiter(',');
  exp->add_option("--out", exp_out, "output result CSV (default: config output or results.csv)");

  // ---- report ----
  auto* rep = app.add_subcommand("report", "Summarize experiment results");
  std::string rep_in;
  std::string rep_format = "summary";
  std::string rep_out;
  rep->add_option("--input", rep_in, "result CSV or JSON file")->required();
  rep->add_option("--format", rep_format, "csv|json|summary")->capture_default_str();
  rep->add_option("--out", rep_out, "output file (summary prints to stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints the message; 0 for --help/--version
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen) {
      dvfsim::TaskGraph g;
      if (gen_kind == "random") {
        g = dvfsim::gen_random(gen_tasks, gen_seed, cycle_lo, cycle_hi, layer_width, edge_prob,
                               comm_lo, comm_hi);
      } else if (gen_kind == "lu") {
        g = dvfsim::gen_lu(gen_levels, gen_comm, gen_cycles);
      } else if (gen_kind == "gauss-jordan" || gen_kind == "gauss_jordan") {
        g = dvfsim::gen_gauss_jordan(gen_levels, gen_comm, gen_cycles);
      } else {
        throw dvfsim::ParameterError("unknown graph kind \"" + gen_kind + "\"");
      }
      dvfsim::save(g, gen_out);
      std::cout << g.label() << ": " << g.tasks().size() << " tasks, " << g.edges().size()
                << " edges -> " << gen_out << "\n";
    } else if (*sch) {
      const dvfsim::TaskGraph g = dvfsim::load(sch_graph);
      const dvfsim::ProcessorModel model = resolve_cpu(sch_cpu);
      const dvfsim::Schedule s =
          dvfsim::list_schedule(g, sch_procs, model, dvfsim::priority_from_string(sch_sched));
      const auto windows = dvfsim::slack_windows(s, g);
      dvfsim::write_schedule_csv(sch_out, s, windows);
      std::cout << "makespan " << s.makespan << " s on " << sch_procs << " processors -> "
                << sch_out << "\n";
    } else if (*rec) {
      const dvfsim::TaskGraph g = dvfsim::load(rec_graph);
      const dvfsim::ProcessorModel model = resolve_cpu(rec_cpu);
      const auto [schedule, windows] = dvfsim::read_schedule_csv(rec_schedule);
      const dvfsim::ReclaimedSchedule rs = dvfsim::reclaim_schedule(
          schedule, g, model, dvfsim::algorithm_from_string(rec_alg));
      dvfsim::write_assignments_csv(rec_out, rs);
      std::cout << "total energy " << rs.total_energy << " mJ (" << rec_alg << ") -> " << rec_out
                << "\n";
    } else if (*exp) {
      std::vector<dvfsim::ExperimentConfig> configs;
      if (!exp_config.empty()) {
        configs.push_back(dvfsim::load_config(exp_config));
      } else if (exp_profile == "quick") {
        configs = dvfsim::quick_profile(exp_seed);
      } else if (exp_profile == "full") {
        configs = dvfsim::full_profile(exp_seed);
      } else if (exp_profile.empty()) {
        throw dvfsim::ParameterError("experiment: need --config or --profile quick|full");
      } else {
        throw dvfsim::ParameterError("unknown profile \"" + exp_profile + "\"");
      }
      if (exp_family != "all") {
        const auto kind = dvfsim::source_kind_from_string(exp_family);
        std::erase_if(configs,
                      [&](const dvfsim::ExperimentConfig& c) { return c.source.kind != kind; });
        if (configs.empty()) {
          throw dvfsim::ParameterError("no profile config matches family \"" + exp_family + "\"");
        }
      }
      for (auto& c : configs) {
        if (!exp_cpu.empty()) c.cpu = exp_cpu;
        if (exp_seed_set) c.seed = exp_seed;
        if (!exp_procs.empty()) c.processors = exp_procs;
        if (!exp_scheds.empty()) {
          c.schedulers.clear();
          for (const auto& s : exp_scheds) c.schedulers.push_back(dvfsim::priority_from_string(s));
        }
        if (!exp_algs.empty()) {
          c.algorithms.clear();
          for (const auto& s : exp_algs) c.algorithms.push_back(dvfsim::algorithm_from_string(s));
        }
      }
      if (exp_out.empty()) {
        exp_out = configs.front().output.empty() ? "results.csv" : configs.front().output;
      }

      std::ofstream out(exp_out);
      if (!out) throw dvfsim::IoError("cannot write result file: " + exp_out);
      dvfsim::write_record_csv_header(out);
      long cells = 0;
      std::vector<std::string> errors;
      for (const auto& c : configs) {
        const dvfsim::ExperimentResult r =
            dvfsim::run(c, [&](const dvfsim::CellRecord& rec_row) {
              dvfsim::write_record_csv_row(out, rec_row);
              ++cells;
            });
        errors.insert(errors.end(), r.errors.begin(), r.errors.end());
      }
      out.flush();
      if (!out) throw dvfsim::IoError("write failed: " + exp_out);
      for (const auto& e : errors) std::cerr << "warning: " << e << "\n";
      std::cout << cells << " records -> " << exp_out << "\n";
    } else if (*rep) {
      const dvfsim::ExperimentResult result = ends_with(rep_in, ".json")
                                                  ? dvfsim::read_result_json(rep_in)
                                                  : dvfsim::read_result_csv(rep_in);
      if (rep_format == "csv") {
        if (rep_out.empty()) throw dvfsim::ParameterError("report --format csv needs --out");
        dvfsim::report_csv(result, rep_out);
      } else if (rep_format == "json") {
        if (rep_out.empty()) throw dvfsim::ParameterError("report --format json needs --out");
        dvfsim::report_json(result, rep_out);
      } else if (rep_format == "summary") {
        if (rep_out.empty()) {
          dvfsim::report_summary(result, std::cout);
        } else {
          dvfsim::report_summary(result, rep_out);
        }
      } else {
        throw dvfsim::ParameterError("unknown report format \"" + rep_format + "\"");
      }
    }
  } catch (const dvfsim::ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const dvfsim::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
