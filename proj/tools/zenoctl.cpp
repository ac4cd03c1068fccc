// zenoctl: run scenarios, reproduce the table rows, export trajectories and
// check the engine against the oracles.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zeno/experiments.hpp"
#include "zeno/kernels/linear_ode.hpp"
#include "zeno/models.hpp"
#include "zeno/oracle.hpp"

namespace {

using namespace zeno;

constexpr int kViolationExit = 2;

void report_violations(const std::string& what, const RunResult& r) {
  for (const auto& v : r.violations) std::cerr << "invariant violation [" << what << "]: " << v << '\n';
}

void print_summary(const RunResult& r) {
  std::cerr << r.scenario << ": O = " << percent(r.yield) << "%, F = " << r.fluence;
  if (r.observed_value) std::cerr << ", Tr[rho(Tm)A] = " << *r.observed_value;
  if (r.counterfactual_yield) std::cerr << ", O[E,0] = " << percent(*r.counterfactual_yield) << '%';
  std::cerr << '\n';
}

std::string fragment(const SystemSpec& s) {
  std::ostringstream os;
  os.precision(15);
  auto list = [&](const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << '\n';
  };
  os << "[model]\nid = " << s.id << "\nlabels = ";
  for (std::size_t i = 0; i < s.labels.size(); ++i) os << (i ? ", " : "") << s.labels[i];
  os << "\nenergies = ";
  list(s.energies);
  os << "transition_frequencies = ";
  list(s.transition_frequencies);
  for (Eigen::Index r = 0; r < s.dipole.rows(); ++r) {
    os << "dipole_row" << r << " = ";
    std::vector<double> row;
    for (Eigen::Index c = 0; c < s.dipole.cols(); ++c) row.push_back(s.dipole(r, c));
    list(row);
  }
  os << "initial = " << s.labels[s.initial_state] << "\ntarget = " << s.labels[s.target_state]
     << "\nfinal_time = " << s.final_time << "\nsigma = " << s.sigma << "\nalpha = " << s.alpha
     << "\ndipole_unit = " << s.dipole_unit << '\n';
  return os.str();
}

int cmd_list_models(const std::string& export_id) {
  if (!export_id.empty()) {
    std::cout << fragment(model_by_id(export_id));
    return 0;
  }
  for (const auto& s : model_catalog()) {
    std::cout << s.id << "  (" << s.dim() << " levels)  " << s.description << '\n';
  }
  return 0;
}

int cmd_run(const std::string& path, const std::string& out, std::size_t threads) {
  Scenario s = load_scenario(path);
  if (!out.empty()) s.output_dir = out;
  if (s.output_dir.empty()) s.output_dir = std::filesystem::path("runs") / s.name;
  if (threads > 0) s.ga.threads = threads;
  const RunResult r = run_scenario(s);
  write_run_outputs(s, r, s.output_dir);
  std::cout << result_json(s, r);
  print_summary(r);
  report_violations(s.name, r);
  return r.ok() ? 0 : kViolationExit;
}

int cmd_traj(const std::string& path, bool to_stdout, std::size_t every, const std::string& out) {
  Scenario s = load_scenario(path);
  s.trajectory_every = every;
  const RunResult r = run_scenario(s);
  std::vector<std::pair<std::size_t, std::size_t>> coherences;
  const std::size_t n = r.final_populations.size();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) coherences.emplace_back(j, k);
  }
  if (to_stdout) {
    r.trajectory.write_csv(std::cout, coherences);
  } else {
    const std::filesystem::path dir = out.empty() ? std::filesystem::path("runs") / s.name : std::filesystem::path(out);
    std::filesystem::create_directories(dir);
    std::ofstream f(dir / "traj.csv");
    r.trajectory.write_csv(f, coherences);
    std::cerr << "wrote " << (dir / "traj.csv").string() << '\n';
  }
  report_violations(s.name, r);
  return r.ok() ? 0 : kViolationExit;
}

struct TableArgs {
  int table = 0;
  std::vector<std::string> rows;
  std::optional<std::uint64_t> seed;
  std::string out;
  double budget = 1.0;
  bool warm_start = false;
};

int cmd_table(const TableArgs& a) {
  TableOptions opt;
  opt.seed = a.seed;
  opt.budget = a.budget;
  if (!a.out.empty()) opt.output_dir = a.out;
  std::vector<std::vector<std::string>> rows;
  bool ok = true;
  auto keep = [&](const std::string& key, const RunResult& r) {
    print_summary(r);
    report_violations(key, r);
    ok = ok && r.ok();
  };

  switch (a.table) {
    case 1:
      for (const auto& sel : a.rows.empty() ? table1_rows() : a.rows) {
        const RunResult r = run_table1(sel, opt);
        keep(sel, r);
        rows.push_back(table_row(1, sel, r));
      }
      break;
    case 2: {
      std::vector<double> targets = table2_rows();
      if (!a.rows.empty()) {
        targets.clear();
        for (const auto& r : a.rows) targets.push_back(std::stod(r));
      }
      for (double t : targets) {
        const RunResult r = run_table2(t, opt);
        keep(r.scenario, r);
        rows.push_back(table_row(2, percent(t / 100.0), r));
      }
      break;
    }
    case 3: {
      std::vector<std::size_t> counts = table3_rows();
      if (!a.rows.empty()) {
        counts.clear();
        for (const auto& r : a.rows) counts.push_back(static_cast<std::size_t>(std::stoul(r)));
      }
      for (std::size_t n : counts) {
        const RunResult bare = run_table3(n, false, opt);
        const RunResult field = run_table3(n, true, opt);
        keep(bare.scenario, bare);
        keep(field.scenario, field);
        rows.push_back(table3_row(n, bare, field));
      }
      break;
    }
    case 4:
    case 5: {
      const Model3Mode mode = a.table == 4 ? Model3Mode::instantaneous : Model3Mode::continuous;
      for (const auto& sel : a.rows.empty() ? table4_5_rows() : a.rows) {
        const RunResult r = run_table4_5(sel, mode, opt);
        keep(sel, r);
        rows.push_back(table_row(a.table, sel, r));
      }
      break;
    }
    case 6: {
      std::vector<double> kappas = table6_rows();
      if (!a.rows.empty()) {
        kappas.clear();
        for (const auto& r : a.rows) kappas.push_back(std::stod(r));
      }
      std::vector<Genotype> seeds;
      for (double k : kappas) {
        const RunResult r = run_table6(k, opt, a.warm_start ? seeds : std::vector<Genotype>{});
        keep(r.scenario, r);
        char key[32];
        std::snprintf(key, sizeof key, "%.2f", k);
        rows.push_back(table_row(6, key, r));
        if (a.warm_start) seeds.push_back(r.genotype);
      }
      break;
    }
    default: throw CLI::ValidationError("table", "expected 1..6");
  }

  write_table_csv(std::cout, a.table, rows);
  if (!a.out.empty()) {
    std::filesystem::create_directories(a.out);
    std::ofstream f(std::filesystem::path(a.out) / "table.csv");
    write_table_csv(f, a.table, rows);
  }
  return ok ? 0 : kViolationExit;
}

int cmd_verify(std::size_t samples) {
  bool ok = true;
  for (const auto& c : oracle::verify_engine(samples)) {
    std::cout << (c.passed ? "PASS  " : "FAIL  ") << c.name << "  (" << c.detail << ")\n";
    ok = ok && c.passed;
  }
  std::cout << "kernel: " << kernels::isa_name(kernels::active_isa()) << '\n';
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Observation-assisted quantum control: simulate, optimize, reproduce."};
  app.require_subcommand(1);

  std::string path;
  std::string out;
  std::size_t threads = 0;
  auto* run = app.add_subcommand("run", "Optimize and evaluate a scenario file");
  run->add_option("scenario", path, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Output directory (default: the scenario's, else runs/<name>)");
  run->add_option("--threads", threads, "Evaluation threads");

  TableArgs table;
  auto* tab = app.add_subcommand("table", "Reproduce the rows of one table");
  tab->add_option("table", table.table, "Table number")->required()->check(CLI::Range(1, 6));
  tab->add_option("--row", table.rows, "Row key (selector, objective percent, N or kappa); repeatable");
  tab->add_option("--seed", table.seed, "GA seed");
  tab->add_option("--out", table.out, "Output directory for table.csv and per-row results");
  tab->add_option("--budget", table.budget, "Scale factor for the number of GA generations");
  tab->add_flag("--warm-start", table.warm_start, "Table 6: seed each kappa with the previous rows' optima");

  std::string export_id;
  auto* models = app.add_subcommand("list-models", "List the model catalog");
  models->add_option("--export", export_id, "Print one model as a config fragment");

  bool csv = false;
  std::size_t every = 10;
  auto* traj = app.add_subcommand("traj", "Optimize a scenario and export its trajectory");
  traj->add_option("scenario", path, "Scenario file")->required()->check(CLI::ExistingFile);
  traj->add_flag("--csv", csv, "Write CSV to stdout");
  traj->add_option("--every", every, "Sample interval in steps")->check(CLI::PositiveNumber);
  traj->add_option("--out", out, "Output directory when not writing to stdout");

  std::size_t samples = 200;
  auto* verify = app.add_subcommand("verify", "Check the engine against the oracles");
  verify->add_option("--samples", samples, "Random projector sequences");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(path, out, threads);
    if (*tab) return cmd_table(table);
    if (*models) return cmd_list_models(export_id);
    if (*traj) return cmd_traj(path, csv, every, out);
    if (*verify) return cmd_verify(samples);
  } catch (const std::exception& e) {
    std::cerr << "zenoctl: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
