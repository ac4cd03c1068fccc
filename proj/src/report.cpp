#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

#include "zeno/experiments.hpp"
#include "zeno/kernels/linear_ode.hpp"

#ifndef ZENO_VERSION
#define ZENO_VERSION "0.0.0"
#endif

namespace zeno {

namespace {

using nlohmann::json;

double round2(double x) {
  return std::round(x * 100.0) / 100.0;
}

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

// Enough significant digits for small fluences and counterfactual yields.
std::string sig(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string optional_percent(const std::optional<double>& v) {
  return v ? percent(*v) : "";
}

std::string parameter(const RunResult& r, std::string_view name) {
  for (const auto& p : r.parameters) {
    if (p.name == name) return sig(p.value);
  }
  return "";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

std::string percent(double fraction) {
  return fixed(100.0 * fraction, 2);
}

std::string result_json(const Scenario& s, const RunResult& r) {
  json j;
  j["scenario"] = r.scenario;
  j["model"] = r.model;
  j["yield"] = r.yield;
  j["yield_percent"] = round2(100.0 * r.yield);
  j["fluence"] = r.fluence;
  auto opt = [&](const char* key, const std::optional<double>& v, bool as_percent) {
    if (!v) {
      j[key] = nullptr;
      return;
    }
    j[key] = *v;
    if (as_percent) j[std::string(key) + "_percent"] = round2(100.0 * *v);
  };
  opt("observed_value", r.observed_value, false);
  opt("counterfactual_yield", r.counterfactual_yield, true);
  opt("observation_only_yield", r.observation_only_yield, true);
  j["final_populations"] = r.final_populations;
  json params = json::object();
  for (const auto& p : r.parameters) params[p.name] = p.value;
  j["parameters"] = params;
  json extras = json::object();
  for (const auto& e : r.extras) extras[e.name] = e.value;
  j["extras"] = extras;
  j["genotype"] = r.genotype;
  if (r.optimized) {
    j["optimization"] = {{"best_cost", r.optimization.best_cost},
                         {"search_yield", r.optimization.best_evaluation.yield},
                         {"best_restart", r.optimization.best_restart},
                         {"restart_costs", r.optimization.restart_costs},
                         {"evaluations", r.optimization.evaluations},
                         {"generations", s.ga.generations},
                         {"restarts", s.ga.restarts}};
  }
  j["violations"] = r.violations;
  j["ok"] = r.ok();
  return j.dump(2) + "\n";
}

std::string manifest_json(const Scenario& s, const RunResult& r) {
  json j;
  j["scenario"] = s.name;
  j["config_hash"] = config_hash(s);
  j["seed"] = s.ga.seed;
  j["version"] = ZENO_VERSION;
  j["dt"] = s.propagation.dt;
  j["search_dt"] = s.search_dt > 0.0 ? s.search_dt : s.propagation.dt;
  j["kernel_isa"] = std::string(kernels::isa_name(kernels::active_isa()));
  j["optimized"] = r.optimized;
  j["config"] = serialize_scenario(s);
  return j.dump(2) + "\n";
}

void write_run_outputs(const Scenario& s, const RunResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "result.json", result_json(s, r));
  write_file(dir / "manifest.json", manifest_json(s, r));
  if (r.optimized) {
    std::ofstream h(dir / "history.csv");
    r.optimization.write_history_csv(h);
  }
  if (!r.trajectory.times.empty()) {
    std::ofstream t(dir / "traj.csv");
    r.trajectory.write_csv(t);
  }
}

std::vector<std::string> table_header(int table) {
  switch (table) {
    case 1: return {"A", "O_percent", "observed_value", "O_no_observation_percent", "F"};
    case 2: return {"O_T_percent", "O_percent", "O_no_observation_percent", "F", "F0"};
    case 3: return {"N", "O_P_percent", "O_E_P_percent", "O_0_P_percent"};
    case 4: return {"P", "O_percent", "observed_value", "O_no_observation_percent", "F"};
    case 5: return {"P", "O_percent", "F", "gamma", "T1", "T2"};
    case 6: return {"kappa", "O_percent", "P1prime_percent", "F"};
    default: throw std::invalid_argument("no table " + std::to_string(table));
  }
}

std::vector<std::string> table_row(int table, const std::string& key, const RunResult& r) {
  const std::string observed = r.observed_value ? sig(*r.observed_value) : "";
  switch (table) {
    case 1:
    case 4: {
      const std::string cf = r.counterfactual_yield ? percent(*r.counterfactual_yield) : percent(r.yield);
      return {key, percent(r.yield), observed, cf, sig(r.fluence)};
    }
    case 2: {
      const auto f0 = r.extra("F0");
      return {key, percent(r.yield), optional_percent(r.counterfactual_yield), sig(r.fluence),
              f0 ? sig(*f0) : ""};
    }
    case 5:
      return {key, percent(r.yield), sig(r.fluence), parameter(r, "gamma"), parameter(r, "T1"),
              parameter(r, "T2")};
    case 6: {
      const auto p = r.extra("P1'");
      return {key, percent(r.yield), p ? percent(*p) : "", sig(r.fluence)};
    }
    default: throw std::invalid_argument("table_row: table " + std::to_string(table) + " has no single-run rows");
  }
}

std::vector<std::string> table3_row(std::size_t count, const RunResult& no_field, const RunResult& with_field) {
  return {std::to_string(count), percent(no_field.yield), percent(with_field.yield),
          percent(with_field.observation_only_yield.value_or(0.0))};
}

void write_table_csv(std::ostream& os, int table, const std::vector<std::vector<std::string>>& rows) {
  const auto header = table_header(table);
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw std::invalid_argument("write_table_csv: row width mismatch");
    line(r);
  }
}

}  // namespace zeno
