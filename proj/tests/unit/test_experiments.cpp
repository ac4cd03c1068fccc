#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "json.hpp"
#include "zeno/experiments.hpp"
#include "zeno/models.hpp"

using namespace zeno;

namespace {

Genotype random_genotype(const GeneSpace& space, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Genotype g;
  for (const auto& b : space) g.push_back(b.lo + u(rng) * (b.init_width()));
  return g;
}

std::vector<Scenario> all_table_scenarios() {
  std::vector<Scenario> out;
  for (const auto& k : table1_rows()) out.push_back(table1_scenario(k));
  for (double t : table2_rows()) out.push_back(table2_scenario(t));
  for (std::size_t n : table3_rows()) {
    out.push_back(table3_scenario(n, false));
    out.push_back(table3_scenario(n, true));
  }
  for (const auto& k : table4_5_rows()) {
    out.push_back(table4_5_scenario(k, Model3Mode::instantaneous));
    out.push_back(table4_5_scenario(k, Model3Mode::continuous));
  }
  for (double k : table6_rows()) out.push_back(table6_scenario(k));
  return out;
}

Scenario parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

Scenario tiny(Scenario s) {
  s.ga.population = 8;
  s.ga.generations = 3;
  s.ga.restarts = 1;
  return s;
}

}  // namespace

TEST_CASE("scenario text round-trips and hashes stably") {
  for (const auto& s : all_table_scenarios()) {
    INFO(s.name);
    const std::string text = serialize_scenario(s);
    const Scenario back = parse_text(text);
    REQUIRE(serialize_scenario(back) == text);
    CHECK(config_hash(back) == config_hash(s));
    CHECK(config_hash(s).size() == 16);
  }
  Scenario a = table1_scenario("mu");
  Scenario b = a;
  b.ga.seed = 2;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("scenario parse errors") {
  const std::string base = "[scenario]\nname = x\nmodel = model1\n";
  CHECK_NOTHROW(parse_text(base));
  CHECK_THROWS(parse_text("[scenario]\nname = x\n"));
  CHECK_THROWS(parse_text("[scenario]\nmodel = model9\n"));
  CHECK_THROWS_AS(parse_text(base + "[field]\nfamily = chirped\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_text(base + "[field]\noptimize = maybe\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_text(base + "[observation]\nkind = weak\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_text(base + "[field]\noptimize = false\namplitudes = 0.1,x\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_text(base + "[cost]\nkind = other\n"), std::invalid_argument);
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.ini"), std::invalid_argument);
}

TEST_CASE("scenario validation") {
  Scenario s = table1_scenario("P0");
  CHECK_NOTHROW(s.validate());
  s.observation.time = 250.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = table1_scenario("P0");
  s.observation.op = "P9";
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.observation.op = "sigma";
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = table1_scenario("none");
  s.field.amplitude_init_max = 3.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = table3_scenario(3, true);
  s.field.amplitudes.pop_back();
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = table4_5_scenario("P0", Model3Mode::continuous);
  s.observation.gamma_max = -1.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = table1_scenario("none");
  s.cost.target = 1.2;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("gene space layouts") {
  const auto gs = [](const Scenario& s) { return scenario_gene_space(s, model_by_id(s.model)); };

  const auto t1 = gs(table1_scenario("P0"));
  REQUIRE(t1.size() == 8);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(t1[i].lo == 0.0);
    CHECK(t1[i].hi == 2.0);
    CHECK_FALSE(t1[i].periodic);
    CHECK(t1[i].init_hi == 0.5);
    CHECK(t1[4 + i].periodic);
    CHECK(t1[4 + i].hi == doctest::Approx(2.0 * M_PI));
  }
  CHECK(gs(table1_scenario("mu"))[0].init_hi == 2.0);
  CHECK(gs(table1_scenario("H0"))[0].init_hi == 0.5);
  CHECK(table1_scenario("H0").ga.restarts == 8);

  const auto t3 = gs(table3_scenario(3, true));
  REQUIRE(t3.size() == 30);
  for (const auto& b : t3) {
    CHECK(b.lo == -1.0);
    CHECK(b.hi == 1.0);
  }
  CHECK(gs(table3_scenario(0, true)).empty());

  CHECK(gs(table4_5_scenario("P0", Model3Mode::instantaneous)).size() == 1);
  const auto t5 = gs(table4_5_scenario("P0", Model3Mode::continuous));
  REQUIRE(t5.size() == 4);
  CHECK(t5[1].hi == 5.0);
  CHECK(t5[2].hi == 200.0);
  CHECK(t5[3].hi == 200.0);

  CHECK(gs(table6_scenario(0.05)).size() == 6);
}

TEST_CASE("window decoding") {
  const ScenarioEngine engine(table4_5_scenario("P2", Model3Mode::continuous), 0.02);
  const auto inst = engine.decode({0.04, 5.0, 150.0, 100.0});
  REQUIRE(inst.plan.continuous.size() == 1);
  REQUIRE(inst.plan.continuous[0].windows.size() == 1);
  CHECK(inst.plan.continuous[0].windows[0].t1 == 100.0);
  CHECK(inst.plan.continuous[0].windows[0].t2 == 150.0);
  CHECK(inst.plan.continuous[0].windows[0].gamma == 5.0);
  CHECK(engine.decode({0.04, 0.0, 10.0, 100.0}).plan.continuous[0].windows.empty());
  CHECK(engine.decode({0.04, 2.0, 80.0, 80.0}).plan.continuous[0].windows.empty());
  CHECK(fluence(engine.decode({0.04, 0.0, 0.0, 0.0}).field) == doctest::Approx(0.0016));
}

TEST_CASE("engine routes agree with density-matrix reporting") {
  std::mt19937_64 rng(61);
  struct Case {
    Scenario s;
    const char* route;
  };
  const std::vector<Case> cases{{table1_scenario("mu"), "split"},
                                {table1_scenario("P3"), "split"},
                                {table1_scenario("none"), "split"},
                                {table4_5_scenario("P0", Model3Mode::instantaneous), "split"},
                                {table3_scenario(3, true), "sequence"},
                                {table3_scenario(5, false), "sequence"},
                                {table4_5_scenario("P2", Model3Mode::continuous), "density"},
                                {table6_scenario(0.09), "density"}};
  for (const auto& c : cases) {
    INFO(c.s.name);
    const ScenarioEngine engine(c.s, c.s.propagation.dt);
    CHECK(std::string(engine.route()) == c.route);
    std::vector<Genotype> batch;
    for (int k = 0; k < 3; ++k) batch.push_back(random_genotype(engine.gene_space(), rng));
    // Keep fields at the optimized scale so RK4 truncation stays below 1e-6.
    for (auto& g : batch) {
      for (std::size_t i = 0; i < g.size(); ++i) {
        const auto& b = engine.gene_space()[i];
        if (!b.periodic && b.hi == c.s.field.amplitude_max) g[i] *= 0.3;
      }
    }
    const auto evals = engine.evaluate(batch);
    for (std::size_t k = 0; k < batch.size(); ++k) {
      const RunResult r = evaluate_scenario(c.s, batch[k]);
      REQUIRE(std::abs(evals[k].yield - r.yield) <= 1e-6);
      REQUIRE(evals[k].penalty == doctest::Approx(r.fluence));
    }
  }
}

TEST_CASE("counterfactual columns are reproducible") {
  const Scenario s = table1_scenario("mu");
  const Genotype g{0.1, 0.12, 0.08, 0.05, 1.0, 2.0, 3.0, 4.0};
  const RunResult a = evaluate_scenario(s, g);
  const RunResult b = evaluate_scenario(s, g);
  REQUIRE(a.counterfactual_yield.has_value());
  REQUIRE(a.observation_only_yield.has_value());
  CHECK(*a.counterfactual_yield == *b.counterfactual_yield);
  CHECK(a.yield == b.yield);
  CHECK(std::abs(*a.observation_only_yield - 0.2219) <= 5e-4);
  CHECK(a.observed_value.has_value());
  CHECK(a.ok());

  // Without observation the counterfactual columns are absent and the
  // unobserved yield equals the plain yield of the same field.
  Scenario none = table1_scenario("none");
  const RunResult c = evaluate_scenario(none, g);
  CHECK_FALSE(c.counterfactual_yield.has_value());
  CHECK(c.yield == *a.counterfactual_yield);
}

TEST_CASE("fixed scenarios evaluate without optimizing") {
  const RunResult r = run_scenario(table3_scenario(0, true));
  CHECK_FALSE(r.optimized);
  CHECK(std::abs(r.yield - 0.1293) <= 5e-4);
  CHECK(r.fluence == doctest::Approx(0.0196));
  const RunResult z = run_scenario(table3_scenario(0, false));
  CHECK(z.yield == 0.0);
}

TEST_CASE("small optimization run and its outputs") {
  Scenario s = tiny(table4_5_scenario("P0", Model3Mode::instantaneous));
  s.trajectory_every = 1000;
  const RunResult r = run_scenario(s);
  CHECK(r.optimized);
  CHECK(r.ok());
  CHECK(r.yield >= 0.0);
  CHECK(r.yield <= 1.0);
  CHECK(r.trajectory.times.size() == 21);
  for (std::size_t i = 1; i < r.optimization.history.size(); ++i) {
    CHECK(r.optimization.history[i].best_cost <= r.optimization.history[i - 1].best_cost);
  }

  const auto j = nlohmann::json::parse(result_json(s, r));
  CHECK(j["scenario"] == "table4-P0");
  CHECK(j["ok"] == true);
  CHECK(j["yield"].get<double>() == r.yield);
  CHECK(j.contains("counterfactual_yield_percent"));
  CHECK(j["parameters"].contains("A"));

  const auto dir = std::filesystem::temp_directory_path() / "zeno_unit_outputs";
  std::filesystem::remove_all(dir);
  write_run_outputs(s, r, dir);
  for (const char* f : {"result.json", "manifest.json", "history.csv", "traj.csv"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  std::ifstream mf(dir / "manifest.json");
  const auto m = nlohmann::json::parse(mf);
  CHECK(m["config_hash"] == config_hash(s));
  CHECK(m["seed"] == s.ga.seed);
  std::filesystem::remove_all(dir);
}

TEST_CASE("table formatting") {
  CHECK(percent(0.98444) == "98.44");
  CHECK(percent(0.5) == "50.00");
  CHECK(percent(1.0) == "100.00");
  CHECK(table_header(1).size() == 5);
  CHECK(table_header(3).size() == 4);

  RunResult a;
  a.yield = 0.5;
  a.observation_only_yield = 0.5;
  RunResult b;
  b.yield = 0.5646;
  b.observation_only_yield = 0.1181;
  const auto row = table3_row(1, a, b);
  CHECK(row == std::vector<std::string>{"1", "50.00", "56.46", "11.81"});

  std::ostringstream os;
  write_table_csv(os, 3, {row});
  CHECK(os.str() == "N,O_P_percent,O_E_P_percent,O_0_P_percent\n1,50.00,56.46,11.81\n");
}

TEST_CASE("bundled scenario files load and match their builders") {
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(ZENO_SCENARIO_DIR)) {
    if (entry.path().extension() != ".ini") continue;
    INFO(entry.path().string());
    const Scenario s = load_scenario(entry.path().string());
    CHECK_NOTHROW(s.validate());
    ++files;
  }
  CHECK(files >= 6);
  CHECK(config_hash(load_scenario(std::string(ZENO_SCENARIO_DIR) + "/table1_mu.ini")) ==
        config_hash(table1_scenario("mu")));
}
