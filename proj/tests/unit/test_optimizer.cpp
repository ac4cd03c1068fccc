#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "zeno/optimizer.hpp"

using namespace zeno;

namespace {

GAConfig small_config(std::uint64_t seed = 3) {
  GAConfig c;
  c.population = 20;
  c.generations = 40;
  c.restarts = 2;
  c.seed = seed;
  return c;
}

// Cost (g0 - 0.3)^2 + (g1 - 0.7)^2 expressed as a field cost with target 1.
Evaluation bowl(const Genotype& g) {
  const double d = (g[0] - 0.3) * (g[0] - 0.3) + (g[1] - 0.7) * (g[1] - 0.7);
  return {1.0 - std::sqrt(d), 0.0};
}

}  // namespace

TEST_CASE("cost functionals") {
  CostSpec field{CostKind::field, 0.6, 0.05};
  CHECK(evaluate_cost(field, 0.6, 0.0) == 0.0);
  field.target = 1.0;
  CHECK(evaluate_cost(field, 0.9842, 0.063) == doctest::Approx(0.0158 * 0.0158 + 0.05 * 0.063));
  CHECK(std::abs(evaluate_cost(field, 0.9842, 0.063) - 0.0034) <= 5e-5);

  const CostSpec window{CostKind::window, 1.0, 0.01};
  CHECK(evaluate_cost(window, 1.0, 0.0) == 0.0);
  CHECK(evaluate_cost(window, 0.5, 4.0) == doctest::Approx(0.25 + 0.04));

  const CostSpec plan{CostKind::plan, 0.3, 0.9};
  CHECK(evaluate_cost(plan, 0.8, 10.0) == doctest::Approx(0.04));
  CHECK(evaluate_cost(CostSpec{CostKind::joint, 1.0, 0.0}, 0.8, 10.0) == doctest::Approx(0.04));

  CHECK(parse_cost_kind("joint") == CostKind::joint);
  CHECK(std::string(cost_kind_name(CostKind::window)) == "window");
  CHECK_THROWS_AS(parse_cost_kind("other"), std::invalid_argument);
  CHECK_THROWS_AS((CostSpec{CostKind::field, 1.5, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((CostSpec{CostKind::field, 1.0, -0.1}.validate()), std::invalid_argument);
}

TEST_CASE("one-gene quadratic converges to 0.3") {
  const CostSpec cost{CostKind::field, 1.0, 0.0};
  const GeneSpace space{{0.0, 1.0}};
  const Evaluator ev = [](const Genotype& g) { return Evaluation{1.0 - std::abs(g[0] - 0.3), 0.0}; };
  const auto r = optimize(cost, space, ev, small_config());
  CHECK(std::abs(r.best[0] - 0.3) <= 0.01);
}

TEST_CASE("determinism, monotone history and bounds") {
  const CostSpec cost{CostKind::field, 1.0, 0.0};
  const GeneSpace space{{0.0, 1.0}, {-1.0, 2.0}};
  std::mutex m;
  bool in_bounds = true;
  const Evaluator ev = [&](const Genotype& g) {
    {
      std::lock_guard lock(m);
      in_bounds = in_bounds && within_bounds(space, g);
    }
    return bowl(g);
  };
  const auto a = optimize(cost, space, ev, small_config(9));
  const auto b = optimize(cost, space, ev, small_config(9));
  CHECK(a.best == b.best);
  CHECK(a.best_cost == b.best_cost);
  CHECK(a.history.size() == b.history.size());
  CHECK(in_bounds);
  CHECK(within_bounds(space, a.best));
  REQUIRE(a.history.size() == 2 * 40);
  for (std::size_t i = 1; i < a.history.size(); ++i) REQUIRE(a.history[i].best_cost <= a.history[i - 1].best_cost);
  CHECK(a.history.back().best_cost == a.best_cost);
  CHECK(a.restart_costs.size() == 2);
  // Elites carry their evaluation forward.
  CHECK(a.evaluations == 2 * (20 + 39 * 18));

  const auto c = optimize(cost, space, ev, small_config(10));
  CHECK(c.best != a.best);
}

TEST_CASE("worker count does not change the result") {
  const CostSpec cost{CostKind::field, 1.0, 0.0};
  const GeneSpace space{{0.0, 1.0}, {0.0, 1.0}};
  GAConfig one = small_config(4);
  GAConfig many = one;
  many.threads = 4;
  const auto a = optimize(cost, space, Evaluator(bowl), one);
  const auto b = optimize(cost, space, Evaluator(bowl), many);
  CHECK(a.best == b.best);
  CHECK(a.best_cost == b.best_cost);
}

TEST_CASE("periodic genes wrap and the initial range is honoured") {
  const CostSpec cost{CostKind::field, 1.0, 0.0};
  GeneSpace space{{0.0, 2.0, false, 0.5}, {0.0, 1.0, true}};
  GAConfig cfg = small_config();
  cfg.restarts = 1;
  cfg.generations = 1;
  bool first_ok = true;
  const BatchEvaluator ev = [&](std::span<const Genotype> batch) {
    std::vector<Evaluation> out;
    for (const auto& g : batch) {
      first_ok = first_ok && g[0] <= 0.5 && g[1] >= 0.0 && g[1] < 1.0;
      out.push_back({0.0, 0.0});
    }
    return out;
  };
  (void)optimize(cost, space, ev, cfg);
  CHECK(first_ok);

  // Mutations past the upper end of a periodic gene re-enter at the bottom.
  cfg.generations = 30;
  cfg.mutation_rate = 1.0;
  cfg.mutation_scale = 0.5;
  bool wrapped_ok = true;
  const Evaluator probe = [&](const Genotype& g) {
    wrapped_ok = wrapped_ok && g[1] >= 0.0 && g[1] < 1.0;
    return Evaluation{g[1], 0.0};
  };
  (void)optimize(cost, space, probe, cfg);
  CHECK(wrapped_ok);
}

TEST_CASE("seeds enter the first population") {
  const CostSpec cost{CostKind::field, 1.0, 0.0};
  const GeneSpace space{{0.0, 1.0}, {0.0, 1.0}};
  GAConfig cfg = small_config();
  cfg.generations = 1;
  cfg.restarts = 1;
  cfg.seeds = {{0.3, 0.7}};
  const auto r = optimize(cost, space, Evaluator(bowl), cfg);
  CHECK(r.best == Genotype{0.3, 0.7});
  CHECK(r.best_cost == 0.0);
  cfg.seeds = {{0.3}};
  CHECK_THROWS_AS(optimize(cost, space, Evaluator(bowl), cfg), std::invalid_argument);
}

TEST_CASE("evaluator failures name the genotype") {
  const CostSpec cost{CostKind::field, 1.0, 0.0};
  const GeneSpace space{{0.0, 1.0}};
  std::atomic<int> calls{0};
  const Evaluator ev = [&](const Genotype& g) -> Evaluation {
    if (++calls == 5) throw std::runtime_error("boom");
    return {g[0], 0.0};
  };
  try {
    (void)optimize(cost, space, ev, small_config());
    FAIL("expected EvaluationError");
  } catch (const EvaluationError& e) {
    CHECK(e.genotype().size() == 1);
    CHECK(std::string(e.what()).find("boom") != std::string::npos);
    CHECK(std::string(e.what()).find("genotype [") != std::string::npos);
  }

  const BatchEvaluator nan = [](std::span<const Genotype> batch) {
    return std::vector<Evaluation>(batch.size(), Evaluation{std::nan(""), 0.0});
  };
  CHECK_THROWS_AS(optimize(cost, space, nan, small_config()), EvaluationError);

  const BatchEvaluator batch_fail = [](std::span<const Genotype> batch) -> std::vector<Evaluation> {
    for (const auto& g : batch) {
      if (g[0] > 0.5) throw std::runtime_error("bad gene");
    }
    return std::vector<Evaluation>(batch.size());
  };
  try {
    (void)optimize(cost, space, batch_fail, small_config());
    FAIL("expected EvaluationError");
  } catch (const EvaluationError& e) {
    CHECK(e.genotype()[0] > 0.5);
  }
}

TEST_CASE("configuration validation and history export") {
  const CostSpec cost{CostKind::field, 1.0, 0.0};
  const Evaluator ev = bowl;
  GAConfig bad = small_config();
  bad.population = 1;
  CHECK_THROWS_AS(optimize(cost, GeneSpace{{0.0, 1.0}, {0.0, 1.0}}, ev, bad), std::invalid_argument);
  bad = small_config();
  bad.elitism = bad.population;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = small_config();
  bad.mutation_rate = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(validate_gene_space({}), std::invalid_argument);
  CHECK_THROWS_AS(validate_gene_space({{1.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(validate_gene_space({{0.0, 1.0, false, 2.0}}), std::invalid_argument);

  GAConfig cfg = small_config();
  cfg.generations = 3;
  cfg.restarts = 1;
  const auto r = optimize(cost, GeneSpace{{0.0, 1.0}, {0.0, 1.0}}, ev, cfg);
  std::ostringstream os;
  r.write_history_csv(os);
  CHECK(os.str().rfind("generation,restart,best_cost,best_yield\n", 0) == 0);
  int lines = 0;
  for (char ch : os.str()) lines += ch == '\n';
  CHECK(lines == 4);
}
