#include "zeno/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace zeno {

const char* cost_kind_name(CostKind kind) {
  switch (kind) {
    case CostKind::field: return "field";
    case CostKind::plan: return "plan";
    case CostKind::joint: return "joint";
    case CostKind::window: return "window";
  }
  return "?";
}

CostKind parse_cost_kind(std::string_view name) {
  if (name == "field") return CostKind::field;
  if (name == "plan") return CostKind::plan;
  if (name == "joint") return CostKind::joint;
  if (name == "window") return CostKind::window;
  throw std::invalid_argument("unknown cost kind '" + std::string(name) + "'");
}

void CostSpec::validate() const {
  if (!(target >= 0.0 && target <= 1.0)) throw std::invalid_argument("CostSpec: target outside [0, 1]");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("CostSpec: alpha must be >= 0");
}

double evaluate_cost(const CostSpec& spec, double yield, double penalty) {
  switch (spec.kind) {
    case CostKind::field: {
      const double d = yield - spec.target;
      return d * d + spec.alpha * penalty;
    }
    case CostKind::plan:
    case CostKind::joint: {
      const double d = yield - 1.0;
      return d * d;
    }
    case CostKind::window: {
      const double d = yield - 1.0;
      return d * d + spec.alpha * penalty;
    }
  }
  return 0.0;
}

void validate_gene_space(const GeneSpace& space) {
  if (space.empty()) throw std::invalid_argument("GeneSpace: no genes");
  for (const auto& b : space) {
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || !(b.hi > b.lo)) {
      throw std::invalid_argument("GeneSpace: bounds must be finite with hi > lo");
    }
    if (!std::isnan(b.init_hi) && !(b.init_hi > b.lo && b.init_hi <= b.hi)) {
      throw std::invalid_argument("GeneSpace: init_hi must lie in (lo, hi]");
    }
  }
}

bool within_bounds(const GeneSpace& space, std::span<const double> genes) {
  if (genes.size() != space.size()) return false;
  for (std::size_t i = 0; i < genes.size(); ++i) {
    const auto& b = space[i];
    if (b.periodic ? !(genes[i] >= b.lo && genes[i] < b.hi) : !(genes[i] >= b.lo && genes[i] <= b.hi)) {
      return false;
    }
  }
  return true;
}

void GAConfig::validate() const {
  if (population < 2) throw std::invalid_argument("GAConfig: population must be >= 2");
  if (generations < 1) throw std::invalid_argument("GAConfig: generations must be >= 1");
  if (tournament < 1) throw std::invalid_argument("GAConfig: tournament must be >= 1");
  if (restarts < 1) throw std::invalid_argument("GAConfig: restarts must be >= 1");
  if (elitism >= population) throw std::invalid_argument("GAConfig: elitism must be < population");
  auto rate = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (!rate(crossover_rate) || !rate(mutation_rate)) {
    throw std::invalid_argument("GAConfig: rates must lie in [0, 1]");
  }
  if (!(mutation_scale > 0.0) || !std::isfinite(mutation_scale)) {
    throw std::invalid_argument("GAConfig: mutation scale must be positive");
  }
}

void OptimizationResult::write_history_csv(std::ostream& out) const {
  out << "generation,restart,best_cost,best_yield\n";
  out.precision(12);
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto& h = history[i];
    out << i << ',' << h.restart << ',' << h.best_cost << ',' << h.best_yield << '\n';
  }
}

namespace {

std::string describe(const Genotype& g) {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (std::size_t i = 0; i < g.size(); ++i) os << (i ? ", " : "") << g[i];
  os << ']';
  return os.str();
}

}  // namespace

EvaluationError::EvaluationError(const std::string& what, Genotype genotype)
    : std::runtime_error(what + " for genotype " + describe(genotype)), genotype_(std::move(genotype)) {}

namespace {

double wrap(double g, const GeneBound& b) {
  double r = std::fmod(g - b.lo, b.width());
  if (r < 0.0) r += b.width();
  const double out = b.lo + r;
  return out < b.hi ? out : b.lo;
}

double fit(double g, const GeneBound& b) {
  return b.periodic ? wrap(g, b) : std::clamp(g, b.lo, b.hi);
}

struct Member {
  Genotype genes;
  Evaluation eval;
  double cost = 0.0;
};

class Engine {
 public:
  Engine(const CostSpec& cost, const GeneSpace& space, const BatchEvaluator& evaluator,
         const GAConfig& config)
      : cost_(cost), space_(space), evaluator_(evaluator), config_(config) {}

  OptimizationResult run() {
    OptimizationResult result;
    result.best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < config_.restarts; ++r) run_restart(r, result);
    return result;
  }

 private:
  void run_restart(std::size_t restart, OptimizationResult& result) {
    std::seed_seq seq{static_cast<std::uint32_t>(config_.seed),
                      static_cast<std::uint32_t>(config_.seed >> 32),
                      static_cast<std::uint32_t>(restart)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<Genotype> fresh;
    for (const auto& s : config_.seeds) {
      if (fresh.size() == config_.population) break;
      if (s.size() != space_.size()) throw std::invalid_argument("GAConfig: seed genotype size mismatch");
      Genotype g(s.size());
      for (std::size_t i = 0; i < s.size(); ++i) g[i] = fit(s[i], space_[i]);
      fresh.push_back(std::move(g));
    }
    while (fresh.size() < config_.population) {
      Genotype g(space_.size());
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = fit(space_[i].lo + unit(rng) * space_[i].init_width(), space_[i]);
      fresh.push_back(std::move(g));
    }

    std::vector<Member> pop;
    evaluate_into(std::move(fresh), pop, result);
    double restart_best = std::numeric_limits<double>::infinity();

    for (std::size_t gen = 0; gen < config_.generations; ++gen) {
      std::vector<std::size_t> order(pop.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return pop[a].cost < pop[b].cost; });
      const Member& leader = pop[order.front()];
      restart_best = std::min(restart_best, leader.cost);
      if (leader.cost < result.best_cost) {
        result.best_cost = leader.cost;
        result.best = leader.genes;
        result.best_evaluation = leader.eval;
        result.best_restart = restart;
      }
      result.history.push_back({restart, gen, result.best_cost, result.best_evaluation.yield});
      if (gen + 1 == config_.generations) break;

      std::vector<Member> next;
      next.reserve(pop.size());
      for (std::size_t e = 0; e < config_.elitism; ++e) next.push_back(pop[order[e]]);

      std::vector<Genotype> children;
      const std::size_t wanted = config_.population - next.size();
      while (children.size() < wanted) {
        Genotype a = pop[tournament(pop, rng)].genes;
        Genotype b = pop[tournament(pop, rng)].genes;
        if (unit(rng) < config_.crossover_rate) {
          for (std::size_t i = 0; i < a.size(); ++i) {
            if (unit(rng) < 0.5) std::swap(a[i], b[i]);
          }
        }
        mutate(a, rng);
        mutate(b, rng);
        children.push_back(std::move(a));
        if (children.size() < wanted) children.push_back(std::move(b));
      }
      evaluate_into(std::move(children), next, result);
      pop = std::move(next);
    }
    result.restart_costs.push_back(restart_best);
  }

  std::size_t tournament(const std::vector<Member>& pop, std::mt19937_64& rng) const {
    std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
    std::size_t best = pick(rng);
    for (std::size_t k = 1; k < config_.tournament; ++k) {
      const std::size_t c = pick(rng);
      if (pop[c].cost < pop[best].cost || (pop[c].cost == pop[best].cost && c < best)) best = c;
    }
    return best;
  }

  void mutate(Genotype& g, std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (unit(rng) < config_.mutation_rate) {
        g[i] = fit(g[i] + normal(rng) * config_.mutation_scale * space_[i].width(), space_[i]);
      }
    }
  }

  void evaluate_into(std::vector<Genotype> batch, std::vector<Member>& out, OptimizationResult& result) {
    std::vector<Evaluation> evals;
    try {
      evals = evaluator_(batch);
    } catch (const EvaluationError&) {
      throw;
    } catch (const std::exception&) {
      locate_failure(batch);
      throw;
    }
    if (evals.size() != batch.size()) {
      throw std::runtime_error("optimize: evaluator returned the wrong number of results");
    }
    result.evaluations += batch.size();
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const double c = evaluate_cost(cost_, evals[i].yield, evals[i].penalty);
      if (!std::isfinite(c)) throw EvaluationError("optimize: non-finite cost", batch[i]);
      out.push_back({std::move(batch[i]), evals[i], c});
    }
  }

  // Re-runs a failed batch one genotype at a time to name the culprit.
  void locate_failure(const std::vector<Genotype>& batch) const {
    for (const auto& g : batch) {
      try {
        (void)evaluator_(std::span<const Genotype>(&g, 1));
      } catch (const std::exception& e) {
        throw EvaluationError(std::string("optimize: evaluator failed: ") + e.what(), g);
      }
    }
  }

  const CostSpec& cost_;
  const GeneSpace& space_;
  const BatchEvaluator& evaluator_;
  const GAConfig& config_;
};

}  // namespace

OptimizationResult optimize(const CostSpec& cost, const GeneSpace& space,
                            const BatchEvaluator& evaluator, const GAConfig& config) {
  cost.validate();
  validate_gene_space(space);
  config.validate();
  return Engine(cost, space, evaluator, config).run();
}

OptimizationResult optimize(const CostSpec& cost, const GeneSpace& space, const Evaluator& evaluator,
                            const GAConfig& config) {
  const std::size_t workers = std::max<std::size_t>(1, config.threads);
  BatchEvaluator batch = [&](std::span<const Genotype> genes) {
    std::vector<Evaluation> out(genes.size());
    auto work = [&](std::size_t lo, std::size_t hi, std::exception_ptr& err) {
      for (std::size_t i = lo; i < hi; ++i) {
        try {
          out[i] = evaluator(genes[i]);
        } catch (const std::exception& e) {
          err = std::make_exception_ptr(
              EvaluationError(std::string("optimize: evaluator failed: ") + e.what(), genes[i]));
          return;
        }
      }
    };
    const std::size_t n = std::min(workers, genes.size());
    std::vector<std::exception_ptr> errors(std::max<std::size_t>(n, 1));
    if (n <= 1) {
      work(0, genes.size(), errors[0]);
    } else {
      std::vector<std::thread> pool;
      const std::size_t chunk = (genes.size() + n - 1) / n;
      for (std::size_t w = 0; w < n; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(genes.size(), lo + chunk);
        pool.emplace_back(work, lo, hi, std::ref(errors[w]));
      }
      for (auto& t : pool) t.join();
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    return out;
  };
  return optimize(cost, space, batch, config);
}

}  // namespace zeno
