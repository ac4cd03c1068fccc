#pragma once

// Real-coded genetic algorithm with tournament selection, uniform crossover,
// Gaussian mutation and elitism, plus the cost functionals it minimizes.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace zeno {

enum class CostKind { field, plan, joint, window };

const char* cost_kind_name(CostKind kind);
CostKind parse_cost_kind(std::string_view name);

struct CostSpec {
  CostKind kind = CostKind::field;
  double target = 1.0;  // O_T as a fraction; plan/joint/window always aim at 1
  double alpha = 0.0;

  void validate() const;
};

/// `penalty` is the field fluence (sum of squared amplitudes, A^2 for the
/// rectangular pulse); plan and joint costs ignore it.
double evaluate_cost(const CostSpec& spec, double yield, double penalty);

struct GeneBound {
  double lo = 0.0;
  double hi = 1.0;
  bool periodic = false;  // wrap into [lo, hi) instead of clamping
  /// Upper end of the range sampled for the initial population; NaN means hi.
  /// Later generations may move anywhere inside [lo, hi].
  double init_hi = std::numeric_limits<double>::quiet_NaN();

  double width() const { return hi - lo; }
  double init_width() const { return std::isnan(init_hi) ? hi - lo : init_hi - lo; }
};

using GeneSpace = std::vector<GeneBound>;
using Genotype = std::vector<double>;

void validate_gene_space(const GeneSpace& space);
bool within_bounds(const GeneSpace& space, std::span<const double> genes);

struct Evaluation {
  double yield = 0.0;
  double penalty = 0.0;
};

using Evaluator = std::function<Evaluation(const Genotype&)>;
/// Evaluates a whole generation at once; must return one result per genotype
/// in order.
using BatchEvaluator = std::function<std::vector<Evaluation>(std::span<const Genotype>)>;

struct GAConfig {
  std::size_t population = 60;
  std::size_t generations = 200;
  std::size_t tournament = 3;
  double crossover_rate = 0.8;
  double mutation_rate = 0.15;
  double mutation_scale = 0.05;  // fraction of each gene's range
  std::size_t elitism = 2;
  std::size_t restarts = 4;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  /// Genotypes injected into the first population of every restart.
  std::vector<Genotype> seeds;

  void validate() const;
};

struct GenerationRecord {
  std::size_t restart = 0;
  std::size_t generation = 0;
  double best_cost = 0.0;
  double best_yield = 0.0;
};

struct OptimizationResult {
  Genotype best;
  double best_cost = 0.0;
  Evaluation best_evaluation;
  std::size_t best_restart = 0;
  std::vector<double> restart_costs;
  /// Best cost found so far, one record per generation across all restarts.
  std::vector<GenerationRecord> history;
  std::size_t evaluations = 0;

  void write_history_csv(std::ostream& out) const;
};

class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, Genotype genotype);
  const Genotype& genotype() const { return genotype_; }

 private:
  Genotype genotype_;
};

OptimizationResult optimize(const CostSpec& cost, const GeneSpace& space,
                            const BatchEvaluator& evaluator, const GAConfig& config);

/// Per-genotype evaluator; batches are split across `config.threads` workers.
OptimizationResult optimize(const CostSpec& cost, const GeneSpace& space, const Evaluator& evaluator,
                            const GAConfig& config);

}  // namespace zeno
