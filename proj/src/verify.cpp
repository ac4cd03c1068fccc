#include <cmath>
#include <cstdio>
#include <random>

#include "zeno/dynamics.hpp"
#include "zeno/models.hpp"
#include "zeno/observation.hpp"
#include "zeno/oracle.hpp"

namespace zeno::oracle {

namespace {

constexpr double kAgreementTol = 1e-6;

std::string format(const char* fmt, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, a, b);
  return buf;
}

CVector superposition(const SystemSpec& system) {
  CVector v = CVector::Zero(static_cast<Eigen::Index>(system.dim()));
  v(static_cast<Eigen::Index>(system.initial_state)) = 1.0;
  v(static_cast<Eigen::Index>(system.target_state)) = 1.0;
  return v;
}

}  // namespace

std::vector<Check> verify_engine(std::size_t samples, std::uint64_t seed) {
  const SystemSpec system = model2();
  const double tf = system.final_time;
  const std::size_t n = system.dim();
  PropagationConfig config;
  config.t_end = tf;
  const Projector target = Projector::basis(n, system.target_state);
  std::vector<Check> out;

  {
    const double y = analytic_sequence_yield(system, {{0.5 * tf, superposition(system)}});
    out.push_back({"analytic N=1 superposition = 0.5", std::abs(y - 0.5) <= 1e-12, format("%.12f", y)});
  }
  {
    const double y = analytic_sequence_yield(system, {});
    out.push_back({"analytic N=0 = 0", y == 0.0, format("%.3g", y)});
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> gene(ProjectorGenotype::kGeneMin, ProjectorGenotype::kGeneMax);
  std::uniform_int_distribution<std::size_t> count(1, 3);
  double worst = 0.0;
  double worst_cached = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const std::size_t events = count(rng);
    std::vector<double> genes(ProjectorGenotype::gene_count(events, n));
    for (auto& g : genes) g = gene(rng);
    const ProjectorGenotype pg(events, n, genes);
    const auto times = equally_spaced_times(events, tf);
    std::vector<TimedProjector> timed;
    for (std::size_t e = 0; e < events; ++e) timed.push_back({times[e], pg.raw_vector(e)});
    const double reference = analytic_sequence_yield(system, timed);

    const double engine = apply_plan_yield(equally_spaced_plan(events, tf, pg), system, ZeroField{}, target, config);
    const SequenceEvaluator cached(system, ZeroField{}, times, config);
    const auto ps = pg.decode();
    const double composed =
        cached.final_state(DensityMatrix::basis_state(n, system.initial_state), ps).population(system.target_state);
    worst = std::max(worst, std::abs(engine - reference));
    worst_cached = std::max(worst_cached, std::abs(composed - reference));
  }
  out.push_back({"density propagation vs analytic, " + std::to_string(samples) + " sequences",
                 worst <= kAgreementTol, format("max |diff| = %.3e", worst)});
  out.push_back({"cached segment propagators vs analytic, " + std::to_string(samples) + " sequences",
                 worst_cached <= kAgreementTol, format("max |diff| = %.3e", worst_cached)});

  const auto grid = grid_search_single_projector(system, 200);
  out.push_back({"grid optimum N=1 = 0.5 +- 1e-3", std::abs(grid.yield - 0.5) <= 1e-3,
                 format("%.6f", grid.yield)});
  return out;
}

}  // namespace zeno::oracle
