#include "zeno/observation.hpp"

#include <stdexcept>

namespace zeno {

void ObservationPlan::validate(double final_time) const {
  for (std::size_t i = 0; i < instantaneous.size(); ++i) {
    const double t = instantaneous[i].time;
    if (!(t > 0.0 && t < final_time)) {
      throw std::invalid_argument("ObservationPlan: event time outside (0, T_f)");
    }
    if (i > 0 && !(t > instantaneous[i - 1].time)) {
      throw std::invalid_argument("ObservationPlan: event times must be strictly increasing");
    }
  }
  for (const auto& c : continuous) c.validate();
}

ProjectorGenotype::ProjectorGenotype(std::size_t events, std::size_t dim, std::vector<double> genes)
    : events_(events), dim_(dim), genes_(std::move(genes)) {
  if (genes_.size() != gene_count(events_, dim_)) {
    throw std::invalid_argument("ProjectorGenotype: expected 2 * events * dim genes");
  }
}

CVector ProjectorGenotype::raw_vector(std::size_t k) const {
  CVector v(static_cast<Eigen::Index>(dim_));
  const std::size_t base = 2 * k * dim_;
  for (std::size_t j = 0; j < dim_; ++j) {
    v(static_cast<Eigen::Index>(j)) = Complex(genes_[base + 2 * j], genes_[base + 2 * j + 1]);
  }
  return v;
}

std::vector<Projector> ProjectorGenotype::decode() const {
  std::vector<Projector> out;
  out.reserve(events_);
  for (std::size_t k = 0; k < events_; ++k) out.push_back(Projector::from_state(raw_vector(k)));
  return out;
}

std::vector<double> equally_spaced_times(std::size_t count, double final_time) {
  std::vector<double> t;
  for (std::size_t k = 1; k <= count; ++k) {
    t.push_back(static_cast<double>(k) * final_time / static_cast<double>(count + 1));
  }
  return t;
}

ObservationPlan equally_spaced_plan(std::size_t count, double final_time,
                                    const ProjectorGenotype& genotype) {
  if (count == 0) throw std::invalid_argument("equally_spaced_plan: need at least one event");
  if (genotype.events() != count) {
    throw std::invalid_argument("equally_spaced_plan: genotype event count mismatch");
  }
  const auto times = equally_spaced_times(count, final_time);
  auto projectors = genotype.decode();
  ObservationPlan plan;
  for (std::size_t k = 0; k < count; ++k) {
    plan.instantaneous.push_back({times[k], std::move(projectors[k])});
  }
  return plan;
}

double apply_plan_yield(const ObservationPlan& plan, const SystemSpec& system, const Field& field,
                        const Projector& target, const PropagationConfig& config) {
  plan.validate(config.t_end);
  const auto rho0 = DensityMatrix::basis_state(system.dim(), system.initial_state);
  const auto result =
      propagate(rho0, system, field, plan.continuous, plan.instantaneous, config);
  return expectation(result.final_state, target);
}

SequenceEvaluator::SequenceEvaluator(const SystemSpec& system, const Field& field,
                                     std::vector<double> event_times,
                                     const PropagationConfig& config)
    : times_(std::move(event_times)) {
  config.validate();
  double t = config.t_start;
  for (std::size_t k = 0; k <= times_.size(); ++k) {
    const double t_next = k < times_.size() ? times_[k] : config.t_end;
    if (t_next < t) throw std::invalid_argument("SequenceEvaluator: event times must increase");
    const auto n = static_cast<Eigen::Index>(system.dim());
    if (t_next - t <= 0.0) {
      segments_.push_back(CMatrix::Identity(n, n));
    } else {
      PropagationConfig seg = config;
      seg.t_start = t;
      seg.t_end = t_next;
      seg.sample_every = 0;
      segments_.push_back(unitary_propagator(system, field, seg));
    }
    t = t_next;
  }
}

DensityMatrix SequenceEvaluator::final_state(const DensityMatrix& rho0,
                                             std::span<const Projector> projectors) const {
  if (projectors.size() != times_.size()) {
    throw std::invalid_argument("SequenceEvaluator: one projector per event time");
  }
  CMatrix rho = rho0.matrix();
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    rho = segments_[k] * rho * segments_[k].adjoint();
    if (k < projectors.size()) {
      rho = measure_projector(DensityMatrix::unchecked(std::move(rho)), projectors[k]).matrix();
    }
  }
  return DensityMatrix::unchecked(hermitize(rho));
}

}  // namespace zeno
