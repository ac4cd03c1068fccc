#pragma once

// Observation plans: instantaneous events at fixed times plus continuous
// monitoring windows, and the real-valued encoding of rank-1 projector
// sequences searched by the optimizer.

#include <cstddef>
#include <span>
#include <vector>

#include "zeno/control_field.hpp"
#include "zeno/dynamics.hpp"
#include "zeno/quantum_core.hpp"
#include "zeno/system.hpp"

namespace zeno {

struct ObservationPlan {
  std::vector<InstantaneousEvent> instantaneous;
  std::vector<ContinuousObservation> continuous;

  /// Event times strictly increasing inside (0, final_time); windows valid.
  void validate(double final_time) const;
};

/// N events x dim complex amplitudes, stored as (Re, Im) pairs; each vector
/// is normalized on decode.
class ProjectorGenotype {
 public:
  static constexpr double kGeneMin = -1.0;
  static constexpr double kGeneMax = 1.0;

  ProjectorGenotype(std::size_t events, std::size_t dim, std::vector<double> genes);

  static std::size_t gene_count(std::size_t events, std::size_t dim) { return 2 * events * dim; }

  std::size_t events() const { return events_; }
  std::size_t dim() const { return dim_; }
  std::span<const double> genes() const { return genes_; }

  /// Unnormalized amplitudes of event k.
  CVector raw_vector(std::size_t k) const;
  /// Throws InvariantError when a raw vector is zero.
  std::vector<Projector> decode() const;

 private:
  std::size_t events_;
  std::size_t dim_;
  std::vector<double> genes_;
};

/// t_k = k T / (N + 1), k = 1..N.
std::vector<double> equally_spaced_times(std::size_t count, double final_time);

/// Requires N >= 1 and a genotype with N events.
ObservationPlan equally_spaced_plan(std::size_t count, double final_time,
                                    const ProjectorGenotype& genotype);

/// Tr[rho(T) target] after propagating the system's initial state with the plan.
double apply_plan_yield(const ObservationPlan& plan, const SystemSpec& system, const Field& field,
                        const Projector& target, const PropagationConfig& config);

/// Evaluates projector sequences at fixed times under a fixed field without
/// continuous observation. The unitary propagators between consecutive event
/// times are integrated once; each evaluation then only composes them with
/// the measurement maps.
class SequenceEvaluator {
 public:
  SequenceEvaluator(const SystemSpec& system, const Field& field, std::vector<double> event_times,
                    const PropagationConfig& config);

  /// projectors.size() must equal the number of event times.
  DensityMatrix final_state(const DensityMatrix& rho0, std::span<const Projector> projectors) const;

  std::span<const double> event_times() const { return times_; }
  std::span<const CMatrix> segments() const { return segments_; }

 private:
  std::vector<double> times_;
  std::vector<CMatrix> segments_;  // times_.size() + 1 propagators
};

}  // namespace zeno
