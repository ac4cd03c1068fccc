#pragma once

// Time evolution under
//
//   d rho/dt = -i [H0 - mu E(t), rho] - 1/2 sum_m kappa_m(t) [A_m, [A_m, rho]]
//
// (hbar = 1, energies in rad/fs, time in fs) with instantaneous measurements
// applied at exact event times. Integration is fixed-step classic RK4 on
// real coordinates; see kernels/linear_ode.hpp.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "zeno/control_field.hpp"
#include "zeno/kernels/linear_ode.hpp"
#include "zeno/linalg.hpp"
#include "zeno/quantum_core.hpp"
#include "zeno/system.hpp"

namespace zeno {

inline constexpr double kDefaultTimeStep = 0.01;  // fs

struct PropagationConfig {
  double t_start = 0.0;
  double t_end = 200.0;
  double dt = kDefaultTimeStep;
  /// Record a trajectory sample every this many steps (0: none).
  std::size_t sample_every = 0;

  /// Throws std::invalid_argument unless t_end > t_start and dt > 0.
  void validate() const;
  /// Number of RK4 steps; the effective step is (t_end - t_start) / steps().
  std::size_t steps() const;
  double step() const;
};

/// kappa(t) = gamma for t1 < t < t2. Window edges are snapped to the nearest
/// step boundary of the propagation grid.
struct KappaWindow {
  double t1 = 0.0;
  double t2 = 0.0;
  double gamma = 0.0;
};

struct ContinuousObservation {
  HermitianOperator op;
  std::vector<KappaWindow> windows;

  /// Throws std::invalid_argument for t1 >= t2 or non-finite / negative gamma.
  void validate() const;
  /// Sum of the strengths of the windows containing t.
  double strength(double t) const;
};

using MeasurementOperator = std::variant<Projector, HermitianOperator>;

/// One instantaneous measurement (projector kick or observable dephasing).
struct Measurement {
  MeasurementOperator op;
  double degeneracy_tol = kDefaultDegeneracyTol;
};

struct InstantaneousEvent {
  double time = 0.0;
  MeasurementOperator op;
  double degeneracy_tol = kDefaultDegeneracyTol;
};

DensityMatrix apply_measurement(const DensityMatrix& rho, const MeasurementOperator& op,
                                double degeneracy_tol = kDefaultDegeneracyTol);
double expectation(const DensityMatrix& rho, const MeasurementOperator& op);
std::size_t dim_of(const MeasurementOperator& op);

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;

  /// Columns: t, p0..p{n-1}, then re_jk,im_jk for each requested coherence.
  void write_csv(std::ostream& os,
                 std::span<const std::pair<std::size_t, std::size_t>> coherences = {}) const;
};

struct PropagationResult {
  DensityMatrix final_state;
  Trajectory trajectory;
};

PropagationResult propagate(const DensityMatrix& rho0, const SystemSpec& system, const Field& field,
                            std::span<const ContinuousObservation> continuous,
                            std::span<const InstantaneousEvent> events,
                            const PropagationConfig& config);

struct PureTrajectory {
  std::vector<double> times;
  std::vector<CVector> states;
};

/// Unitary evolution i dC/dt = H(t) C. Returns the initial state, every
/// sample_every-th step, and the final state.
PureTrajectory propagate_pure(const CVector& state0, const SystemSpec& system, const Field& field,
                              const PropagationConfig& config);

/// Propagator U(t_end, t_start) built column by column with the same
/// integrator as propagate_pure.
CMatrix unitary_propagator(const SystemSpec& system, const Field& field,
                           const PropagationConfig& config);

enum class PureDirection { forward, backward };

/// Batched unitary evolution, one field per state. Forward maps states given
/// at t_start to t_end; backward maps states given at t_end to t_start, i.e.
/// applies U(t_end, t_start)^dagger. Lanes run in SIMD-width groups.
std::vector<CVector> propagate_pure_batch(const SystemSpec& system, std::span<const CVector> states,
                                          std::span<const Field> fields,
                                          const PropagationConfig& config,
                                          PureDirection direction = PureDirection::forward);

// ---------------------------------------------------------------------------
// Real-coordinate representations used by the kernels.

namespace coords {

/// Hermitian n x n matrix <-> n^2 reals: diagonal first, then (Re, Im) of
/// each upper-triangular entry in row-major order.
std::size_t hermitian_size(std::size_t n);
void pack_hermitian(const CMatrix& m, double* x, std::size_t stride);
CMatrix unpack_hermitian(const double* x, std::size_t n, std::size_t stride);

/// Complex n-vector <-> 2n reals, (Re, Im) interleaved.
void pack_vector(const CVector& v, double* x, std::size_t stride);
CVector unpack_vector(const double* x, std::size_t n, std::size_t stride);

/// Real matrix of the linear map rho -> f(rho) restricted to Hermitian
/// matrices; f must map Hermitian matrices to Hermitian matrices.
template <class F>
RMatrix hermitian_superoperator(std::size_t n, F&& f);

}  // namespace coords

/// Generator terms over Hermitian coordinates: [0] -i[H0, .], [1] +i[mu, .]
/// (coefficient E(t)), then -1/2 [A_m, [A_m, .]] per monitored operator
/// (coefficient kappa_m(t)).
kernels::LinearSystem density_generator(const SystemSpec& system,
                                        std::span<const HermitianOperator> monitored);

/// Generator terms over vector coordinates: [0] -i(H0 - shift), [1] +i mu.
kernels::LinearSystem pure_generator(const SystemSpec& system, double energy_shift);

/// Per-lane inputs of a batched density-matrix propagation.
struct LaneInput {
  Field field;
  /// One window list per monitored operator of the propagator.
  std::vector<std::vector<KappaWindow>> windows;
  /// One entry per event time of the propagator; nullopt skips the event.
  std::vector<std::optional<Measurement>> events;
};

struct LaneOutput {
  DensityMatrix final_state = DensityMatrix::basis_state(1, 0);
  /// State immediately before each event (including skipped ones).
  std::vector<DensityMatrix> pre_event_states;
  Trajectory trajectory;
};

/// Propagates many independent density matrices that share a system,
/// monitored operators, event times and time grid. Lanes are processed in
/// SIMD-width groups by the active kernel.
class DensityPropagator {
 public:
  static constexpr std::size_t kBatchLanes = 8;

  DensityPropagator(SystemSpec system, std::vector<HermitianOperator> monitored,
                    std::vector<double> event_times, PropagationConfig config,
                    kernels::Isa isa = kernels::active_isa());

  std::vector<LaneOutput> run(const DensityMatrix& rho0, std::span<const LaneInput> lanes) const;

  const SystemSpec& system() const { return system_; }
  const PropagationConfig& config() const { return config_; }
  std::span<const double> event_times() const { return event_times_; }

 private:
  void run_chunk(const DensityMatrix& rho0, std::span<const LaneInput> lanes,
                 std::span<LaneOutput> out) const;

  SystemSpec system_;
  std::vector<HermitianOperator> monitored_;
  std::vector<double> event_times_;
  PropagationConfig config_;
  kernels::LinearSystem generator_;
  kernels::Rk4StepFn step_;
};

// ---------------------------------------------------------------------------

template <class F>
RMatrix coords::hermitian_superoperator(std::size_t n, F&& f) {
  const std::size_t d = hermitian_size(n);
  RMatrix out(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  std::vector<double> basis(d, 0.0);
  std::vector<double> column(d, 0.0);
  for (std::size_t c = 0; c < d; ++c) {
    basis.assign(d, 0.0);
    basis[c] = 1.0;
    const CMatrix image = f(unpack_hermitian(basis.data(), n, 1));
    pack_hermitian(image, column.data(), 1);
    for (std::size_t r = 0; r < d; ++r) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = column[r];
    }
  }
  return out;
}

}  // namespace zeno
