#include "zeno/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace zeno {

namespace {

constexpr double kGridTol = 1e-9;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

RMatrix complex_to_real_block(const CMatrix& g) {
  const Eigen::Index n = g.rows();
  RMatrix out = RMatrix::Zero(2 * n, 2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const Complex v = g(j, k);
      out(2 * j, 2 * k) = v.real();
      out(2 * j, 2 * k + 1) = -v.imag();
      out(2 * j + 1, 2 * k) = v.imag();
      out(2 * j + 1, 2 * k + 1) = v.real();
    }
  }
  return out;
}

kernels::SparseMatrix sparsify(const RMatrix& m) {
  const double scale = m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
  return kernels::SparseMatrix::from_dense(m, 1e-14 * scale);
}

void require_finite_field(const Field& field) {
  if (!is_finite(field)) throw std::domain_error("propagation: non-finite field parameter");
}

struct SnappedWindow {
  std::size_t first_step;
  std::size_t end_step;  // exclusive
  double gamma;
};

std::vector<SnappedWindow> snap_windows(std::span<const KappaWindow> windows, double t0, double h,
                                        std::size_t steps) {
  std::vector<SnappedWindow> out;
  for (const auto& w : windows) {
    const auto snap = [&](double t) {
      const double pos = std::round((t - t0) / h);
      return static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(steps)));
    };
    const std::size_t a = snap(w.t1);
    const std::size_t b = snap(w.t2);
    if (b > a && w.gamma != 0.0) out.push_back({a, b, w.gamma});
  }
  return out;
}

double strength_at_step(const std::vector<SnappedWindow>& windows, std::size_t step) {
  double k = 0.0;
  for (const auto& w : windows) {
    if (step >= w.first_step && step < w.end_step) k += w.gamma;
  }
  return k;
}

// Where an instantaneous event falls on the step grid.
struct EventSlot {
  std::size_t index;  // into the event list
  std::size_t step;   // boundary index if on_grid, containing step otherwise
  double time;
  bool on_grid;
};

std::vector<EventSlot> place_events(std::span<const double> times, double t0, double h,
                                    std::size_t steps) {
  std::vector<EventSlot> out;
  for (std::size_t e = 0; e < times.size(); ++e) {
    const double pos = (times[e] - t0) / h;
    const double nearest = std::round(pos);
    if (std::abs(pos - nearest) <= kGridTol * std::max(1.0, pos)) {
      out.push_back({e, static_cast<std::size_t>(nearest), times[e], true});
    } else {
      const auto s = static_cast<std::size_t>(std::floor(pos));
      out.push_back({e, std::min(s, steps - 1), times[e], false});
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

void PropagationConfig::validate() const {
  if (!std::isfinite(t_start) || !std::isfinite(t_end) || !(t_end > t_start)) {
    throw std::invalid_argument("PropagationConfig: t_end must exceed t_start");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("PropagationConfig: dt must be positive");
  }
}

std::size_t PropagationConfig::steps() const {
  const double n = std::round((t_end - t_start) / dt);
  return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

double PropagationConfig::step() const {
  return (t_end - t_start) / static_cast<double>(steps());
}

void ContinuousObservation::validate() const {
  for (const auto& w : windows) {
    if (!(w.t1 < w.t2)) throw std::invalid_argument("ContinuousObservation: window needs t1 < t2");
    if (!std::isfinite(w.gamma) || w.gamma < 0.0) {
      throw std::invalid_argument("ContinuousObservation: strength must be finite and >= 0");
    }
  }
}

double ContinuousObservation::strength(double t) const {
  double k = 0.0;
  for (const auto& w : windows) {
    if (t > w.t1 && t < w.t2) k += w.gamma;
  }
  return k;
}

DensityMatrix apply_measurement(const DensityMatrix& rho, const MeasurementOperator& op,
                                double degeneracy_tol) {
  return std::visit(overloaded{
                        [&](const Projector& p) { return measure_projector(rho, p); },
                        [&](const HermitianOperator& a) {
                          return measure_observable(rho, a, degeneracy_tol);
                        },
                    },
                    op);
}

double expectation(const DensityMatrix& rho, const MeasurementOperator& op) {
  return std::visit([&](const auto& o) { return zeno::expectation(rho, o); }, op);
}

std::size_t dim_of(const MeasurementOperator& op) {
  return std::visit([](const auto& o) { return o.dim(); }, op);
}

void Trajectory::write_csv(std::ostream& os,
                           std::span<const std::pair<std::size_t, std::size_t>> coherences) const {
  const std::size_t n = states.empty() ? 0 : states.front().dim();
  os << "t";
  for (std::size_t k = 0; k < n; ++k) os << ",p" << k;
  for (const auto& [j, k] : coherences) os << ",re_" << j << k << ",im_" << j << k;
  os << '\n';
  os.precision(12);
  for (std::size_t i = 0; i < times.size(); ++i) {
    os << times[i];
    for (std::size_t k = 0; k < n; ++k) os << ',' << states[i].population(k);
    for (const auto& [j, k] : coherences) {
      const Complex c = states[i](j, k);
      os << ',' << c.real() << ',' << c.imag();
    }
    os << '\n';
  }
}

// ---------------------------------------------------------------------------

namespace coords {

std::size_t hermitian_size(std::size_t n) {
  return n * n;
}

void pack_hermitian(const CMatrix& m, double* x, std::size_t stride) {
  const Eigen::Index n = m.rows();
  std::size_t i = 0;
  for (Eigen::Index j = 0; j < n; ++j) x[(i++) * stride] = m(j, j).real();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j + 1; k < n; ++k) {
      x[(i++) * stride] = m(j, k).real();
      x[(i++) * stride] = m(j, k).imag();
    }
  }
}

CMatrix unpack_hermitian(const double* x, std::size_t n, std::size_t stride) {
  const auto nn = static_cast<Eigen::Index>(n);
  CMatrix m(nn, nn);
  std::size_t i = 0;
  for (Eigen::Index j = 0; j < nn; ++j) m(j, j) = x[(i++) * stride];
  for (Eigen::Index j = 0; j < nn; ++j) {
    for (Eigen::Index k = j + 1; k < nn; ++k) {
      const double re = x[(i++) * stride];
      const double im = x[(i++) * stride];
      m(j, k) = Complex(re, im);
      m(k, j) = Complex(re, -im);
    }
  }
  return m;
}

void pack_vector(const CVector& v, double* x, std::size_t stride) {
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    x[static_cast<std::size_t>(2 * j) * stride] = v(j).real();
    x[static_cast<std::size_t>(2 * j + 1) * stride] = v(j).imag();
  }
}

CVector unpack_vector(const double* x, std::size_t n, std::size_t stride) {
  CVector v(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    v(static_cast<Eigen::Index>(j)) = Complex(x[2 * j * stride], x[(2 * j + 1) * stride]);
  }
  return v;
}

}  // namespace coords

kernels::LinearSystem density_generator(const SystemSpec& system,
                                        std::span<const HermitianOperator> monitored) {
  if (2 + monitored.size() > kernels::kMaxTerms) {
    throw std::invalid_argument("density_generator: too many monitored operators");
  }
  const std::size_t n = system.dim();
  const CMatrix h0 = system.hamiltonian().matrix();
  const CMatrix mu = system.dipole_operator().matrix();
  const Complex i(0.0, 1.0);

  kernels::LinearSystem sys;
  sys.dim = coords::hermitian_size(n);
  sys.terms.push_back(sparsify(coords::hermitian_superoperator(
      n, [&](const CMatrix& r) -> CMatrix { return -i * commutator(h0, r); })));
  sys.terms.push_back(sparsify(coords::hermitian_superoperator(
      n, [&](const CMatrix& r) -> CMatrix { return i * commutator(mu, r); })));
  for (const auto& a : monitored) {
    if (a.dim() != n) throw DimensionError("density_generator: monitored operator dimension");
    const CMatrix& am = a.matrix();
    sys.terms.push_back(sparsify(coords::hermitian_superoperator(n, [&](const CMatrix& r) -> CMatrix {
      return -0.5 * commutator(am, commutator(am, r));
    })));
  }
  return sys;
}

kernels::LinearSystem pure_generator(const SystemSpec& system, double energy_shift) {
  const std::size_t n = system.dim();
  const auto nn = static_cast<Eigen::Index>(n);
  const Complex i(0.0, 1.0);
  const CMatrix h0 = system.hamiltonian().matrix() - energy_shift * CMatrix::Identity(nn, nn);
  const CMatrix mu = system.dipole_operator().matrix();
  kernels::LinearSystem sys;
  sys.dim = 2 * n;
  sys.terms.push_back(sparsify(complex_to_real_block(-i * h0)));
  sys.terms.push_back(sparsify(complex_to_real_block(i * mu)));
  return sys;
}

// ---------------------------------------------------------------------------

namespace {

double midrange_energy(const SystemSpec& system) {
  const auto [lo, hi] = std::minmax_element(system.energies.begin(), system.energies.end());
  return 0.5 * (*lo + *hi);
}

constexpr std::size_t kPureBatchLanes = 8;

// Unitary driver shared by propagate_pure, unitary_propagator and
// propagate_pure_batch. `fields` holds either one field shared by every lane
// or one field per lane. Backward runs start at t_end and step towards t_start.
std::vector<std::vector<CVector>> run_pure(std::span<const CVector> initial,
                                           std::span<const Field> fields, const SystemSpec& system,
                                           const PropagationConfig& config, bool backward,
                                           std::vector<double>* sample_times) {
  config.validate();
  system.validate();
  for (const auto& f : fields) require_finite_field(f);
  const std::size_t n = system.dim();
  const bool shared = fields.size() == 1;
  if (!shared && fields.size() != initial.size()) {
    throw std::invalid_argument("run_pure: one field per lane or a single shared field");
  }
  for (const auto& v : initial) {
    if (static_cast<std::size_t>(v.size()) != n) throw DimensionError("run_pure: state dimension");
  }
  const double shift = midrange_energy(system);
  const kernels::LinearSystem gen = pure_generator(system, shift);
  const std::size_t real_lanes = initial.size();
  const std::size_t lanes = real_lanes == 1 ? 1 : (real_lanes + 3) / 4 * 4;
  const std::size_t steps = config.steps();
  const double h = backward ? -config.step() : config.step();
  const double t0 = backward ? config.t_end : config.t_start;
  const std::size_t samples_per_lane = 2 * steps + 1;

  // Field samples on the half-step grid, lane-innermost.
  std::vector<double> e(samples_per_lane * lanes, 0.0);
  if (shared) {
    std::vector<double> row(samples_per_lane);
    sample_uniform(fields[0], t0, 0.5 * h, samples_per_lane, row.data());
    for (std::size_t m = 0; m < samples_per_lane; ++m) {
      std::fill_n(e.begin() + static_cast<std::ptrdiff_t>(m * lanes), lanes, row[m]);
    }
  } else {
    for (std::size_t l = 0; l < real_lanes; ++l) {
      sample_uniform(fields[l], t0, 0.5 * h, samples_per_lane, e.data() + l, lanes);
    }
  }

  std::vector<double> x(gen.dim * lanes, 0.0);
  for (std::size_t l = 0; l < real_lanes; ++l) coords::pack_vector(initial[l], x.data() + l, lanes);

  std::vector<std::vector<CVector>> samples(real_lanes);
  const auto record = [&](std::size_t step) {
    const double t = t0 + static_cast<double>(step) * h;
    const Complex phase = std::polar(1.0, -shift * (t - t0));
    if (sample_times) sample_times->push_back(t);
    for (std::size_t l = 0; l < real_lanes; ++l) {
      samples[l].push_back(phase * coords::unpack_vector(x.data() + l, n, lanes));
    }
  };

  const kernels::Rk4StepFn step_fn = kernels::select_rk4_step(kernels::active_isa());
  kernels::Rk4Workspace ws;
  record(0);
  for (std::size_t s = 0; s < steps; ++s) {
    const double* const start_set[2] = {nullptr, e.data() + 2 * s * lanes};
    const double* const mid_set[2] = {nullptr, e.data() + (2 * s + 1) * lanes};
    const double* const end_set[2] = {nullptr, e.data() + (2 * s + 2) * lanes};
    step_fn(gen, lanes, h, kernels::CoefficientSet(start_set), kernels::CoefficientSet(mid_set),
            kernels::CoefficientSet(end_set), x.data(), ws);
    const bool last = s + 1 == steps;
    if (last || (config.sample_every > 0 && (s + 1) % config.sample_every == 0)) record(s + 1);
  }
  return samples;
}

}  // namespace

PureTrajectory propagate_pure(const CVector& state0, const SystemSpec& system, const Field& field,
                              const PropagationConfig& config) {
  if (static_cast<std::size_t>(state0.size()) != system.dim()) {
    throw DimensionError("propagate_pure: state dimension does not match the system");
  }
  if (std::abs(state0.norm() - 1.0) > 1e-10) {
    throw InvariantError("propagate_pure: initial state is not normalized");
  }
  PureTrajectory out;
  auto samples = run_pure(std::span<const CVector>(&state0, 1), std::span<const Field>(&field, 1),
                          system, config, false, &out.times);
  out.states = std::move(samples.front());
  return out;
}

CMatrix unitary_propagator(const SystemSpec& system, const Field& field,
                           const PropagationConfig& config) {
  const std::size_t n = system.dim();
  std::vector<CVector> cols;
  for (std::size_t k = 0; k < n; ++k) {
    CVector v = CVector::Zero(static_cast<Eigen::Index>(n));
    v(static_cast<Eigen::Index>(k)) = 1.0;
    cols.push_back(std::move(v));
  }
  PropagationConfig cfg = config;
  cfg.sample_every = 0;
  const auto samples =
      run_pure(cols, std::span<const Field>(&field, 1), system, cfg, false, nullptr);
  const auto nn = static_cast<Eigen::Index>(n);
  CMatrix u(nn, nn);
  for (std::size_t k = 0; k < n; ++k) u.col(static_cast<Eigen::Index>(k)) = samples[k].back();
  return u;
}

std::vector<CVector> propagate_pure_batch(const SystemSpec& system, std::span<const CVector> states,
                                          std::span<const Field> fields,
                                          const PropagationConfig& config, PureDirection direction) {
  if (fields.size() != states.size()) {
    throw std::invalid_argument("propagate_pure_batch: one field per state");
  }
  PropagationConfig cfg = config;
  cfg.sample_every = 0;
  std::vector<CVector> out;
  out.reserve(states.size());
  for (std::size_t first = 0; first < states.size(); first += kPureBatchLanes) {
    const std::size_t count = std::min(kPureBatchLanes, states.size() - first);
    const auto samples = run_pure(states.subspan(first, count), fields.subspan(first, count), system,
                                  cfg, direction == PureDirection::backward, nullptr);
    for (const auto& lane : samples) out.push_back(lane.back());
  }
  return out;
}

// ---------------------------------------------------------------------------

DensityPropagator::DensityPropagator(SystemSpec system, std::vector<HermitianOperator> monitored,
                                     std::vector<double> event_times, PropagationConfig config,
                                     kernels::Isa isa)
    : system_(std::move(system)),
      monitored_(std::move(monitored)),
      event_times_(std::move(event_times)),
      config_(config),
      step_(kernels::select_rk4_step(isa)) {
  config_.validate();
  system_.validate();
  for (std::size_t e = 0; e < event_times_.size(); ++e) {
    const double t = event_times_[e];
    if (!(t >= config_.t_start - 1e-12 && t <= config_.t_end + 1e-12)) {
      std::ostringstream os;
      os << "DensityPropagator: event time " << t << " outside [" << config_.t_start << ", "
         << config_.t_end << "]";
      throw std::invalid_argument(os.str());
    }
    if (e > 0 && t < event_times_[e - 1]) {
      throw std::invalid_argument("DensityPropagator: event times must be non-decreasing");
    }
  }
  generator_ = density_generator(system_, monitored_);
}

std::vector<LaneOutput> DensityPropagator::run(const DensityMatrix& rho0,
                                               std::span<const LaneInput> lanes) const {
  const std::size_t n = system_.dim();
  if (rho0.dim() != n) throw DimensionError("DensityPropagator: initial state dimension");
  for (const auto& lane : lanes) {
    require_finite_field(lane.field);
    if (lane.windows.size() != monitored_.size()) {
      throw std::invalid_argument("DensityPropagator: one window list per monitored operator");
    }
    for (std::size_t m = 0; m < monitored_.size(); ++m) {
      ContinuousObservation{monitored_[m], lane.windows[m]}.validate();
    }
    if (lane.events.size() != event_times_.size()) {
      throw std::invalid_argument("DensityPropagator: one event slot per event time");
    }
    for (const auto& ev : lane.events) {
      if (ev && dim_of(ev->op) != n) throw DimensionError("DensityPropagator: event operator dimension");
    }
  }
  std::vector<LaneOutput> out(lanes.size());
  for (std::size_t first = 0; first < lanes.size(); first += kBatchLanes) {
    const std::size_t count = std::min(kBatchLanes, lanes.size() - first);
    run_chunk(rho0, lanes.subspan(first, count), std::span<LaneOutput>(out).subspan(first, count));
  }
  return out;
}

void DensityPropagator::run_chunk(const DensityMatrix& rho0, std::span<const LaneInput> in,
                                  std::span<LaneOutput> out) const {
  const std::size_t n = system_.dim();
  const std::size_t d = generator_.dim;
  const std::size_t real_lanes = in.size();
  const std::size_t lanes = real_lanes == 1 ? 1 : (real_lanes + 3) / 4 * 4;
  const std::size_t steps = config_.steps();
  const double h = config_.step();
  const double t0 = config_.t_start;
  const std::size_t monitors = monitored_.size();
  const std::size_t terms = 2 + monitors;

  // Field on the half-step grid, lane-interleaved.
  std::vector<double> efield((2 * steps + 1) * lanes, 0.0);
  std::vector<std::vector<std::vector<SnappedWindow>>> windows(monitors);
  for (std::size_t m = 0; m < monitors; ++m) windows[m].resize(real_lanes);
  for (std::size_t l = 0; l < real_lanes; ++l) {
    sample_uniform(in[l].field, t0, 0.5 * h, 2 * steps + 1, efield.data() + l, lanes);
    for (std::size_t m = 0; m < monitors; ++m) {
      windows[m][l] = snap_windows(in[l].windows[m], t0, h, steps);
    }
  }
  std::vector<double> kappa(monitors * lanes, 0.0);
  std::vector<double> sub(3 * lanes, 0.0);

  std::vector<double> x(d * lanes);
  {
    std::vector<double> packed(d);
    coords::pack_hermitian(rho0.matrix(), packed.data(), 1);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t l = 0; l < lanes; ++l) x[i * lanes + l] = packed[i];
    }
  }

  const auto lane_state = [&](std::size_t l) {
    return DensityMatrix::unchecked(coords::unpack_hermitian(x.data() + l, n, lanes));
  };
  const auto record = [&](double t) {
    for (std::size_t l = 0; l < real_lanes; ++l) {
      out[l].trajectory.times.push_back(t);
      out[l].trajectory.states.push_back(lane_state(l));
    }
  };
  const auto fire = [&](std::size_t event) {
    for (std::size_t l = 0; l < real_lanes; ++l) {
      DensityMatrix before = lane_state(l);
      if (const auto& ev = in[l].events[event]) {
        const DensityMatrix after = apply_measurement(before, ev->op, ev->degeneracy_tol);
        coords::pack_hermitian(after.matrix(), x.data() + l, lanes);
      }
      out[l].pre_event_states.push_back(std::move(before));
    }
  };

  const std::vector<EventSlot> slots = place_events(event_times_, t0, h, steps);
  std::size_t next_slot = 0;

  std::vector<const double*> c_start(terms), c_mid(terms), c_end(terms);
  c_start[0] = c_mid[0] = c_end[0] = nullptr;
  for (std::size_t m = 0; m < monitors; ++m) {
    c_start[2 + m] = c_mid[2 + m] = c_end[2 + m] = kappa.data() + m * lanes;
  }
  kernels::Rk4Workspace ws;

  const bool sampling = config_.sample_every > 0;
  if (sampling) record(t0);

  for (std::size_t s = 0; s <= steps; ++s) {
    while (next_slot < slots.size() && slots[next_slot].on_grid && slots[next_slot].step == s) {
      fire(slots[next_slot].index);
      ++next_slot;
    }
    if (s == steps) break;

    for (std::size_t m = 0; m < monitors; ++m) {
      for (std::size_t l = 0; l < real_lanes; ++l) {
        kappa[m * lanes + l] = strength_at_step(windows[m][l], s);
      }
    }

    const double ts = t0 + static_cast<double>(s) * h;
    if (next_slot < slots.size() && !slots[next_slot].on_grid && slots[next_slot].step == s) {
      // Split the step at every event inside it.
      double t = ts;
      const double t_next = ts + h;
      while (true) {
        const bool has_event =
            next_slot < slots.size() && !slots[next_slot].on_grid && slots[next_slot].step == s;
        const double t_stop = has_event ? slots[next_slot].time : t_next;
        const double hh = t_stop - t;
        if (hh > 0.0) {
          for (std::size_t l = 0; l < real_lanes; ++l) {
            sub[l] = evaluate(in[l].field, t);
            sub[lanes + l] = evaluate(in[l].field, t + 0.5 * hh);
            sub[2 * lanes + l] = evaluate(in[l].field, t_stop);
          }
          c_start[1] = sub.data();
          c_mid[1] = sub.data() + lanes;
          c_end[1] = sub.data() + 2 * lanes;
          step_(generator_, lanes, hh, c_start, c_mid, c_end, x.data(), ws);
          t = t_stop;
        }
        if (!has_event) break;
        fire(slots[next_slot].index);
        ++next_slot;
      }
    } else {
      c_start[1] = efield.data() + (2 * s) * lanes;
      c_mid[1] = efield.data() + (2 * s + 1) * lanes;
      c_end[1] = efield.data() + (2 * s + 2) * lanes;
      step_(generator_, lanes, h, c_start, c_mid, c_end, x.data(), ws);
    }

    if (sampling && ((s + 1) % config_.sample_every == 0 || s + 1 == steps)) {
      record(t0 + static_cast<double>(s + 1) * h);
    }
  }

  for (std::size_t l = 0; l < real_lanes; ++l) out[l].final_state = lane_state(l);
}

PropagationResult propagate(const DensityMatrix& rho0, const SystemSpec& system, const Field& field,
                            std::span<const ContinuousObservation> continuous,
                            std::span<const InstantaneousEvent> events,
                            const PropagationConfig& config) {
  std::vector<HermitianOperator> monitored;
  LaneInput lane{field, {}, {}};
  for (const auto& c : continuous) {
    c.validate();
    monitored.push_back(c.op);
    lane.windows.push_back(c.windows);
  }
  std::vector<InstantaneousEvent> sorted(events.begin(), events.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.time < b.time; });
  std::vector<double> times;
  for (const auto& e : sorted) {
    times.push_back(e.time);
    lane.events.emplace_back(Measurement{e.op, e.degeneracy_tol});
  }
  if (rho0.dim() != system.dim()) throw DimensionError("propagate: initial state dimension");
  DensityPropagator prop(system, std::move(monitored), std::move(times), config);
  auto outs = prop.run(rho0, std::span<const LaneInput>(&lane, 1));
  return {std::move(outs.front().final_state), std::move(outs.front().trajectory)};
}

}  // namespace zeno
