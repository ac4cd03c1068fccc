#include "zeno/oracle.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace zeno::oracle {

namespace {

using C = std::complex<double>;
using Dense = std::vector<C>;  // row-major n x n

// rho_jk -> rho_jk exp(-i (e_j - e_k) dt)
void free_evolve(Dense& rho, const std::vector<double>& e, double dt) {
  const std::size_t n = e.size();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      rho[j * n + k] *= std::polar(1.0, -(e[j] - e[k]) * dt);
    }
  }
}

// rho -> P rho P + (1-P) rho (1-P) = rho - P rho - rho P + 2 P rho P, P = |v><v|
void kick(Dense& rho, std::vector<C> v) {
  const std::size_t n = v.size();
  double norm = 0.0;
  for (const C& c : v) norm += std::norm(c);
  if (!(norm > 0.0)) throw std::invalid_argument("oracle: zero projector state");
  for (C& c : v) c /= std::sqrt(norm);

  std::vector<C> rv(n, 0.0);   // rho v
  std::vector<C> vr(n, 0.0);   // v^dagger rho
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      rv[j] += rho[j * n + k] * v[k];
      vr[k] += std::conj(v[j]) * rho[j * n + k];
    }
  }
  C vrv = 0.0;
  for (std::size_t j = 0; j < n; ++j) vrv += std::conj(v[j]) * rv[j];
  Dense out(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      out[j * n + k] = rho[j * n + k] - v[j] * vr[k] - rv[j] * std::conj(v[k]) +
                       2.0 * vrv * v[j] * std::conj(v[k]);
    }
  }
  rho = std::move(out);
}

}  // namespace

double analytic_sequence_yield(const SystemSpec& system, const std::vector<TimedProjector>& events) {
  const std::size_t n = system.dim();
  Dense rho(n * n, 0.0);
  rho[system.initial_state * n + system.initial_state] = 1.0;
  double t = 0.0;
  for (const auto& ev : events) {
    if (ev.time < t || ev.time > system.final_time) {
      throw std::invalid_argument("oracle: events must be ordered inside [0, T_f]");
    }
    if (static_cast<std::size_t>(ev.state.size()) != n) throw std::invalid_argument("oracle: state size");
    free_evolve(rho, system.energies, ev.time - t);
    kick(rho, std::vector<C>(ev.state.data(), ev.state.data() + n));
    t = ev.time;
  }
  // The final free segment is diagonal and leaves populations unchanged.
  return rho[system.target_state * n + system.target_state].real();
}

GridSearchResult grid_search_single_projector(const SystemSpec& system, std::size_t resolution) {
  if (resolution == 0) throw std::invalid_argument("grid_search_single_projector: resolution >= 1");
  const std::size_t n = system.dim();
  const double half = 0.5 * system.final_time;
  GridSearchResult best;
  best.yield = -1.0;
  for (std::size_t i = 0; i < resolution; ++i) {
    const double a = (static_cast<double>(i) + 0.5) * (0.5 * std::numbers::pi) / static_cast<double>(resolution);
    for (std::size_t j = 0; j < resolution; ++j) {
      const double phi = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(resolution);
      CVector v = CVector::Zero(static_cast<Eigen::Index>(n));
      v(static_cast<Eigen::Index>(system.initial_state)) = std::cos(a);
      v(static_cast<Eigen::Index>(system.target_state)) = std::polar(std::sin(a), phi);
      const double y = analytic_sequence_yield(system, {{half, v}});
      if (y > best.yield) best = {y, v, a, phi};
    }
  }
  return best;
}

}  // namespace zeno::oracle
