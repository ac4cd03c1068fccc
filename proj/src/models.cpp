#include "zeno/models.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace zeno {

namespace {

void couple(RMatrix& mu, Eigen::Index a, Eigen::Index b, double v) {
  mu(a, b) = v;
  mu(b, a) = v;
}

SystemSpec ladder(std::string id, std::string description) {
  const std::vector<double> omega = {1.511, 1.181, 0.761, 0.553};
  const std::vector<double> dip = {0.5855, 0.7079, 0.8352, 0.9281};
  SystemSpec s;
  s.id = std::move(id);
  s.description = std::move(description);
  s.labels = {"0", "1", "2", "3", "4"};
  s.energies = {0.0};
  std::partial_sum(omega.begin(), omega.end(), std::back_inserter(s.energies));
  s.dipole = RMatrix::Zero(5, 5);
  for (Eigen::Index i = 0; i < 4; ++i) couple(s.dipole, i, i + 1, dip[static_cast<std::size_t>(i)]);
  s.transition_frequencies = omega;
  s.initial_state = 0;
  s.target_state = 4;
  s.final_time = 200.0;
  s.sigma = 30.0;
  s.alpha = 0.05;
  s.validate();
  return s;
}

}  // namespace

SystemSpec model1() {
  return ladder("model1", "five-level ladder, |0> -> |4>, field fights/cooperates with observation");
}

SystemSpec model2() {
  return ladder("model2", "five-level ladder, |0> -> |4>, optimized projector sequences");
}

SystemSpec model3() {
  SystemSpec s;
  s.id = "model3";
  s.description = "symmetric three-level system, |0> -> |1>, rectangular resonant pulse";
  s.labels = {"0", "1", "2"};
  s.energies = {1.0, 2.0, 3.0};
  s.dipole = RMatrix::Zero(3, 3);
  couple(s.dipole, 0, 1, 1.0);
  couple(s.dipole, 1, 2, 1.0);
  s.transition_frequencies = {1.0};
  s.initial_state = 0;
  s.target_state = 1;
  s.final_time = 200.0;
  s.sigma = 30.0;
  s.alpha = 0.01;
  s.dipole_unit = "dimensionless";
  s.validate();
  return s;
}

SystemSpec model4() {
  SystemSpec s;
  s.id = "model4";
  s.description = "five levels with degenerate 1-1' and 2-3 transitions, |0> -> |3>";
  s.labels = {"0", "1", "1'", "2", "3"};
  // w01 = 3.3, w12 = 2.6, w11' = w23 = 0.8
  s.energies = {0.0, 3.3, 4.1, 5.9, 6.7};
  s.dipole = RMatrix::Zero(5, 5);
  couple(s.dipole, 0, 1, 0.13);
  couple(s.dipole, 1, 3, 0.15);
  couple(s.dipole, 3, 4, 0.23);
  couple(s.dipole, 1, 2, 0.21);
  s.transition_frequencies = {3.3, 2.6, 0.8};
  s.initial_state = 0;
  s.target_state = 4;
  s.final_time = 200.0;
  s.sigma = 30.0;
  s.alpha = 0.01;
  s.validate();
  return s;
}

std::vector<SystemSpec> model_catalog() {
  return {model1(), model2(), model3(), model4()};
}

SystemSpec model_by_id(std::string_view id) {
  for (auto& s : model_catalog()) {
    if (s.id == id) return s;
  }
  throw std::out_of_range("unknown model '" + std::string(id) + "'");
}

ShapedField model2_fixed_field() {
  const SystemSpec s = model2();
  std::vector<FieldComponent> comps;
  for (double w : s.transition_frequencies) comps.push_back({0.07, w, 0.0});
  return ShapedField(std::move(comps), s.final_time, s.sigma);
}

double symmetry_invariant(const CVector& c) {
  if (c.size() != 3) throw DimensionError("symmetry_invariant: expected a 3-vector");
  return std::abs(c(0) * c(2) - 0.5 * c(1) * c(1));
}

CoherentBoundReport coherent_bound_check(const DensityMatrix& rho) {
  if (rho.dim() != 3) throw DimensionError("coherent_bound_check: expected a 3-level state");
  CoherentBoundReport r;
  const double p0 = rho.population(0);
  const double p1 = rho.population(1);
  const double p2 = rho.population(2);
  r.relation_residual = p0 * p2 - 0.25 * p1 * p1;
  r.target_population = p1;
  r.holds = std::abs(r.relation_residual) <= 1e-6 && p1 <= 0.5 + 1e-6;
  return r;
}

}  // namespace zeno
