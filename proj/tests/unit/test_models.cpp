#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "support.hpp"
#include "zeno/control_field.hpp"
#include "zeno/dynamics.hpp"
#include "zeno/models.hpp"
#include "zeno/quantum_core.hpp"

using namespace zeno;
using zeno::test::basis;

namespace {

PropagationConfig config(double t_end) {
  PropagationConfig c;
  c.t_end = t_end;
  return c;
}

double final_yield(const SystemSpec& s, const Field& f) {
  const auto out = propagate(DensityMatrix::basis_state(s.dim(), s.initial_state), s, f, {}, {},
                             config(s.final_time));
  return out.final_state.population(s.target_state);
}

}  // namespace

TEST_CASE("model 1 ladder") {
  const SystemSpec s = model1();
  REQUIRE(s.dim() == 5);
  CHECK(s.energies[1] - s.energies[0] == doctest::Approx(1.511).epsilon(1e-12));
  CHECK(s.energies[2] - s.energies[1] == doctest::Approx(1.181).epsilon(1e-12));
  CHECK(s.energies[3] - s.energies[2] == doctest::Approx(0.761).epsilon(1e-12));
  CHECK(s.energies[4] - s.energies[3] == doctest::Approx(0.553).epsilon(1e-12));
  CHECK(s.dipole(0, 1) == 0.5855);
  CHECK(s.dipole(1, 2) == 0.7079);
  CHECK(s.dipole(2, 3) == 0.8352);
  CHECK(s.dipole(3, 4) == 0.9281);
  for (Eigen::Index i = 0; i < 5; ++i) {
    for (Eigen::Index j = 0; j < 5; ++j) {
      CHECK(s.dipole(i, j) == s.dipole(j, i));
      if (std::abs(i - j) != 1) CHECK(s.dipole(i, j) == 0.0);
    }
  }
  CHECK(s.final_time == 200.0);
  CHECK(s.sigma == 30.0);
  CHECK(s.alpha == 0.05);
  CHECK(s.initial_state == 0);
  CHECK(s.target_state == 4);
  CHECK(final_yield(s, ZeroField{}) == 0.0);
}

TEST_CASE("model 2 shares model 1 and its fixed field drives 12.93%") {
  const SystemSpec a = model1();
  const SystemSpec b = model2();
  CHECK(a.energies == b.energies);
  CHECK(max_abs(a.dipole - b.dipole) == 0.0);
  const ShapedField f = model2_fixed_field();
  CHECK(fluence(f) == doctest::Approx(0.0196));
  CHECK(std::abs(final_yield(b, f) - 0.1293) <= 5e-4);
}

TEST_CASE("model 3 symmetric three-level system") {
  const SystemSpec s = model3();
  REQUIRE(s.dim() == 3);
  CHECK(s.energies == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(s.initial_state == 0);
  CHECK(s.target_state == 1);
  CHECK(s.alpha == 0.01);
  const auto e = eigendecompose(s.dipole_operator());
  CHECK(e.eigenvalues(0) == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-12));
  CHECK(std::abs(e.eigenvalues(1)) <= 1e-12);
  CHECK(e.eigenvalues(2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(final_yield(s, ZeroField{}) == 0.0);
}

TEST_CASE("model 4 degenerate transitions") {
  const SystemSpec s = model4();
  REQUIRE(s.dim() == 5);
  const auto e = [&](const char* l) { return s.energies[s.level(l)]; };
  CHECK(e("1") - e("0") == doctest::Approx(3.3));
  CHECK(e("2") - e("1") == doctest::Approx(2.6));
  CHECK(e("1'") - e("1") == doctest::Approx(0.8));
  CHECK(e("3") - e("2") == doctest::Approx(0.8));
  CHECK(s.dipole(s.level("0"), s.level("1")) == 0.13);
  CHECK(s.dipole(s.level("1"), s.level("2")) == 0.15);
  CHECK(s.dipole(s.level("2"), s.level("3")) == 0.23);
  CHECK(s.dipole(s.level("1"), s.level("1'")) == 0.21);
  CHECK(s.transition_frequencies.size() == 3);
  CHECK(s.target_state == s.level("3"));
  CHECK(s.alpha == 0.01);
}

TEST_CASE("catalog lookup and validation") {
  const auto all = model_catalog();
  REQUIRE(all.size() == 4);
  for (const auto& s : all) {
    CHECK_NOTHROW(s.validate());
    CHECK(model_by_id(s.id).id == s.id);
  }
  CHECK_THROWS_AS(model_by_id("model5"), std::out_of_range);
  CHECK_THROWS_AS(model1().level("9"), std::out_of_range);

  SystemSpec bad = model1();
  bad.transition_frequencies[0] += 1e-6;
  CHECK_THROWS_AS(bad.validate(), InvariantError);
  bad = model1();
  bad.dipole(0, 1) = 0.1;
  CHECK_THROWS_AS(bad.validate(), InvariantError);
}

TEST_CASE("symmetry invariant examples") {
  CHECK(symmetry_invariant(basis(3, 0)) == 0.0);
  CHECK(symmetry_invariant(basis(3, 1)) == doctest::Approx(0.5));
  CVector c(3);
  c << 0.5, Complex(0.0, -1.0 / std::sqrt(2.0)), -0.5;
  CHECK(symmetry_invariant(c) <= 1e-15);
}

TEST_CASE("coherent bound check") {
  CHECK(coherent_bound_check(DensityMatrix::basis_state(3, 0)).holds);

  CVector c(3);
  c << 0.5, Complex(0.0, 1.0 / std::sqrt(2.0)), -0.5;
  const auto edge = coherent_bound_check(DensityMatrix::pure(c));
  CHECK(edge.holds);
  CHECK(edge.target_population == doctest::Approx(0.5));
  CHECK(std::abs(edge.relation_residual) <= 1e-15);

  CHECK_FALSE(coherent_bound_check(DensityMatrix::basis_state(3, 1)).holds);

  // Measuring P0 mid-evolution breaks the relation.
  const SystemSpec s = model3();
  const RectangularField f{0.05, 1.0, s.final_time};
  PropagationConfig cfg = config(s.final_time);
  const auto coherent = propagate(DensityMatrix::basis_state(3, 0), s, f, {}, {}, cfg);
  CHECK(coherent_bound_check(coherent.final_state).holds);
  const InstantaneousEvent ev{100.0, Projector::basis(3, 0)};
  const auto measured = propagate(DensityMatrix::basis_state(3, 0), s, f, {}, {&ev, 1}, cfg);
  const auto r = coherent_bound_check(measured.final_state);
  CHECK_FALSE(r.holds);
  CHECK(std::abs(r.relation_residual) > 1e-3);
}
