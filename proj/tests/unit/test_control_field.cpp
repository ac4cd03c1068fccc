#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "zeno/control_field.hpp"
#include "zeno/models.hpp"

using namespace zeno;

namespace {

ShapedField random_shaped(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(0.0, 2.0);
  std::uniform_real_distribution<double> phase(-10.0, 10.0);
  std::vector<FieldComponent> c;
  for (double w : model1().transition_frequencies) c.push_back({amp(rng), w, phase(rng)});
  return ShapedField(c, 200.0, 30.0);
}

}  // namespace

TEST_CASE("evaluate examples") {
  const ShapedField single({{1.0, 0.0, 0.0}}, 200.0, 30.0);
  CHECK(evaluate(single, 100.0) == doctest::Approx(1.0));

  const ShapedField f({{0.3, 1.5, 0.2}, {0.7, 0.9, 1.0}}, 200.0, 30.0);
  CHECK(std::abs(evaluate(f, 100.0 + 5 * 30.0)) <= 4e-6 * 1.0);
  CHECK(std::abs(evaluate(f, 100.0 - 5 * 30.0)) <= 4e-6 * 1.0);

  const RectangularField r{0.5, 1.0, 200.0};
  CHECK(evaluate(r, std::numbers::pi) == doctest::Approx(-0.5));
  CHECK(evaluate(r, 201.0) == 0.0);
  CHECK(evaluate(r, -1.0) == 0.0);
  CHECK(evaluate(ZeroField{}, 50.0) == 0.0);
}

TEST_CASE("fluence examples") {
  const ShapedField f({{0.1, 1.0, 0.0}, {0.2, 2.0, 0.0}}, 200.0, 30.0);
  CHECK(fluence(f) == doctest::Approx(0.05));
  CHECK(fluence(ShapedField({{0.0, 1.0, 0.0}, {0.0, 2.0, 0.0}}, 200.0, 30.0)) == 0.0);
  CHECK(fluence(RectangularField{0.3, 1.0, 200.0}) == doctest::Approx(0.09));
  CHECK(fluence(model2_fixed_field()) == doctest::Approx(0.0196));
}

TEST_CASE("model 2 fixed field at the envelope peak") {
  const ShapedField f = model2_fixed_field();
  double expected = 0.0;
  for (double w : model2().transition_frequencies) expected += 0.07 * std::cos(w * 100.0);
  CHECK(evaluate(f, 100.0) == doctest::Approx(expected).epsilon(1e-14));
  // Phases zero: E(T/2 + u) / cos-structure matches the direct formula off-peak too.
  for (double u : {-37.0, 12.5, 80.0}) {
    double direct = 0.0;
    for (double w : model2().transition_frequencies) direct += 0.07 * std::cos(w * (100.0 + u));
    CHECK(evaluate(f, 100.0 + u) == doctest::Approx(direct * f.envelope(100.0 + u)).epsilon(1e-13));
  }
}

TEST_CASE("bounded by the amplitude sum and phase-independent fluence") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> t(-50.0, 250.0);
  for (int c = 0; c < 1000; ++c) {
    const ShapedField f = random_shaped(rng);
    const double bound = amplitude_sum(f);
    for (int k = 0; k < 10; ++k) REQUIRE(std::abs(evaluate(f, t(rng))) <= bound + 1e-15);
    std::vector<FieldComponent> shifted = f.components();
    for (auto& comp : shifted) comp.phase += 1.234;
    REQUIRE(fluence(ShapedField(shifted, 200.0, 30.0)) == doctest::Approx(fluence(f)).epsilon(1e-15));
    for (const auto& comp : f.components()) {
      REQUIRE(comp.phase >= 0.0);
      REQUIRE(comp.phase < 2.0 * std::numbers::pi);
    }
  }
}

TEST_CASE("sample_uniform agrees with evaluate in both directions") {
  std::mt19937_64 rng(22);
  for (int c = 0; c < 20; ++c) {
    const ShapedField f = random_shaped(rng);
    const std::size_t n = 20001;
    std::vector<double> fwd(n);
    std::vector<double> bwd(n);
    sample_uniform(f, 0.0, 0.01, n, fwd.data());
    sample_uniform(f, 200.0, -0.01, n, bwd.data());
    const double scale = amplitude_sum(f);
    for (std::size_t m = 0; m < n; m += 7) {
      REQUIRE(std::abs(fwd[m] - evaluate(f, 0.01 * static_cast<double>(m))) <= 1e-11 * scale);
      REQUIRE(std::abs(bwd[m] - evaluate(f, 200.0 - 0.01 * static_cast<double>(m))) <= 1e-11 * scale);
    }
  }
  const RectangularField r{0.8, 1.0, 200.0};
  std::vector<double> s(300);
  sample_uniform(r, 190.0, 0.05, s.size(), s.data());
  for (std::size_t m = 0; m < s.size(); ++m) {
    REQUIRE(std::abs(s[m] - evaluate(r, 190.0 + 0.05 * static_cast<double>(m))) <= 1e-12);
  }
}

TEST_CASE("validation, spectrum and CSV export") {
  CHECK_THROWS_AS(ShapedField({{-0.1, 1.0, 0.0}}, 200.0, 30.0), std::invalid_argument);
  CHECK_THROWS_AS(ShapedField({{0.1, 1.0, 0.0}}, 200.0, 0.0), std::invalid_argument);
  CHECK(wrap_phase(-0.5) == doctest::Approx(2.0 * std::numbers::pi - 0.5));
  CHECK(is_zero(ShapedField({{0.0, 1.0, 0.0}}, 200.0, 30.0)));
  CHECK_FALSE(is_finite(RectangularField{std::nan(""), 1.0, 200.0}));

  const auto lines = power_spectrum(model2_fixed_field());
  REQUIRE(lines.size() == 4);
  for (const auto& l : lines) CHECK(l.power == doctest::Approx(0.0049));

  std::ostringstream os;
  write_field_csv(os, model2_fixed_field(), 0.0, 1.0, 0.5);
  CHECK(os.str().rfind("t,E\n", 0) == 0);
  int rows = 0;
  for (char ch : os.str()) rows += ch == '\n';
  CHECK(rows == 4);
}
