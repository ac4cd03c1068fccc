#include <cmath>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "zeno/dynamics.hpp"
#include "zeno/kernels/linear_ode.hpp"
#include "zeno/models.hpp"

using namespace zeno;

namespace {

kernels::LinearSystem random_system(std::mt19937_64& rng, std::size_t dim, std::size_t terms) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::bernoulli_distribution keep(0.3);
  kernels::LinearSystem sys;
  sys.dim = dim;
  for (std::size_t t = 0; t < terms; ++t) {
    RMatrix m = RMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (keep(rng)) m(i, j) = u(rng);
      }
    }
    sys.terms.push_back(kernels::SparseMatrix::from_dense(m));
  }
  return sys;
}

struct Coeffs {
  std::vector<std::vector<double>> values;
  std::vector<const double*> ptrs;

  Coeffs(std::mt19937_64& rng, std::size_t terms, std::size_t lanes) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (std::size_t t = 0; t < terms; ++t) {
      std::vector<double> v(lanes);
      for (auto& x : v) x = u(rng);
      values.push_back(std::move(v));
    }
    for (std::size_t t = 0; t < terms; ++t) ptrs.push_back(t == 0 ? nullptr : values[t].data());
  }
  kernels::CoefficientSet set() const { return ptrs; }
};

}  // namespace

TEST_CASE("CSR conversion round-trips") {
  std::mt19937_64 rng(41);
  const auto sys = random_system(rng, 9, 1);
  const RMatrix dense = sys.terms[0].to_dense();
  CHECK((kernels::SparseMatrix::from_dense(dense).to_dense() - dense).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("scalar apply matches a dense reference") {
  std::mt19937_64 rng(42);
  const std::size_t dim = 12;
  const std::size_t lanes = 5;
  const auto sys = random_system(rng, dim, 3);
  const Coeffs c(rng, 3, lanes);
  std::normal_distribution<double> g;
  std::vector<double> x(dim * lanes);
  for (auto& v : x) v = g(rng);
  std::vector<double> out(dim * lanes);
  kernels::apply_scalar(sys, lanes, c.set(), x.data(), out.data());
  for (std::size_t l = 0; l < lanes; ++l) {
    RVector xl(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) xl(static_cast<Eigen::Index>(i)) = x[i * lanes + l];
    RVector ref = RVector::Zero(static_cast<Eigen::Index>(dim));
    for (std::size_t t = 0; t < 3; ++t) {
      const double w = t == 0 ? 1.0 : c.values[t][l];
      ref += w * (sys.terms[t].to_dense() * xl);
    }
    for (std::size_t i = 0; i < dim; ++i) REQUIRE(out[i * lanes + l] == doctest::Approx(ref(static_cast<Eigen::Index>(i))).epsilon(1e-13));
  }
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
  if (!kernels::isa_available(kernels::Isa::avx2)) {
    MESSAGE("AVX2 kernels unavailable on this build or CPU; equivalence not exercised");
    return;
  }
  std::mt19937_64 rng(43);
  std::normal_distribution<double> g;
  const auto step_scalar = kernels::select_rk4_step(kernels::Isa::scalar);
  const auto step_avx2 = kernels::select_rk4_step(kernels::Isa::avx2);
  const auto apply_scalar = kernels::select_apply(kernels::Isa::scalar);
  const auto apply_avx2 = kernels::select_apply(kernels::Isa::avx2);
  for (std::size_t lanes : {4u, 8u, 12u, 16u, 5u}) {
    for (std::size_t dim : {2u, 9u, 25u}) {
      const auto sys = random_system(rng, dim, 4);
      const Coeffs c0(rng, 4, lanes);
      const Coeffs c1(rng, 4, lanes);
      const Coeffs c2(rng, 4, lanes);
      std::vector<double> x(dim * lanes);
      for (auto& v : x) v = g(rng);

      std::vector<double> a(dim * lanes);
      std::vector<double> b(dim * lanes);
      apply_scalar(sys, lanes, c0.set(), x.data(), a.data());
      apply_avx2(sys, lanes, c0.set(), x.data(), b.data());
      for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(std::abs(a[i] - b[i]) <= 1e-13 * (1.0 + std::abs(a[i])));

      std::vector<double> xs = x;
      std::vector<double> xv = x;
      kernels::Rk4Workspace ws;
      kernels::Rk4Workspace wv;
      for (int s = 0; s < 50; ++s) {
        step_scalar(sys, lanes, 0.01, c0.set(), c1.set(), c2.set(), xs.data(), ws);
        step_avx2(sys, lanes, 0.01, c0.set(), c1.set(), c2.set(), xv.data(), wv);
      }
      for (std::size_t i = 0; i < xs.size(); ++i) REQUIRE(std::abs(xs[i] - xv[i]) <= 1e-12 * (1.0 + std::abs(xs[i])));
    }
  }
}

TEST_CASE("density propagation is ISA independent") {
  std::mt19937_64 rng(44);
  const SystemSpec s = model4();
  std::vector<double> diag(5, 0.0);
  diag[2] = 1.0;
  PropagationConfig c;
  c.t_end = 200.0;
  c.dt = 0.02;
  std::vector<LaneInput> lanes;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 13; ++k) {
    std::vector<FieldComponent> comps;
    for (double w : s.transition_frequencies) comps.push_back({2.0 * u(rng), w, 6.0 * u(rng)});
    lanes.push_back({ShapedField(comps, 200.0, 30.0), {{{0.0, 200.0, 0.3 * u(rng)}}}, {}});
  }
  const std::vector<HermitianOperator> mon{HermitianOperator::diagonal(diag)};
  const DensityPropagator scalar(s, mon, {}, c, kernels::Isa::scalar);
  const DensityPropagator simd(s, mon, {}, c, kernels::Isa::avx2);
  const auto rho0 = DensityMatrix::basis_state(5, 0);
  const auto a = scalar.run(rho0, lanes);
  const auto b = simd.run(rho0, lanes);
  for (std::size_t k = 0; k < lanes.size(); ++k) {
    REQUIRE(max_abs(a[k].final_state.matrix() - b[k].final_state.matrix()) <= 1e-11);
  }
}

TEST_CASE("ISA naming and selection") {
  CHECK(kernels::isa_name(kernels::Isa::scalar) == "scalar");
  CHECK(kernels::isa_name(kernels::Isa::avx2) == "avx2");
  CHECK(kernels::isa_available(kernels::Isa::scalar));
  CHECK(kernels::select_rk4_step(kernels::Isa::scalar) == &kernels::rk4_step_scalar);
}
