#pragma once

// Batched fixed-step RK4 for linear systems x' = sum_t c_t(time, lane) M_t x.
//
// Every propagation in the library (density matrices, state vectors,
// unitary propagators) reduces to this form once the complex equations are
// written over real coordinates. Independent trajectories share the M_t and
// run in lockstep as "lanes"; the state is stored lane-innermost,
// x[i * lanes + l], so a SIMD register holds one coordinate of several
// trajectories.
//
// Two implementations exist: a portable scalar reference and an AVX2/FMA
// variant. select_rk4_step() picks one at runtime from CPUID; the test suite
// checks that both agree.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "zeno/linalg.hpp"

namespace zeno::kernels {

/// Compressed sparse row matrix with real entries.
struct SparseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint32_t> row_ptr{0};
  std::vector<std::uint32_t> col;
  std::vector<double> val;

  /// Entries with |v| <= drop_tol are omitted.
  static SparseMatrix from_dense(const RMatrix& m, double drop_tol = 0.0);
  std::size_t nnz() const { return val.size(); }
  RMatrix to_dense() const;
};

/// Upper bound on LinearSystem::terms.
inline constexpr std::size_t kMaxTerms = 8;

struct LinearSystem {
  std::size_t dim = 0;
  std::vector<SparseMatrix> terms;
};

/// Coefficients of every term at one time point: coeffs[t] points at `lanes`
/// doubles, or is nullptr meaning 1 on every lane.
using CoefficientSet = std::span<const double* const>;

struct Rk4Workspace {
  std::vector<double> k1, k2, k3, k4, stage;

  void reserve(std::size_t n) {
    if (k1.size() < n) {
      k1.resize(n);
      k2.resize(n);
      k3.resize(n);
      k4.resize(n);
      stage.resize(n);
    }
  }
};

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

/// Advances x (dim * lanes values) by one RK4 step of size h. The three
/// coefficient sets are taken at the start, midpoint and end of the step.
using Rk4StepFn = void (*)(const LinearSystem& sys, std::size_t lanes, double h,
                           CoefficientSet c_start, CoefficientSet c_mid, CoefficientSet c_end,
                           double* x, Rk4Workspace& ws);

/// out = sum_t c_t (M_t x); exposed for tests.
using ApplyFn = void (*)(const LinearSystem& sys, std::size_t lanes, CoefficientSet coeffs,
                         const double* x, double* out);

void rk4_step_scalar(const LinearSystem& sys, std::size_t lanes, double h, CoefficientSet c_start,
                     CoefficientSet c_mid, CoefficientSet c_end, double* x, Rk4Workspace& ws);
void apply_scalar(const LinearSystem& sys, std::size_t lanes, CoefficientSet coeffs,
                  const double* x, double* out);

#if defined(ZENO_HAVE_AVX2_KERNELS)
// Requires lanes % 4 == 0; other lane counts are forwarded to the scalar path.
void rk4_step_avx2(const LinearSystem& sys, std::size_t lanes, double h, CoefficientSet c_start,
                   CoefficientSet c_mid, CoefficientSet c_end, double* x, Rk4Workspace& ws);
void apply_avx2(const LinearSystem& sys, std::size_t lanes, CoefficientSet coeffs,
                const double* x, double* out);
#endif

/// Best ISA supported by both the build and the running CPU.
Isa detected_isa();

/// ISA used by default; detected_isa() unless overridden by the
/// ZENO_KERNEL_ISA environment variable ("scalar" or "avx2").
Isa active_isa();

/// Falls back to scalar when the requested ISA is unavailable.
Rk4StepFn select_rk4_step(Isa isa);
ApplyFn select_apply(Isa isa);

bool isa_available(Isa isa);

}  // namespace zeno::kernels
