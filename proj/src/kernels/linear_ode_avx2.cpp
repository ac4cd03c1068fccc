// Compiled with -mavx2 -mfma; only reached through select_rk4_step() after
// the CPU has been checked.

#include <immintrin.h>

#include "kernels/active_terms.hpp"
#include "zeno/kernels/linear_ode.hpp"

namespace zeno::kernels {

namespace {

using detail::ActiveTerms;
using detail::collect_active;

constexpr std::size_t kWidth = 4;

// out[r, lanes] = sum_t c_t[lanes] * (M_t x)[r, lanes]. Blocks of B 4-lane
// registers are kept live across a row so each matrix entry is loaded once.
template <std::size_t B>
void apply_blocks(const ActiveTerms& a, const double* const* coeffs, std::size_t rows,
                  std::size_t lanes, std::size_t lb, const double* x, double* out) {
  for (std::size_t r = 0; r < rows; ++r) {
    __m256d o[B];
    for (std::size_t b = 0; b < B; ++b) o[b] = _mm256_setzero_pd();
    for (std::size_t t = 0; t < a.count; ++t) {
      const SparseMatrix& m = *a.mats[t];
      const std::uint32_t begin = m.row_ptr[r];
      const std::uint32_t end = m.row_ptr[r + 1];
      if (begin == end) continue;
      __m256d acc[B];
      for (std::size_t b = 0; b < B; ++b) acc[b] = _mm256_setzero_pd();
      for (std::uint32_t i = begin; i < end; ++i) {
        const __m256d v = _mm256_broadcast_sd(&m.val[i]);
        const double* xr = x + m.col[i] * lanes + lb;
        for (std::size_t b = 0; b < B; ++b) {
          acc[b] = _mm256_fmadd_pd(v, _mm256_loadu_pd(xr + b * kWidth), acc[b]);
        }
      }
      const double* c = coeffs[t];
      for (std::size_t b = 0; b < B; ++b) {
        o[b] = c != nullptr ? _mm256_fmadd_pd(_mm256_loadu_pd(c + lb + b * kWidth), acc[b], o[b])
                            : _mm256_add_pd(o[b], acc[b]);
      }
    }
    for (std::size_t b = 0; b < B; ++b) _mm256_storeu_pd(out + r * lanes + lb + b * kWidth, o[b]);
  }
}

void apply_active_avx2(const ActiveTerms& a, const double* const* coeffs, std::size_t rows,
                       std::size_t lanes, const double* x, double* out) {
  std::size_t lb = 0;
  for (; lb + 2 * kWidth <= lanes; lb += 2 * kWidth) apply_blocks<2>(a, coeffs, rows, lanes, lb, x, out);
  for (; lb < lanes; lb += kWidth) apply_blocks<1>(a, coeffs, rows, lanes, lb, x, out);
}

// dst = x + h * k
void axpy_avx2(std::size_t n, const double* x, double h, const double* k, double* dst) {
  const __m256d hv = _mm256_set1_pd(h);
  for (std::size_t i = 0; i < n; i += kWidth) {
    _mm256_storeu_pd(dst + i,
                     _mm256_fmadd_pd(hv, _mm256_loadu_pd(k + i), _mm256_loadu_pd(x + i)));
  }
}

}  // namespace

void apply_avx2(const LinearSystem& sys, std::size_t lanes, CoefficientSet coeffs,
                const double* x, double* out) {
  if (lanes % kWidth != 0) {
    apply_scalar(sys, lanes, coeffs, x, out);
    return;
  }
  const ActiveTerms a = collect_active(sys, lanes, coeffs, coeffs, coeffs);
  apply_active_avx2(a, a.start, sys.dim, lanes, x, out);
}

void rk4_step_avx2(const LinearSystem& sys, std::size_t lanes, double h, CoefficientSet c_start,
                   CoefficientSet c_mid, CoefficientSet c_end, double* x, Rk4Workspace& ws) {
  if (lanes % kWidth != 0) {
    rk4_step_scalar(sys, lanes, h, c_start, c_mid, c_end, x, ws);
    return;
  }
  const std::size_t n = sys.dim * lanes;
  ws.reserve(n);
  const ActiveTerms a = collect_active(sys, lanes, c_start, c_mid, c_end);
  double* k1 = ws.k1.data();
  double* k2 = ws.k2.data();
  double* k3 = ws.k3.data();
  double* k4 = ws.k4.data();
  double* s = ws.stage.data();
  const double half = 0.5 * h;

  apply_active_avx2(a, a.start, sys.dim, lanes, x, k1);
  axpy_avx2(n, x, half, k1, s);
  apply_active_avx2(a, a.mid, sys.dim, lanes, s, k2);
  axpy_avx2(n, x, half, k2, s);
  apply_active_avx2(a, a.mid, sys.dim, lanes, s, k3);
  axpy_avx2(n, x, h, k3, s);
  apply_active_avx2(a, a.end, sys.dim, lanes, s, k4);

  const __m256d sixth = _mm256_set1_pd(h / 6.0);
  const __m256d two = _mm256_set1_pd(2.0);
  for (std::size_t i = 0; i < n; i += kWidth) {
    const __m256d mid = _mm256_add_pd(_mm256_loadu_pd(k2 + i), _mm256_loadu_pd(k3 + i));
    __m256d sum = _mm256_add_pd(_mm256_loadu_pd(k1 + i), _mm256_loadu_pd(k4 + i));
    sum = _mm256_fmadd_pd(two, mid, sum);
    _mm256_storeu_pd(x + i, _mm256_fmadd_pd(sixth, sum, _mm256_loadu_pd(x + i)));
  }
}

}  // namespace zeno::kernels
