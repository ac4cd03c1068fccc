#include "zeno/kernels/linear_ode.hpp"

#include <cmath>

#include "kernels/active_terms.hpp"

namespace zeno::kernels {

SparseMatrix SparseMatrix::from_dense(const RMatrix& m, double drop_tol) {
  SparseMatrix s;
  s.rows = static_cast<std::size_t>(m.rows());
  s.cols = static_cast<std::size_t>(m.cols());
  s.row_ptr.assign(1, 0);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      if (std::abs(v) > drop_tol) {
        s.col.push_back(static_cast<std::uint32_t>(c));
        s.val.push_back(v);
      }
    }
    s.row_ptr.push_back(static_cast<std::uint32_t>(s.val.size()));
  }
  return s;
}

RMatrix SparseMatrix::to_dense() const {
  RMatrix m = RMatrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::uint32_t i = row_ptr[r]; i < row_ptr[r + 1]; ++i) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col[i])) = val[i];
    }
  }
  return m;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

namespace {

using detail::ActiveTerms;
using detail::collect_active;

void apply_active(const ActiveTerms& a, const double* const* coeffs, std::size_t dim,
                  std::size_t lanes, const double* x, double* out) {
  for (std::size_t i = 0; i < dim * lanes; ++i) out[i] = 0.0;
  for (std::size_t t = 0; t < a.count; ++t) {
    const SparseMatrix& m = *a.mats[t];
    const double* c = coeffs[t];
    for (std::size_t r = 0; r < m.rows; ++r) {
      double* o = out + r * lanes;
      for (std::size_t l = 0; l < lanes; ++l) {
        double acc = 0.0;
        for (std::uint32_t i = m.row_ptr[r]; i < m.row_ptr[r + 1]; ++i) {
          acc += m.val[i] * x[m.col[i] * lanes + l];
        }
        o[l] += (c != nullptr ? c[l] : 1.0) * acc;
      }
    }
  }
}

}  // namespace

void apply_scalar(const LinearSystem& sys, std::size_t lanes, CoefficientSet coeffs,
                  const double* x, double* out) {
  const ActiveTerms a = collect_active(sys, lanes, coeffs, coeffs, coeffs);
  apply_active(a, a.start, sys.dim, lanes, x, out);
}

void rk4_step_scalar(const LinearSystem& sys, std::size_t lanes, double h, CoefficientSet c_start,
                     CoefficientSet c_mid, CoefficientSet c_end, double* x, Rk4Workspace& ws) {
  const std::size_t n = sys.dim * lanes;
  ws.reserve(n);
  const ActiveTerms a = collect_active(sys, lanes, c_start, c_mid, c_end);
  double* k1 = ws.k1.data();
  double* k2 = ws.k2.data();
  double* k3 = ws.k3.data();
  double* k4 = ws.k4.data();
  double* s = ws.stage.data();
  const double half = 0.5 * h;

  apply_active(a, a.start, sys.dim, lanes, x, k1);
  for (std::size_t i = 0; i < n; ++i) s[i] = x[i] + half * k1[i];
  apply_active(a, a.mid, sys.dim, lanes, s, k2);
  for (std::size_t i = 0; i < n; ++i) s[i] = x[i] + half * k2[i];
  apply_active(a, a.mid, sys.dim, lanes, s, k3);
  for (std::size_t i = 0; i < n; ++i) s[i] = x[i] + h * k3[i];
  apply_active(a, a.end, sys.dim, lanes, s, k4);
  const double sixth = h / 6.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] += sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
  }
}

}  // namespace zeno::kernels
