#pragma once

// Shared by the kernel variants; not part of the public interface.

#include "zeno/kernels/linear_ode.hpp"

namespace zeno::kernels::detail {

inline bool term_is_zero(const double* c0, const double* c1, const double* c2, std::size_t lanes) {
  if (c0 == nullptr || c1 == nullptr || c2 == nullptr) return false;
  for (std::size_t l = 0; l < lanes; ++l) {
    if (c0[l] != 0.0 || c1[l] != 0.0 || c2[l] != 0.0) return false;
  }
  return true;
}

// Terms that vanish on all lanes for the whole step are dropped before the
// stage evaluations.
struct ActiveTerms {
  std::size_t count = 0;
  const SparseMatrix* mats[kMaxTerms];
  const double* start[kMaxTerms];
  const double* mid[kMaxTerms];
  const double* end[kMaxTerms];
};

inline ActiveTerms collect_active(const LinearSystem& sys, std::size_t lanes, CoefficientSet c0,
                                  CoefficientSet cm, CoefficientSet c1) {
  ActiveTerms a;
  for (std::size_t t = 0; t < sys.terms.size() && a.count < kMaxTerms; ++t) {
    if (term_is_zero(c0[t], cm[t], c1[t], lanes)) continue;
    a.mats[a.count] = &sys.terms[t];
    a.start[a.count] = c0[t];
    a.mid[a.count] = cm[t];
    a.end[a.count] = c1[t];
    ++a.count;
  }
  return a;
}

}  // namespace zeno::kernels::detail
