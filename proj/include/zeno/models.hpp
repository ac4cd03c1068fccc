#pragma once

// Catalog of the four benchmark systems.
//
//   model1  five-level ladder, nearest-neighbour dipoles, |0> -> |4>
//   model2  same system as model1; used with optimized projector sequences
//   model3  symmetric three-level system H0 = diag(1,2,3), |0> -> |1>
//   model4  five levels {0,1,1',2,3} with degenerate 1-1' / 2-3 transitions
//
// The ground energy is fixed at 0 wherever only transition frequencies are
// known; a global offset only changes an overall phase.

#include <string_view>
#include <vector>

#include "zeno/control_field.hpp"
#include "zeno/system.hpp"

namespace zeno {

SystemSpec model1();
SystemSpec model2();
SystemSpec model3();
SystemSpec model4();

std::vector<SystemSpec> model_catalog();

/// Throws std::out_of_range for unknown ids.
SystemSpec model_by_id(std::string_view id);

/// The fixed, non-optimized model-2 field: every resonant amplitude 0.07,
/// every phase 0.
ShapedField model2_fixed_field();

/// |C0 C2 - C1^2 / 2| for a normalized three-level amplitude vector;
/// conserved by the coherent model-3 dynamics.
double symmetry_invariant(const CVector& c);

struct CoherentBoundReport {
  /// rho00 rho22 - rho11^2 / 4, zero for any coherently reachable state.
  double relation_residual = 0.0;
  double target_population = 0.0;
  bool holds = false;
};

/// Checks rho00 rho22 = rho11^2/4 (to 1e-6) and rho11 <= 1/2 (+1e-6).
CoherentBoundReport coherent_bound_check(const DensityMatrix& rho);

}  // namespace zeno
