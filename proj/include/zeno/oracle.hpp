#pragma once

// Brute-force references that avoid the ODE integrator: exact composition of
// free diagonal evolution with projective kicks, and an exhaustive grid search
// over single two-level projectors.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "zeno/quantum_core.hpp"
#include "zeno/system.hpp"

namespace zeno::oracle {

struct TimedProjector {
  double time = 0.0;
  CVector state;  // need not be normalized
};

/// Zero field only: the free evolution between events is the diagonal phase
/// exp(-i eps_j t). Events must be time-ordered inside [0, T_f].
double analytic_sequence_yield(const SystemSpec& system, const std::vector<TimedProjector>& events);

struct GridSearchResult {
  double yield = 0.0;
  CVector state;
  double mixing_angle = 0.0;  // state = cos(a)|i> + exp(i phi) sin(a)|f>
  double relative_phase = 0.0;
};

/// One projector at T_f / 2, zero field, swept over `resolution` mixing angles
/// in (0, pi/2) and `resolution` relative phases in [0, 2 pi).
GridSearchResult grid_search_single_projector(const SystemSpec& system, std::size_t resolution);

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Oracle-vs-engine report on model 2: fixed analytic cases, `samples` random
/// projector sequences with N <= 3 (agreement within 1e-6), and the
/// single-projector grid optimum.
std::vector<Check> verify_engine(std::size_t samples = 200, std::uint64_t seed = 7);

}  // namespace zeno::oracle
