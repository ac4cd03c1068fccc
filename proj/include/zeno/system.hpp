#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "zeno/linalg.hpp"
#include "zeno/quantum_core.hpp"

namespace zeno {

/// Field-free Hamiltonian (diagonal energies, rad/fs) plus dipole coupling
/// and the control-problem metadata attached to a model.
struct SystemSpec {
  std::string id;
  std::string description;
  std::vector<std::string> labels;  // one per level
  std::vector<double> energies;     // rad/fs
  RMatrix dipole;                   // real symmetric, system units
  std::vector<double> transition_frequencies;
  std::size_t initial_state = 0;
  std::size_t target_state = 0;
  double final_time = 200.0;  // fs
  double sigma = 30.0;        // fs, Gaussian envelope width
  double alpha = 0.05;        // fluence weight
  std::string dipole_unit = "1e-30 C m";

  std::size_t dim() const { return energies.size(); }
  HermitianOperator hamiltonian() const;
  HermitianOperator dipole_operator() const;
  /// Throws std::out_of_range for unknown labels.
  std::size_t level(std::string_view label) const;

  /// Throws InvariantError when the dipole is not symmetric, the sizes
  /// disagree, or a listed transition frequency does not match an energy gap
  /// of a dipole-coupled pair.
  void validate() const;
};

}  // namespace zeno
