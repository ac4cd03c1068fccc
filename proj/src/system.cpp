#include "zeno/system.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace zeno {

HermitianOperator SystemSpec::hamiltonian() const {
  return HermitianOperator::diagonal(energies);
}

HermitianOperator SystemSpec::dipole_operator() const {
  return HermitianOperator::from_real(dipole);
}

std::size_t SystemSpec::level(std::string_view label) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return i;
  }
  throw std::out_of_range("SystemSpec " + id + ": unknown level '" + std::string(label) + "'");
}

void SystemSpec::validate() const {
  const std::size_t n = dim();
  if (n == 0) throw InvariantError("SystemSpec " + id + ": no levels");
  if (static_cast<std::size_t>(dipole.rows()) != n || static_cast<std::size_t>(dipole.cols()) != n) {
    throw DimensionError("SystemSpec " + id + ": dipole size does not match the level count");
  }
  if (!labels.empty() && labels.size() != n) {
    throw DimensionError("SystemSpec " + id + ": one label per level required");
  }
  if ((dipole - dipole.transpose()).cwiseAbs().maxCoeff() > 0.0) {
    throw InvariantError("SystemSpec " + id + ": dipole must be symmetric");
  }
  if (initial_state >= n || target_state >= n) {
    throw DimensionError("SystemSpec " + id + ": initial/target index out of range");
  }
  for (double w : transition_frequencies) {
    bool matched = false;
    for (std::size_t a = 0; a < n && !matched; ++a) {
      for (std::size_t b = a + 1; b < n && !matched; ++b) {
        if (dipole(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) != 0.0 &&
            std::abs(std::abs(energies[a] - energies[b]) - w) <= 1e-9) {
          matched = true;
        }
      }
    }
    if (!matched) {
      std::ostringstream os;
      os << "SystemSpec " << id << ": transition frequency " << w
         << " matches no dipole-coupled energy gap";
      throw InvariantError(os.str());
    }
  }
}

}  // namespace zeno
