#pragma once

// Density matrices, observables, projectors and the instantaneous
// (von Neumann) measurement maps acting on them.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "zeno/linalg.hpp"

namespace zeno {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a value violates the algebraic invariant of its type
/// (non-Hermitian observable, non-idempotent projector, non-unit trace).
class InvariantError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kIdempotentTol = 1e-10;
inline constexpr double kNormTol = 1e-12;
inline constexpr double kDefaultDegeneracyTol = 1e-9;

class HermitianOperator {
 public:
  explicit HermitianOperator(CMatrix m);

  static HermitianOperator diagonal(std::span<const double> values);
  static HermitianOperator from_real(const RMatrix& m);
  static HermitianOperator identity(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }

 private:
  CMatrix m_;
};

/// Orthogonal projector. Built from a state vector it is stored in rank-1
/// form and remembers the (normalized) vector.
class Projector {
 public:
  /// General idempotent Hermitian matrix.
  explicit Projector(CMatrix m);

  /// |psi><psi| with psi normalized here. Throws InvariantError on a zero vector.
  static Projector from_state(const CVector& psi);
  static Projector basis(std::size_t dim, std::size_t k);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  const std::optional<CVector>& state() const { return state_; }
  bool is_rank_one() const { return state_.has_value(); }

 private:
  Projector(CMatrix m, CVector psi);

  CMatrix m_;
  std::optional<CVector> state_;
};

class DensityMatrix {
 public:
  /// Checks Hermiticity and unit trace.
  explicit DensityMatrix(CMatrix m);

  static DensityMatrix pure(const CVector& psi);
  static DensityMatrix basis_state(std::size_t dim, std::size_t k);
  static DensityMatrix maximally_mixed(std::size_t dim);
  /// Skips validation; for internal producers that preserve the invariants.
  static DensityMatrix unchecked(CMatrix m);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  Complex operator()(std::size_t j, std::size_t k) const {
    return m_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
  }
  double population(std::size_t k) const { return (*this)(k, k).real(); }
  std::vector<double> populations() const;
  double trace() const { return m_.trace().real(); }
  double purity() const;

 private:
  struct Unchecked {};
  DensityMatrix(CMatrix m, Unchecked) : m_(std::move(m)) {}

  CMatrix m_;
};

struct EigenDecomposition {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // orthonormal columns
  /// Partition of eigenvalue indices; consecutive sorted eigenvalues closer
  /// than the degeneracy tolerance share a group.
  std::vector<std::vector<std::size_t>> groups;

  std::size_t dim() const { return static_cast<std::size_t>(eigenvalues.size()); }
  CMatrix reconstruct() const;
};

EigenDecomposition eigendecompose(const HermitianOperator& a,
                                  double degeneracy_tol = kDefaultDegeneracyTol);

/// rho -> P rho P + (1-P) rho (1-P), i.e. rho - [P,[P,rho]].
DensityMatrix measure_projector(const DensityMatrix& rho, const Projector& p);

/// Removes coherences between different eigenspaces of A.
DensityMatrix measure_observable(const DensityMatrix& rho, const HermitianOperator& a,
                                 double degeneracy_tol = kDefaultDegeneracyTol);
DensityMatrix measure_observable(const DensityMatrix& rho, const EigenDecomposition& eig);

double expectation(const DensityMatrix& rho, const HermitianOperator& a);
double expectation(const DensityMatrix& rho, const Projector& p);

double min_eigenvalue(const DensityMatrix& rho);

}  // namespace zeno
