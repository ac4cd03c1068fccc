#include "zeno/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace zeno {

namespace {

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
    throw DimensionError(os.str());
  }
}

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw DimensionError(os.str());
  }
}

}  // namespace

HermitianOperator::HermitianOperator(CMatrix m) : m_(std::move(m)) {
  require_square(m_, "HermitianOperator");
  const double defect = hermiticity_defect(m_);
  if (defect > kHermitianTol * std::max(1.0, max_abs(m_))) {
    throw InvariantError("HermitianOperator: matrix is not Hermitian (defect " +
                         std::to_string(defect) + ")");
  }
  m_ = hermitize(m_);
}

HermitianOperator HermitianOperator::diagonal(std::span<const double> values) {
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(values.size()),
                            static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = values[i];
  }
  return HermitianOperator(std::move(m));
}

HermitianOperator HermitianOperator::from_real(const RMatrix& m) {
  return HermitianOperator(m.cast<Complex>());
}

HermitianOperator HermitianOperator::identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return HermitianOperator(CMatrix::Identity(n, n));
}

Projector::Projector(CMatrix m) : m_(std::move(m)) {
  require_square(m_, "Projector");
  if (hermiticity_defect(m_) > kHermitianTol) {
    throw InvariantError("Projector: matrix is not Hermitian");
  }
  const double defect = max_abs(m_ * m_ - m_);
  if (defect > kIdempotentTol) {
    throw InvariantError("Projector: matrix is not idempotent (defect " +
                         std::to_string(defect) + ")");
  }
  m_ = hermitize(m_);
}

Projector::Projector(CMatrix m, CVector psi) : m_(std::move(m)), state_(std::move(psi)) {}

Projector Projector::from_state(const CVector& psi) {
  const double norm = psi.norm();
  if (psi.size() == 0 || !(norm > 0.0) || !std::isfinite(norm)) {
    throw InvariantError("Projector::from_state: zero or non-finite state vector");
  }
  CVector v = psi / norm;
  CMatrix m = v * v.adjoint();
  return Projector(std::move(m), std::move(v));
}

Projector Projector::basis(std::size_t dim, std::size_t k) {
  if (k >= dim) {
    throw DimensionError("Projector::basis: index out of range");
  }
  CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(k)) = 1.0;
  return from_state(v);
}

DensityMatrix::DensityMatrix(CMatrix m) : m_(std::move(m)) {
  require_square(m_, "DensityMatrix");
  const double defect = hermiticity_defect(m_);
  if (defect > kHermitianTol) {
    throw InvariantError("DensityMatrix: matrix is not Hermitian (defect " +
                         std::to_string(defect) + ")");
  }
  const double tr = m_.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw InvariantError("DensityMatrix: trace " + std::to_string(tr) + " differs from 1");
  }
  m_ = hermitize(m_);
}

DensityMatrix DensityMatrix::pure(const CVector& psi) {
  const double norm = psi.norm();
  if (std::abs(norm - 1.0) > kNormTol) {
    throw InvariantError("DensityMatrix::pure: state vector is not normalized");
  }
  return DensityMatrix(psi * psi.adjoint());
}

DensityMatrix DensityMatrix::basis_state(std::size_t dim, std::size_t k) {
  if (k >= dim) {
    throw DimensionError("DensityMatrix::basis_state: index out of range");
  }
  const auto n = static_cast<Eigen::Index>(dim);
  CMatrix m = CMatrix::Zero(n, n);
  m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = 1.0;
  return DensityMatrix(std::move(m), Unchecked{});
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return DensityMatrix(CMatrix::Identity(n, n) / static_cast<double>(dim), Unchecked{});
}

DensityMatrix DensityMatrix::unchecked(CMatrix m) {
  return DensityMatrix(std::move(m), Unchecked{});
}

std::vector<double> DensityMatrix::populations() const {
  std::vector<double> out(dim());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = population(k);
  return out;
}

double DensityMatrix::purity() const {
  return (m_ * m_).trace().real();
}

CMatrix EigenDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
}

EigenDecomposition eigendecompose(const HermitianOperator& a, double degeneracy_tol) {
  // Householder tridiagonalization followed by implicit symmetric QR.
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(a.matrix());
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigendecompose: eigensolver did not converge");
  }
  EigenDecomposition out;
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = solver.eigenvectors();

  // Phase convention: the largest-magnitude component of each eigenvector
  // is real and positive (first index wins ties).
  for (Eigen::Index c = 0; c < out.eigenvectors.cols(); ++c) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index r = 0; r < out.eigenvectors.rows(); ++r) {
      const double v = std::abs(out.eigenvectors(r, c));
      if (v > best_abs + 1e-12) {
        best_abs = v;
        best = r;
      }
    }
    const Complex pivot = out.eigenvectors(best, c);
    out.eigenvectors.col(c) *= std::conj(pivot) / std::abs(pivot);
  }

  const std::size_t n = out.dim();
  for (std::size_t i = 0; i < n; ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    if (i == 0 || out.eigenvalues(idx) - out.eigenvalues(idx - 1) > degeneracy_tol) {
      out.groups.emplace_back();
    }
    out.groups.back().push_back(i);
  }
  return out;
}

DensityMatrix measure_projector(const DensityMatrix& rho, const Projector& p) {
  require_same_dim(rho.dim(), p.dim(), "measure_projector");
  const CMatrix& r = rho.matrix();
  const CMatrix& pm = p.matrix();
  const CMatrix pr = pm * r;
  const CMatrix rp = r * pm;
  const CMatrix prp = pr * pm;
  // P rho P + (1-P) rho (1-P) = rho - P rho - rho P + 2 P rho P
  return DensityMatrix::unchecked(hermitize(r - pr - rp + 2.0 * prp));
}

DensityMatrix measure_observable(const DensityMatrix& rho, const EigenDecomposition& eig) {
  require_same_dim(rho.dim(), eig.dim(), "measure_observable");
  const CMatrix& v = eig.eigenvectors;
  CMatrix in_basis = v.adjoint() * rho.matrix() * v;
  std::vector<std::size_t> group_of(eig.dim());
  for (std::size_t g = 0; g < eig.groups.size(); ++g) {
    for (std::size_t i : eig.groups[g]) group_of[i] = g;
  }
  for (Eigen::Index j = 0; j < in_basis.rows(); ++j) {
    for (Eigen::Index k = 0; k < in_basis.cols(); ++k) {
      if (group_of[static_cast<std::size_t>(j)] != group_of[static_cast<std::size_t>(k)]) {
        in_basis(j, k) = 0.0;
      }
    }
  }
  return DensityMatrix::unchecked(hermitize(v * in_basis * v.adjoint()));
}

DensityMatrix measure_observable(const DensityMatrix& rho, const HermitianOperator& a,
                                 double degeneracy_tol) {
  require_same_dim(rho.dim(), a.dim(), "measure_observable");
  return measure_observable(rho, eigendecompose(a, degeneracy_tol));
}

double expectation(const DensityMatrix& rho, const HermitianOperator& a) {
  require_same_dim(rho.dim(), a.dim(), "expectation");
  return (rho.matrix() * a.matrix()).trace().real();
}

double expectation(const DensityMatrix& rho, const Projector& p) {
  require_same_dim(rho.dim(), p.dim(), "expectation");
  if (const auto& psi = p.state()) {
    return (psi->adjoint() * rho.matrix() * (*psi))(0, 0).real();
  }
  return (rho.matrix() * p.matrix()).trace().real();
}

double min_eigenvalue(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(rho.matrix(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

}  // namespace zeno
