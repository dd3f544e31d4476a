#pragma once

// Dense complex linear algebra for small Hilbert spaces (dim <= 16).
// Everything here is a pure function over immutable values; all types
// validate their defining invariant at construction time.

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace adlab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr int kMaxDim = 16;

// ---------------------------------------------------------------------------
// Error taxonomy. The CLI maps kinds onto exit codes; library code throws.
// ---------------------------------------------------------------------------

enum class ErrorKind {
  InputDomain,   // malformed values handed to an operation
  Precondition,  // caller violated a documented contract
  Degeneracy,    // spectral gap below the tracking threshold
  Tracking,      // ambiguous level assignment along a path
  Numerical,     // a numerical consistency bound was violated
  Accuracy,      // requested resolution/step budget is insufficient
  Parse,         // config text rejected
  Catalog,       // unknown model name or parameter
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

// ---------------------------------------------------------------------------
// Norms and small helpers
// ---------------------------------------------------------------------------

/// Largest entry modulus (max-entry norm).
double max_norm(const Matrix& a);
double max_norm(const Vector& v);

bool all_finite(const Matrix& a);
bool all_finite(const Vector& v);

/// Hermiticity defect relative to the matrix scale:
/// ||A - A^dag||_max / max(1, ||A||_max).
double hermiticity_defect(const Matrix& a);

/// ||U^dag U - I||_max.
double unitarity_defect(const Matrix& u);

// ---------------------------------------------------------------------------
// Validated value types
// ---------------------------------------------------------------------------

/// Square complex matrix with finite entries, 1 <= dim <= 16.
class ComplexMatrix {
 public:
  explicit ComplexMatrix(Matrix m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& raw() const { return m_; }

 private:
  Matrix m_;
};

/// Hermitian to 1e-12 relative max-entry norm. The stored matrix is the
/// exact input, not a symmetrized copy.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(Matrix m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& raw() const { return m_; }

  static constexpr double kTolerance = 1e-12;

 private:
  Matrix m_;
};

/// Unitary to 1e-9 in ||U^dag U - I||_max.
class UnitaryMatrix {
 public:
  explicit UnitaryMatrix(Matrix m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& raw() const { return m_; }

  static constexpr double kTolerance = 1e-9;

 private:
  Matrix m_;
};

/// Unit-norm state vector. Unnormalized data must go through normalized().
class StateVector {
 public:
  explicit StateVector(Vector v);

  /// Scales an arbitrary finite, nonzero vector onto the unit sphere.
  static StateVector normalized(Vector v);

  int dim() const { return static_cast<int>(v_.size()); }
  const Vector& raw() const { return v_; }

  static constexpr double kTolerance = 1e-9;

 private:
  struct AlreadyUnit {};
  StateVector(Vector v, AlreadyUnit) : v_(std::move(v)) {}
  Vector v_;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

struct EigResult {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // orthonormal columns, column n pairs with value n
};

/// Hermitian eigendecomposition. Reconstruction residual
/// ||V diag(e) V^dag - H||_max stays below 1e-10 * max(1, ||H||_max).
/// Degenerate values come back in ascending order with an arbitrary
/// orthonormal basis of the degenerate subspace.
EigResult herm_eig(const HermitianMatrix& h);

/// exp(-i H tau) for Hermitian H, computed through the eigendecomposition so
/// the result is unitary up to eigensolver residual. dim == 2 uses the exact
/// closed form.
UnitaryMatrix expm_antiherm(const HermitianMatrix& h, double tau);

/// Unchecked kernels for hot loops. `expm_antiherm_into` writes exp(-i H tau)
/// without constructing validated wrappers; callers audit unitarity at
/// retained samples instead of every step.
void expm_antiherm_into(const Matrix& h, double tau, Matrix& out,
                        Matrix& scratch);

Matrix matmul(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, const Vector& v);
Matrix adjoint(const Matrix& a);

/// <u|v>, conjugate-linear in the first argument.
Complex inner(const Vector& u, const Vector& v);

double vecnorm(const Vector& v);

}  // namespace adlab
