#include "adlab/numerics.hpp"

#include <cmath>

namespace adlab {

double max_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

double max_norm(const Vector& v) {
  if (v.size() == 0) return 0.0;
  return v.cwiseAbs().maxCoeff();
}

bool all_finite(const Matrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const Complex& z = a(i, j);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
  return true;
}

bool all_finite(const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag()))
      return false;
  }
  return true;
}

double hermiticity_defect(const Matrix& a) {
  return max_norm(Matrix(a - a.adjoint())) / std::max(1.0, max_norm(a));
}

double unitarity_defect(const Matrix& u) {
  Matrix g = u.adjoint() * u;
  g.diagonal().array() -= 1.0;
  return max_norm(g);
}

namespace {

void check_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 1)
    fail(ErrorKind::InputDomain,
         std::string(what) + ": expected a nonempty square matrix, got " +
             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  if (m.rows() > kMaxDim)
    fail(ErrorKind::InputDomain,
         std::string(what) + ": dimension " + std::to_string(m.rows()) +
             " exceeds the supported maximum " + std::to_string(kMaxDim));
  if (!all_finite(m))
    fail(ErrorKind::InputDomain,
         std::string(what) + ": matrix has non-finite entries");
}

}  // namespace

ComplexMatrix::ComplexMatrix(Matrix m) : m_(std::move(m)) {
  check_square(m_, "ComplexMatrix");
}

HermitianMatrix::HermitianMatrix(Matrix m) : m_(std::move(m)) {
  check_square(m_, "HermitianMatrix");
  const double defect = hermiticity_defect(m_);
  if (defect > kTolerance)
    fail(ErrorKind::InputDomain,
         "HermitianMatrix: hermiticity defect " + std::to_string(defect) +
             " exceeds tolerance");
}

UnitaryMatrix::UnitaryMatrix(Matrix m) : m_(std::move(m)) {
  check_square(m_, "UnitaryMatrix");
  const double defect = unitarity_defect(m_);
  if (defect > kTolerance)
    fail(ErrorKind::InputDomain,
         "UnitaryMatrix: unitarity defect " + std::to_string(defect) +
             " exceeds tolerance");
}

StateVector::StateVector(Vector v) : v_(std::move(v)) {
  if (v_.size() < 1 || v_.size() > kMaxDim)
    fail(ErrorKind::InputDomain, "StateVector: bad dimension");
  if (!all_finite(v_))
    fail(ErrorKind::InputDomain, "StateVector: non-finite amplitudes");
  const double n = v_.norm();
  if (std::abs(n - 1.0) > kTolerance)
    fail(ErrorKind::InputDomain,
         "StateVector: norm " + std::to_string(n) +
             " is not 1; use StateVector::normalized for raw data");
}

StateVector StateVector::normalized(Vector v) {
  if (v.size() < 1 || v.size() > kMaxDim)
    fail(ErrorKind::InputDomain, "StateVector: bad dimension");
  if (!all_finite(v))
    fail(ErrorKind::InputDomain, "StateVector: non-finite amplitudes");
  const double n = v.norm();
  if (n == 0.0) fail(ErrorKind::InputDomain, "StateVector: zero vector");
  v /= n;
  return StateVector(std::move(v), AlreadyUnit{});
}

EigResult herm_eig(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.raw());
  if (solver.info() != Eigen::Success)
    fail(ErrorKind::Numerical, "herm_eig: eigensolver did not converge");
  return EigResult{solver.eigenvalues(), solver.eigenvectors()};
}

namespace {

// dim-2 closed form: H = c I + a . sigma with real c and a, so
// exp(-i tau H) = e^{-i c tau} (cos(r tau) I - i sin(r tau) (a . sigma) / r).
void expm2(const Matrix& h, double tau, Matrix& out) {
  const double c = 0.5 * (h(0, 0).real() + h(1, 1).real());
  const double az = 0.5 * (h(0, 0).real() - h(1, 1).real());
  const double ax = h(1, 0).real();
  const double ay = h(1, 0).imag();
  const double r = std::sqrt(ax * ax + ay * ay + az * az);
  const double x = r * tau;
  double cosx = std::cos(x);
  // sin(x)/x with a series fallback near zero
  double sinc = (std::abs(x) > 1e-8) ? std::sin(x) / x : 1.0 - x * x / 6.0;
  const Complex phase(std::cos(c * tau), -std::sin(c * tau));
  const Complex mi(0.0, -1.0);
  const Complex f = mi * sinc * tau;  // multiplies a . sigma
  out.resize(2, 2);
  out(0, 0) = phase * (cosx + f * az);
  out(1, 1) = phase * (cosx - f * az);
  out(0, 1) = phase * (f * Complex(ax, -ay));
  out(1, 0) = phase * (f * Complex(ax, ay));
}

}  // namespace

void expm_antiherm_into(const Matrix& h, double tau, Matrix& out,
                        Matrix& scratch) {
  const int n = static_cast<int>(h.rows());
  if (n == 2) {
    expm2(h, tau, out);
    return;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success)
    fail(ErrorKind::Numerical, "expm_antiherm: eigensolver did not converge");
  const RealVector& e = solver.eigenvalues();
  const Matrix& v = solver.eigenvectors();
  scratch = v;
  for (int k = 0; k < n; ++k) {
    const Complex p(std::cos(e[k] * tau), -std::sin(e[k] * tau));
    scratch.col(k) *= p;
  }
  out.noalias() = scratch * v.adjoint();
}

UnitaryMatrix expm_antiherm(const HermitianMatrix& h, double tau) {
  if (!std::isfinite(tau))
    fail(ErrorKind::InputDomain, "expm_antiherm: non-finite tau");
  Matrix out, scratch;
  expm_antiherm_into(h.raw(), tau, out, scratch);
  return UnitaryMatrix(std::move(out));
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    fail(ErrorKind::InputDomain, "matmul: dimension mismatch");
  return a * b;
}

Vector matvec(const Matrix& a, const Vector& v) {
  if (a.cols() != v.size())
    fail(ErrorKind::InputDomain, "matvec: dimension mismatch");
  return a * v;
}

Matrix adjoint(const Matrix& a) { return a.adjoint(); }

Complex inner(const Vector& u, const Vector& v) {
  if (u.size() != v.size())
    fail(ErrorKind::InputDomain, "inner: dimension mismatch");
  return u.dot(v);  // Eigen's dot conjugates the first argument
}

double vecnorm(const Vector& v) { return v.norm(); }

}  // namespace adlab
