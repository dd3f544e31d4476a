#pragma once

// Test-side oracles, independent of the library's computational paths.

#include <cmath>
#include <random>

#include "adlab/numerics.hpp"

namespace oracles {

using adlab::Complex;
using adlab::Matrix;
using adlab::Vector;

inline Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline Matrix pauli_y() {
  Matrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}
inline Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

// exp(-i H tau) by scaling and squaring a plain Taylor series. Converges for
// any Hermitian H; wholly independent of the eigendecomposition route.
inline Matrix taylor_expm_antiherm(const Matrix& h, double tau) {
  const int n = static_cast<int>(h.rows());
  Matrix a = Complex(0.0, -1.0) * tau * h;
  int squarings = 0;
  while (adlab::max_norm(a) > 0.25) {
    a *= 0.5;
    ++squarings;
  }
  Matrix result = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= 24; ++k) {
    term = Matrix(term * a) / static_cast<double>(k);
    result += term;
  }
  for (int i = 0; i < squarings; ++i) result = Matrix(result * result);
  return result;
}

// Random Hermitian matrix with entries of order one.
inline Matrix random_hermitian(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(dist(rng), dist(rng));
  return Matrix(0.5 * (a + a.adjoint()));
}

inline Vector random_state(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = Complex(dist(rng), dist(rng));
  return v / v.norm();
}

// Solid-angle geometric phase of a spin aligned (+) or anti-aligned (-) with
// a field cone of opening angle theta traversed once:
//   gamma_aligned = -pi (1 - cos theta), gamma_anti = -pi (1 + cos theta).
inline double cone_phase_aligned(double theta) {
  return -M_PI * (1.0 - std::cos(theta));
}
inline double cone_phase_anti(double theta) {
  return -M_PI * (1.0 + std::cos(theta));
}

}  // namespace oracles
