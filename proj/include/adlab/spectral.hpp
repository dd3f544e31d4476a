#pragma once

// Instantaneous spectral data along a one-parameter family of Hermitian
// generators: gauge-fixed eigenpaths, off-diagonal couplings <n|d_s|m>,
// minimum gaps, and geometric (Berry) phases of closed loops.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adlab/numerics.hpp"

namespace adlab::spectral {

// ---------------------------------------------------------------------------
// HamiltonianPath: a smooth family s in [0,1] -> H(s), optionally with an
// analytic derivative dH/ds.
// ---------------------------------------------------------------------------

struct HamiltonianPath {
  std::string name;
  int dim = 0;
  std::map<std::string, double> params;
  bool closed_loop = false;

  /// Allocation-free evaluation for hot loops; `out` keeps its storage.
  std::function<void(double, Matrix&)> eval;
  std::function<void(double, Matrix&)> eval_deriv;  // may be empty

  bool has_derivative() const { return static_cast<bool>(eval_deriv); }

  HermitianMatrix value(double s) const;
  HermitianMatrix derivative(double s) const;

  /// max over a probe grid of ||H(s)||_max; used by step-count rules.
  double max_norm_estimate(int probes = 257) const;
};

/// Builds a path and runs the construction checks: Hermiticity on a probe
/// grid, derivative-vs-central-difference agreement to 1e-6 at 10 seeded
/// sample points, and endpoint closure when `closed_loop` is claimed.
HamiltonianPath make_path(std::string name, int dim,
                          std::function<void(double, Matrix&)> eval,
                          std::function<void(double, Matrix&)> eval_deriv,
                          bool closed_loop,
                          std::map<std::string, double> params = {});

// ---------------------------------------------------------------------------
// EigenPath: gauge-fixed instantaneous spectral data on a grid.
//
// Gauge: discrete parallel transport; the phase of each level at grid point
// k+1 is chosen so that <n(s_k)|n(s_{k+1})> is real and nonnegative. Level
// identity across the grid is fixed by maximum-overlap assignment; an
// ambiguous assignment or a gap below `gap_threshold` aborts construction.
// ---------------------------------------------------------------------------

struct EigenPath {
  std::vector<double> grid;            // strictly increasing, s_0=0 .. s_K=1
  std::vector<RealVector> energies;    // per grid point, ascending in level
  std::vector<Matrix> vectors;         // per grid point, column n = |n(s_k)>
  std::vector<Matrix> deriv_samples;   // optional dH/ds samples (may be empty)
  double min_gap = 0.0;
  double gap_threshold = 0.0;
  bool closed_loop = false;      // endpoints describe the same generator
  double closure_defect = 0.0;   // ||H(1) - H(0)||_max when known

  int dim() const { return grid.empty() ? 0 : static_cast<int>(energies[0].size()); }
  int points() const { return static_cast<int>(grid.size()); }

  const Vector vector(int k, int n) const { return vectors[k].col(n); }
  double energy(int k, int n) const { return energies[k][n]; }
};

inline constexpr double kDefaultGapThreshold = 1e-8;

EigenPath build_eigenpath(const HamiltonianPath& path, int grid_size,
                          double gap_threshold = kDefaultGapThreshold);

/// Same construction over externally sampled generators (e.g. a dual system
/// known only through a solved propagator). `deriv` may be empty.
EigenPath build_eigenpath_from_samples(std::vector<double> grid,
                                       const std::vector<Matrix>& h,
                                       const std::vector<Matrix>& deriv,
                                       double gap_threshold = kDefaultGapThreshold,
                                       std::string label = "samples");

/// Diagnostic copy with an arbitrary per-point, per-level phase twist.
/// Deliberately breaks the transport gauge; used to check gauge invariance.
EigenPath regauged(const EigenPath& ep,
                   const std::vector<std::vector<double>>& phases);

/// Re-applies the discrete parallel-transport phase fixing to an arbitrarily
/// gauged path (each level's first vector is kept as the anchor).
EigenPath transport_gauged(const EigenPath& ep);

// ---------------------------------------------------------------------------
// Couplings
// ---------------------------------------------------------------------------

/// Two estimators for <n(s_k)| d_s |m(s_k)>:
///   fd_value     centered difference of the stored (gauge-fixed) vectors,
///   ratio_value  <n|dH/ds|m> / (e_m - e_n), available off-diagonal when
///                derivative data exist.
/// Both live in the gauge of the stored vectors, so they are directly
/// comparable; `agreement` is their absolute difference.
struct CouplingEstimate {
  int n = 0, m = 0;
  double s = 0.0;
  Complex fd_value{0.0, 0.0};
  std::optional<Complex> ratio_value;
  double agreement = 0.0;
};

CouplingEstimate coupling(const EigenPath& ep, const HamiltonianPath* path,
                          int n, int m, int k);

/// All-pairs coupling table on the full grid: table[k](n,m) ~ <n|d_s|m>.
/// Off-diagonal entries use the ratio estimator when derivative data exist
/// (analytic path derivative or stored samples), otherwise centered
/// differences; endpoints copy their interior neighbor. Diagonals are always
/// finite differences (they vanish in the transport gauge up to grid error).
std::vector<Matrix> coupling_table(const EigenPath& ep,
                                   const HamiltonianPath* path);

/// Largest off-diagonal coupling modulus over the whole grid.
double max_offdiagonal_coupling(const EigenPath& ep,
                                const HamiltonianPath* path);

// ---------------------------------------------------------------------------
// Holonomy and gaps
// ---------------------------------------------------------------------------

/// Geometric phase of level n around the closed loop, via the discrete
/// holonomy (Pancharatnam) product
///   gamma = -Im sum_k log <n(s_k)|n(s_{k+1})>
/// with the final overlap closing the loop against |n(s_0)>. Exactly gauge
/// invariant on the grid. Reduced to the principal branch [-pi, pi); a
/// holonomy of half a turn is reported as -pi.
double berry_phase(const EigenPath& ep, int n);

/// Exact minimum of e_{n+1}(s_k) - e_n(s_k) over the stored grid.
double min_gap(const EigenPath& ep);

/// Reduce an angle to [-pi, pi).
double wrap_angle(double x);

/// Distance between two angles on the circle, in [0, pi].
double angle_distance(double a, double b);

}  // namespace adlab::spectral
