#pragma once

// Exact (to integrator tolerance) solution of the scaled-time equation
//   i d/ds psi = T H(s) psi,   s in [0, 1],
// with the total duration T as the adiabatic parameter. The integrator is the
// exponential midpoint rule, one unitary factor per step, so norm and
// unitarity are preserved by construction and accuracy is certified by step
// doubling rather than scheme order.

#include <memory>
#include <optional>
#include <vector>

#include "adlab/spectral.hpp"

namespace adlab::evolve {

struct EvolutionSpec {
  spectral::HamiltonianPath path;
  double T = 1.0;
  /// Per-unit-s step count. 0 means automatic; any value is raised until
  /// T * max_s ||H||_max / steps <= 0.1 and aligned to the sample grid.
  long steps = 0;
  StateVector initial;
  int sample_count = 513;
};

/// Steps actually used for a spec (rule application + sample alignment).
long resolve_steps(const EvolutionSpec& spec);

struct EvolutionTrace {
  explicit EvolutionTrace(StateVector init) : initial(std::move(init)) {}

  double T = 0.0;
  long steps = 0;
  int dim = 0;
  std::vector<double> grid;          // retained sample positions, s_0=0..s_K=1
  std::vector<StateVector> psi;      // psi(s_k) = U(s_k) initial
  std::vector<UnitaryMatrix> U;      // accumulated propagator at samples
  double unitarity_defect = 0.0;     // max over samples of ||U^dag U - I||_max
  StateVector initial;
  /// Generator family behind the trace. Absent only for sample-defined
  /// systems; the dual construction installs a synthesized evaluator.
  std::optional<spectral::HamiltonianPath> path;

  int sample_index(double s) const;  // nearest sample, error if not on grid
};

EvolutionTrace propagate(const EvolutionSpec& spec);

/// Propagator at an arbitrary s, reconstructed from the nearest retained
/// sample by re-stepping with the trace's own step size. Exact at sample
/// points; between them it is the integrator's piecewise-exponential
/// interpolant (generator frozen at each step midpoint).
Matrix propagator_at(const EvolutionTrace& trace, double s);

struct ValidatedTrace {
  EvolutionTrace trace;
  double doubling_defect;  // l2 change of the final state under 2x steps
};

/// propagate + step-doubling certificate. Throws an accuracy error when the
/// doubled-step final state moves by more than `tolerance`.
ValidatedTrace propagate_validated(const EvolutionSpec& spec,
                                   double tolerance = 1e-8);

// ---------------------------------------------------------------------------
// Picture factorization psi(s) = V(s) . (sum_n phi_n(s) |n(0)>)
//
//   DynamicalPhaseFrame ("a"):  V(s) = sum_n e^{-i T Theta_n(s)} |n(s)><n(0)|,
//                               phi_n = e^{+i T Theta_n(s)} <n(s)|psi(s)>
//   FrameOnly ("b"):            V(s) = sum_n |n(s)><n(0)|,
//                               phi_n = <n(s)|psi(s)>
//
// with Theta_n(s) the cumulative trapezoid of e_n over the eigenpath grid.
// ---------------------------------------------------------------------------

enum class PictureKind { DynamicalPhaseFrame, FrameOnly };

struct PictureDecomposition {
  PictureKind kind;
  std::vector<double> grid;       // trace sample grid
  std::vector<int> ep_index;      // matching eigenpath indices
  std::vector<Matrix> V;          // unitary factor at each sample
  std::vector<Vector> coeffs;     // phi(s_k), components by level
  double reconstruction_defect;   // max ||V(s) F(0) phi(s) - psi(s)||_2
  double norm_defect;             // max |sum_n |phi_n|^2 - 1|
};

/// The eigenpath grid must contain every trace sample point.
PictureDecomposition factor_picture(const EvolutionTrace& trace,
                                    const spectral::EigenPath& ep,
                                    PictureKind kind);

// ---------------------------------------------------------------------------
// Dual system: H_b(s) = -U_a(s)^dag H_a(s) U_a(s), whose exact propagator is
// U_a^dag. H_b is evaluated from the numerically accumulated U_a at step
// midpoints (one extra half-step exponential), and the b-system is integrated
// independently with the same midpoint rule.
// ---------------------------------------------------------------------------

struct DualSystem {
  explicit DualSystem(StateVector init) : trace_b(std::move(init)) {}

  EvolutionTrace trace_b;
  std::vector<Matrix> H_b;    // at sample points
  std::vector<Matrix> dH_b;   // -U^dag H' U when H' is available, else empty
  double consistency_defect;  // max over samples of ||U_b U_a - I||_max
};

DualSystem dual_system(const EvolutionTrace& trace_a);

// ---------------------------------------------------------------------------
// Differential probe: compare d_s of the evolved state against d_s of the
// instantaneous-eigenstate approximant on a common dense grid. The raw
// derivative deviation carries a phase term amplified by T; the /T column is
// the normalized metric.
// ---------------------------------------------------------------------------

struct DerivativeProbeRow {
  double s;
  double state_dev;          // ||psi - psi_A||_2
  double deriv_dev;          // ||d_s psi - d_s psi_A||_2 (centered differences)
  double deriv_dev_over_T;
};

/// Requires trace sample spacing <= 1 / (100 T max||H||) and an eigenpath on
/// the same grid; the trace must start in level n of the eigenpath.
std::vector<DerivativeProbeRow> derivative_probe(const EvolutionTrace& trace,
                                                 const spectral::EigenPath& ep,
                                                 int n);

}  // namespace adlab::evolve
