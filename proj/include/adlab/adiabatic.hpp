#pragma once

// The adiabatic approximant, the transition-suppression condition, residual
// checks of the coefficient integral equations, and T-sweeps measuring
// convergence (or its failure) in the adiabatic limit.

#include <string>
#include <vector>

#include "adlab/evolve.hpp"

namespace adlab::adiabatic {

// ---------------------------------------------------------------------------
// Approximant: dynamical phase x geometric factor x instantaneous eigenstate,
//   psi_A(s) = exp[-i T Theta_n(s)] exp[-i alpha_n(s)] |n(s)>,
// with Theta_n the cumulative trapezoid of e_n and alpha_n the accumulated
// frame phase (zero in the transport gauge, so the construction is covariant
// under regauging).
// ---------------------------------------------------------------------------

struct AdiabaticApproximant {
  int level = 0;
  double T = 0.0;
  std::vector<double> grid;
  std::vector<double> dynamical_phase;  // Theta_n(s_k), no T factor
  std::vector<double> geometric_phase;  // alpha_n(s_k)
  std::vector<Vector> frame;            // |n(s_k)> as stored in the eigenpath

  Vector state_at(int k) const;
  Complex geometric_factor(int k) const;  // unit modulus by construction
};

AdiabaticApproximant make_approximant(const spectral::EigenPath& ep, int level,
                                      double T);

/// Approximant state at a single grid point s (must lie on the eigenpath
/// grid). Convenience wrapper over make_approximant.
StateVector adiabatic_state(const spectral::EigenPath& ep, int level, double s,
                            double T);

// ---------------------------------------------------------------------------
// Transition-suppression condition: the running oscillatory integral
//   C_n(s, T) = | sum_{m != n} int_0^s <n|d|m> e^{i T int (e_n - e_m)}
//                 phi_m ds' |.
// Small values certify that level n keeps its population. phi_m inside the
// integral is either the measured coefficient trace (SelfConsistent) or
// frozen at phi_m(0) (Frozen); both are reported, never silently one.
// ---------------------------------------------------------------------------

enum class ConditionMode { SelfConsistent, Frozen };

struct ConditionReport {
  double T = 0.0;
  int level = 0;
  ConditionMode mode = ConditionMode::SelfConsistent;
  std::vector<double> s;
  std::vector<double> value;  // C_level(s_k, T), >= 0
  double max_value = 0.0;
};

/// Oscillatory integrals run on the trace sample grid by trapezoid with
/// accumulated phase increments. Requires at least 20 samples per oscillation
/// period and a coarsening self-check below 1e-6, otherwise raises an
/// accuracy error asking for a finer grid.
ConditionReport qat_condition(const spectral::EigenPath& ep,
                              const spectral::HamiltonianPath* path,
                              const evolve::EvolutionTrace& trace, int level,
                              ConditionMode mode);

/// Max-over-s l2 residual of the coefficient integral equations: the measured
/// dynamical-phase-frame coefficients are substituted into
///   phi_n(s) = phi_n(0) - sum_{m != n} int <n|d|m> e^{i T int(e_n - e_m)}
///              phi_m ds'.
/// With DynamicalPhaseFrame the oscillating factor is bookkept explicitly;
/// with FrameOnly the factor is folded into the kernel product in one pass.
/// The two assemblies are algebraically identical; on a dual system the
/// folded kernel is non-oscillatory (the resonant factors counterbalance).
double coefficient_residual(const spectral::EigenPath& ep,
                            const spectral::HamiltonianPath* path,
                            const evolve::EvolutionTrace& trace,
                            evolve::PictureKind kind);

// ---------------------------------------------------------------------------
// Convergence sweeps over the duration T
// ---------------------------------------------------------------------------

enum class SystemKind { Original, Dual };

struct SweepOptions {
  int grid_size = 2048;         // eigenpath / sample grid (dual runs refine)
  long steps = 0;               // 0 = automatic step rule
  double gap_threshold = spectral::kDefaultGapThreshold;
  int min_points_per_period = 24;
  bool parallel = true;
};

struct ConvergenceReport {
  std::string model;
  SystemKind system = SystemKind::Original;
  int level = 0;
  std::vector<double> Ts;
  std::vector<double> D;                 // max_s ||phi(s) - phi(0)||_2 per T
  std::vector<double> dual_consistency;  // ||U_b U_a - I|| per T (Dual only)
  double slope = 0.0;          // least-squares slope of log D vs log T
  double fit_residual = 0.0;   // rms residual of the fit
  bool exact = false;          // all D <= 1e-9; slope fit skipped
  bool discarded_transients = false;  // two smallest T dropped from the fit
};

/// For each T: propagate, factor into the dynamical-phase frame, record the
/// deviation D(T) = max_s ||phi(s) - phi(0)||_2, then fit log D against
/// log T. SystemKind::Dual runs the dual construction per T and factors the
/// dual trace in its own instantaneous eigenframe. Member runs execute
/// concurrently; results assemble in T order.
ConvergenceReport convergence_sweep(const spectral::HamiltonianPath& path,
                                    SystemKind system,
                                    const std::vector<double>& Ts, int level,
                                    const SweepOptions& options = {});

/// qat_condition across a T list with automatic grid refinement (doubling on
/// accuracy errors, capped at 2^21 intervals).
std::vector<ConditionReport> condition_sweep(
    const spectral::HamiltonianPath& path, SystemKind system,
    const std::vector<double>& Ts, int level, ConditionMode mode,
    const SweepOptions& options = {});

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms in log space
};

LogLogFit fit_loglog(const std::vector<double>& x,
                     const std::vector<double>& y);

}  // namespace adlab::adiabatic
