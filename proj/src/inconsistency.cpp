#include "adlab/inconsistency.hpp"

#include <cmath>

#include "adlab/adiabatic.hpp"

namespace adlab::inconsistency {

namespace {

int initial_level(const spectral::EigenPath& ep,
                  const evolve::EvolutionTrace& trace) {
  int best = 0;
  double best_overlap = -1.0;
  for (int n = 0; n < ep.dim(); ++n) {
    const double o = std::abs(ep.vector(0, n).dot(trace.initial.raw()));
    if (o > best_overlap) {
      best_overlap = o;
      best = n;
    }
  }
  if (best_overlap < 1.0 - 1e-6)
    fail(ErrorKind::Precondition,
         "premise_probe: trace does not start in an eigenpath level "
         "(best overlap " + std::to_string(best_overlap) + ")");
  return best;
}

}  // namespace

double overlap_identity_check(const spectral::EigenPath& ep,
                              const evolve::EvolutionTrace& trace, int n) {
  if (n < 0 || n >= ep.dim())
    fail(ErrorKind::Precondition, "overlap_identity_check: level out of range");
  if (std::abs(ep.vector(0, n).dot(trace.initial.raw())) < 1.0 - 1e-6)
    fail(ErrorKind::Precondition,
         "overlap_identity_check: trace must start in level " +
             std::to_string(n));
  double gap = 0.0;
  for (size_t k = 0; k < trace.grid.size(); ++k) {
    const int idx =
        static_cast<int>(std::lround(trace.grid[k] * (ep.points() - 1)));
    if (idx < 0 || idx >= ep.points() ||
        std::abs(ep.grid[idx] - trace.grid[k]) > 1e-9)
      fail(ErrorKind::Precondition,
           "overlap_identity_check: trace sample off the eigenpath grid");
    const Vector& v = ep.vectors[idx].col(n);
    const double evolved = std::abs(v.dot(trace.U[k].raw() * v));
    const double frozen = std::abs(v.dot(ep.vector(0, n)));
    gap = std::max(gap, std::abs(evolved - frozen));
  }
  return gap;
}

InconsistencyReport premise_probe(const spectral::EigenPath& ep,
                                  const spectral::HamiltonianPath& path,
                                  const evolve::EvolutionTrace& trace) {
  InconsistencyReport report;
  report.model = path.name;
  report.level = initial_level(ep, trace);
  report.max_offdiag = spectral::max_offdiagonal_coupling(ep, &path);
  if (ep.closed_loop)
    for (int n = 0; n < ep.dim(); ++n)
      report.berry_phases.push_back(spectral::berry_phase(ep, n));

  const auto approx =
      adiabatic::make_approximant(ep, report.level, trace.T);
  const Vector anchor = ep.vector(0, report.level);
  for (int k = 0; k < ep.points(); ++k) {
    const Vector twisted = approx.geometric_factor(k) * approx.frame[k];
    report.rigid_frame_deviation =
        std::max(report.rigid_frame_deviation, (twisted - anchor).norm());
  }
  report.overlap_gap = overlap_identity_check(ep, trace, report.level);
  return report;
}

// ---------------------------------------------------------------------------
// Fidelity of the dual spin system
// ---------------------------------------------------------------------------

namespace {

Vector anchored_eigvec(const Matrix& h, int level) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  Vector v = solver.eigenvectors().col(level);
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  const Complex z = v[imax];
  if (std::abs(z) > 0) v *= std::conj(z) / std::abs(z);
  return v;
}

}  // namespace

FidelityReport spin_fidelity_check(const models::SpinRotatingField& model,
                                   const std::vector<double>& t_grid,
                                   long steps, int a_level) {
  const double duration = model.total_duration();
  const size_t count = t_grid.size();
  if (count < 2)
    fail(ErrorKind::Precondition, "spin_fidelity_check: need >= 2 grid points");
  for (size_t i = 0; i < count; ++i) {
    const double expected = duration * static_cast<double>(i) / (count - 1);
    if (std::abs(t_grid[i] - expected) > 1e-9 * std::max(1.0, duration))
      fail(ErrorKind::Precondition,
           "spin_fidelity_check: t_grid must be uniform over [0, 2 pi cycles "
           "/ omega]");
  }
  if (a_level != 0 && a_level != 1)
    fail(ErrorKind::Precondition, "spin_fidelity_check: a_level must be 0 or 1");

  verify_rabi_oracle(model);
  auto path = model.path();
  const Vector chi = anchored_eigvec(path.value(0.0).raw(), a_level);

  // The evolved overlap must land on the closed form; refine steps until it
  // does. The oracle is exact, so this doubles as the integrator check.
  constexpr double kOracleTol = 5e-7;
  constexpr long kStepCap = 1L << 27;

  std::vector<double> oracle(count);
  for (size_t i = 0; i < count; ++i)
    oracle[i] = std::abs(chi.dot(models::rabi_oracle(model, t_grid[i]) * chi));

  FidelityReport report;
  long attempt = std::max(steps, 1L);
  for (;; attempt *= 2) {
    evolve::EvolutionSpec spec{path, duration, attempt, StateVector(chi),
                               static_cast<int>(count)};
    const long resolved = evolve::resolve_steps(spec);
    auto dual = evolve::dual_system(evolve::propagate(spec));

    report.points.clear();
    report.oracle_defect = 0.0;
    const double s2 = std::sin(model.theta) * std::sin(model.theta);
    for (size_t i = 0; i < count; ++i) {
      FidelityPoint p;
      p.t = t_grid[i];
      // <psi_b(t)|psi_b(0)> with psi_b = U_b chi
      p.computed = std::abs(dual.trace_b.psi[i].raw().dot(chi));
      const double half = std::sin(0.5 * model.omega * p.t);
      p.formula = 1.0 - s2 * half * half;
      p.formula_sq = p.computed * p.computed;
      report.oracle_defect =
          std::max(report.oracle_defect, std::abs(p.computed - oracle[i]));
      report.points.push_back(p);
    }
    report.steps = resolved;
    if (report.oracle_defect <= kOracleTol) break;
    if (2 * resolved > kStepCap)
      fail(ErrorKind::Numerical,
           "spin_fidelity_check: integrator disagrees with the closed form "
           "by " + std::to_string(report.oracle_defect) +
               " at the step cap");
    attempt = 2 * resolved;
  }

  report.max_dev_amplitude = 0.0;
  report.max_dev_probability = 0.0;
  for (const auto& p : report.points) {
    report.max_dev_amplitude =
        std::max(report.max_dev_amplitude, std::abs(p.computed - p.formula));
    report.max_dev_probability =
        std::max(report.max_dev_probability, std::abs(p.formula_sq - p.formula));
  }
  report.matched_convention =
      report.max_dev_probability <= report.max_dev_amplitude ? "squared"
                                                             : "amplitude";
  return report;
}

}  // namespace adlab::inconsistency
