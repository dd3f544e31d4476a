#include "adlab/evolve.hpp"

#include <cmath>

namespace adlab::evolve {

namespace {

constexpr double kStepRule = 0.1;  // T * max||H|| * ds must stay below this

long align_up(long value, long multiple) {
  return ((value + multiple - 1) / multiple) * multiple;
}

void check_spec(const EvolutionSpec& spec) {
  if (!spec.path.eval)
    fail(ErrorKind::Precondition, "propagate: path has no evaluator");
  if (!(spec.T > 0) || !std::isfinite(spec.T))
    fail(ErrorKind::InputDomain, "propagate: T must be positive and finite");
  if (spec.initial.dim() != spec.path.dim)
    fail(ErrorKind::Precondition,
         "propagate: initial state dimension does not match the path");
  if (spec.sample_count < 2)
    fail(ErrorKind::Precondition, "propagate: sample_count must be >= 2");
}

}  // namespace

long resolve_steps(const EvolutionSpec& spec) {
  check_spec(spec);
  const double max_h = spec.path.max_norm_estimate();
  const long rule = static_cast<long>(std::ceil(spec.T * max_h / kStepRule));
  const long segments = spec.sample_count - 1;
  long steps = std::max({spec.steps, rule, segments});
  return align_up(steps, segments);
}

int EvolutionTrace::sample_index(double s) const {
  const int segments = static_cast<int>(grid.size()) - 1;
  const int i = static_cast<int>(std::lround(s * segments));
  if (i < 0 || i > segments || std::abs(grid[i] - s) > 1e-9)
    fail(ErrorKind::Precondition,
         "EvolutionTrace: s=" + std::to_string(s) + " is not a sample point");
  return i;
}

EvolutionTrace propagate(const EvolutionSpec& spec) {
  const long steps = resolve_steps(spec);
  const int samples = spec.sample_count;
  const long stride = steps / (samples - 1);
  const double ds = 1.0 / static_cast<double>(steps);
  const int dim = spec.path.dim;

  EvolutionTrace trace(spec.initial);
  trace.T = spec.T;
  trace.steps = steps;
  trace.dim = dim;
  trace.path = spec.path;
  trace.grid.reserve(samples);
  trace.psi.reserve(samples);
  trace.U.reserve(samples);

  Matrix u = Matrix::Identity(dim, dim);
  Matrix h(dim, dim), step, scratch, next;

  double defect = 0.0;
  auto retain = [&](long step_index) {
    const double s = static_cast<double>(step_index) / steps;
    const double d = unitarity_defect(u);
    defect = std::max(defect, d);
    if (d > UnitaryMatrix::kTolerance)
      fail(ErrorKind::Numerical,
           "propagate: unitarity defect " + std::to_string(d) +
               " at s=" + std::to_string(s));
    if (!all_finite(u))
      fail(ErrorKind::Numerical,
           "propagate: non-finite propagator at s=" + std::to_string(s));
    trace.grid.push_back(s);
    trace.U.emplace_back(u);
    trace.psi.emplace_back(Vector(u * spec.initial.raw()));
  };

  retain(0);
  for (long j = 0; j < steps; ++j) {
    spec.path.eval((j + 0.5) * ds, h);
    expm_antiherm_into(h, spec.T * ds, step, scratch);
    next.noalias() = step * u;
    u.swap(next);
    if ((j + 1) % stride == 0) retain(j + 1);
  }
  trace.unitarity_defect = defect;
  return trace;
}

Matrix propagator_at(const EvolutionTrace& trace, double s) {
  if (!trace.path)
    fail(ErrorKind::Precondition,
         "propagator_at: trace has no generator evaluator");
  if (s < -1e-12 || s > 1.0 + 1e-12)
    fail(ErrorKind::Precondition, "propagator_at: s outside [0, 1]");
  s = std::min(std::max(s, 0.0), 1.0);

  const int segments = static_cast<int>(trace.grid.size()) - 1;
  int j = std::min(static_cast<int>(s * segments), segments);
  while (j > 0 && trace.grid[j] > s + 1e-15) --j;

  const double ds = 1.0 / static_cast<double>(trace.steps);
  const long stride = trace.steps / segments;
  long k = static_cast<long>(j) * stride;

  Matrix u = trace.U[j].raw();
  Matrix h(trace.dim, trace.dim), step, scratch, next;
  while (static_cast<double>(k + 1) * ds <= s + 1e-15) {
    trace.path->eval((k + 0.5) * ds, h);
    expm_antiherm_into(h, trace.T * ds, step, scratch);
    next.noalias() = step * u;
    u.swap(next);
    ++k;
  }
  const double rem = s - static_cast<double>(k) * ds;
  if (rem > 1e-15) {
    // generator frozen at the step midpoint, as in the integrator itself
    trace.path->eval((k + 0.5) * ds, h);
    expm_antiherm_into(h, trace.T * rem, step, scratch);
    next.noalias() = step * u;
    u.swap(next);
  }
  return u;
}

ValidatedTrace propagate_validated(const EvolutionSpec& spec,
                                   double tolerance) {
  EvolutionTrace coarse = propagate(spec);
  EvolutionSpec doubled = spec;
  doubled.steps = 2 * coarse.steps;
  EvolutionTrace fine = propagate(doubled);
  const double defect =
      (coarse.psi.back().raw() - fine.psi.back().raw()).norm();
  if (defect > tolerance)
    fail(ErrorKind::Accuracy,
         "propagate: step-doubling moved the final state by " +
             std::to_string(defect) + " (> " + std::to_string(tolerance) +
             "); increase the step count");
  return ValidatedTrace{std::move(coarse), defect};
}

// ---------------------------------------------------------------------------
// Picture factorization
// ---------------------------------------------------------------------------

PictureDecomposition factor_picture(const EvolutionTrace& trace,
                                    const spectral::EigenPath& ep,
                                    PictureKind kind) {
  if (ep.dim() != trace.dim)
    fail(ErrorKind::Precondition, "factor_picture: dimension mismatch");
  const int ep_segments = ep.points() - 1;

  PictureDecomposition out;
  out.kind = kind;
  out.grid = trace.grid;
  out.ep_index.reserve(trace.grid.size());
  for (double s : trace.grid) {
    const int idx = static_cast<int>(std::lround(s * ep_segments));
    if (idx < 0 || idx >= ep.points() || std::abs(ep.grid[idx] - s) > 1e-9)
      fail(ErrorKind::Precondition,
           "factor_picture: trace sample s=" + std::to_string(s) +
               " is not on the eigenpath grid");
    out.ep_index.push_back(idx);
  }

  // Cumulative trapezoid of each level's energy over the eigenpath grid.
  const int n = ep.dim();
  std::vector<RealVector> theta(ep.points(), RealVector::Zero(n));
  for (int k = 1; k < ep.points(); ++k)
    theta[k] = theta[k - 1] + 0.5 * (ep.grid[k] - ep.grid[k - 1]) *
                                  (ep.energies[k - 1] + ep.energies[k]);

  const bool dynamical = (kind == PictureKind::DynamicalPhaseFrame);
  const Matrix& frame0 = ep.vectors[out.ep_index.front()];

  out.V.reserve(trace.grid.size());
  out.coeffs.reserve(trace.grid.size());
  out.reconstruction_defect = 0.0;
  out.norm_defect = 0.0;

  for (size_t i = 0; i < trace.grid.size(); ++i) {
    const int k = out.ep_index[i];
    const Matrix& frame = ep.vectors[k];
    Vector phi(n);
    Matrix d = Matrix::Zero(n, n);
    for (int lvl = 0; lvl < n; ++lvl) {
      const double phase = dynamical ? trace.T * theta[k][lvl] : 0.0;
      const Complex plus(std::cos(phase), std::sin(phase));
      phi[lvl] = plus * frame.col(lvl).dot(trace.psi[i].raw());
      d(lvl, lvl) = std::conj(plus);
    }
    Matrix v = frame * d * frame0.adjoint();
    out.norm_defect =
        std::max(out.norm_defect, std::abs(phi.squaredNorm() - 1.0));
    out.reconstruction_defect =
        std::max(out.reconstruction_defect,
                 (v * (frame0 * phi) - trace.psi[i].raw()).norm());
    out.V.push_back(std::move(v));
    out.coeffs.push_back(std::move(phi));
  }

  if (out.norm_defect > 1e-9)
    fail(ErrorKind::Numerical,
         "factor_picture: coefficient norm defect " +
             std::to_string(out.norm_defect));
  if (out.reconstruction_defect > 1e-9)
    fail(ErrorKind::Numerical,
         "factor_picture: reconstruction defect " +
             std::to_string(out.reconstruction_defect));
  return out;
}

// ---------------------------------------------------------------------------
// Dual system
// ---------------------------------------------------------------------------

DualSystem dual_system(const EvolutionTrace& trace_a) {
  if (!trace_a.path)
    fail(ErrorKind::Precondition,
         "dual_system: source trace has no generator evaluator");
  const spectral::HamiltonianPath& path = *trace_a.path;
  const bool have_deriv = path.has_derivative();
  const int dim = trace_a.dim;
  const long steps = trace_a.steps;
  const int samples = static_cast<int>(trace_a.grid.size());
  const long stride = steps / (samples - 1);
  const double ds = 1.0 / static_cast<double>(steps);
  const double T = trace_a.T;

  DualSystem dual(trace_a.initial);
  dual.H_b.reserve(samples);
  if (have_deriv) dual.dH_b.reserve(samples);

  EvolutionTrace& tb = dual.trace_b;
  tb.T = T;
  tb.steps = steps;
  tb.dim = dim;
  tb.grid.reserve(samples);
  tb.psi.reserve(samples);
  tb.U.reserve(samples);

  Matrix ua = Matrix::Identity(dim, dim);
  Matrix ub = Matrix::Identity(dim, dim);
  Matrix h(dim, dim), hd(dim, dim), hb(dim, dim);
  Matrix half, step, scratch, a, next;

  double unitarity = 0.0;
  double consistency = 0.0;
  auto retain = [&](long step_index) {
    const double s = static_cast<double>(step_index) / steps;
    const double d = unitarity_defect(ub);
    unitarity = std::max(unitarity, d);
    if (d > UnitaryMatrix::kTolerance)
      fail(ErrorKind::Numerical,
           "dual_system: unitarity defect " + std::to_string(d) + " at s=" +
               std::to_string(s));
    Matrix g = ub * ua;
    g.diagonal().array() -= 1.0;
    consistency = std::max(consistency, max_norm(g));
    tb.grid.push_back(s);
    tb.U.emplace_back(ub);
    tb.psi.emplace_back(Vector(ub * trace_a.initial.raw()));
    path.eval(s, h);
    dual.H_b.push_back(Matrix(-(ua.adjoint() * h * ua)));
    if (have_deriv) {
      path.eval_deriv(s, hd);
      dual.dH_b.push_back(Matrix(-(ua.adjoint() * hd * ua)));
    }
  };

  retain(0);
  for (long j = 0; j < steps; ++j) {
    const double smid = (j + 0.5) * ds;
    path.eval(smid, h);
    // midpoint propagator via an extra half step of the same generator
    expm_antiherm_into(h, T * ds * 0.5, half, scratch);
    a.noalias() = half * ua;
    hb.noalias() = -(a.adjoint() * h * a);
    expm_antiherm_into(hb, T * ds, step, scratch);
    next.noalias() = step * ub;
    ub.swap(next);
    expm_antiherm_into(h, T * ds, step, scratch);
    next.noalias() = step * ua;
    ua.swap(next);
    if ((j + 1) % stride == 0) retain(j + 1);
  }
  tb.unitarity_defect = unitarity;
  dual.consistency_defect = consistency;
  if (consistency > 1e-6)
    fail(ErrorKind::Numerical,
         "dual_system: ||U_b U_a - I||_max = " + std::to_string(consistency) +
             " exceeds 1e-6; increase the step count");

  // Synthesized generator for the dual trace: evaluable at arbitrary s
  // through the stored propagator. Assembled directly (not via make_path):
  // the piecewise-exponential propagator is not C^1, so the strict
  // derivative/difference consistency check does not apply to it.
  auto base = std::make_shared<const EvolutionTrace>(trace_a);
  spectral::HamiltonianPath pb;
  pb.name = "dual:" + path.name;
  pb.dim = dim;
  pb.params = path.params;
  pb.closed_loop = false;
  pb.eval = [base](double s, Matrix& out) {
    const Matrix u = propagator_at(*base, s);
    Matrix hh(base->dim, base->dim);
    base->path->eval(s, hh);
    out.noalias() = -(u.adjoint() * hh * u);
  };
  if (have_deriv) {
    pb.eval_deriv = [base](double s, Matrix& out) {
      const Matrix u = propagator_at(*base, s);
      Matrix hh(base->dim, base->dim);
      base->path->eval_deriv(s, hh);
      out.noalias() = -(u.adjoint() * hh * u);
    };
  }
  tb.path = std::move(pb);
  return dual;
}

}  // namespace adlab::evolve
