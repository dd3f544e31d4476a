// Acceptance suite: every release-gating behavior, one pass/fail line each.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "adlab/adiabatic.hpp"
#include "adlab/inconsistency.hpp"
#include "adlab/models.hpp"

using namespace adlab;
using adiabatic::ConditionMode;
using adiabatic::SystemKind;
using evolve::EvolutionSpec;
using evolve::PictureKind;
using models::SpinRotatingField;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// --- 1: integrator against the rotating-frame closed form ------------------

Outcome oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  struct Params {
    double theta, omega0, omega, cycles;
  };
  const std::vector<Params> sets = {{M_PI / 3, 10.0, 1.0, 1.0},
                                    {M_PI / 4, 4.0, 1.0, 1.0},
                                    {1.0, 6.0, 0.7, 2.0},
                                    {2.4, 12.0, 1.5, 1.0},
                                    {M_PI / 2, 8.0, 1.0, 1.0}};
  double worst = 0.0;
  for (const auto& p : sets) {
    SpinRotatingField m;
    m.theta = p.theta;
    m.omega0 = p.omega0;
    m.omega = p.omega;
    m.cycles = p.cycles;
    models::verify_rabi_oracle(m);
    auto path = m.path();
    const double T = m.total_duration();
    Vector init(2);
    init << 1.0, 0.0;
    EvolutionSpec spec{path, T, 1 << 21, StateVector(init), 21};
    auto trace = evolve::propagate(spec);
    for (int k = 0; k <= 20; ++k) {
      const Matrix u = models::rabi_oracle(m, trace.grid[k] * T);
      worst = std::max(worst, max_norm(Matrix(trace.U[k].raw() - u)));
    }
  }
  const double elapsed = seconds_since(start);
  Outcome o;
  o.pass = worst <= 1e-8 && elapsed < 10.0;
  o.detail = "max |U - U_oracle| = " + fmt(worst) + " over 5 sets x 21 points, " +
             fmt(elapsed) + " s";
  return o;
}

// --- 2: decay for the original system, a floor for its dual ----------------

Outcome counterexample_sweeps() {
  const auto start = std::chrono::steady_clock::now();
  SpinRotatingField m;  // theta=pi/4, omega=1, omega0=4
  auto path = m.path();
  const std::vector<double> Ts = {16, 32, 64, 128, 256, 512, 1024};

  auto original =
      adiabatic::convergence_sweep(path, SystemKind::Original, Ts, 0);
  auto dual = adiabatic::convergence_sweep(path, SystemKind::Dual, Ts, 0);

  double min_D = 1e300;
  for (double d : dual.D) min_D = std::min(min_D, d);
  const double elapsed = seconds_since(start);

  Outcome o;
  o.pass = original.slope <= -0.8 && std::abs(dual.slope) <= 0.2 &&
           min_D >= 0.1 && elapsed < 120.0;
  o.detail = "slope_a = " + fmt(original.slope) +
             ", slope_b = " + fmt(dual.slope) + ", min D_b = " + fmt(min_D) +
             ", " + fmt(elapsed) + " s";
  return o;
}

// --- 3: the dual propagator inverts the original ---------------------------

Outcome dual_consistency() {
  SpinRotatingField m;
  auto path = m.path();
  double worst = 0.0;
  for (double T : {10.0, 100.0, 1000.0}) {
    auto ep = spectral::build_eigenpath(path, 512);
    EvolutionSpec spec{path, T, 0, StateVector(ep.vector(0, 0)), 513};
    auto dual = evolve::dual_system(evolve::propagate(spec));
    worst = std::max(worst, dual.consistency_defect);
  }
  Outcome o;
  o.pass = worst <= 1e-6;
  o.detail = "max ||U_b U_a - I|| = " + fmt(worst) + " over T in {10,100,1000}";
  return o;
}

// --- 4: survival overlap of the dual spin system ---------------------------

Outcome fidelity_formula() {
  SpinRotatingField m;
  m.theta = M_PI / 2;
  m.omega = 1.0;
  m.omega0 = 2000.0;
  const int count = 129;
  std::vector<double> t_grid(count);
  for (int i = 0; i < count; ++i)
    t_grid[i] = m.total_duration() * i / (count - 1.0);
  auto report = inconsistency::spin_fidelity_check(m, t_grid);

  const auto& mid = report.points[count / 2];  // omega t = pi
  Outcome o;
  o.pass = report.oracle_defect <= 1e-6 && mid.formula == 0.0 &&
           mid.formula_sq <= 1e-6 && report.matched_convention == "squared";
  o.detail = "oracle defect " + fmt(report.oracle_defect) +
             ", overlap^2 at omega t = pi: " + fmt(mid.formula_sq) +
             ", printed formula matches the " + report.matched_convention +
             " convention";
  return o;
}

// --- 5: geometric phases of the field cone ---------------------------------

Outcome berry_phases() {
  auto phase = [](double theta, int level) {
    SpinRotatingField m;
    m.theta = theta;
    return spectral::berry_phase(spectral::build_eigenpath(m.path(), 4096),
                                 level);
  };
  const double aligned0 = std::abs(spectral::wrap_angle(phase(0.0, 1)));
  const double anti0 = std::abs(spectral::wrap_angle(phase(0.0, 0)));
  const double aligned_pi = spectral::angle_distance(phase(M_PI, 1), 0.0);
  const double anti_pi = spectral::angle_distance(phase(M_PI, 0), 0.0);
  const double equator = spectral::angle_distance(phase(M_PI / 2, 1), -M_PI);
  Outcome o;
  const double worst =
      std::max({aligned0, anti0, aligned_pi, anti_pi, equator});
  o.pass = worst <= 1e-6;
  o.detail = "theta in {0, pi}: |gamma| <= " +
             fmt(std::max({aligned0, anti0, aligned_pi, anti_pi})) +
             "; theta = pi/2: |gamma - (-pi)| = " + fmt(equator);
  return o;
}

// --- 6: no vanishing couplings alongside a holonomy ------------------------

Outcome premise_dichotomy() {
  double worst_formula_gap = 0.0;
  bool dichotomy = true;

  auto probe = [](const spectral::HamiltonianPath& path, int grid) {
    auto ep = spectral::build_eigenpath(path, grid);
    EvolutionSpec spec{path, 50.0, 0, StateVector(ep.vector(0, 0)), grid + 1};
    auto trace = evolve::propagate(spec);
    return inconsistency::premise_probe(ep, path, trace);
  };
  auto violates = [&](const inconsistency::InconsistencyReport& r) {
    double min_phase = 1e300;
    for (double g : r.berry_phases) min_phase = std::min(min_phase, std::abs(g));
    return r.max_offdiag <= 1e-6 && !r.berry_phases.empty() &&
           min_phase >= 1e-3;
  };

  for (int i = 0; i <= 8; ++i) {
    SpinRotatingField m;
    m.theta = i * M_PI / 8.0;
    auto r = probe(m.path(), 1024);
    if (violates(r)) dichotomy = false;
    worst_formula_gap = std::max(
        worst_formula_gap, std::abs(r.max_offdiag - M_PI * std::sin(m.theta)));
  }
  if (violates(probe(models::make_model("constant"), 256))) dichotomy = false;
  if (violates(probe(models::make_model("landau-zener"), 1024)))
    dichotomy = false;

  Outcome o;
  o.pass = dichotomy && worst_formula_gap <= 1e-6;
  o.detail = std::string("dichotomy ") + (dichotomy ? "holds" : "VIOLATED") +
             "; max |coupling - pi sin(theta)| = " + fmt(worst_formula_gap);
  return o;
}

// --- 7: transition-suppression condition across T --------------------------

Outcome condition_decay() {
  SpinRotatingField m;
  auto path = m.path();
  const std::vector<double> Ts = {16, 32, 64, 128, 256, 512, 1024};
  auto original = adiabatic::condition_sweep(path, SystemKind::Original, Ts, 1,
                                             ConditionMode::SelfConsistent);
  std::vector<double> maxima;
  for (const auto& r : original) maxima.push_back(r.max_value);
  const auto fit = adiabatic::fit_loglog(Ts, maxima);

  auto dual = adiabatic::condition_sweep(path, SystemKind::Dual, Ts, 1,
                                         ConditionMode::SelfConsistent);
  double floor = 1e300;
  for (const auto& r : dual) floor = std::min(floor, r.max_value);

  Outcome o;
  o.pass = fit.slope >= -1.2 && fit.slope <= -0.8 && floor >= 0.05;
  o.detail = "slope_a = " + fmt(fit.slope) + ", min_b = " + fmt(floor);
  return o;
}

// --- 8: numerical hygiene ---------------------------------------------------

Outcome numerical_hygiene() {
  SpinRotatingField m;
  auto path = m.path();
  double worst_unitarity = 0.0;
  double worst_doubling = 0.0;

  // step-doubling certificates and unitarity across durations
  for (double T : {10.0, 100.0}) {
    auto ep = spectral::build_eigenpath(path, 512);
    EvolutionSpec spec{path, T, 1 << 18, StateVector(ep.vector(0, 0)), 513};
    auto v = evolve::propagate_validated(spec, 1e-8);
    worst_unitarity = std::max(worst_unitarity, v.trace.unitarity_defect);
    worst_doubling = std::max(worst_doubling, v.doubling_defect);
  }
  {
    SpinRotatingField stiff;
    stiff.theta = M_PI / 3;
    stiff.omega0 = 10.0;
    auto spath = stiff.path();
    Vector init(2);
    init << 1.0, 0.0;
    EvolutionSpec spec{spath, stiff.total_duration(), 1 << 18,
                       StateVector(init), 513};
    auto v = evolve::propagate_validated(spec, 1e-8);
    worst_doubling = std::max(worst_doubling, v.doubling_defect);
  }
  // a million-step run
  {
    auto ep = spectral::build_eigenpath(path, 512);
    EvolutionSpec spec{path, 5000.0, 1000000, StateVector(ep.vector(0, 0)),
                       513};
    auto trace = evolve::propagate(spec);
    worst_unitarity = std::max(worst_unitarity, trace.unitarity_defect);
  }

  // coefficient-equation residuals on both systems at T = 100
  const int grid = 16384;
  auto ep = spectral::build_eigenpath(path, grid);
  EvolutionSpec spec{path, 100.0, 0, StateVector(ep.vector(0, 0)), grid + 1};
  auto trace = evolve::propagate(spec);
  auto dual = evolve::dual_system(trace);
  worst_unitarity = std::max(worst_unitarity, trace.unitarity_defect);
  worst_unitarity = std::max(worst_unitarity, dual.trace_b.unitarity_defect);
  auto ep_b = spectral::build_eigenpath_from_samples(dual.trace_b.grid,
                                                     dual.H_b, dual.dH_b);
  double worst_residual = 0.0;
  for (auto kind : {PictureKind::DynamicalPhaseFrame, PictureKind::FrameOnly}) {
    worst_residual = std::max(
        worst_residual, adiabatic::coefficient_residual(ep, &path, trace, kind));
    worst_residual = std::max(
        worst_residual,
        adiabatic::coefficient_residual(ep_b, nullptr, dual.trace_b, kind));
  }

  Outcome o;
  o.pass = worst_unitarity <= 1e-9 && worst_residual <= 1e-5 &&
           worst_doubling <= 1e-8;
  o.detail = "unitarity " + fmt(worst_unitarity) + ", residual " +
             fmt(worst_residual) + ", step-doubling " + fmt(worst_doubling);
  return o;
}

// --- 9: byte-identical reruns ------------------------------------------------

Outcome determinism() {
  const char* cfg_path = "acceptance_det.cfg";
  {
    std::ofstream cfg(cfg_path);
    cfg << "[model]\nname = spin-rotating-field\n[run]\nT = 16,32,64\nK = "
           "1024\n";
  }
  auto run_once = [&](const std::string& out) {
    const std::string cmd = std::string(ADLAB_CLI_BIN) + " sweep --config " +
                            cfg_path + " --out " + out;
    return std::system(cmd.c_str());
  };
  Outcome o;
  if (run_once("acceptance_det1.csv") != 0 ||
      run_once("acceptance_det2.csv") != 0) {
    o.pass = false;
    o.detail = "CLI run failed";
    return o;
  }
  auto slurp = [](const char* p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  const std::string a = slurp("acceptance_det1.csv");
  const std::string b = slurp("acceptance_det2.csv");
  o.pass = !a.empty() && a == b;
  o.detail = o.pass ? "two runs, " + std::to_string(a.size()) +
                          " identical bytes"
                    : "outputs differ";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"oracle equivalence (integrator vs closed form)", oracle_equivalence},
      {"counterexample sweeps (decay vs dual floor)", counterexample_sweeps},
      {"dual construction inverts the original", dual_consistency},
      {"dual survival overlap and printed formula", fidelity_formula},
      {"geometric phases of the field cone", berry_phases},
      {"coupling/holonomy dichotomy across the catalog", premise_dichotomy},
      {"condition decay and dual floor", condition_decay},
      {"numerical hygiene (unitarity, residuals, doubling)",
       numerical_hygiene},
      {"deterministic CSV output", determinism},
  };

  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    if (!outcome.pass) ++failures;
    std::printf("[%s] %zu/%zu %s: %s\n", outcome.pass ? "PASS" : "FAIL",
                i + 1, criteria.size(), criteria[i].name,
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  if (failures == 0) std::printf("all %zu criteria passed\n", criteria.size());
  return failures;
}
