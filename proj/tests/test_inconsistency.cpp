// Premise probes and the dual-system survival overlap.
//
// Key closed forms:
//   - off-diagonal coupling magnitude pi sin(theta) (rotating field, 1 cycle)
//   - survival probability of the dual system approaches
//     1 - sin^2(theta) sin^2(omega t / 2) as omega0/omega grows; the exact
//     finite-parameter overlap comes from the rotating-frame propagator
//   - at theta=pi/2, omega t = pi, the exact amplitude is
//     (omega/W) sin(W t / 2) with W = sqrt(omega0^2 + omega^2), so the
//     probability is bounded by (omega/omega0)^2

#include <doctest.h>

#include "adlab/inconsistency.hpp"
#include "adlab/spectral.hpp"
#include "oracles.hpp"

using namespace adlab;
using models::SpinRotatingField;

namespace {

struct ProbeSetup {
  spectral::HamiltonianPath path;
  spectral::EigenPath ep;
  evolve::EvolutionTrace trace;
};

ProbeSetup make_probe(spectral::HamiltonianPath path, double T, int grid,
                      int level = 0) {
  auto ep = spectral::build_eigenpath(path, grid);
  evolve::EvolutionSpec spec{path, T, 0, StateVector(ep.vector(0, level)),
                             grid + 1};
  auto trace = evolve::propagate(spec);
  return ProbeSetup{std::move(path), std::move(ep), std::move(trace)};
}

std::vector<double> uniform_grid(double upto, int count) {
  std::vector<double> t(count);
  for (int i = 0; i < count; ++i) t[i] = upto * i / (count - 1);
  return t;
}

}  // namespace

TEST_CASE("constant generator satisfies every premise exactly") {
  auto s = make_probe(
      models::make_model("constant", {}, {{"energies", {0.0, 1.0}}}), 20.0,
      128);
  auto report = inconsistency::premise_probe(s.ep, s.path, s.trace);
  CHECK(report.max_offdiag <= 1e-12);
  REQUIRE(report.berry_phases.size() == 2);
  CHECK(std::abs(report.berry_phases[0]) <= 1e-12);
  CHECK(report.rigid_frame_deviation <= 1e-9);
  CHECK(report.overlap_gap <= 1e-9);
}

TEST_CASE("equatorial rotating field breaks the premises maximally") {
  SpinRotatingField m;
  m.theta = M_PI / 2;
  auto s = make_probe(m.path(), 50.0, 4096);
  auto report = inconsistency::premise_probe(s.ep, s.path, s.trace);
  CHECK(report.max_offdiag == doctest::Approx(M_PI).epsilon(1e-7));
  REQUIRE(report.berry_phases.size() == 2);
  CHECK(spectral::angle_distance(report.berry_phases[1], -M_PI) <= 1e-6);
  CHECK(report.rigid_frame_deviation > 1.0);
  CHECK(report.overlap_gap > 1e-3);
}

TEST_CASE("aligned field: vanishing couplings and vanishing holonomy") {
  SpinRotatingField m;
  m.theta = 0.0;
  auto s = make_probe(m.path(), 50.0, 1024);
  auto report = inconsistency::premise_probe(s.ep, s.path, s.trace);
  CHECK(report.max_offdiag <= 1e-9);
  for (double g : report.berry_phases)
    CHECK(spectral::angle_distance(g, 0.0) <= 1e-9);
  CHECK(report.overlap_gap <= 1e-9);
}

TEST_CASE("no catalog model pairs vanishing couplings with a holonomy") {
  auto check = [](const inconsistency::InconsistencyReport& r) {
    double min_phase = std::numeric_limits<double>::infinity();
    for (double g : r.berry_phases)
      min_phase = std::min(min_phase, std::abs(g));
    const bool forbidden = r.max_offdiag <= 1e-6 &&
                           !r.berry_phases.empty() && min_phase >= 1e-3;
    REQUIRE_FALSE(forbidden);
  };
  check(inconsistency::premise_probe(
      make_probe(models::make_model("constant"), 30.0, 128).ep,
      models::make_model("constant"),
      make_probe(models::make_model("constant"), 30.0, 128).trace));
  for (int i = 0; i <= 8; ++i) {
    SpinRotatingField m;
    m.theta = i * M_PI / 8.0;
    auto s = make_probe(m.path(), 30.0, 1024);
    check(inconsistency::premise_probe(s.ep, s.path, s.trace));
  }
  models::LandauZener lz;
  auto s = make_probe(lz.path(), 30.0, 1024);
  check(inconsistency::premise_probe(s.ep, s.path, s.trace));
}

TEST_CASE("overlap identity gap closes as theta -> 0, monotonically") {
  std::vector<double> gaps;
  for (int i = 0; i <= 8; ++i) {
    SpinRotatingField m;
    m.theta = i * (M_PI / 8.0) / 8.0;  // [0, pi/8] in 9 steps
    auto s = make_probe(m.path(), 50.0, 2048);
    gaps.push_back(inconsistency::overlap_identity_check(s.ep, s.trace, 0));
  }
  CHECK(gaps[0] <= 1e-9);
  for (size_t i = 1; i < gaps.size(); ++i) REQUIRE(gaps[i] >= gaps[i - 1]);
}

TEST_CASE("overlap identity gap: pinned regression value") {
  SpinRotatingField m;
  m.theta = M_PI / 3;
  auto s = make_probe(m.path(), 50.0, 2048);
  const double gap = inconsistency::overlap_identity_check(s.ep, s.trace, 0);
  CHECK(gap == doctest::Approx(0.024088886698).epsilon(1e-6));
}

TEST_CASE("overlap identity requires the matching initial level") {
  SpinRotatingField m;
  auto s = make_probe(m.path(), 10.0, 128, 0);
  CHECK_THROWS_AS(inconsistency::overlap_identity_check(s.ep, s.trace, 1),
                  Error);
}

TEST_CASE("dual survival: aligned field never leaves its state") {
  SpinRotatingField m;
  m.theta = 0.0;
  auto report =
      inconsistency::spin_fidelity_check(m, uniform_grid(m.total_duration(), 65));
  for (const auto& p : report.points) {
    REQUIRE(p.computed == doctest::Approx(1.0).epsilon(1e-9));
    REQUIRE(p.formula == doctest::Approx(1.0));
  }
}

TEST_CASE("dual survival matches the squared convention") {
  SpinRotatingField m;
  m.theta = M_PI / 4;
  m.omega0 = 400.0;
  auto report =
      inconsistency::spin_fidelity_check(m, uniform_grid(m.total_duration(), 129));
  CHECK(report.matched_convention == "squared");
  CHECK(report.oracle_defect <= 5e-7);
  CHECK(report.max_dev_probability <= 4.0 / m.omega0);  // O(omega/omega0)
  CHECK(report.max_dev_amplitude > 0.1);
  // the quarter-cycle row: formula = 1 - (1/2)(1/2) = 3/4 in the squared
  // convention
  const auto& quarter = report.points[32];
  CHECK(quarter.t == doctest::Approx(M_PI / 2 / m.omega));
  CHECK(quarter.formula == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(quarter.formula_sq == doctest::Approx(0.75).epsilon(1e-2));
  CHECK(std::abs(quarter.computed - std::sqrt(0.75)) <= 1e-2);
}

TEST_CASE("dual survival: equatorial dip reaches zero") {
  SpinRotatingField m;
  m.theta = M_PI / 2;
  m.omega0 = 2000.0;
  auto report =
      inconsistency::spin_fidelity_check(m, uniform_grid(m.total_duration(), 17));
  const auto& mid = report.points[8];  // omega t = pi
  CHECK(mid.formula == 0.0);
  CHECK(mid.formula_sq <= 1e-6);
  CHECK(report.matched_convention == "squared");
}

TEST_CASE("dual survival is periodic at resonant parameters") {
  // W / omega integer makes the rotating-frame factor exactly periodic:
  // omega0 = sqrt(k^2 - 1), theta = pi/2, here k = 5.
  SpinRotatingField m;
  m.theta = M_PI / 2;
  m.omega = 1.0;
  m.omega0 = std::sqrt(24.0);
  m.cycles = 2.0;
  const int per_cycle = 64;
  auto report = inconsistency::spin_fidelity_check(
      m, uniform_grid(m.total_duration(), 2 * per_cycle + 1), 1 << 20);
  for (int i = 0; i <= per_cycle; ++i)
    REQUIRE(std::abs(report.points[i].computed -
                     report.points[i + per_cycle].computed) <= 1e-8);
}

TEST_CASE("dual survival: approximate periodicity off resonance") {
  SpinRotatingField m;
  m.theta = M_PI / 3;
  m.omega0 = 1000.0;
  m.cycles = 2.0;
  const int per_cycle = 64;
  auto report = inconsistency::spin_fidelity_check(
      m, uniform_grid(m.total_duration(), 2 * per_cycle + 1));
  double worst = 0.0;
  for (int i = 0; i <= per_cycle; ++i)
    worst = std::max(worst, std::abs(report.points[i].computed -
                                     report.points[i + per_cycle].computed));
  CHECK(worst <= 10.0 / m.omega0);
}

TEST_CASE("fidelity check rejects non-uniform grids") {
  SpinRotatingField m;
  std::vector<double> bad = {0.0, 1.0, m.total_duration()};
  CHECK_THROWS_AS(inconsistency::spin_fidelity_check(m, bad), Error);
}
