#pragma once

// Concrete generator families with closed-form oracles.

#include <map>
#include <string>
#include <vector>

#include "adlab/spectral.hpp"

namespace adlab::models {

// ---------------------------------------------------------------------------
// Spin-half in a rotating field.
//
//   H(s) = (omega0/2) [ sin(theta) cos(2 pi cycles s) sigma_x
//                     + sin(theta) sin(2 pi cycles s) sigma_y
//                     + cos(theta) sigma_z ]
//
// Eigenvalues are +-omega0/2 for every s. One traversal of s in [0,1] maps
// onto `cycles` full field rotations; at the physical rotation rate omega the
// traversal takes total_duration() = 2 pi cycles / omega, and s = t / T with
// T = total_duration() reproduces the rotating-field Hamiltonian in physical
// time. Scaled-time runs are free to use any other T; then the effective
// physical rotation rate is 2 pi cycles / T instead of omega.
// ---------------------------------------------------------------------------

struct SpinRotatingField {
  double omega0 = 4.0;  // level splitting
  double omega = 1.0;   // physical rotation rate
  double theta = 0.78539816339744831;  // tilt angle, pi/4
  double cycles = 1.0;  // rotations mapped onto s in [0,1]

  double total_duration() const { return 2.0 * 3.14159265358979323846 * cycles / omega; }
  bool closed() const;

  spectral::HamiltonianPath path() const;

  /// Physical-time Hamiltonian H(t) with field angle omega * t.
  Matrix hamiltonian_at_time(double t) const;
};

/// Closed-form propagator U(t) = R(t) exp(-i H_eff t) with
/// R(t) = exp(-i omega t sigma_z / 2) and H_eff = H(0) - (omega/2) sigma_z.
/// Call verify_rabi_oracle once before trusting values in a test chain.
Matrix rabi_oracle(const SpinRotatingField& model, double t);

/// Finite-difference check that i dU/dt = H(t) U holds to 1e-8. Stiff
/// parameter sets are verified through the exact time rescaling
/// U(t; omega0, omega) = U(lambda t; omega0/lambda, omega/lambda), which
/// keeps the difference stencil well conditioned. Throws on failure.
void verify_rabi_oracle(const SpinRotatingField& model);

// ---------------------------------------------------------------------------
// Landau-Zener avoided crossing (not cyclic):
//   H(s) = delta sigma_x + kappa (2s - 1) sigma_z
//   gap(s) = 2 sqrt(delta^2 + kappa^2 (2s-1)^2), minimal 2 delta at s = 1/2.
// ---------------------------------------------------------------------------

struct LandauZener {
  double delta = 0.1;
  double kappa = 1.0;

  double gap(double s) const;
  spectral::HamiltonianPath path() const;
};

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

struct CatalogEntry {
  std::string name;
  std::map<std::string, double> scalar_defaults;
  std::map<std::string, std::vector<double>> list_defaults;
  bool closed_loop = false;
  std::string summary;
};

const std::vector<CatalogEntry>& model_catalog();

/// Instantiates a catalog model. Unknown names or parameters raise a catalog
/// error listing what is available.
spectral::HamiltonianPath make_model(
    const std::string& name,
    const std::map<std::string, double>& scalars = {},
    const std::map<std::string, std::vector<double>>& lists = {});

}  // namespace adlab::models
