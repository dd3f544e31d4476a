#include "adlab/models.hpp"

#include <cmath>
#include <sstream>

namespace adlab::models {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Spin-half rotating field
// ---------------------------------------------------------------------------

bool SpinRotatingField::closed() const {
  return cycles > 0 && std::abs(cycles - std::round(cycles)) < 1e-12;
}

Matrix SpinRotatingField::hamiltonian_at_time(double t) const {
  const double phi = omega * t;
  Matrix m(2, 2);
  const double sx = std::sin(theta) * std::cos(phi);
  const double sy = std::sin(theta) * std::sin(phi);
  const double sz = std::cos(theta);
  m(0, 0) = Complex(0.5 * omega0 * sz, 0.0);
  m(1, 1) = Complex(-0.5 * omega0 * sz, 0.0);
  m(0, 1) = Complex(0.5 * omega0 * sx, -0.5 * omega0 * sy);
  m(1, 0) = Complex(0.5 * omega0 * sx, 0.5 * omega0 * sy);
  return m;
}

spectral::HamiltonianPath SpinRotatingField::path() const {
  if (!(omega0 > 0) || !(omega > 0) || !(cycles > 0) || theta < 0 ||
      theta > kPi)
    fail(ErrorKind::InputDomain, "SpinRotatingField: bad parameters");
  const double w0 = omega0, th = theta, cyc = cycles;
  auto eval = [w0, th, cyc](double s, Matrix& m) {
    const double phi = kTwoPi * cyc * s;
    const double sx = std::sin(th) * std::cos(phi);
    const double sy = std::sin(th) * std::sin(phi);
    const double sz = std::cos(th);
    m(0, 0) = Complex(0.5 * w0 * sz, 0.0);
    m(1, 1) = Complex(-0.5 * w0 * sz, 0.0);
    m(0, 1) = Complex(0.5 * w0 * sx, -0.5 * w0 * sy);
    m(1, 0) = Complex(0.5 * w0 * sx, 0.5 * w0 * sy);
  };
  auto deriv = [w0, th, cyc](double s, Matrix& m) {
    const double phi = kTwoPi * cyc * s;
    const double rate = kTwoPi * cyc;
    const double sx = -std::sin(th) * std::sin(phi) * rate;
    const double sy = std::sin(th) * std::cos(phi) * rate;
    m(0, 0) = Complex(0.0, 0.0);
    m(1, 1) = Complex(0.0, 0.0);
    m(0, 1) = Complex(0.5 * w0 * sx, -0.5 * w0 * sy);
    m(1, 0) = Complex(0.5 * w0 * sx, 0.5 * w0 * sy);
  };
  return spectral::make_path(
      "spin-rotating-field", 2, eval, deriv, closed(),
      {{"omega0", omega0}, {"omega", omega}, {"theta", theta},
       {"cycles", cycles}});
}

Matrix rabi_oracle(const SpinRotatingField& model, double t) {
  // Rotating frame: U(t) = R(t) exp(-i H_eff t),
  // R = exp(-i w t sz/2), H_eff = H(0) - (w/2) sz.
  const double w = model.omega;
  Matrix heff = model.hamiltonian_at_time(0.0) - 0.5 * w * pauli_z();
  Matrix e, scratch;
  expm_antiherm_into(heff, t, e, scratch);
  Matrix r(2, 2);
  r.setZero();
  r(0, 0) = Complex(std::cos(0.5 * w * t), -std::sin(0.5 * w * t));
  r(1, 1) = Complex(std::cos(0.5 * w * t), std::sin(0.5 * w * t));
  return r * e;
}

void verify_rabi_oracle(const SpinRotatingField& model) {
  // Rescale stiff parameter sets so the 5-point stencil stays accurate;
  // U(t; w0, w) = U(lambda t; w0/lambda, w/lambda) exactly.
  SpinRotatingField probe = model;
  double lambda = 1.0;
  const double scale = std::max(model.omega0, model.omega);
  if (scale > 10.0) {
    lambda = scale / 10.0;
    probe.omega0 = model.omega0 / lambda;
    probe.omega = model.omega / lambda;
  }
  const double duration = probe.total_duration();
  const double h = std::min(1e-3, duration * 1e-4);
  for (int i = 0; i <= 12; ++i) {
    const double t = duration * (0.03 + 0.94 * i / 12.0);
    Matrix stencil[4] = {
        rabi_oracle(probe, t - 2 * h), rabi_oracle(probe, t - h),
        rabi_oracle(probe, t + h), rabi_oracle(probe, t + 2 * h)};
    Matrix du =
        (stencil[0] - 8.0 * stencil[1] + 8.0 * stencil[2] - stencil[3]) /
        (12.0 * h);
    Matrix residual = Complex(0.0, 1.0) * du -
                      probe.hamiltonian_at_time(t) * rabi_oracle(probe, t);
    if (max_norm(residual) > 1e-8)
      fail(ErrorKind::Numerical,
           "rabi_oracle: closed form violates the equation of motion "
           "(residual " + std::to_string(max_norm(residual)) + " at t=" +
               std::to_string(t) + ")");
  }
}

// ---------------------------------------------------------------------------
// Landau-Zener
// ---------------------------------------------------------------------------

double LandauZener::gap(double s) const {
  const double x = kappa * (2.0 * s - 1.0);
  return 2.0 * std::sqrt(delta * delta + x * x);
}

spectral::HamiltonianPath LandauZener::path() const {
  if (!(delta > 0) || !(kappa > 0))
    fail(ErrorKind::InputDomain, "LandauZener: delta and kappa must be > 0");
  const double d = delta, k = kappa;
  auto eval = [d, k](double s, Matrix& m) {
    m(0, 0) = Complex(k * (2.0 * s - 1.0), 0.0);
    m(1, 1) = Complex(-k * (2.0 * s - 1.0), 0.0);
    m(0, 1) = Complex(d, 0.0);
    m(1, 0) = Complex(d, 0.0);
  };
  auto deriv = [k](double, Matrix& m) {
    m.setZero();
    m(0, 0) = Complex(2.0 * k, 0.0);
    m(1, 1) = Complex(-2.0 * k, 0.0);
  };
  return spectral::make_path("landau-zener", 2, eval, deriv, false,
                             {{"delta", delta}, {"kappa", kappa}});
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

namespace {

spectral::HamiltonianPath make_constant(const std::vector<double>& energies) {
  const int dim = static_cast<int>(energies.size());
  if (dim < 1 || dim > kMaxDim)
    fail(ErrorKind::Catalog, "constant: 'energies' must list 1..16 values");
  auto eval = [energies, dim](double, Matrix& m) {
    m.setZero();
    for (int i = 0; i < dim; ++i) m(i, i) = Complex(energies[i], 0.0);
  };
  auto deriv = [](double, Matrix& m) { m.setZero(); };
  return spectral::make_path("constant", dim, eval, deriv, true, {});
}

std::string known_models() {
  std::string out;
  for (const auto& e : model_catalog()) {
    if (!out.empty()) out += ", ";
    out += e.name;
  }
  return out;
}

template <typename MapT>
void reject_unknown(const std::string& model, const MapT& given,
                    const CatalogEntry& entry) {
  for (const auto& [key, value] : given) {
    (void)value;
    if (!entry.scalar_defaults.count(key) && !entry.list_defaults.count(key))
      fail(ErrorKind::Catalog, "model '" + model + "': unknown parameter '" +
                                   key + "'");
  }
}

}  // namespace

const std::vector<CatalogEntry>& model_catalog() {
  static const std::vector<CatalogEntry> entries = {
      {"constant",
       {},
       {{"energies", {0.0, 1.0}}},
       true,
       "fixed diagonal generator; evolution is a pure phase"},
      {"spin-rotating-field",
       {{"omega0", 4.0}, {"omega", 1.0}, {"theta", kPi / 4}, {"cycles", 1.0}},
       {},
       true,
       "spin-half in a uniformly rotating field; constant splitting omega0"},
      {"landau-zener",
       {{"delta", 0.1}, {"kappa", 1.0}},
       {},
       false,
       "single avoided crossing with minimum gap 2*delta at s=1/2"},
  };
  return entries;
}

spectral::HamiltonianPath make_model(
    const std::string& name, const std::map<std::string, double>& scalars,
    const std::map<std::string, std::vector<double>>& lists) {
  const CatalogEntry* entry = nullptr;
  for (const auto& e : model_catalog())
    if (e.name == name) entry = &e;
  if (!entry)
    fail(ErrorKind::Catalog, "unknown model '" + name +
                                 "'; available models: " + known_models());
  reject_unknown(name, scalars, *entry);
  reject_unknown(name, lists, *entry);

  auto scalar = [&](const std::string& key) {
    auto it = scalars.find(key);
    return it != scalars.end() ? it->second : entry->scalar_defaults.at(key);
  };

  if (name == "constant") {
    auto it = lists.find("energies");
    return make_constant(it != lists.end() ? it->second
                                           : entry->list_defaults.at("energies"));
  }
  if (name == "spin-rotating-field") {
    SpinRotatingField m;
    m.omega0 = scalar("omega0");
    m.omega = scalar("omega");
    m.theta = scalar("theta");
    m.cycles = scalar("cycles");
    return m.path();
  }
  // landau-zener
  LandauZener lz;
  lz.delta = scalar("delta");
  lz.kappa = scalar("kappa");
  return lz.path();
}

}  // namespace adlab::models
