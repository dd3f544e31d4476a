#include "adlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace adlab::spectral {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

double wrap_angle(double x) {
  double y = std::remainder(x, 2.0 * kPi);  // lands in [-pi, pi]
  if (y >= kPi) y = -kPi;
  return y;
}

double angle_distance(double a, double b) {
  return std::abs(std::remainder(a - b, 2.0 * kPi));
}

// ---------------------------------------------------------------------------
// HamiltonianPath
// ---------------------------------------------------------------------------

HermitianMatrix HamiltonianPath::value(double s) const {
  if (!eval) fail(ErrorKind::Precondition, "HamiltonianPath: no evaluator");
  Matrix m(dim, dim);
  eval(s, m);
  return HermitianMatrix(std::move(m));
}

HermitianMatrix HamiltonianPath::derivative(double s) const {
  if (!eval_deriv)
    fail(ErrorKind::Precondition,
         "HamiltonianPath '" + name + "': no analytic derivative");
  Matrix m(dim, dim);
  eval_deriv(s, m);
  return HermitianMatrix(std::move(m));
}

double HamiltonianPath::max_norm_estimate(int probes) const {
  Matrix m(dim, dim);
  double best = 0.0;
  for (int i = 0; i < probes; ++i) {
    eval(static_cast<double>(i) / (probes - 1), m);
    best = std::max(best, max_norm(m));
  }
  return best;
}

HamiltonianPath make_path(std::string name, int dim,
                          std::function<void(double, Matrix&)> eval,
                          std::function<void(double, Matrix&)> eval_deriv,
                          bool closed_loop,
                          std::map<std::string, double> params) {
  if (dim < 1 || dim > kMaxDim)
    fail(ErrorKind::InputDomain, "make_path('" + name + "'): bad dimension");
  if (!eval) fail(ErrorKind::InputDomain, "make_path: evaluator required");

  HamiltonianPath p;
  p.name = std::move(name);
  p.dim = dim;
  p.params = std::move(params);
  p.closed_loop = closed_loop;
  p.eval = std::move(eval);
  p.eval_deriv = std::move(eval_deriv);

  // Hermiticity on a probe grid.
  Matrix m(dim, dim);
  for (int i = 0; i <= 32; ++i) {
    const double s = i / 32.0;
    p.eval(s, m);
    if (!all_finite(m))
      fail(ErrorKind::InputDomain,
           "make_path('" + p.name + "'): non-finite entries at s=" +
               std::to_string(s));
    if (hermiticity_defect(m) > HermitianMatrix::kTolerance)
      fail(ErrorKind::InputDomain,
           "make_path('" + p.name + "'): not Hermitian at s=" +
               std::to_string(s));
  }

  // Analytic derivative must agree with central differences at 10 sample
  // points (fixed seed keeps the check reproducible). A 5-point stencil with
  // a scale-aware tolerance keeps the check meaningful for stiff families.
  if (p.eval_deriv) {
    std::mt19937 rng(20240611u);
    std::uniform_real_distribution<double> dist(0.05, 0.95);
    Matrix d(dim, dim);
    Matrix st[4] = {Matrix(dim, dim), Matrix(dim, dim), Matrix(dim, dim),
                    Matrix(dim, dim)};
    const double h = 1e-3;
    for (int i = 0; i < 10; ++i) {
      const double s = dist(rng);
      p.eval(s - 2 * h, st[0]);
      p.eval(s - h, st[1]);
      p.eval(s + h, st[2]);
      p.eval(s + 2 * h, st[3]);
      p.eval_deriv(s, d);
      const Matrix fd =
          (st[0] - 8.0 * st[1] + 8.0 * st[2] - st[3]) / (12.0 * h);
      const double err = max_norm(Matrix(fd - d));
      if (err > 1e-6 * std::max(1.0, max_norm(d)))
        fail(ErrorKind::InputDomain,
             "make_path('" + p.name +
                 "'): analytic derivative disagrees with central differences "
                 "(err " + std::to_string(err) + " at s=" + std::to_string(s) +
                 ")");
    }
  }

  if (p.closed_loop) {
    Matrix h0(dim, dim), h1(dim, dim);
    p.eval(0.0, h0);
    p.eval(1.0, h1);
    if (max_norm(Matrix(h1 - h0)) > 1e-10 * std::max(1.0, max_norm(h0)))
      fail(ErrorKind::InputDomain,
           "make_path('" + p.name + "'): claimed closed loop but H(0) != H(1)");
  }
  return p;
}

// ---------------------------------------------------------------------------
// Eigenpath construction
// ---------------------------------------------------------------------------

namespace {

// Deterministic anchor gauge at the first grid point: the largest-modulus
// component of each column is made real positive.
void anchor_gauge(Matrix& v) {
  for (Eigen::Index n = 0; n < v.cols(); ++n) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      const double a = std::abs(v(i, n));
      if (a > best) {
        best = a;
        imax = i;
      }
    }
    const Complex z = v(imax, n);
    if (std::abs(z) > 0) v.col(n) *= std::conj(z) / std::abs(z);
  }
}

constexpr double kAmbiguityThreshold = 1e-3;

EigenPath build_core(std::vector<double> grid,
                     const std::function<void(int, double, Matrix&)>& sample,
                     std::vector<Matrix> deriv, double gap_threshold,
                     const std::string& label) {
  const int points = static_cast<int>(grid.size());
  if (points < 17)
    fail(ErrorKind::Precondition,
         "build_eigenpath('" + label + "'): grid must have at least 17 points");
  for (int k = 1; k < points; ++k)
    if (!(grid[k] > grid[k - 1]))
      fail(ErrorKind::Precondition,
           "build_eigenpath('" + label + "'): grid not strictly increasing");

  EigenPath ep;
  ep.grid = std::move(grid);
  ep.gap_threshold = gap_threshold;
  ep.energies.reserve(points);
  ep.vectors.reserve(points);
  ep.deriv_samples = std::move(deriv);

  Matrix h;
  Matrix h_first, h_last;
  double scale = 1.0;
  for (int k = 0; k < points; ++k) {
    sample(k, ep.grid[k], h);
    if (k == 0) h_first = h;
    if (k == points - 1) h_last = h;
    scale = std::max(scale, max_norm(h));

    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success)
      fail(ErrorKind::Numerical,
           "build_eigenpath('" + label + "'): eigensolver failed at s=" +
               std::to_string(ep.grid[k]));
    RealVector e = solver.eigenvalues();
    Matrix v = solver.eigenvectors();
    const int n = static_cast<int>(e.size());

    for (int i = 0; i + 1 < n; ++i) {
      if (e[i + 1] - e[i] < gap_threshold)
        fail(ErrorKind::Degeneracy,
             "build_eigenpath('" + label + "'): gap " +
                 std::to_string(e[i + 1] - e[i]) + " between levels " +
                 std::to_string(i) + "," + std::to_string(i + 1) +
                 " at s=" + std::to_string(ep.grid[k]) +
                 " is below the threshold " + std::to_string(gap_threshold));
    }

    if (k == 0) {
      anchor_gauge(v);
    } else {
      const Matrix& prev = ep.vectors.back();
      // Maximum-overlap level assignment. Smooth non-crossing paths map each
      // level onto itself; anything else is either ambiguous or a crossing,
      // and both abort.
      for (int a = 0; a < n; ++a) {
        double best = -1.0, second = -1.0;
        int arg = -1;
        for (int b = 0; b < n; ++b) {
          const double o = std::abs(prev.col(a).dot(v.col(b)));
          if (o > best) {
            second = best;
            best = o;
            arg = b;
          } else if (o > second) {
            second = o;
          }
        }
        if (n > 1 && best - second < kAmbiguityThreshold)
          fail(ErrorKind::Tracking,
               "build_eigenpath('" + label +
                   "'): ambiguous level assignment for level " +
                   std::to_string(a) + " at s=" + std::to_string(ep.grid[k]) +
                   " (overlaps " + std::to_string(best) + " vs " +
                   std::to_string(second) + "); refine the grid");
        if (arg != a)
          fail(ErrorKind::Tracking,
               "build_eigenpath('" + label + "'): levels " + std::to_string(a) +
                   " and " + std::to_string(arg) + " swap order near s=" +
                   std::to_string(ep.grid[k]) + "; crossings are unsupported");
      }
      // Transport gauge: make <n(s_{k-1})|n(s_k)> real nonnegative.
      for (int a = 0; a < n; ++a) {
        const Complex o = prev.col(a).dot(v.col(a));
        const double mag = std::abs(o);
        if (mag > 0) v.col(a) *= std::conj(o) / mag;
      }
    }

    ep.energies.push_back(std::move(e));
    ep.vectors.push_back(std::move(v));
  }

  ep.min_gap = std::numeric_limits<double>::infinity();
  for (int k = 0; k < points; ++k)
    for (int i = 0; i + 1 < ep.dim(); ++i)
      ep.min_gap = std::min(ep.min_gap, ep.energies[k][i + 1] - ep.energies[k][i]);
  if (ep.dim() == 1) ep.min_gap = std::numeric_limits<double>::infinity();

  ep.closure_defect = max_norm(Matrix(h_last - h_first));
  ep.closed_loop = ep.closure_defect <= 1e-10 * scale;

  if (!ep.deriv_samples.empty() &&
      ep.deriv_samples.size() != ep.vectors.size())
    fail(ErrorKind::Precondition,
         "build_eigenpath('" + label + "'): derivative sample count mismatch");
  return ep;
}

}  // namespace

EigenPath build_eigenpath(const HamiltonianPath& path, int grid_size,
                          double gap_threshold) {
  if (grid_size < 16)
    fail(ErrorKind::Precondition, "build_eigenpath: grid_size must be >= 16");
  std::vector<double> grid(grid_size + 1);
  for (int k = 0; k <= grid_size; ++k)
    grid[k] = static_cast<double>(k) / grid_size;
  auto sampler = [&path](int, double s, Matrix& out) {
    out.resize(path.dim, path.dim);
    path.eval(s, out);
  };
  EigenPath ep = build_core(std::move(grid), sampler, {}, gap_threshold,
                            path.name);
  ep.closed_loop = ep.closed_loop && path.closed_loop;
  return ep;
}

EigenPath build_eigenpath_from_samples(std::vector<double> grid,
                                       const std::vector<Matrix>& h,
                                       const std::vector<Matrix>& deriv,
                                       double gap_threshold,
                                       std::string label) {
  if (grid.size() != h.size())
    fail(ErrorKind::Precondition,
         "build_eigenpath_from_samples: grid/sample count mismatch");
  auto sampler = [&h](int k, double, Matrix& out) { out = h[k]; };
  return build_core(std::move(grid), sampler, deriv, gap_threshold, label);
}

EigenPath regauged(const EigenPath& ep,
                   const std::vector<std::vector<double>>& phases) {
  if (static_cast<int>(phases.size()) != ep.points())
    fail(ErrorKind::Precondition, "regauged: phase table size mismatch");
  EigenPath out = ep;
  for (int k = 0; k < ep.points(); ++k) {
    if (static_cast<int>(phases[k].size()) != ep.dim())
      fail(ErrorKind::Precondition, "regauged: phase row size mismatch");
    for (int n = 0; n < ep.dim(); ++n) {
      const Complex z(std::cos(phases[k][n]), std::sin(phases[k][n]));
      out.vectors[k].col(n) *= z;
    }
  }
  return out;
}

EigenPath transport_gauged(const EigenPath& ep) {
  EigenPath out = ep;
  for (int k = 1; k < out.points(); ++k)
    for (int n = 0; n < out.dim(); ++n) {
      const Complex o = out.vectors[k - 1].col(n).dot(out.vectors[k].col(n));
      const double mag = std::abs(o);
      if (mag > 0) out.vectors[k].col(n) *= std::conj(o) / mag;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Couplings
// ---------------------------------------------------------------------------

namespace {

std::optional<Complex> ratio_estimate(const EigenPath& ep,
                                      const HamiltonianPath* path, int n,
                                      int m, int k) {
  if (n == m) return std::nullopt;
  const double de = ep.energies[k][m] - ep.energies[k][n];
  if (std::abs(de) < ep.gap_threshold) return std::nullopt;
  Matrix d;
  if (!ep.deriv_samples.empty()) {
    d = ep.deriv_samples[k];
  } else if (path && path->has_derivative()) {
    d.resize(ep.dim(), ep.dim());
    path->eval_deriv(ep.grid[k], d);
  } else {
    return std::nullopt;
  }
  const Complex num = ep.vectors[k].col(n).dot(d * ep.vectors[k].col(m));
  return num / de;
}

Complex fd_estimate(const EigenPath& ep, int n, int m, int k) {
  const double ds = ep.grid[k + 1] - ep.grid[k - 1];
  const Vector dm = ep.vectors[k + 1].col(m) - ep.vectors[k - 1].col(m);
  return ep.vectors[k].col(n).dot(dm) / ds;
}

}  // namespace

CouplingEstimate coupling(const EigenPath& ep, const HamiltonianPath* path,
                          int n, int m, int k) {
  if (n < 0 || n >= ep.dim() || m < 0 || m >= ep.dim())
    fail(ErrorKind::Precondition, "coupling: level index out of range");
  if (k <= 0 || k >= ep.points() - 1)
    fail(ErrorKind::Precondition,
         "coupling: centered difference needs an interior grid point");
  CouplingEstimate est;
  est.n = n;
  est.m = m;
  est.s = ep.grid[k];
  est.fd_value = fd_estimate(ep, n, m, k);
  est.ratio_value = ratio_estimate(ep, path, n, m, k);
  if (est.ratio_value)
    est.agreement = std::abs(est.fd_value - *est.ratio_value);
  return est;
}

std::vector<Matrix> coupling_table(const EigenPath& ep,
                                   const HamiltonianPath* path) {
  const int points = ep.points();
  const int n = ep.dim();
  const bool have_deriv =
      !ep.deriv_samples.empty() || (path && path->has_derivative());

  std::vector<Matrix> table(points, Matrix::Zero(n, n));
  for (int k = 1; k + 1 < points; ++k) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        if (a != b && have_deriv) {
          auto r = ratio_estimate(ep, path, a, b, k);
          table[k](a, b) = r ? *r : fd_estimate(ep, a, b, k);
        } else {
          table[k](a, b) = fd_estimate(ep, a, b, k);
        }
      }
  }
  if (points >= 3) {
    // Endpoints: ratio estimator where possible, interior copy otherwise.
    for (int k : {0, points - 1}) {
      const int kin = (k == 0) ? 1 : points - 2;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          if (a != b && have_deriv) {
            auto r = ratio_estimate(ep, path, a, b, k);
            table[k](a, b) = r ? *r : table[kin](a, b);
          } else {
            table[k](a, b) = table[kin](a, b);
          }
        }
    }
  }
  return table;
}

double max_offdiagonal_coupling(const EigenPath& ep,
                                const HamiltonianPath* path) {
  const auto table = coupling_table(ep, path);
  double best = 0.0;
  for (const Matrix& t : table)
    for (int a = 0; a < ep.dim(); ++a)
      for (int b = 0; b < ep.dim(); ++b)
        if (a != b) best = std::max(best, std::abs(t(a, b)));
  return best;
}

// ---------------------------------------------------------------------------
// Holonomy and gaps
// ---------------------------------------------------------------------------

double berry_phase(const EigenPath& ep, int n) {
  if (n < 0 || n >= ep.dim())
    fail(ErrorKind::Precondition, "berry_phase: level index out of range");
  if (!ep.closed_loop)
    fail(ErrorKind::Precondition,
         "berry_phase: the path is not a closed loop (closure defect " +
             std::to_string(ep.closure_defect) + ")");
  double total = 0.0;
  for (int k = 0; k + 1 < ep.points(); ++k)
    total += std::arg(ep.vectors[k].col(n).dot(ep.vectors[k + 1].col(n)));
  total += std::arg(ep.vectors.back().col(n).dot(ep.vectors.front().col(n)));
  return wrap_angle(-total);
}

double min_gap(const EigenPath& ep) { return ep.min_gap; }

}  // namespace adlab::spectral
