#include "neel/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "neel/dense.hpp"

namespace neel {

namespace {

double l2(const Grid& g, const Vec& v) { return std::sqrt(kernel::dot(g, v, v)); }

Vec precondition(const Grid& g, const Vec& r) {
  Vec out(g.n);
  kernel::multiplier(g, r, out, [](double k) { return 1.0 / (1.0 + k * k); });
  return out;
}

// Linear-interpolation crossing of the zero level nearest x_hint.
double crossing_linear(const Grid& g, const Vec& th, double x_hint) {
  double best = std::numeric_limits<double>::infinity();
  double pos = std::numeric_limits<double>::quiet_NaN();
  for (int j = 0; j + 1 < g.n; ++j) {
    double a = th[j], b = th[j + 1];
    if (a == 0.0 && std::abs(g.x(j) - x_hint) < best) {
      best = std::abs(g.x(j) - x_hint);
      pos = g.x(j);
    }
    if ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)) {
      double x0 = g.x(j) - a * g.dx() / (b - a);
      if (std::abs(x0 - x_hint) < best) {
        best = std::abs(x0 - x_hint);
        pos = x0;
      }
    }
  }
  if (std::isnan(pos)) throw SolverError("phase has no zero crossing", 0.0);
  return pos;
}

Field recenter(const Field& theta) {
  const Grid& g = theta.grid;
  Vec th = theta.theta();
  double x0 = crossing_linear(g, th, 0.0);
  if (std::abs(x0) < 1e-15) return theta;
  return shift(theta, x0);
}

}  // namespace

Profile solve_static(const Grid& grid, double tol, Mode mode) {
  StaticOptions opt;
  opt.tol = tol;
  opt.mode = mode;
  return solve_static(grid, opt);
}

Profile solve_static(const Grid& grid, const StaticOptions& opt) {
  if (opt.tol < 1e-12) throw std::invalid_argument("static tolerance must be >= 1e-12");
  Field w = opt.init ? *opt.init : Field::zeros(grid, Background::wall);
  if (w.background != Background::wall || !(w.grid == grid))
    throw std::invalid_argument("initial guess must be a wall field on the solver grid");
  w = recenter(w);
  double E = energy(w, opt.mode).total;
  Profile p;
  p.mode = opt.mode;
  p.history.push_back(E);
  double r = 0.0;
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    Field g = grad_energy(w, opt.mode);
    r = l2(grid, g.values);
    if (r <= opt.tol) break;
    Vec d = precondition(grid, g.values);
    for (double& v : d) v = -v;
    double slope = kernel::dot(grid, g.values, d);
    double t = 1.0;
    Field trial = w;
    const bool resolvable = -slope > 1e-12 * (1.0 + std::abs(E));
    for (int ls = 0; ls < 60; ++ls) {
      for (int j = 0; j < grid.n; ++j) trial.values[j] = w.values[j] + t * d[j];
      if (resolvable) {
        if (energy(trial, opt.mode).total <= E + 1e-4 * t * slope) break;
      } else {
        // Energy decrease is below rounding: fall back to residual decrease.
        if (l2(grid, grad_energy(trial, opt.mode).values) < r) break;
      }
      t *= 0.5;
      if (ls == 59) throw SolverError("static line search failed", r, p.history);
    }
    w = recenter(trial);
    E = energy(w, opt.mode).total;
    p.history.push_back(E);
  }
  if (r > opt.tol) throw SolverError("static solver did not converge", r, p.history);
  p.theta = w;
  p.residual = r;
  p.iterations = it;
  return p;
}

Field traveling_residual(const Field& psi, double c, double nu, double H, Mode mode) {
  const Grid& g = psi.grid;
  Field grad = grad_energy(psi, mode);
  Field d1 = derivative(psi, 1);
  Field d2 = derivative(psi, 2);
  Vec th = psi.theta();
  Field out = Field::zeros(g);
  for (int j = 0; j < g.n; ++j)
    out.values[j] = c * c * d2.values[j] - nu * c * d1.values[j] + grad.values[j] - H * std::cos(th[j]);
  return out;
}

namespace {

struct NewtonResult {
  Field psi;
  double c;
  double residual;
  int iterations;
  std::vector<double> history;
};

NewtonResult newton_step(const Field& psi0, double c0, double nu, double H, const Field& init_theta,
                         const Vec& phase_vec, const TravelingOptions& opt) {
  const Grid& g = psi0.grid;
  const int n = g.n;
  Field psi = psi0;
  double c = c0;
  std::vector<double> hist;
  int growth = 0;
  double last_step = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opt.max_newton; ++it) {
    Field R = traveling_residual(psi, c, nu, H, opt.mode);
    double phase = 0.0;
    for (int j = 0; j < n; ++j) phase += (psi.values[j] - init_theta.values[j]) * phase_vec[j];
    double r = l2(g, R.values);
    hist.push_back(r);
    if (r <= opt.tol && std::abs(phase) <= 1e-13) return {psi, c, r, it, hist};
    MatrixXd J = MatrixXd::Zero(n + 1, n + 1);
    J.topLeftCorner(n, n) = assemble_Lc(psi, c, nu, H, opt.mode);
    Field d1 = derivative(psi, 1);
    Field d2 = derivative(psi, 2);
    for (int j = 0; j < n; ++j) {
      J(j, n) = 2.0 * c * d2.values[j] - nu * d1.values[j];
      J(n, j) = phase_vec[j];
    }
    VectorXd rhs(n + 1);
    for (int j = 0; j < n; ++j) rhs[j] = -R.values[j];
    rhs[n] = -phase;
    VectorXd delta = lu_solve(std::move(J), rhs);
    double step = delta.norm();
    growth = step > last_step ? growth + 1 : 0;
    if (growth >= 5) throw SolverError("Newton iteration diverged", r, hist);
    last_step = step;
    for (int j = 0; j < n; ++j) psi.values[j] += delta[j];
    c += delta[n];
    if (!std::isfinite(c) || std::abs(c) >= 1.0)
      throw SolverError("traveling speed left the hyperbolic range |c| < 1", r, hist);
  }
  Field R = traveling_residual(psi, c, nu, H, opt.mode);
  double r = l2(g, R.values);
  if (r <= opt.tol) return {psi, c, r, opt.max_newton, hist};
  throw SolverError("Newton iteration did not converge", r, hist);
}

}  // namespace

Profile solve_traveling(const Grid& grid, double H, double nu, const Profile& init,
                        const Profile& reference, const TravelingOptions& opt) {
  if (std::abs(H) > 0.1) throw std::invalid_argument("|H| must not exceed 0.1");
  if (!(nu > 0.0)) throw std::invalid_argument("damping nu must be positive");
  if (!(init.theta.grid == grid) || !(reference.theta.grid == grid))
    throw std::invalid_argument("profiles must live on the solver grid");
  Field dref = reference.derivative1();
  Vec phase_vec(grid.n);
  for (int j = 0; j < grid.n; ++j) phase_vec[j] = grid.dx() * dref.values[j];

  double H0 = init.is_static() ? 0.0 : init.H;
  int steps = std::max(1, static_cast<int>(std::ceil(std::abs(H - H0) / opt.max_step - 1e-12)));
  Field psi = init.theta;
  double c = init.c;
  NewtonResult res{psi, c, 0.0, 0, {}};
  std::vector<double> hist;
  int iters = 0;
  for (int s = 1; s <= steps; ++s) {
    double Hs = H0 + (H - H0) * s / steps;
    res = newton_step(psi, c, nu, Hs, reference.theta, phase_vec, opt);
    psi = res.psi;
    c = res.c;
    iters += res.iterations;
    hist.insert(hist.end(), res.history.begin(), res.history.end());
  }
  Profile p;
  p.theta = psi;
  p.H = H;
  p.c = c;
  p.nu = nu;
  p.residual = res.residual;
  p.mode = opt.mode;
  p.iterations = iters;
  p.history = hist;
  return p;
}

Profile solve_traveling(const Grid& grid, double H, double nu, double tol, const Profile& init) {
  if (!init.is_static()) throw std::invalid_argument("a moving initial profile needs an explicit static reference");
  TravelingOptions opt;
  opt.tol = tol;
  opt.mode = init.mode;
  return solve_traveling(grid, H, nu, init, init, opt);
}

double wall_mass(const Profile& p) {
  Field d = p.derivative1();
  return 0.5 * kernel::dot(p.theta.grid, d.values, d.values);
}

double wall_mass_fourier(const Profile& p) {
  Field d = p.derivative1();
  const Grid& g = p.theta.grid;
  std::vector<cplx> F = kernel::rfft(g, d.values);
  double s = 0.0;
  for (int j = 0; j <= g.n / 2; ++j) s += ((j == 0 || j == g.n / 2) ? 1.0 : 2.0) * std::norm(F[j]);
  return 0.5 * s * g.dx() / g.n;
}

MobilityResult mobility(const Grid& grid, double nu, const std::vector<double>& H_list,
                        const Profile* static_wall, Mode mode) {
  MobilityResult out;
  out.nu = nu;
  Profile stat = static_wall ? *static_wall : solve_static(grid, 1e-10, mode);
  out.M = wall_mass(stat);
  out.beta_predicted = 1.0 / (out.M * nu);
  std::vector<double> hs = H_list;
  std::sort(hs.begin(), hs.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  TravelingOptions opt;
  opt.mode = mode;
  Profile last_pos = stat, last_neg = stat;
  for (double H : hs) {
    Profile& from = H >= 0.0 ? last_pos : last_neg;
    try {
      Profile p = solve_traveling(grid, H, nu, from, stat, opt);
      from = p;
      out.H.push_back(H);
      out.c.push_back(p.c);
    } catch (const SolverError& e) {
      out.failures.push_back("H=" + std::to_string(H) + ": " + e.what());
    }
  }
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < out.H.size(); ++i) {
    num += out.H[i] * out.c[i];
    den += out.H[i] * out.H[i];
  }
  out.slope = den > 0.0 ? num / den : 0.0;
  out.beta_measured = std::abs(out.slope);
  for (size_t i = 0; i < out.H.size(); ++i)
    if (out.H[i] != 0.0)
      out.fit_error = std::max(out.fit_error, std::abs(out.c[i] - out.slope * out.H[i]) / std::abs(out.H[i]));
  return out;
}

Field reflect(const Field& f) {
  const Grid& g = f.grid;
  Field out = Field::zeros(g, f.background);
  for (int j = 1; j < g.n; ++j) out.values[j] = -f.values[g.n - j];
  out.values[0] = -f.values[0];
  if (f.background == Background::wall) {
    // theta(L) = theta(-L) + pi on the twisted circle.
    double th0 = f.values[0] + wall_phase(-g.L);
    double reflected = -(th0 + std::numbers::pi);
    out.values[0] = reflected - wall_phase(-g.L);
  }
  return out;
}

double wall_position(const Field& theta, double x_hint) {
  const Grid& g = theta.grid;
  Vec th = theta.theta();
  double x = crossing_linear(g, th, x_hint);
  for (int it = 0; it < 20; ++it) {
    double f = evaluate(theta, x);
    double df = evaluate_derivative(theta, x);
    if (df == 0.0) break;
    double dx = f / df;
    x -= dx;
    if (std::abs(dx) < 1e-14) break;
  }
  return x;
}

}  // namespace neel
