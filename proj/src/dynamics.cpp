#include "neel/dynamics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace neel {

std::string to_string(Integrator i) { return i == Integrator::rk4 ? "explicit-RK4" : "semi-implicit-spectral"; }
std::string to_string(Frame f) { return f == Frame::comoving ? "comoving" : "lab"; }
std::string to_string(Shape s) {
  switch (s) {
    case Shape::sech: return "sech";
    case Shape::odd_sech: return "odd_sech";
    case Shape::noise: return "noise";
  }
  return "?";
}

Field perturbation_field(const Grid& g, const Perturbation& p) {
  Field f = Field::zeros(g);
  switch (p.shape) {
    case Shape::sech:
      for (int j = 0; j < g.n; ++j) f.values[j] = p.amplitude / std::cosh(g.x(j));
      break;
    case Shape::odd_sech:
      for (int j = 0; j < g.n; ++j) f.values[j] = p.amplitude * g.x(j) / std::cosh(g.x(j));
      break;
    case Shape::noise: {
      std::mt19937_64 rng(p.seed);
      std::normal_distribution<double> nd;
      std::vector<cplx> F(g.n / 2 + 1, cplx(0.0));
      for (int j = 1; j < g.n / 2; ++j)
        if (g.k(j) <= 4.0) F[j] = cplx(nd(rng), nd(rng)) * std::exp(-0.5 * g.k(j) * g.k(j));
      f.values = kernel::irfft(g, F);
      double h = norm(f, NormKind::H1);
      for (double& x : f.values) x *= p.amplitude / h;
      break;
    }
  }
  return f;
}

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
  if (!(nu > 0.0)) throw std::invalid_argument("nu must be positive");
  if (!(std::abs(c) < 1.0)) throw std::invalid_argument("frame speed must satisfy |c| < 1");
  if (check && t_end < 10.0 / nu) throw std::invalid_argument("t_end must be at least 10 / nu");
  if (max_frames < 2) throw std::invalid_argument("max_frames must be at least 2");
}

namespace {

using Prop = std::array<cplx, 4>;

// exp(M t) for M = [[0, 1], [-a, b]].
Prop propagator(cplx a, cplx b, double t) {
  const cplx m = 0.5 * b;
  const cplx s = std::sqrt(m * m - a);
  const cplx e = std::exp(m * t);
  cplx ch, sh;  // cosh(st), sinh(st)/s
  if (std::abs(s * t) < 1e-4) {
    const cplx z = s * s * t * t;
    ch = 1.0 + z / 2.0 + z * z / 24.0;
    sh = t * (1.0 + z / 6.0 + z * z / 120.0);
  } else {
    ch = std::cosh(s * t);
    sh = std::sinh(s * t) / s;
  }
  // e (ch I + sh (M - m I))
  return {e * (ch - sh * m), e * sh, e * (-sh * a), e * (ch + sh * (b - m))};
}

class Stepper {
 public:
  Stepper(const Grid& g, const SimConfig& cfg)
      : g_(g), cfg_(cfg), ce_(cfg.frame == Frame::comoving ? cfg.c : 0.0), bg_(g.n), src_(g.n), N_(g.n) {
    const double c = ce_, nu = cfg.nu;
    for (int j = 0; j < g.n; ++j) {
      double x = g.x(j);
      bg_[j] = wall_phase(x);
      src_[j] = (1.0 - c * c) * wall_phase_d2(x) + c * nu * wall_phase_d1(x);
    }
    const int h = g.n / 2;
    prop_.resize(h + 1);
    for (int j = 0; j <= h; ++j) {
      double k = g.k(j);
      double ko = (j == h) ? 0.0 : k;
      cplx a = cplx((1.0 - c * c) * k * k, -c * nu * ko);
      cplx b = cplx(-nu, 2.0 * c * ko);
      prop_[j] = propagator(a, b, cfg.dt);
    }
    if (cfg.integrator == Integrator::rk4 && cfg.dt > 0.5 * g.dx())
      throw std::invalid_argument("explicit RK4 requires dt <= 0.5 dx");
  }

  // sin(theta) T(cos theta) + H cos(theta) + background source.
  void force(const Vec& w, Vec& out) const {
    Vec th(g_.n);
    for (int j = 0; j < g_.n; ++j) th[j] = bg_[j] + w[j];
    nonlinear_term(g_, th, Parity::antiperiodic, cfg_.mode, out);
    for (int j = 0; j < g_.n; ++j) out[j] += cfg_.H * std::cos(th[j]) + src_[j];
  }

  void step(Vec& w, Vec& v) {
    if (cfg_.integrator == Integrator::rk4)
      rk4(w, v);
    else
      split(w, v);
  }

  void invalidate() { have_N_ = false; }

 private:
  void split(Vec& w, Vec& v) {
    const double h = 0.5 * cfg_.dt;
    if (!have_N_) force(w, N_);
    for (int j = 0; j < g_.n; ++j) v[j] += h * N_[j];
    std::vector<cplx> W = kernel::rfft(g_, w), V = kernel::rfft(g_, v);
    for (size_t j = 0; j < W.size(); ++j) {
      const Prop& P = prop_[j];
      cplx wj = W[j], vj = V[j];
      W[j] = P[0] * wj + P[1] * vj;
      V[j] = P[2] * wj + P[3] * vj;
    }
    w = kernel::irfft(g_, W);
    v = kernel::irfft(g_, V);
    force(w, N_);
    have_N_ = true;
    for (int j = 0; j < g_.n; ++j) v[j] += h * N_[j];
  }

  void rhs(const Vec& w, const Vec& v, Vec& dw, Vec& dv) const {
    const double c = ce_, nu = cfg_.nu;
    const int hn = g_.n / 2;
    std::vector<cplx> W = kernel::rfft(g_, w), V = kernel::rfft(g_, v);
    std::vector<cplx> R(W.size());
    for (int j = 0; j <= hn; ++j) {
      double k = g_.k(j), ko = (j == hn) ? 0.0 : k;
      R[j] = -(1.0 - c * c) * k * k * W[j] + cplx(0.0, c * nu * ko) * W[j] + cplx(0.0, 2.0 * c * ko) * V[j];
    }
    dv = kernel::irfft(g_, R);
    Vec f(g_.n);
    force(w, f);
    dw = v;
    for (int j = 0; j < g_.n; ++j) dv[j] += f[j] - nu * v[j];
  }

  void rk4(Vec& w, Vec& v) {
    const double dt = cfg_.dt;
    const int n = g_.n;
    Vec k1w, k1v, k2w, k2v, k3w, k3v, k4w, k4v, tw(n), tv(n);
    rhs(w, v, k1w, k1v);
    for (int j = 0; j < n; ++j) tw[j] = w[j] + 0.5 * dt * k1w[j], tv[j] = v[j] + 0.5 * dt * k1v[j];
    rhs(tw, tv, k2w, k2v);
    for (int j = 0; j < n; ++j) tw[j] = w[j] + 0.5 * dt * k2w[j], tv[j] = v[j] + 0.5 * dt * k2v[j];
    rhs(tw, tv, k3w, k3v);
    for (int j = 0; j < n; ++j) tw[j] = w[j] + dt * k3w[j], tv[j] = v[j] + dt * k3v[j];
    rhs(tw, tv, k4w, k4v);
    for (int j = 0; j < n; ++j) {
      w[j] += dt / 6.0 * (k1w[j] + 2.0 * k2w[j] + 2.0 * k3w[j] + k4w[j]);
      v[j] += dt / 6.0 * (k1v[j] + 2.0 * k2v[j] + 2.0 * k3v[j] + k4v[j]);
    }
  }

  Grid g_;
  SimConfig cfg_;
  double ce_;
  Vec bg_, src_, N_;
  bool have_N_ = false;
  std::vector<Prop> prop_;
};

double sup_abs(const Vec& v) {
  double m = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
    m = std::max(m, std::abs(x));
  }
  return m;
}

}  // namespace

StateVector step(const SimConfig& cfg, const StateVector& state, int steps) {
  if (state.u.background != Background::wall) throw std::invalid_argument("state phase must carry the wall background");
  Stepper st(state.u.grid, cfg);
  Vec w = state.u.values, v = state.v.values;
  for (int i = 0; i < steps; ++i) st.step(w, v);
  return StateVector(Field(state.u.grid, w, Background::wall), Field(state.u.grid, v));
}

StateVector vector_field(const StateVector& state, double c, double nu, double H, Mode mode) {
  const Field& th = state.u;
  const Field& ph = state.v;
  const Grid& g = th.grid;
  Field d1 = derivative(th, 1), d2 = derivative(th, 2), p1 = derivative(ph, 1);
  Vec t = th.theta(), nl(g.n);
  nonlinear_term(g, t, phase_parity(th), mode, nl);
  Field out = Field::zeros(g);
  for (int j = 0; j < g.n; ++j)
    out.values[j] = 2.0 * c * p1.values[j] + (1.0 - c * c) * d2.values[j] - nu * ph.values[j] +
                    c * nu * d1.values[j] + nl[j] + H * std::cos(t[j]);
  return StateVector(ph, out);
}

ModeResult damped_mode(double Lambda, double nu, double dt, double t_end, Integrator integ, double u0, double v0) {
  const long steps = std::lround(t_end / dt);
  double u = u0, v = v0;
  if (integ == Integrator::rk4) {
    auto f = [&](double a, double b, double& da, double& db) {
      da = b;
      db = -Lambda * a - nu * b;
    };
    for (long i = 0; i < steps; ++i) {
      double a1, b1, a2, b2, a3, b3, a4, b4;
      f(u, v, a1, b1);
      f(u + 0.5 * dt * a1, v + 0.5 * dt * b1, a2, b2);
      f(u + 0.5 * dt * a2, v + 0.5 * dt * b2, a3, b3);
      f(u + dt * a3, v + dt * b3, a4, b4);
      u += dt / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4);
      v += dt / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4);
    }
  } else {
    // Kick with the frozen force, exact flow of u' = v, v' = -nu v.
    Prop P = propagator(cplx(0.0), cplx(-nu), dt);
    for (long i = 0; i < steps; ++i) {
      v += 0.5 * dt * (-Lambda * u);
      double un = (P[0] * u + P[1] * v).real(), vn = (P[2] * u + P[3] * v).real();
      u = un;
      v = vn + 0.5 * dt * (-Lambda * u);
    }
  }
  ModeResult r;
  r.u = u;
  r.v = v;
  // Closed form with roots (-nu +- sqrt(nu^2 - 4 Lambda)) / 2.
  const double t = steps * dt;
  const cplx sq = std::sqrt(cplx(nu * nu - 4.0 * Lambda));
  const cplx m1 = 0.5 * (-nu + sq), m2 = 0.5 * (-nu - sq);
  cplx A, B;
  if (std::abs(m1 - m2) < 1e-12) {
    A = u0;
    B = v0 - m1 * u0;  // u = (A + B t) e^{m t}
    cplx e = std::exp(m1 * t);
    r.u_exact = ((A + B * t) * e).real();
    r.v_exact = ((B + m1 * (A + B * t)) * e).real();
  } else {
    B = (v0 - m1 * u0) / (m2 - m1);
    A = u0 - B;
    r.u_exact = (A * std::exp(m1 * t) + B * std::exp(m2 * t)).real();
    r.v_exact = (A * m1 * std::exp(m1 * t) + B * m2 * std::exp(m2 * t)).real();
  }
  return r;
}

Modulation modulate(const Field& theta, const Profile& reference, double offset, double s_hint) {
  const Grid& g = theta.grid;
  if (theta.background != Background::wall) throw std::invalid_argument("modulation needs a wall-background phase");
  auto shifted = [&](double s) {
    double sh = -(offset + s);
    if (!(std::abs(sh) < g.L / 2)) throw std::domain_error("modulation shift out of range");
    return shift(reference.theta, sh);
  };
  auto J = [&](double s) {
    Field p = shifted(s);
    double acc = 0.0;
    for (int j = 0; j < g.n; ++j) {
      double d = theta.values[j] - p.values[j];
      acc += d * d;
    }
    return acc * g.dx();
  };
  const double lim = g.L / 4;
  const double h = 0.1;
  double lo = s_hint - 1.0, hi = s_hint + 1.0;
  double best_s = s_hint, best = J(s_hint);
  for (;;) {
    int k = static_cast<int>(std::lround((hi - lo) / h));
    for (int i = 0; i <= k; ++i) {
      double s = lo + i * h;
      if (std::abs(s) > lim) continue;
      double v = J(s);
      if (v < best) {
        best = v;
        best_s = s;
      }
    }
    bool at_edge = std::abs(best_s - lo) < 0.5 * h || std::abs(best_s - hi) < 0.5 * h;
    if (!at_edge) break;
    if (lo <= -lim && hi >= lim) throw std::domain_error("no modulation bracket within |s| <= L/4");
    lo = std::max(lo - 2.0, -lim);
    hi = std::min(hi + 2.0, lim);
  }
  // Golden-section refinement on [best_s - h, best_s + h].
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = best_s - h, b = best_s + h;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = J(x1), f2 = J(x2);
  while (b - a > 1e-6) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = J(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = J(x2);
    }
  }
  double s = 0.5 * (a + b);
  // Newton on <theta - psi_s, psi_s'> = 0.
  Modulation m;
  for (int it = 0; it < 30; ++it) {
    Field p = shifted(s);
    Field d1 = derivative(p, 1), d2 = derivative(p, 2);
    Vec diff(g.n);
    for (int j = 0; j < g.n; ++j) diff[j] = theta.values[j] - p.values[j];
    double gval = kernel::dot(g, diff, d1.values);
    double gd = kernel::dot(g, d1.values, d1.values) - kernel::dot(g, diff, d2.values);
    m.orthogonality = gval;
    if (std::abs(gval) <= 1e-13) break;
    double ds = -gval / gd;
    s += ds;
    if (std::abs(ds) < 1e-15) break;
  }
  Field p = shifted(s);
  Field diff = Field::zeros(g);
  for (int j = 0; j < g.n; ++j) diff.values[j] = theta.values[j] - p.values[j];
  m.orthogonality = inner(diff, derivative(p, 1));
  m.s = s;
  m.residual_H1 = norm(diff, NormKind::H1);
  return m;
}

SimTrace integrate(const SimConfig& cfg, const StateVector& initial, const Profile* reference) {
  cfg.validate();
  const Grid& g = initial.u.grid;
  if (initial.u.background != Background::wall) throw std::invalid_argument("initial phase must carry the wall background");
  if (!(initial.v.grid == g)) throw std::invalid_argument("initial components on different grids");
  if (reference && !(reference->theta.grid == g)) throw std::invalid_argument("reference profile on a different grid");
  Stepper st(g, cfg);
  Vec w = initial.u.values, v = initial.v.values;
  const long steps = std::lround(cfg.t_end / cfg.dt);
  const long stride = std::max<long>(1, (steps + cfg.max_frames - 2) / (cfg.max_frames - 1));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const bool lab = cfg.frame == Frame::lab;

  SimTrace tr;
  double s_prev = 0.0, pos_prev = 0.0, E0 = 0.0, diss = 0.0;
  auto v2 = [&](const Vec& vv) { return kernel::dot(g, vv, vv); };
  double vv_prev = v2(v);
  auto record = [&](long i) {
    double t = i * cfg.dt;
    Field th(g, w, Background::wall);
    double E = energy(th, cfg.mode).total + 0.5 * vv_prev;
    if (i == 0) E0 = E;
    tr.t.push_back(t);
    tr.energy.push_back(E);
    tr.v_norm.push_back(std::sqrt(vv_prev));
    tr.defect.push_back(E - E0 + cfg.nu * diss);
    pos_prev = wall_position(th, pos_prev);
    tr.wall_position.push_back(pos_prev);
    if (reference) {
      Modulation m = modulate(th, *reference, lab ? cfg.c * t : 0.0, s_prev);
      s_prev = m.s;
      tr.s.push_back(m.s);
      tr.residual_H1.push_back(m.residual_H1);
      tr.orthogonality.push_back(m.orthogonality);
    } else {
      tr.s.push_back(nan);
      tr.residual_H1.push_back(nan);
      tr.orthogonality.push_back(nan);
    }
  };
  auto fail = [&](const std::string& why) {
    tr.final_state = StateVector(Field(g, w, Background::wall), Field(g, v));
    throw SimulationError(why, tr);
  };
  record(0);
  for (long i = 1; i <= steps; ++i) {
    st.step(w, v);
    double vv = v2(v);
    diss += 0.5 * cfg.dt * (vv_prev + vv);
    vv_prev = vv;
    if (sup_abs(w) > cfg.blowup || sup_abs(v) > cfg.blowup)
      fail("blow-up at t = " + std::to_string(i * cfg.dt));
    if (i % stride == 0 || i == steps) {
      try {
        record(i);
      } catch (const std::exception& e) {
        fail(std::string("trace evaluation failed: ") + e.what());
      }
    }
  }
  tr.final_state = StateVector(Field(g, w, Background::wall), Field(g, v));
  return tr;
}

DecayFit decay_fit(const std::vector<double>& t, const std::vector<double>& r, double t_min, double floor,
                   double t_max) {
  if (t.size() != r.size()) throw std::invalid_argument("trace series differ in length");
  std::vector<double> xs, ys;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_min) continue;
    if (t[i] > t_max) break;
    if (!(r[i] > floor)) break;
    xs.push_back(t[i]);
    ys.push_back(std::log(r[i]));
  }
  DecayFit f;
  f.points = static_cast<int>(xs.size());
  if (f.points < 3) return f;
  double mx = 0, my = 0;
  for (int i = 0; i < f.points; ++i) mx += xs[i], my += ys[i];
  mx /= f.points;
  my /= f.points;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < f.points; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  double slope = sxy / sxx;
  f.omega = -slope;
  f.C = std::exp(my - slope * mx);
  f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

namespace {

double slope_fit(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  const size_t n = x.size();
  for (size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) sxx += (x[i] - mx) * (x[i] - mx), sxy += (x[i] - mx) * (y[i] - my);
  return sxy / sxx;
}

}  // namespace

OrbitalResult orbital_experiment(const Profile& ref, const Perturbation& pert, const SimConfig& cfg_in) {
  if (std::abs(ref.H) > 5e-3) throw std::invalid_argument("orbital experiment requires |H| <= 5e-3");
  if (std::abs(pert.amplitude) > 0.5) throw std::invalid_argument("perturbation amplitude must be <= 0.5");
  const Grid& g = ref.theta.grid;
  OrbitalResult out;
  SimConfig cfg = cfg_in;
  cfg.H = ref.H;
  cfg.c = ref.c;
  cfg.nu = ref.nu;
  out.H = ref.H;
  out.c = ref.c;
  out.nu = ref.nu;
  Field p = perturbation_field(g, pert);
  out.perturbation_H1 = norm(p, NormKind::H1);
  if (out.perturbation_H1 > 0.1) throw std::invalid_argument("perturbation H1 amplitude must be <= 0.1");

  Field th0 = ref.theta;
  for (int j = 0; j < g.n; ++j) th0.values[j] += p.values[j];
  Field v0 = Field::zeros(g);
  if (cfg.frame == Frame::comoving) {
    v0 = derivative(th0, 1);
    for (double& x : v0.values) x *= cfg.c;
  }

  // Linear-theory asymptotic shift from the c = 0 projector with Phi0 = (nu thetabar', thetabar').
  Field d1 = ref.derivative1();
  double alpha = (cfg.nu * inner(p, d1) + inner(v0, d1)) / (cfg.nu * inner(d1, d1));
  out.predicted_shift = -alpha;

  try {
    out.trace = integrate(cfg, StateVector(th0, v0), &ref);
  } catch (const SimulationError& e) {
    out.trace = e.trace;
    out.verdict = std::string("unstable: ") + e.what();
    return out;
  }
  const SimTrace& tr = out.trace;
  double rmin = std::numeric_limits<double>::infinity();
  for (double r : tr.residual_H1) rmin = std::min(rmin, r);
  out.fit = decay_fit(tr.t, tr.residual_H1, 2.0 / cfg.nu, std::max(1e-12, 10.0 * rmin));

  std::vector<double> ts, xs;
  for (size_t i = 0; i < tr.t.size(); ++i)
    if (tr.t[i] >= 0.5 * tr.t.back()) {
      ts.push_back(tr.t[i]);
      xs.push_back(tr.wall_position[i] + (cfg.frame == Frame::comoving ? cfg.c * tr.t[i] : 0.0));
    }
  out.speed = slope_fit(ts, xs);
  out.final_position = xs.back();

  // (A2) Taylor remainder of the translation orbit.
  Field d2 = ref.derivative2();
  out.A2_bound = norm(d2, NormKind::H1) / std::sqrt(3.0);
  for (double s : {0.01, 0.02, 0.04}) {
    Field ps = shift(ref.theta, s);
    Field rem = Field::zeros(g);
    for (int j = 0; j < g.n; ++j) rem.values[j] = ps.values[j] - ref.theta.values[j] - s * d1.values[j];
    out.A2_ratio = std::max(out.A2_ratio, norm(rem, NormKind::H1) / (s * s));
  }

  // (A3) quadratic remainder F(psi + W) - F(psi) - A_c W.
  DiscretizedOperator Ac = build_block(ref, true, cfg.nu);
  Perturbation wp{Shape::noise, 1.0, pert.seed + 17};
  Field wu = perturbation_field(g, wp);
  wp.seed += 1;
  Field wv = perturbation_field(g, wp);
  StateVector base(ref.theta, Field::zeros(g));
  StateVector F0 = vector_field(base, cfg.c, cfg.nu, cfg.H, cfg.mode);
  std::vector<double> la, lr;
  for (double amp : {1e-2, 5e-3, 2.5e-3}) {
    StateVector W(wu, wv);
    for (double& x : W.u.values) x *= amp;
    for (double& x : W.v.values) x *= amp;
    StateVector pert_state(ref.theta, W.v);
    for (int j = 0; j < g.n; ++j) pert_state.u.values[j] += W.u.values[j];
    StateVector F1 = vector_field(pert_state, cfg.c, cfg.nu, cfg.H, cfg.mode);
    StateVector AW = Ac.apply(W);
    StateVector R(Field::zeros(g), Field::zeros(g));
    for (int j = 0; j < g.n; ++j) {
      R.u.values[j] = F1.u.values[j] - F0.u.values[j] - AW.u.values[j];
      R.v.values[j] = F1.v.values[j] - F0.v.values[j] - AW.v.values[j];
    }
    double wn = norm(W), rn = norm(R);
    out.A3_amplitudes.push_back(wn);
    out.A3_remainders.push_back(rn);
    la.push_back(std::log(wn));
    lr.push_back(std::log(rn));
  }
  out.A3_exponent = slope_fit(la, lr);

  out.stable = out.fit.clean();
  out.verdict = out.stable ? "exponential decay" : "no clean exponential decay";
  return out;
}

}  // namespace neel
