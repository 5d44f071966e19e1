#include "neel/spectra.hpp"

#include <cblas.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace neel {
namespace {

constexpr double kPi = 3.14159265358979323846;

double periodization_of(const Profile& p) {
  const Grid& g = p.theta.grid;
  return std::cos(evaluate(p.theta, -g.L + 0.5 * g.dx()));
}

void sort_desc(std::vector<cplx>& ev) {
  std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
}

int nearest_to_zero(const std::vector<cplx>& ev) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(ev.size()); ++i)
    if (std::abs(ev[i]) < std::abs(ev[best])) best = i;
  return best;
}

}  // namespace

int SpectrumReport::count_inside(double delta) const {
  int k = 0;
  for (cplx z : eigenvalues)
    if (std::abs(z.real()) < delta && std::abs(z.imag()) < delta) ++k;
  return k;
}

double SpectrumReport::max_re_rest() const {
  double m = -std::numeric_limits<double>::infinity();
  bool skipped = false;
  for (cplx z : eigenvalues) {
    if (!skipped && z == lambda0) {
      skipped = true;
      continue;
    }
    m = std::max(m, z.real());
  }
  return m;
}

SpectrumReport eig_report(const DiscretizedOperator& op, const Profile& p) {
  SpectrumReport r;
  r.kind = op.kind;
  r.grid = op.grid;
  r.periodization = periodization_of(p);
  if (op.kind == OpKind::L) {
    MatrixXd S = 0.5 * (op.matrix + op.matrix.transpose());
    VectorXd w = sym_eigenvalues(S);
    for (int i = 0; i < w.size(); ++i) r.eigenvalues.emplace_back(w[i], 0.0);
  } else {
    VectorXcd w = eigenvalues(op.weighted());
    for (int i = 0; i < w.size(); ++i) r.eigenvalues.push_back(w[i]);
  }
  for (cplx z : r.eigenvalues)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw std::runtime_error("eigensolver returned non-finite values (max |entry| " +
                               std::to_string(op.matrix.cwiseAbs().maxCoeff()) + ")");
  sort_desc(r.eigenvalues);
  int i0 = nearest_to_zero(r.eigenvalues);
  r.lambda0 = r.eigenvalues[i0];
  const double tol = 1e-6 * (1.0 + std::abs(r.lambda0));
  for (cplx z : r.eigenvalues)
    if (std::abs(z - r.lambda0) <= tol) ++r.cluster;
  if (op.kind == OpKind::L || op.kind == OpKind::Lc) {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(r.eigenvalues.size()); ++i)
      if (i != i0) m = std::min(m, r.eigenvalues[i].real());
    r.Lambda0 = m;
    r.gap = m;
  } else {
    r.gap = -r.max_re_rest();
  }
  return r;
}

std::pair<cplx, cplx> pencil_roots(double Lambda, double nu) {
  const double disc = nu * nu - 4.0 * Lambda;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    // Stable pairing: the larger-magnitude root first, the other from the product.
    const double q = -0.5 * (nu + s);
    const cplx r1 = q;
    const cplx r2 = (q != 0.0) ? cplx(Lambda / q) : cplx(0.0);
    return {r1, r2};
  }
  const double s = std::sqrt(-disc);
  return {cplx(-0.5 * nu, 0.5 * s), cplx(-0.5 * nu, -0.5 * s)};
}

PencilCheck pencil_crosscheck(const SpectrumReport& L, const SpectrumReport& A, double nu) {
  PencilCheck out;
  std::vector<cplx> mapped;
  for (cplx z : L.eigenvalues) {
    auto [a, b] = pencil_roots(z.real(), nu);
    mapped.push_back(a);
    mapped.push_back(b);
  }
  std::vector<cplx> pool = A.eigenvalues;
  std::vector<char> used(pool.size(), 0);
  for (cplx m : mapped) {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(pool.size()); ++i) {
      if (used[i]) continue;
      double d = std::abs(pool[i] - m);
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    if (best < 0) {
      out.unmatched.push_back(m);
      continue;
    }
    used[best] = 1;
    out.max_distance = std::max(out.max_distance, bd);
  }
  for (int i = 0; i < static_cast<int>(pool.size()); ++i)
    if (!used[i]) out.unmatched.push_back(pool[i]);
  return out;
}

DriftReport eigen_drift(const SpectrumReport& A, const SpectrumReport& Ac, double c, double window) {
  DriftReport r;
  r.window = window;
  if (c == 0.0) throw std::invalid_argument("eigenvalue drift needs c != 0");
  const double cap = 10.0 * std::abs(c);
  std::vector<cplx> a, b;
  for (cplx z : A.eigenvalues)
    if (std::abs(z) <= window) a.push_back(z);
  for (cplx z : Ac.eigenvalues)
    if (std::abs(z) <= window + cap) b.push_back(z);
  struct Pair {
    double d;
    int i, j;
  };
  std::vector<Pair> pairs;
  for (int i = 0; i < static_cast<int>(a.size()); ++i)
    for (int j = 0; j < static_cast<int>(b.size()); ++j) {
      double d = std::abs(a[i] - b[j]);
      if (d <= cap) pairs.push_back({d, i, j});
    }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.d < y.d; });
  std::vector<char> ua(a.size(), 0), ub(b.size(), 0);
  double worst = 0.0;
  for (const Pair& p : pairs) {
    if (ua[p.i] || ub[p.j]) continue;
    ua[p.i] = ub[p.j] = 1;
    ++r.matched;
    worst = std::max(worst, p.d);
  }
  for (int i = 0; i < static_cast<int>(a.size()); ++i)
    if (!ua[i]) r.unmatched.push_back(a[i]);
  r.C = worst / std::abs(c);
  return r;
}

// ---------------------------------------------------------------------------
// Resolvent engine

ResolventEngine::ResolventEngine(const DiscretizedOperator& op) : ResolventEngine(op.weighted()) {}

ResolventEngine::ResolventEngine(const MatrixXd& B) {
  Schur s = complex_schur(B.cast<cplx>());
  T_ = std::move(s.T);
  eig_ = T_.diagonal();
  MatrixXd Hm = 0.5 * (B + B.transpose());
  abscissa_ = sym_eigenvalues(Hm).maxCoeff();
  const int N = static_cast<int>(T_.rows());
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  warm_inv_.resize(N);
  for (int i = 0; i < N; ++i) warm_inv_[i] = cplx(nd(rng), nd(rng));
  warm_A_ = warm_inv_;
}

namespace {

// x <- T^{-1} x and x <- T^{-H} x for the (shifted) upper-triangular factor.
void solve_upper(const MatrixXcd& T, Eigen::VectorXcd& x, bool adjoint) {
  const int N = static_cast<int>(T.rows());
  cblas_ztrsv(CblasColMajor, CblasUpper, adjoint ? CblasConjTrans : CblasNoTrans, CblasNonUnit, N, T.data(), N,
              x.data(), 1);
}

}  // namespace

// Largest singular value of M = a I + b (T - lambda)^{-1} by restarted Lanczos on M^H M.
double ResolventEngine::power_inverse(cplx lambda, double shift_scale, Eigen::VectorXcd& warm) {
  const int N = dim();
  const cplx a = shift_scale != 0.0 ? cplx(1.0) : cplx(0.0);
  const cplx b = shift_scale != 0.0 ? lambda : cplx(1.0);
  struct Shift {
    MatrixXcd& T;
    const VectorXcd& diag;
    Shift(MatrixXcd& T_, const VectorXcd& d, cplx l) : T(T_), diag(d) { T.diagonal().array() -= l; }
    ~Shift() { T.diagonal() = diag; }
  } shifted(T_, eig_, lambda);
  auto apply = [&](const Eigen::VectorXcd& x) {
    Eigen::VectorXcd y = x;
    solve_upper(T_, y, false);
    return Eigen::VectorXcd(a * x + b * y);
  };
  auto applyH = [&](const Eigen::VectorXcd& x) {
    Eigen::VectorXcd y = x;
    solve_upper(T_, y, true);
    return Eigen::VectorXcd(std::conj(a) * x + std::conj(b) * y);
  };
  const int m = std::min(20, N);
  Eigen::VectorXcd x = warm.normalized();
  double prev = 0.0, theta = 0.0;
  for (int restart = 0; restart < 30; ++restart) {
    MatrixXcd V(N, m + 1);
    std::vector<double> al, be;
    V.col(0) = x;
    int k = 0;
    for (; k < m; ++k) {
      Eigen::VectorXcd w = applyH(apply(V.col(k)));
      al.push_back(V.col(k).dot(w).real());
      for (int pass = 0; pass < 2; ++pass)
        for (int j = 0; j <= k; ++j) w -= V.col(j) * V.col(j).dot(w);
      double bn = w.norm();
      be.push_back(bn);
      if (bn <= 1e-13 * std::abs(al.back())) {
        ++k;
        break;
      }
      V.col(k + 1) = w / bn;
    }
    MatrixXd Tk = MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      Tk(i, i) = al[i];
      if (i + 1 < k) Tk(i, i + 1) = Tk(i + 1, i) = be[i];
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(Tk);
    theta = es.eigenvalues()[k - 1];
    Eigen::VectorXd s = es.eigenvectors().col(k - 1);
    x = V.leftCols(k) * s.cast<cplx>();
    x.normalize();
    if (std::abs(theta - prev) <= 1e-6 * theta) break;
    prev = theta;
  }
  warm = x;
  return std::sqrt(std::max(theta, 0.0));
}

ResolventSample ResolventEngine::evaluate(cplx lambda, bool with_A) {
  double dmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < eig_.size(); ++i) dmin = std::min(dmin, std::abs(eig_[i] - lambda));
  if (dmin < 1e-8) throw std::domain_error("resolvent requested within 1e-8 of an eigenvalue");
  ResolventSample s;
  s.lambda = lambda;
  s.norm_inv = power_inverse(lambda, 0.0, warm_inv_);
  if (with_A) s.norm_Ares = power_inverse(lambda, 1.0, warm_A_);
  return s;
}

// ---------------------------------------------------------------------------
// Sweep

std::vector<cplx> gamma_contour(double delta, int m) {
  if (m < 4) throw std::invalid_argument("contour needs at least 4 points");
  std::vector<cplx> out;
  const double per = 8.0 * delta;
  const cplx corners[5] = {{delta, delta}, {-delta, delta}, {-delta, -delta}, {delta, -delta}, {delta, delta}};
  for (int k = 0; k < m; ++k) {
    double s = per * k / m;
    int side = std::min(3, static_cast<int>(s / (2.0 * delta)));
    double t = (s - 2.0 * delta * side) / (2.0 * delta);
    out.push_back(corners[side] + t * (corners[side + 1] - corners[side]));
  }
  return out;
}

std::vector<ResolventSample> sweep_points(double delta, double nu, const SweepOptions& opt, double M1) {
  std::vector<ResolventSample> pts;
  const double r_min = 1.01 * std::sqrt(2.0) * delta;
  const double r_max = opt.r_max > 0.0 ? opt.r_max : 1e3 * std::max(1.0, nu);
  for (int i = 0; i < opt.radii; ++i) {
    double r = r_min * std::pow(r_max / r_min, opt.radii > 1 ? double(i) / (opt.radii - 1) : 0.0);
    double th_max = std::acos(-delta / r) * (1.0 - 1e-6);
    for (int j = 0; j < opt.angles; ++j) {
      double th = opt.angles > 1 ? -th_max + 2.0 * th_max * j / (opt.angles - 1) : 0.0;
      ResolventSample s;
      s.lambda = std::polar(r, th);
      if (s.lambda.real() > M1 && std::abs(s.lambda.imag()) <= delta)
        s.region = "G1";
      else if (std::abs(s.lambda.imag()) > delta)
        s.region = "G2";
      else
        s.region = "G3";
      pts.push_back(s);
    }
  }
  for (cplx z : gamma_contour(delta, opt.gamma_points)) {
    ResolventSample s;
    s.lambda = z;
    s.region = "Gamma";
    pts.push_back(s);
  }
  return pts;
}

SweepResult resolvent_sweep(ResolventEngine& eng, double delta, double nu, const SweepOptions& opt) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  SweepResult res;
  res.delta = delta;
  res.w = eng.numerical_abscissa();
  res.M1 = opt.M1 > 0.0 ? opt.M1 : std::max(res.w, 0.0) + 1.0;
  res.samples = sweep_points(delta, nu, opt, res.M1);
  for (ResolventSample& s : res.samples) {
    ResolventSample got;
    try {
      got = eng.evaluate(s.lambda);
    } catch (const std::domain_error&) {
      ++res.retried;
      try {
        got = eng.evaluate(s.lambda + cplx(1e-6, 0.0));
      } catch (const std::domain_error&) {
        got.norm_inv = got.norm_Ares = std::numeric_limits<double>::infinity();
      }
    }
    s.norm_inv = got.norm_inv;
    s.norm_Ares = got.norm_Ares;
    res.sup_inv = std::max(res.sup_inv, s.norm_inv);
    res.sup_A = std::max(res.sup_A, s.norm_Ares);
    if (s.region == "Gamma") {
      res.sup_inv_gamma = std::max(res.sup_inv_gamma, s.norm_inv);
      res.sup_A_gamma = std::max(res.sup_A_gamma, s.norm_Ares);
    } else {
      int k = s.region[1] - '1';
      res.sup_inv_G[k] = std::max(res.sup_inv_G[k], s.norm_inv);
      res.sup_A_G[k] = std::max(res.sup_A_G[k], s.norm_Ares);
    }
    if (!(s.norm_inv <= 1e6) || !(s.norm_Ares <= 1e6)) res.flagged = true;
    if (s.region == "G1") {
      double env = 1.0 + std::abs(s.lambda) / (s.lambda.real() - res.w);
      res.envelope_excess = std::max(res.envelope_excess, s.norm_Ares / env);
    }
  }
  return res;
}

SweepResult resolvent_sweep(const DiscretizedOperator& op, double delta, const SweepOptions& opt) {
  ResolventEngine eng(op);
  return resolvent_sweep(eng, delta, op.nu, opt);
}

// ---------------------------------------------------------------------------
// Relative bound

BoundFit relative_bound_fit(const Profile& moving, const Profile& stat, int samples, unsigned long long seed) {
  BoundFit fit;
  fit.c = moving.c;
  const double nu = moving.nu;
  DiscretizedOperator A = build_block(stat, false, nu);
  DiscretizedOperator Bc = build_Bc(moving, stat);
  const Grid& g = A.grid;
  const int n = g.n;
  MatrixXd Aw = A.weighted(), Bw = Bc.weighted();
  MatrixXd Wh = block_weight(g, 0.5);
  MatrixXd Y(2 * n, samples);
  for (int i = 0; i < samples; ++i) {
    StateVector U(random_bandlimited(g, seed * 100003ULL + 2 * i),
                  random_bandlimited(g, seed * 100003ULL + 2 * i + 1));
    Y.col(i) = Wh * stack(U);
  }
  MatrixXd AY = Aw * Y, BY = Bw * Y;
  std::vector<double> nu_(samples), na(samples), nb(samples);
  for (int i = 0; i < samples; ++i) {
    nu_[i] = Y.col(i).norm();
    na[i] = AY.col(i).norm();
    nb[i] = BY.col(i).norm();
  }
  for (int i = 0; i < samples; ++i) {
    fit.a_star = std::max(fit.a_star, nb[i] / nu_[i]);
    fit.b_star = std::max(fit.b_star, nb[i] / na[i]);
  }
  if (fit.a_star == 0.0 && fit.b_star == 0.0) {
    fit.b_grid.assign(50, 0.0);
    fit.a_of_b.assign(50, 0.0);
    return fit;
  }
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 50; ++k) {
    double b = fit.b_star * k / 49.0;
    double a = 0.0;
    for (int i = 0; i < samples; ++i) a = std::max(a, std::max(nb[i] - b * na[i], 0.0) / nu_[i]);
    fit.b_grid.push_back(b);
    fit.a_of_b.push_back(a);
    double score = std::hypot(a / fit.a_star, b / fit.b_star);
    if (score < best) {
      best = score;
      fit.a = a;
      fit.b = b;
    }
  }
  return fit;
}

// ---------------------------------------------------------------------------
// Resolvent inequalities

namespace {

// Random smooth field: Gaussian Fourier coefficients on |k| <= k_cut.
Field smooth_random(const Grid& g, std::mt19937_64& rng, double k_cut) {
  std::normal_distribution<double> nd;
  std::vector<cplx> F(g.n / 2 + 1, cplx(0.0));
  for (int j = 1; j < g.n / 2; ++j)
    if (g.k(j) <= k_cut) F[j] = cplx(nd(rng), nd(rng));
  Vec v = kernel::irfft(g, F);
  Field f(g, v);
  double nn = norm(f, NormKind::L2);
  for (double& x : f.values) x /= nn;
  return f;
}

using CV = Eigen::VectorXcd;

}  // namespace

InequalityTrials res_inequality_trials(const Profile& stat, double nu, double Lambda0, double delta, int trials,
                                       unsigned long long seed, double r_max, double k_cut) {
  InequalityTrials out;
  out.trials = trials;
  out.Lambda0 = Lambda0;
  out.a_min_defect = std::numeric_limits<double>::infinity();
  const Grid& g = stat.theta.grid;
  const int n = g.n;
  const double dx = g.dx();
  MatrixXd L = assemble_Lc(stat.theta, 0.0, nu, 0.0, stat.mode);
  L = 0.5 * (L + L.transpose());
  DiscretizedOperator A = build_block(stat, false, nu);
  APerpInverse Ainv(stat, nu);
  Field t = stat.derivative1();
  const double tt = inner(t, t);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ud(0.0, 1.0);

  auto perp = [&](Field f) {
    double a = inner(f, t) / tt;
    for (int j = 0; j < n; ++j) f.values[j] -= a * t.values[j];
    return f;
  };
  auto to_c = [&](const Field& re, const Field& im) {
    CV z(n);
    for (int j = 0; j < n; ++j) z[j] = cplx(re.values[j], im.values[j]);
    return z;
  };
  // a[u, w] = <L u, w> with the second slot conjugated.
  auto aform = [&](const CV& u, const CV& w) { return dx * w.dot(L * u); };
  auto l2 = [&](const CV& u, const CV& w) { return dx * w.dot(u); };
  const double r_min = 1.01 * std::sqrt(2.0) * delta;

  for (int tr = 0; tr < trials; ++tr) {
    double r = r_min * std::pow(r_max / r_min, ud(rng));
    double thm = std::acos(-delta / r) * (1.0 - 1e-6);
    cplx lam = std::polar(r, -thm + 2.0 * thm * ud(rng));
    Field u1 = perp(smooth_random(g, rng, k_cut)), u2 = perp(smooth_random(g, rng, k_cut));
    Field v1 = perp(smooth_random(g, rng, k_cut)), v2 = perp(smooth_random(g, rng, k_cut));
    CV u = to_c(u1, u2), v = to_c(v1, v2);

    // (a): F = (lambda - A) U.
    {
      CV f = lam * u - v;
      CV gg = L * u + (lam + nu) * v;
      double ua2 = aform(u, u).real(), v2n = l2(v, v).real();
      cplx lhs = std::conj(lam) * ua2 + (lam + nu) * v2n;
      cplx ident = aform(u, f) + l2(gg, v);
      double UZ = std::sqrt(ua2 + v2n);
      double FZ = std::sqrt(aform(f, f).real() + l2(gg, gg).real());
      double rhs = UZ * FZ;
      double defect = (rhs - std::abs(lhs)) / rhs;
      out.a_min_defect = std::min(out.a_min_defect, defect);
      if (defect >= -1e-12) ++out.a_holds;
      out.a_identity_error = std::max(out.a_identity_error, std::abs(lhs - ident) / std::max(std::abs(lhs), rhs));
    }
    // (b): F = (A - lambda) A_perp^{-1} U.
    {
      StateVector Xr = Ainv.apply(StateVector(u1, v1));
      StateVector Xi = Ainv.apply(StateVector(u2, v2));
      VectorXd xr = stack(Xr), xi = stack(Xi);
      VectorXd axr = A.matrix * xr, axi = A.matrix * xi;
      Eigen::VectorXcd X(2 * n), AX(2 * n);
      for (int j = 0; j < 2 * n; ++j) {
        X[j] = cplx(xr[j], xi[j]);
        AX[j] = cplx(axr[j], axi[j]);
      }
      Eigen::VectorXcd F = AX - lam * X;
      CV f = F.head(n), gg = F.tail(n);
      double ua = std::sqrt(aform(u, u).real()), vn = std::sqrt(l2(v, v).real());
      double FZ = std::sqrt(aform(f, f).real() + l2(gg, gg).real());
      cplx lhs = std::conj(lam) * ua * ua + (nu + lam) * vn * vn;
      double c1 = std::abs(lhs) / ((std::abs(lam) * ua + std::abs(lam + nu) * vn) * FZ);
      double c2 = std::abs(ua - std::abs(nu + lam) / std::sqrt(Lambda0) * vn) / FZ;
      out.C1 = std::max(out.C1, c1);
      out.C2 = std::max(out.C2, c2);
    }
  }
  return out;
}

}  // namespace neel
