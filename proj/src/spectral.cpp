#include "neel/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace neel {

namespace {

constexpr double pi = std::numbers::pi;

struct Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

std::mutex plan_mutex;

// Plans are created once per size with unaligned flags and executed through
// the new-array interface, which is safe from concurrent callers.
const Plans& plans_for(int n) {
  static std::map<int, Plans> cache;
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Plans p;
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::vector<double> r(n);
  std::vector<fftw_complex> c(n);
  std::vector<fftw_complex> c2(n);
  p.r2c = fftw_plan_dft_r2c_1d(n, r.data(), c.data(), flags);
  p.c2r = fftw_plan_dft_c2r_1d(n, c.data(), r.data(), flags | FFTW_DESTROY_INPUT);
  p.fwd = fftw_plan_dft_1d(n, c.data(), c2.data(), FFTW_FORWARD, flags);
  p.bwd = fftw_plan_dft_1d(n, c.data(), c2.data(), FFTW_BACKWARD, flags);
  return cache.emplace(n, p).first->second;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

void check_sizes(const Grid& g, std::span<const double> f, std::span<double> out) {
  if (static_cast<int>(f.size()) != g.n || static_cast<int>(out.size()) != g.n)
    throw std::invalid_argument("field length does not match grid");
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

Grid::Grid(double half_length, int points) : L(half_length), n(points) {
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("grid half-length must be positive");
  if (n < 16 || !is_power_of_two(n)) throw std::invalid_argument("grid size must be a power of two >= 16");
}

Vec Grid::xs() const {
  Vec out(n);
  for (int j = 0; j < n; ++j) out[j] = x(j);
  return out;
}

double Grid::k(int j) const { return pi * j / L; }

Vec Grid::wavenumbers() const {
  Vec out(n);
  for (int j = 0; j < n; ++j) out[j] = pi * (j < n / 2 ? j : j - n) / L;
  return out;
}

double wall_phase(double x) { return std::atan(std::sinh(x)); }
double wall_phase_d1(double x) { return 1.0 / std::cosh(x); }
double wall_phase_d2(double x) { return -std::tanh(x) / std::cosh(x); }

Field::Field(Grid g, Vec v, Background b) : grid(g), values(std::move(v)), background(b) {
  if (static_cast<int>(values.size()) != grid.n) throw std::invalid_argument("field length does not match grid");
}

Field Field::zeros(const Grid& g, Background b) { return Field(g, Vec(g.n, 0.0), b); }

Field Field::from_function(const Grid& g, double (*f)(double)) {
  Field out = zeros(g);
  for (int j = 0; j < g.n; ++j) out.values[j] = f(g.x(j));
  return out;
}

Vec Field::theta() const {
  Vec th = values;
  if (background == Background::wall)
    for (int j = 0; j < grid.n; ++j) th[j] += wall_phase(grid.x(j));
  return th;
}

void Field::check_finite() const {
  for (double v : values)
    if (!std::isfinite(v)) throw std::domain_error("field contains non-finite samples");
}

StateVector::StateVector(Field u_, Field v_) : u(std::move(u_)), v(std::move(v_)) {
  if (!(u.grid == v.grid)) throw std::invalid_argument("state components live on different grids");
}

namespace kernel {

std::vector<cplx> rfft(const Grid& g, std::span<const double> f) {
  if (static_cast<int>(f.size()) != g.n) throw std::invalid_argument("field length does not match grid");
  std::vector<cplx> F(g.n / 2 + 1);
  const Plans& p = plans_for(g.n);
  fftw_execute_dft_r2c(p.r2c, const_cast<double*>(f.data()), as_fftw(F.data()));
  return F;
}

Vec irfft(const Grid& g, const std::vector<cplx>& F) {
  std::vector<cplx> tmp = F;
  Vec out(g.n);
  const Plans& p = plans_for(g.n);
  fftw_execute_dft_c2r(p.c2r, as_fftw(tmp.data()), out.data());
  for (double& v : out) v /= g.n;
  return out;
}

void derivative(const Grid& g, std::span<const double> f, std::span<double> out, int order) {
  check_sizes(g, f, out);
  if (order != 1 && order != 2) throw std::invalid_argument("derivative order must be 1 or 2");
  std::vector<cplx> F = rfft(g, f);
  const int h = g.n / 2;
  for (int j = 0; j <= h; ++j) {
    double k = g.k(j);
    if (order == 1)
      F[j] *= (j == h) ? cplx(0.0) : cplx(0.0, k);
    else
      F[j] *= -k * k;
  }
  Vec r = irfft(g, F);
  std::copy(r.begin(), r.end(), out.begin());
}

void multiplier(const Grid& g, std::span<const double> f, std::span<double> out, double (*m)(double)) {
  check_sizes(g, f, out);
  std::vector<cplx> F = rfft(g, f);
  for (int j = 0; j <= g.n / 2; ++j) F[j] *= m(g.k(j));
  Vec r = irfft(g, F);
  std::copy(r.begin(), r.end(), out.begin());
}

namespace {

// Antiperiodic fields carry half-integer wavenumbers pi (2m - 1) / (2L).
// Modulating by exp(i pi j / n) maps them onto the ordinary FFT bins.
void antiperiodic_multiplier(const Grid& g, std::span<const double> f, std::span<double> out,
                             double shift_const) {
  const int n = g.n;
  std::vector<cplx> a(n), b(n);
  for (int j = 0; j < n; ++j) a[j] = f[j] * std::polar(1.0, pi * j / n);
  const Plans& p = plans_for(n);
  fftw_execute_dft(p.fwd, as_fftw(a.data()), as_fftw(b.data()));
  for (int m = 0; m < n; ++m) {
    int mm = (m <= n / 2) ? m : m - n;
    double kappa = pi * (2.0 * mm - 1.0) / (2.0 * g.L);
    b[m] *= shift_const + std::abs(kappa);
  }
  fftw_execute_dft(p.bwd, as_fftw(b.data()), as_fftw(a.data()));
  for (int j = 0; j < n; ++j) out[j] = (a[j] * std::polar(1.0, -pi * j / n)).real() / n;
}

}  // namespace

void half_laplacian(const Grid& g, std::span<const double> f, std::span<double> out, Parity p) {
  check_sizes(g, f, out);
  if (p == Parity::antiperiodic) {
    antiperiodic_multiplier(g, f, out, 0.0);
    return;
  }
  multiplier(g, f, out, [](double k) { return std::abs(k); });
}

void apply_T(const Grid& g, std::span<const double> f, std::span<double> out, Parity p) {
  check_sizes(g, f, out);
  if (p == Parity::antiperiodic) {
    antiperiodic_multiplier(g, f, out, 1.0);
    return;
  }
  multiplier(g, f, out, [](double k) { return 1.0 + std::abs(k); });
}

void shift(const Grid& g, std::span<const double> f, std::span<double> out, double s) {
  check_sizes(g, f, out);
  std::vector<cplx> F = rfft(g, f);
  const int h = g.n / 2;
  for (int j = 0; j < h; ++j) F[j] *= std::polar(1.0, g.k(j) * s);
  F[h] *= std::cos(g.k(h) * s);
  Vec r = irfft(g, F);
  std::copy(r.begin(), r.end(), out.begin());
}

double dot(const Grid& g, std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (int j = 0; j < g.n; ++j) s += a[j] * b[j];
  return s * g.dx();
}

}  // namespace kernel

namespace {

void require_no_background(const Field& f, const char* what) {
  if (f.background != Background::none)
    throw std::invalid_argument(std::string(what) + " requires a decaying field without background");
}

}  // namespace

Field half_laplacian(const Field& f, Parity p) {
  require_no_background(f, "half_laplacian");
  Field out = Field::zeros(f.grid);
  kernel::half_laplacian(f.grid, f.values, out.values, p);
  return out;
}

Field apply_T(const Field& f, Parity p) {
  require_no_background(f, "apply_T");
  Field out = Field::zeros(f.grid);
  kernel::apply_T(f.grid, f.values, out.values, p);
  return out;
}

Field derivative(const Field& f, int order) {
  Field out = Field::zeros(f.grid);
  kernel::derivative(f.grid, f.values, out.values, order);
  if (f.background == Background::wall) {
    for (int j = 0; j < f.grid.n; ++j) {
      double x = f.grid.x(j);
      out.values[j] += order == 1 ? wall_phase_d1(x) : wall_phase_d2(x);
    }
  }
  return out;
}

Field shift(const Field& f, double s) {
  if (!(std::abs(s) < f.grid.L / 2)) throw std::invalid_argument("shift must satisfy |s| < L/2");
  Field out = Field::zeros(f.grid, f.background);
  kernel::shift(f.grid, f.values, out.values, s);
  if (f.background == Background::wall) {
    for (int j = 0; j < f.grid.n; ++j) {
      double x = f.grid.x(j);
      out.values[j] += wall_phase(x + s) - wall_phase(x);
    }
  }
  return out;
}

namespace {

double trig_interp(const Field& f, double x, int order) {
  const Grid& g = f.grid;
  std::vector<cplx> F = kernel::rfft(g, f.values);
  const int h = g.n / 2;
  double y = x + g.L;
  double acc = 0.0;
  for (int j = 0; j <= h; ++j) {
    double k = g.k(j);
    double w = (j == 0 || j == h) ? 1.0 : 2.0;
    cplx e = std::polar(1.0, k * y);
    cplx term = F[j] * e;
    if (order == 1) term *= (j == h) ? cplx(0.0) : cplx(0.0, k);
    if (j == h && order == 0) term = F[j] * std::cos(k * y);
    acc += w * term.real();
  }
  return acc / g.n;
}

}  // namespace

double evaluate(const Field& f, double x) {
  double v = trig_interp(f, x, 0);
  if (f.background == Background::wall) v += wall_phase(x);
  return v;
}

double evaluate_derivative(const Field& f, double x) {
  double v = trig_interp(f, x, 1);
  if (f.background == Background::wall) v += wall_phase_d1(x);
  return v;
}

double norm(const Field& f, NormKind kind) {
  require_no_background(f, "norm");
  const Grid& g = f.grid;
  if (kind == NormKind::L2) return std::sqrt(kernel::dot(g, f.values, f.values));
  std::vector<cplx> F = kernel::rfft(g, f.values);
  const int h = g.n / 2;
  double s = 0.0;
  for (int j = 0; j <= h; ++j) {
    double k = g.k(j);
    double w = (j == 0 || j == h) ? 1.0 : 2.0;
    double m = kind == NormKind::H1 ? 1.0 + k * k : std::abs(k);
    s += w * m * std::norm(F[j]);
  }
  return std::sqrt(s * g.dx() / g.n);
}

double inner(const Field& a, const Field& b) {
  require_no_background(a, "inner");
  require_no_background(b, "inner");
  return kernel::dot(a.grid, a.values, b.values);
}

double inner_H1(const Field& a, const Field& b) {
  require_no_background(a, "inner");
  require_no_background(b, "inner");
  const Grid& g = a.grid;
  std::vector<cplx> A = kernel::rfft(g, a.values);
  std::vector<cplx> B = kernel::rfft(g, b.values);
  const int h = g.n / 2;
  double s = 0.0;
  for (int j = 0; j <= h; ++j) {
    double k = g.k(j);
    double w = (j == 0 || j == h) ? 1.0 : 2.0;
    s += w * (1.0 + k * k) * (A[j] * std::conj(B[j])).real();
  }
  return s * g.dx() / g.n;
}

double norm(const StateVector& U) { return std::sqrt(inner(U, U)); }

double inner(const StateVector& U, const StateVector& V) {
  return inner_H1(U.u, V.u) + inner(U.v, V.v);
}

FormCoefficients form_coefficients(const Field& theta, bool nonlocal) {
  const Grid& g = theta.grid;
  Vec th = theta.theta();
  Parity p = theta.background == Background::wall ? Parity::antiperiodic : Parity::periodic;
  FormCoefficients fc{g, Vec(g.n), Vec(g.n), nonlocal};
  Vec co(g.n), tco(g.n);
  for (int j = 0; j < g.n; ++j) {
    fc.s[j] = std::sin(th[j]);
    co[j] = std::cos(th[j]);
  }
  if (nonlocal)
    kernel::apply_T(g, co, tco, p);
  else
    tco = co;
  for (int j = 0; j < g.n; ++j) fc.c[j] = co[j] * tco[j];
  return fc;
}

double a_form(const FormCoefficients& fc, const Field& u, const Field& w) {
  require_no_background(u, "a_form");
  require_no_background(w, "a_form");
  const Grid& g = fc.grid;
  Vec du(g.n), dw(g.n), su(g.n), tsu(g.n);
  kernel::derivative(g, u.values, du, 1);
  kernel::derivative(g, w.values, dw, 1);
  for (int j = 0; j < g.n; ++j) su[j] = fc.s[j] * u.values[j];
  if (fc.nonlocal)
    kernel::apply_T(g, su, tsu, Parity::antiperiodic);
  else
    tsu = su;
  double acc = 0.0;
  for (int j = 0; j < g.n; ++j)
    acc += du[j] * dw[j] + fc.s[j] * tsu[j] * w.values[j] - fc.c[j] * u.values[j] * w.values[j];
  return acc * g.dx();
}

double a_norm(const FormCoefficients& fc, const Field& u) {
  double a = a_form(fc, u, u);
  if (a < 0.0) throw std::domain_error("a-form is not positive on this input");
  return std::sqrt(a);
}

double z_inner(const FormCoefficients& fc, const StateVector& U, const StateVector& V) {
  return a_form(fc, U.u, V.u) + inner(U.v, V.v);
}

double z_norm(const FormCoefficients& fc, const StateVector& U) {
  return std::sqrt(std::max(0.0, z_inner(fc, U, U)));
}

namespace {

// Dense matrix of a translation-invariant operator from its response to the
// first unit vector. Antiperiodic operators flip sign across the wrap.
Eigen::MatrixXd circulant(const Vec& col, bool anti) {
  const int n = static_cast<int>(col.size());
  Eigen::MatrixXd M(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      int d = i - j;
      if (d >= 0)
        M(i, j) = col[d];
      else
        M(i, j) = anti ? -col[d + n] : col[d + n];
    }
  return M;
}

}  // namespace

Eigen::MatrixXd dense_derivative(const Grid& g, int order) {
  Vec e(g.n, 0.0), col(g.n);
  e[0] = 1.0;
  kernel::derivative(g, e, col, order);
  return circulant(col, false);
}

Eigen::MatrixXd dense_T(const Grid& g, Parity p) {
  Vec e(g.n, 0.0), col(g.n);
  e[0] = 1.0;
  kernel::apply_T(g, e, col, p);
  Eigen::MatrixXd M = circulant(col, p == Parity::antiperiodic);
  return 0.5 * (M + M.transpose());
}

Eigen::MatrixXd dense_sobolev(const Grid& g, double power) {
  Vec e(g.n, 0.0), col(g.n);
  e[0] = 1.0;
  std::vector<cplx> F = kernel::rfft(g, e);
  for (int j = 0; j <= g.n / 2; ++j) F[j] *= std::pow(1.0 + g.k(j) * g.k(j), power);
  col = kernel::irfft(g, F);
  Eigen::MatrixXd M = circulant(col, false);
  return 0.5 * (M + M.transpose());
}

Field random_bandlimited(const Grid& g, unsigned long long seed, double keep_fraction) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  const int h = g.n / 2;
  const int kmax = static_cast<int>(std::floor(keep_fraction * h));
  std::vector<cplx> F(h + 1, cplx(0.0));
  for (int j = 0; j <= kmax && j < h; ++j) F[j] = j == 0 ? cplx(nd(rng), 0.0) : cplx(nd(rng), nd(rng));
  Field out(g, kernel::irfft(g, F));
  double nrm = norm(out, NormKind::L2);
  for (double& v : out.values) v /= nrm;
  return out;
}

}  // namespace neel
