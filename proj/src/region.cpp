#include "neel/region.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

namespace neel {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kShards = 16;
constexpr double kRel = 1e-12;  // round-off allowance in the sampled inequalities

}  // namespace

RegionParams::RegionParams(double nu_, double delta_, double Lambda0_, double beta_)
    : nu(nu_), delta(delta_), Lambda0(Lambda0_), beta(beta_) {
  validate();
}

void RegionParams::validate() const {
  if (!(nu > 0.0)) throw std::invalid_argument("nu must be positive");
  if (!(delta > 0.0 && delta < nu / 2)) throw std::invalid_argument("delta must lie in (0, nu/2)");
  if (!(Lambda0 > 0.0)) throw std::invalid_argument("Lambda0 must be positive");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0, 1)");
  if (!(2.0 * delta < beta * nu)) throw std::invalid_argument("need 2 delta < beta nu");
}

double RegionParams::epsilon() const { return epsilon_of(beta, nu, Lambda0); }

double RegionParams::im_threshold() const { return Lambda0 + std::sqrt(Lambda0) * (2.0 - beta) * nu; }

bool RegionParams::admissible(cplx l) const {
  return l.real() > -beta * nu / 2 && l.imag() * l.imag() > im_threshold();
}

double S_func(double phi, cplx l, double nu) {
  double c = std::cos(phi), s = std::sin(phi);
  return std::abs(std::conj(l) * (c * c) + (l + nu) * (s * s));
}

double f2_form(double u, cplx l, double nu) {
  double a = l.real() + 0.5 * nu * (1.0 + u);
  return a * a + l.imag() * l.imag() * u * u;
}

double a_of(cplx l, double Lambda0, double nu) { return std::abs(nu + l) / std::sqrt(Lambda0); }

double f_a_func(double phi, cplx l, double Lambda0, double nu) {
  double a = a_of(l, Lambda0, nu);
  return (1.0 - a) * std::cos(phi) - (1.0 + a) * std::sin(phi);
}

double epsilon_of(double beta, double nu, double Lambda0) {
  double k = (2.0 - beta) * nu / std::sqrt(Lambda0);
  return 2.0 * k / (4.0 * kPi + (2.0 + kPi) * k);
}

MValue M_func(double phi, cplx l, const RegionParams& p) {
  const double inf = std::numeric_limits<double>::infinity();
  MValue m;
  double d1 = std::abs(std::cos(phi) - std::abs(l + p.nu) / std::sqrt(p.Lambda0) * std::sin(phi));
  double d2 = S_func(phi, l, p.nu);
  // Denominators at rounding level count as zero.
  const double eps = 8.0 * std::numeric_limits<double>::epsilon();
  const double num = std::abs(l) + std::abs(l + p.nu);
  m.first = d1 > eps * (1.0 + std::abs(l + p.nu) / std::sqrt(p.Lambda0)) ? 1.0 / d1 : inf;
  m.second = d2 > eps * num ? num / d2 : inf;
  m.value = std::min(m.first, m.second);
  m.infinite = !std::isfinite(m.value);
  return m;
}

bool in_G(cplx l, double delta) {
  if (!(l.real() > -delta)) return false;
  return !(std::abs(l.real()) < delta && std::abs(l.imag()) < delta);
}

bool in_G2(cplx l, double delta) {
  if (l.real() > -delta && std::abs(l.imag()) > delta) return true;
  return std::abs(l.real()) < delta && std::abs(l.imag()) == delta;
}

MPart m_part(double phi, cplx l, const RegionParams& p) {
  double w = 0.5 * std::asin(p.epsilon());
  if (std::abs(phi - kPi / 4) >= w) return MPart::H1;
  return l.imag() * l.imag() <= p.im_threshold() ? MPart::H2 : MPart::H3;
}

std::string to_string(MPart h) {
  switch (h) {
    case MPart::H1: return "H1";
    case MPart::H2: return "H2";
    case MPart::H3: return "H3";
  }
  return "?";
}

namespace {

using Rng = std::mt19937_64;

double uni(Rng& r, double a, double b) { return std::uniform_real_distribution<double>(a, b)(r); }
double loguni(Rng& r, double a, double b) { return a * std::exp(uni(r, 0.0, std::log(b / a))); }
double sign(Rng& r) { return uni(r, 0.0, 1.0) < 0.5 ? -1.0 : 1.0; }

// {Re l > -delta} outside the closed square; log-radial bulk plus dense layers along the square.
cplx sample_outside(Rng& r, double delta, double nu, bool include_edges) {
  const double R = 1e3 * nu;
  double pick = uni(r, 0.0, 1.0);
  for (;;) {
    cplx l;
    if (pick < 0.5) {
      double rad = loguni(r, delta, R), th = uni(r, -kPi, kPi);
      l = std::polar(rad, th);
    } else if (pick < 0.9) {
      double d = delta * std::pow(10.0, uni(r, -9.0, 0.0));
      int side = static_cast<int>(uni(r, 0.0, 3.0));
      double t = uni(r, -delta, delta);
      if (side == 0)
        l = cplx(t, sign(r) * (delta + d));
      else if (side == 1)
        l = cplx(delta + d, t);
      else
        l = cplx(-delta + d, sign(r) * loguni(r, delta, R));
    } else {
      double d1 = delta * std::pow(10.0, uni(r, -9.0, 0.0));
      double d2 = include_edges ? 0.0 : delta * std::pow(10.0, uni(r, -9.0, 0.0));
      l = cplx(-delta + d1, sign(r) * (delta + d2));
    }
    bool ok = l.real() > -delta && !(std::abs(l.real()) <= delta && std::abs(l.imag()) <= delta);
    if (include_edges && std::abs(l.real()) < delta && std::abs(l.imag()) == delta) ok = true;
    if (ok) return l;
  }
}

cplx sample_G2(Rng& r, const RegionParams& p) {
  const double delta = p.delta, R = 1e3 * p.nu;
  double pick = uni(r, 0.0, 1.0);
  for (;;) {
    cplx l;
    if (pick < 0.6) {
      l = std::polar(loguni(r, delta, R), uni(r, -kPi, kPi));
    } else if (pick < 0.9) {
      double d = delta * std::pow(10.0, uni(r, -9.0, 1.0));
      double re = uni(r, 0.0, 1.0) < 0.5 ? -delta + delta * std::pow(10.0, uni(r, -9.0, 0.0)) : loguni(r, delta, R) - 2.0 * delta;
      l = cplx(re, sign(r) * (delta + d));
    } else {
      l = cplx(uni(r, -delta, delta), sign(r) * delta);
    }
    if (in_G2(l, delta)) return l;
  }
}

cplx sample_admissible(Rng& r, const RegionParams& p) {
  const double re0 = -p.beta * p.nu / 2, thr = p.im_threshold();
  for (;;) {
    double re = re0 + (uni(r, 0.0, 1.0) < 0.5 ? p.nu * std::pow(10.0, uni(r, -9.0, 0.0)) : loguni(r, p.nu, 1e3 * p.nu));
    double im2 = thr + (uni(r, 0.0, 1.0) < 0.5 ? thr * std::pow(10.0, uni(r, -9.0, 0.0)) : loguni(r, thr, 1e6 * thr));
    cplx l(re, sign(r) * std::sqrt(im2));
    if (p.admissible(l)) return l;
  }
}

Rng shard_rng(unsigned long long seed, int shard, unsigned tag) {
  std::seed_seq ss{static_cast<unsigned>(seed & 0xffffffffu), static_cast<unsigned>(seed >> 32),
                   static_cast<unsigned>(shard), tag};
  return Rng(ss);
}

template <class Body, class Result>
void run_shards(long samples, Body body, std::vector<Result>& out) {
  out.assign(kShards, Result{});
  std::vector<std::thread> th;
  for (int s = 0; s < kShards; ++s) {
    long n = samples / kShards + (s < samples % kShards ? 1 : 0);
    th.emplace_back([&, s, n] { body(s, n, out[s]); });
  }
  for (auto& t : th) t.join();
}

// Sampled inequality lhs >= rhs over (phi, lambda) draws.
template <class Draw, class Eval>
LemmaCheck sampled(const std::string& name, long samples, unsigned long long seed, unsigned tag, Draw draw,
                   Eval eval) {
  std::vector<LemmaCheck> parts;
  run_shards(
      samples,
      [&](int s, long n, LemmaCheck& c) {
        Rng r = shard_rng(seed, s, tag);
        c.min_margin = std::numeric_limits<double>::infinity();
        for (long i = 0; i < n; ++i) {
          auto [phi, l] = draw(r);
          auto [lhs, rhs] = eval(phi, l);
          double m = (lhs - rhs) / rhs;
          ++c.samples;
          if (m < -kRel) ++c.violations;
          if (m < c.min_margin) {
            c.min_margin = m;
            c.worst_phi = phi;
            c.worst_lambda = l;
            c.bound = rhs;
          }
        }
      },
      parts);
  LemmaCheck out;
  out.name = name;
  out.min_margin = std::numeric_limits<double>::infinity();
  for (const auto& c : parts) {
    out.samples += c.samples;
    out.violations += c.violations;
    if (c.min_margin < out.min_margin) {
      out.min_margin = c.min_margin;
      out.worst_phi = c.worst_phi;
      out.worst_lambda = c.worst_lambda;
      out.bound = c.bound;
    }
  }
  return out;
}

}  // namespace

LemmaCheck check_aux0_lower(const RegionParams& p, long samples, unsigned long long seed, double* form_error) {
  p.validate();
  const double d = p.delta, nu = p.nu;
  const double bound = d * (nu / 2 - d) / std::sqrt(d * d + nu * nu / 4);
  auto draw = [&](Rng& r) { return std::pair<double, cplx>(uni(r, 0.0, kPi / 2), sample_outside(r, d, nu, false)); };
  LemmaCheck c = sampled("aux0_lower", samples, seed, 1, draw, [&](double phi, cplx l) {
    return std::pair<double, double>(S_func(phi, l, nu), bound);
  });
  if (form_error) {
    std::vector<double> errs;
    run_shards(
        samples,
        [&](int s, long n, double& e) {
          Rng r = shard_rng(seed, s, 1);
          for (long i = 0; i < n; ++i) {
            auto [phi, l] = draw(r);
            double S = S_func(phi, l, nu);
            double f2 = f2_form(-std::cos(2.0 * phi), l, nu);
            e = std::max(e, std::abs(S * S - f2) / std::max(1.0, S * S));
          }
        },
        errs);
    *form_error = *std::max_element(errs.begin(), errs.end());
  }
  return c;
}

LemmaCheck check_aux0_second(const RegionParams& p, long samples, unsigned long long seed, double factor) {
  p.validate();
  const double d = p.delta, nu = p.nu;
  return sampled(
      factor == std::sqrt(2.0) ? "aux0_second" : "aux0_second_unit", samples, seed, 2,
      [&](Rng& r) {
        cplx l;
        do l = sample_outside(r, d, nu, false);
        while (l.imag() == 0.0);
        return std::pair<double, cplx>(uni(r, 0.0, kPi / 2), l);
      },
      [&](double phi, cplx l) {
        double ai = std::abs(l.imag());
        return std::pair<double, double>(S_func(phi, l, nu),
                                         factor * ai * std::abs(l.real() + nu / 2) / (nu / 2 + ai));
      });
}

LemmaCheck check_aux1(const RegionParams& p, long samples, unsigned long long seed) {
  p.validate();
  const double k = 1.0 / std::sqrt(p.Lambda0);
  const double bound = (1.0 - p.beta / 2) * k * p.nu;
  return sampled(
      "aux1", samples, seed, 3, [&](Rng& r) { return std::pair<double, cplx>(0.0, sample_admissible(r, p)); },
      [&](double, cplx l) { return std::pair<double, double>(std::abs(1.0 - k * std::abs(p.nu + l)), bound); });
}

LemmaCheck check_aux2(const RegionParams& p, long samples, unsigned long long seed, double phi_max) {
  p.validate();
  const double bound = 0.5 * (1.0 - p.beta / 2) * p.nu / std::sqrt(p.Lambda0);
  const bool stated = phi_max <= 0.0;
  const double w = stated ? p.epsilon() : phi_max;
  return sampled(
      stated ? "aux2" : "aux2_proof_range", samples, seed, stated ? 4u : 5u,
      [&](Rng& r) {
        double phi;
        do phi = uni(r, -w, w);
        while (std::abs(phi) >= w);
        return std::pair<double, cplx>(phi, sample_admissible(r, p));
      },
      [&](double phi, cplx l) {
        return std::pair<double, double>(std::abs(f_a_func(phi, l, p.Lambda0, p.nu)), bound);
      });
}

MScan scan_M(const RegionParams& p, long samples, unsigned long long seed) {
  p.validate();
  const double w = 0.5 * std::asin(p.epsilon());
  std::vector<MScan> parts;
  run_shards(
      samples,
      [&](int s, long n, MScan& m) {
        Rng r = shard_rng(seed, s, 6);
        for (long i = 0; i < n; ++i) {
          double phi = uni(r, 0.0, 1.0) < 0.8 ? uni(r, 0.0, kPi / 2) : kPi / 4 + uni(r, -w, w);
          cplx l = sample_G2(r, p);
          MValue v = M_func(phi, l, p);
          ++m.samples;
          if (v.infinite) {
            ++m.infinite;
            continue;
          }
          int h = static_cast<int>(m_part(phi, l, p));
          ++m.count_part[h];
          m.sup_part[h] = std::max(m.sup_part[h], v.value);
          if (h == 2) m.H3_first_max = std::max(m.H3_first_max, v.first);
          if (v.value > m.sup) {
            m.sup = v.value;
            m.sup_phi = phi;
            m.sup_lambda = l;
          }
        }
      },
      parts);
  MScan out;
  for (const auto& m : parts) {
    out.samples += m.samples;
    out.infinite += m.infinite;
    for (int h = 0; h < 3; ++h) {
      out.count_part[h] += m.count_part[h];
      out.sup_part[h] = std::max(out.sup_part[h], m.sup_part[h]);
    }
    out.H3_first_max = std::max(out.H3_first_max, m.H3_first_max);
    if (m.sup > out.sup) {
      out.sup = m.sup;
      out.sup_phi = m.sup_phi;
      out.sup_lambda = m.sup_lambda;
    }
  }
  out.H3_bound = 2.0 * std::sqrt(2.0) * std::sqrt(p.Lambda0) / ((1.0 - p.beta / 2) * p.nu);
  return out;
}

const LemmaCheck& AppendixReport::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("no check named " + name);
}

AppendixReport appendix_check(const RegionParams& p, long samples, long m_samples, unsigned long long seed) {
  p.validate();
  AppendixReport rep;
  rep.params = p;
  rep.seed = seed;
  rep.samples = samples;
  rep.checks.push_back(check_aux0_lower(p, samples, seed, &rep.form_error));
  rep.checks.push_back(check_aux0_second(p, samples, seed));
  rep.checks.push_back(check_aux0_second(p, samples, seed, 1.0));
  rep.checks.push_back(check_aux1(p, samples, seed));
  rep.checks.push_back(check_aux2(p, samples, seed));
  rep.checks.push_back(check_aux2(p, samples, seed, 0.5 * std::asin(p.epsilon())));
  rep.scan = scan_M(p, m_samples, seed);
  rep.scan4 = scan_M(p, 4 * m_samples, seed + 1);
  rep.sup_change = std::abs(rep.scan4.sup - rep.scan.sup) / rep.scan.sup;
  rep.H3_limit = M_func(kPi / 4, cplx(0.0, 1e8), p).first;
  return rep;
}

}  // namespace neel
