#include "neel/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace neel {

Parity phase_parity(const Field& theta) {
  return theta.background == Background::wall ? Parity::antiperiodic : Parity::periodic;
}

EnergyBreakdown energy(const Field& theta, Mode mode) {
  theta.check_finite();
  const Grid& g = theta.grid;
  Vec th = theta.theta();
  Field d1 = derivative(theta, 1);
  Vec co(g.n);
  for (int j = 0; j < g.n; ++j) co[j] = std::cos(th[j]);
  EnergyBreakdown e;
  e.exchange = 0.5 * kernel::dot(g, d1.values, d1.values);
  e.anisotropy = 0.5 * kernel::dot(g, co, co);
  if (mode == Mode::nonlocal) {
    Vec hc(g.n);
    kernel::half_laplacian(g, co, hc, phase_parity(theta));
    e.stray = 0.5 * kernel::dot(g, co, hc);
  }
  e.total = e.exchange + e.stray + e.anisotropy;
  if (!std::isfinite(e.total)) throw std::domain_error("energy is not finite");
  return e;
}

void nonlinear_term(const Grid& g, std::span<const double> theta, Parity p, Mode mode,
                    std::span<double> out) {
  Vec co(g.n), tco(g.n);
  for (int j = 0; j < g.n; ++j) co[j] = std::cos(theta[j]);
  if (mode == Mode::nonlocal)
    kernel::apply_T(g, co, tco, p);
  else
    tco = co;
  for (int j = 0; j < g.n; ++j) out[j] = std::sin(theta[j]) * tco[j];
}

Field grad_energy(const Field& theta, Mode mode) {
  theta.check_finite();
  const Grid& g = theta.grid;
  Field d2 = derivative(theta, 2);
  Vec th = theta.theta();
  Vec nl(g.n);
  nonlinear_term(g, th, phase_parity(theta), mode, nl);
  Field out = Field::zeros(g);
  for (int j = 0; j < g.n; ++j) out.values[j] = -d2.values[j] - nl[j];
  return out;
}

}  // namespace neel
