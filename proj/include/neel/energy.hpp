#pragma once

#include "neel/spectral.hpp"

namespace neel {

enum class Mode { nonlocal, local };

struct EnergyBreakdown {
  double exchange = 0.0;
  double stray = 0.0;
  double anisotropy = 0.0;
  double total = 0.0;
};

// Parity of cos(theta) and sin(theta): a wall turns by pi across the domain.
Parity phase_parity(const Field& theta);

EnergyBreakdown energy(const Field& theta, Mode mode = Mode::nonlocal);

// L2 gradient -theta'' - sin(theta) T(cos(theta)); T is the identity in local mode.
Field grad_energy(const Field& theta, Mode mode = Mode::nonlocal);

// sin(theta) T(cos(theta)) on raw samples, reused by the profile and dynamics solvers.
void nonlinear_term(const Grid& g, std::span<const double> theta, Parity p, Mode mode,
                    std::span<double> out);

}  // namespace neel
