#pragma once

#include "ampa/types.hpp"

namespace ampa {

struct QuadRule {
  rvec x;
  rvec w;
};

// Gauss-Legendre nodes/weights on [a, b], Newton iteration on P_n
QuadRule gauss_legendre(int n, double a, double b);

// Gauss-Hermite (physicists'): integrates f(t)*exp(-t^2) dt on R
QuadRule gauss_hermite(int n);

// process-wide cache of [0, pi/2] Legendre rules keyed by node count
const QuadRule& gl_half_pi(int n);

} // namespace ampa
