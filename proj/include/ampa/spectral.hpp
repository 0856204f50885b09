#pragma once

#include <functional>
#include <optional>

#include "ampa/model.hpp"
#include "ampa/types.hpp"

namespace ampa {

// T(y) = (delta y^2 - 1)/(delta y^2 + sqrt(delta) - 1); even in y
double t_opt(double y, double delta);

struct EigConfig {
  int budget = 5000;
  double tol = 1e-8; // relative eigen-residual at exit
};

struct EigResult {
  cvec v; // ||v||^2 = n, largest-modulus entry rotated real positive
  double lambda = 0.0;
  double residual = 0.0;
  int iters = 0;
};

// principal eigenvector of D = A^H diag{T(y)} A by shifted power iteration,
// matrix-free, started from A^H y
EigResult principal_eigvec(const ProblemInstance& inst,
                           const std::function<double(double)>& T, EigConfig config = {},
                           bool parallel = true);

struct PhiMoments {
  double phi1, phi2, phi3;
};

// E over Z ~ CN(0, 1/delta), Y = |Z| + W, with u = 2 tau T(Y)/(1 - 2 tau T(Y)):
//   phi1 = E[(delta|Z|^2 - 1) u], phi2 = E[u^2], phi3 = E[(delta|Z|^2 - 1) u^2]
PhiMoments phi_moments(double delta, double tau, double sigma_w2,
                       NoiseKind noise_kind = NoiseKind::real_gaussian);

// tau* solves phi2 = 1/delta, tau solves phi1 = 1/delta on (0, tau*)
std::pair<double, double> solve_tau(double delta, double sigma_w2,
                                    NoiseKind noise_kind = NoiseKind::real_gaussian);

// Finding 1: |alpha0|^2 = (1 - delta phi2(tau))/(1 + delta phi3(tau))
std::pair<double, double> predict_finding1(double delta, double sigma_w2,
                                           NoiseKind noise_kind = NoiseKind::real_gaussian);

struct SpectralInit {
  cvec x0;
  cvec p0;
  double tau = 0.0;
  double tau_star = 0.0;
  double rho = 0.0;
  double predicted_alpha0_sq = 0.0;
  double predicted_sigma2_0 = 0.0;
  EigResult eig;
};

// p0 = (1 - 2 tau T(y)) ∘ (A x0)
cvec onsager_p0(const ProblemInstance& inst, const cvec& x0, double tau, bool parallel = true);

SpectralInit decoupled_init(const ProblemInstance& inst,
                            std::optional<double> rho = std::nullopt, EigConfig eig = {},
                            bool parallel = true);

struct AmpsResult {
  cvec x_hat; // ||x_hat||^2 = n
  cvec p_hat; // Eq. (20) fixed-point p
  double tau_hat = 0.0;
  double div_h = 0.0;
  double eq20_residual = 0.0;
  int iters = 0;
};

// AMP.S driven to its fixed point: a stabilized alternating power phase with
// tau frozen at 0 settles the ray, then the Eq. (19a)/(20) consistency
// equation is solved for tau_hat by bisection on that ray.
AmpsResult amps_run(const ProblemInstance& inst, const std::function<double(double)>& T,
                    int iters = 5000, bool parallel = true);

} // namespace ampa
