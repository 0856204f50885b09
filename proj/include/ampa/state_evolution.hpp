#pragma once

#include <utility>
#include <vector>

#include "ampa/types.hpp"

namespace ampa {

struct SePoint {
  cplx alpha;
  double sigma2;
};

struct SeConfig {
  int quad_nodes = 256;
  int max_iter = 1000;
  double conv_tol_alpha = 1e-6;
  double conv_tol_sigma2 = 1e-9;
  // change below which a non-(1,0) point counts as a fixed point
  double stall_tol = 1e-12;
};

// one application of (psi1, psi2); sigma2 clamped at 0 for tiny negatives
SePoint se_map(const SePoint& point, double delta, double sigma_w2, const SeConfig& config);

// (1 - |alpha|)^2 + sigma^2
double amse(const SePoint& point);

enum class SeClass { converged_to_target, converged_to_other, budget_exhausted };

struct SeRunResult {
  std::vector<SePoint> path; // includes the initial point
  SeClass classification = SeClass::budget_exhausted;
};

SeRunResult se_run(const SePoint& init, double delta, double sigma_w2, const SeConfig& config);

// cell true iff se_run from that (alpha0, sigma2_0) reaches (1, 0);
// row-major [i_alpha * grid_sigma + i_sigma], grids equispaced on [0,1]
std::vector<uint8_t> basin_grid(double delta, int grid_alpha, int grid_sigma,
                                const SeConfig& config);

struct NoiseSlopeResult {
  double extrapolated; // Richardson limit of AMSE/sigma_w2
  double closed_form;  // 4/(1 - 2/delta)
};

NoiseSlopeResult noise_slope(double delta, const SeConfig& config);

// (delta_amp, delta_global) = (64/pi^2 - 4, 2)
std::pair<double, double> thresholds();

} // namespace ampa
