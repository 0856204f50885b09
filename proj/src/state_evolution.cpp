#include "ampa/state_evolution.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "ampa/quadrature.hpp"

namespace ampa {

namespace {

SePoint se_map_rule(const SePoint& point, double delta, double sigma_w2, const QuadRule& q) {
  const double aa = std::abs(point.alpha);
  const double s2 = point.sigma2;
  if (aa == 0.0 && s2 == 0.0) return {cplx(0.0, 0.0), 4.0 / delta + 4.0 * sigma_w2};
  const double a2 = aa * aa;
  double psi1 = 0.0, i2 = 0.0;
  const int n = int(q.x.size());
  for (int k = 0; k < n; ++k) {
    const double s = std::sin(q.x[k]);
    const double s2th = s * s;
    const double r = std::sqrt(a2 * s2th + s2);
    psi1 += q.w[k] * aa * s2th / r;
    i2 += q.w[k] * (2.0 * a2 * s2th + s2) / r;
  }
  double psi2 = (4.0 / delta) * (a2 + s2 + 1.0) - (4.0 / delta) * i2 + 4.0 * sigma_w2;
  if (psi2 < 0.0) {
    if (psi2 < -1e-12)
      throw std::runtime_error("se_map: psi2 = " + std::to_string(psi2) +
                               " is negative beyond quadrature noise");
    static bool warned = false;
    if (!warned) {
      std::fprintf(stderr, "se_map: clamped tiny negative psi2 (%.3e)\n", psi2);
      warned = true;
    }
    psi2 = 0.0;
  }
  const cplx phase = aa > 0.0 ? point.alpha / aa : cplx(0.0, 0.0);
  return {phase * psi1, psi2};
}

} // namespace

SePoint se_map(const SePoint& point, double delta, double sigma_w2, const SeConfig& config) {
  if (!(delta > 0.0)) throw std::invalid_argument("se_map: delta must be > 0");
  return se_map_rule(point, delta, sigma_w2, gl_half_pi(config.quad_nodes));
}

double amse(const SePoint& point) {
  const double d = 1.0 - std::abs(point.alpha);
  return d * d + point.sigma2;
}

SeRunResult se_run(const SePoint& init, double delta, double sigma_w2, const SeConfig& config) {
  if (std::abs(init.alpha) == 0.0 && init.sigma2 == 0.0)
    throw std::invalid_argument("se_run: init (0,0) is excluded");
  const QuadRule& q = gl_half_pi(config.quad_nodes);
  SeRunResult out;
  out.path.push_back(init);
  SePoint cur = init;
  for (int t = 0; t < config.max_iter; ++t) {
    const SePoint next = se_map_rule(cur, delta, sigma_w2, q);
    out.path.push_back(next);
    if (std::abs(1.0 - std::abs(next.alpha)) < config.conv_tol_alpha &&
        next.sigma2 < config.conv_tol_sigma2) {
      out.classification = SeClass::converged_to_target;
      return out;
    }
    if (std::abs(next.alpha - cur.alpha) < config.stall_tol &&
        std::abs(next.sigma2 - cur.sigma2) < config.stall_tol) {
      out.classification = SeClass::converged_to_other;
      return out;
    }
    cur = next;
  }
  out.classification = SeClass::budget_exhausted;
  return out;
}

std::vector<uint8_t> basin_grid(double delta, int grid_alpha, int grid_sigma,
                                const SeConfig& config) {
  if (grid_alpha < 2 || grid_sigma < 2)
    throw std::invalid_argument("basin_grid: grid must be at least 2x2");
  SeConfig cfg = config;
  // 256-node psi2 bottoms out near 1.5e-9, above conv_tol_sigma2, so target
  // cells would all misclassify as stalled; 512 puts the floor below the
  // tolerance. Basin cells near the boundary also need the longer budget.
  if (cfg.quad_nodes < 512) cfg.quad_nodes = 512;
  if (cfg.max_iter < 10000) cfg.max_iter = 10000;
  gl_half_pi(cfg.quad_nodes); // warm the cache before going parallel
  std::vector<uint8_t> cells(std::size_t(grid_alpha) * grid_sigma, 0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8)
#endif
  for (long long c = 0; c < (long long)cells.size(); ++c) {
    const int i = int(c) / grid_sigma;
    const int j = int(c) % grid_sigma;
    const double a0 = double(i) / double(grid_alpha - 1);
    const double s0 = double(j) / double(grid_sigma - 1);
    if (a0 == 0.0 && s0 == 0.0) continue;
    const SeRunResult r = se_run({cplx(a0, 0.0), s0}, delta, 0.0, cfg);
    cells[c] = r.classification == SeClass::converged_to_target ? 1 : 0;
  }
  return cells;
}

NoiseSlopeResult noise_slope(double delta, const SeConfig& config) {
  const double delta_amp = thresholds().first;
  if (!(delta > delta_amp))
    throw std::invalid_argument("noise_slope: requires delta > delta_AMP");
  const double levels[3] = {1e-4, 1e-5, 1e-6};
  double s[3];
  for (int k = 0; k < 3; ++k) {
    const SeRunResult r = se_run({cplx(0.9, 0.0), 0.1}, delta, levels[k], config);
    if (r.classification == SeClass::budget_exhausted)
      throw std::runtime_error("noise_slope: SE did not settle at sigma_w2 = " +
                               std::to_string(levels[k]));
    s[k] = amse(r.path.back()) / levels[k];
  }
  // AMSE/sigma_w2 = c0 + c1*sigma_w2 + o(sigma_w2): two-point Richardson on
  // the smallest two levels
  const double extrap = s[2] + (s[2] - s[1]) * levels[2] / (levels[1] - levels[2]);
  return {extrap, 4.0 / (1.0 - 2.0 / delta)};
}

std::pair<double, double> thresholds() {
  return {64.0 / (M_PI * M_PI) - 4.0, 2.0};
}

} // namespace ampa
