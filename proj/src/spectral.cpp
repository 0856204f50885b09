#include "ampa/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ampa/kernels.hpp"
#include "ampa/quadrature.hpp"
#include "ampa/rng.hpp"
#include "ampa/solver.hpp"

namespace ampa {

double t_opt(double y, double delta) {
  const double dy2 = delta * y * y;
  return (dy2 - 1.0) / (dy2 + std::sqrt(delta) - 1.0);
}

namespace {

constexpr double kTauMax = 0.5; // sup_y t_opt = 1, so 1 - 2*tau*T > 0 needs tau < 1/2

double norm2c(const cvec& v) {
  double s = 0.0;
  for (const cplx& c : v) s += std::norm(c);
  return s;
}

void phase_fix(cvec& v) {
  std::size_t k = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best) {
      best = a;
      k = i;
    }
  }
  if (best > 0.0) {
    const cplx rot = std::abs(v[k]) / v[k];
    for (cplx& c : v) c *= rot;
  }
}

// Exp(1) tail beyond 60 is ~9e-27; 512 nodes reproduce the adaptive oracle
// to full double resolution on these integrands
const QuadRule& phi_rule() {
  static const QuadRule q = gauss_legendre(512, 0.0, 60.0);
  return q;
}

const QuadRule& noise_rule() {
  static const QuadRule q = gauss_hermite(61);
  return q;
}

} // namespace

EigResult principal_eigvec(const ProblemInstance& inst, const std::function<double(double)>& T,
                           EigConfig config, bool parallel) {
  const std::size_t n = inst.n, m = inst.m;
  rvec Tv(m);
  double tmin = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    Tv[a] = T(inst.observations[a]);
    tmin = std::min(tmin, Tv[a]);
  }
  const double edge = 1.0 + 1.0 / std::sqrt(inst.delta);
  const double shift = std::max(0.0, -tmin) * edge * edge * 1.1;

  // informed deterministic start
  cvec yv(m);
  for (std::size_t a = 0; a < m; ++a) yv[a] = cplx(inst.observations[a], 0.0);
  cvec v(n);
  matvec_adjoint(inst.matrix, yv.data(), v.data(), parallel);
  double nv = std::sqrt(norm2c(v));
  if (nv == 0.0) throw std::runtime_error("principal_eigvec: zero starting vector");
  for (cplx& c : v) c /= nv;

  cvec w(n);
  double lambda = 0.0, residual = 0.0;
  int it = 0;
  bool converged = false;
  for (; it < config.budget; ++it) {
    d_apply(inst.matrix, Tv.data(), v.data(), w.data(), parallel);
    double lr = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      lr += v[i].real() * w[i].real() + v[i].imag() * w[i].imag();
    lambda = lr;
    double rs = 0.0;
    for (std::size_t i = 0; i < n; ++i) rs += std::norm(w[i] - lambda * v[i]);
    residual = std::sqrt(rs) / std::max(std::abs(lambda), 1e-300);
    if (residual < config.tol) {
      converged = true;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) w[i] += shift * v[i];
    const double nw = std::sqrt(norm2c(w));
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
  }
  if (!converged)
    throw std::runtime_error("principal_eigvec: no convergence after " +
                             std::to_string(config.budget) +
                             " iterations, residual = " + std::to_string(residual));
  const double rootn = std::sqrt(double(n));
  for (cplx& c : v) c *= rootn;
  phase_fix(v);
  return {std::move(v), lambda, residual, it};
}

PhiMoments phi_moments(double delta, double tau, double sigma_w2, NoiseKind noise_kind) {
  if (!(delta > 1.0)) throw std::invalid_argument("phi_moments: delta must be > 1");
  if (!(tau >= 0.0 && tau < kTauMax))
    throw std::invalid_argument("phi_moments: tau must lie in [0, tau_max) with tau_max = 0.5");
  const QuadRule& q = phi_rule();
  const double sd = std::sqrt(delta);
  double p1 = 0.0, p2 = 0.0, p3 = 0.0;
  if (sigma_w2 == 0.0) {
    // t = delta|Z|^2 ~ Exp(1); T(y) = (t-1)/(t + sqrt(delta) - 1)
    for (std::size_t k = 0; k < q.x.size(); ++k) {
      const double t = q.x[k];
      const double wt = q.w[k] * std::exp(-t);
      const double T = (t - 1.0) / (t + sd - 1.0);
      const double u = 2.0 * tau * T / (1.0 - 2.0 * tau * T);
      p1 += wt * (t - 1.0) * u;
      p2 += wt * u * u;
      p3 += wt * (t - 1.0) * u * u;
    }
  } else if (noise_kind == NoiseKind::real_gaussian) {
    const QuadRule& h = noise_rule();
    const double sw = std::sqrt(2.0 * sigma_w2); // w = sw * h, h ~ GH node
    const double inv_rtpi = 1.0 / std::sqrt(M_PI);
    for (std::size_t k = 0; k < q.x.size(); ++k) {
      const double t = q.x[k];
      const double wt = q.w[k] * std::exp(-t);
      const double r = std::sqrt(t / delta);
      for (std::size_t j = 0; j < h.x.size(); ++j) {
        const double y = r + sw * h.x[j];
        const double T = t_opt(y, delta);
        const double u = 2.0 * tau * T / (1.0 - 2.0 * tau * T);
        const double ww = wt * h.w[j] * inv_rtpi;
        p1 += ww * (t - 1.0) * u;
        p2 += ww * u * u;
        p3 += ww * (t - 1.0) * u * u;
      }
    }
  } else {
    // y = | |z| + w | with circular complex w: y^2 = (r + a)^2 + b^2,
    // a, b ~ N(0, sigma_w2/2)
    const QuadRule& h = noise_rule();
    const double sw = std::sqrt(sigma_w2); // a = sw*h1, b = sw*h2 after GH scaling
    const double inv_pi = 1.0 / M_PI;
    for (std::size_t k = 0; k < q.x.size(); ++k) {
      const double t = q.x[k];
      const double wt = q.w[k] * std::exp(-t);
      const double r = std::sqrt(t / delta);
      for (std::size_t j1 = 0; j1 < h.x.size(); ++j1) {
        const double a = r + sw * h.x[j1];
        for (std::size_t j2 = 0; j2 < h.x.size(); ++j2) {
          const double b = sw * h.x[j2];
          const double y2 = a * a + b * b;
          const double T = (delta * y2 - 1.0) / (delta * y2 + sd - 1.0);
          const double u = 2.0 * tau * T / (1.0 - 2.0 * tau * T);
          const double ww = wt * h.w[j1] * h.w[j2] * inv_pi;
          p1 += ww * (t - 1.0) * u;
          p2 += ww * u * u;
          p3 += ww * (t - 1.0) * u * u;
        }
      }
    }
  }
  return {p1, std::max(p2, 0.0), p3};
}

std::pair<double, double> solve_tau(double delta, double sigma_w2, NoiseKind noise_kind) {
  if (!(delta > 2.0)) throw std::invalid_argument("solve_tau: requires delta > 2");
  const double target = 1.0 / delta;
  auto f2 = [&](double t) { return phi_moments(delta, t, sigma_w2, noise_kind).phi2 - target; };
  auto f1 = [&](double t) { return phi_moments(delta, t, sigma_w2, noise_kind).phi1 - target; };

  double lo = 1e-12, hi = kTauMax * (1.0 - 1e-10);
  if (f2(lo) >= 0.0)
    throw std::runtime_error("solve_tau: phi2 bracket has no sign change at the low end; "
                             "uniqueness assumption of the T(y) choice violated");
  const double fhi = f2(hi);
  double tau_star;
  if (fhi < 0.0) {
    // noiseless: phi2(1/2) = 1/delta exactly (Var of Exp(1)), the root sits on
    // the boundary; the bracket top is the interior representative
    if (fhi < -1e-9)
      throw std::runtime_error("solve_tau: no sign change for tau* on (0, 1/2); "
                               "uniqueness assumption of the T(y) choice violated");
    tau_star = hi;
  } else {
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (f2(mid) < 0.0)
        lo = mid;
      else
        hi = mid;
    }
    tau_star = 0.5 * (lo + hi);
  }

  lo = 1e-12;
  hi = tau_star;
  if (!(f1(lo) < 0.0 && f1(hi) > 0.0))
    throw std::runtime_error("solve_tau: no sign change for tau on (0, tau*); "
                             "uniqueness assumption of the T(y) choice violated");
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f1(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return {0.5 * (lo + hi), tau_star};
}

std::pair<double, double> predict_finding1(double delta, double sigma_w2, NoiseKind noise_kind) {
  const auto [tau, tau_star] = solve_tau(delta, sigma_w2, noise_kind);
  (void)tau_star;
  const PhiMoments ph = phi_moments(delta, tau, sigma_w2, noise_kind);
  const double a2 = (1.0 - delta * ph.phi2) / (1.0 + delta * ph.phi3);
  if (!(a2 >= 0.0 && a2 <= 1.0))
    throw std::runtime_error("predict_finding1: |alpha0|^2 = " + std::to_string(a2) +
                             " outside [0,1]; quadrature/solver inconsistency");
  return {a2, 1.0 - a2};
}

cvec onsager_p0(const ProblemInstance& inst, const cvec& x0, double tau, bool parallel) {
  cvec p0(inst.m);
  matvec(inst.matrix, x0.data(), p0.data(), parallel);
  for (std::size_t a = 0; a < inst.m; ++a)
    p0[a] *= 1.0 - 2.0 * tau * t_opt(inst.observations[a], inst.delta);
  return p0;
}

SpectralInit decoupled_init(const ProblemInstance& inst, std::optional<double> rho,
                            EigConfig eig_cfg, bool parallel) {
  const double delta = inst.delta;
  const auto [tau, tau_star] = solve_tau(delta, inst.sigma_w2, inst.noise_kind);
  SpectralInit out;
  out.eig = principal_eigvec(
      inst, [delta](double y) { return t_opt(y, delta); }, eig_cfg, parallel);
  out.tau = tau;
  out.tau_star = tau_star;
  double r;
  if (rho) {
    r = *rho;
  } else {
    double ny2 = 0.0;
    for (double y : inst.observations) ny2 += y * y;
    r = std::sqrt(ny2 / double(inst.n));
  }
  out.rho = r;
  out.x0.resize(inst.n);
  for (std::size_t i = 0; i < inst.n; ++i) out.x0[i] = r * out.eig.v[i];
  out.p0 = onsager_p0(inst, out.x0, tau, parallel);
  const PhiMoments ph = phi_moments(delta, tau, inst.sigma_w2, inst.noise_kind);
  const double a2 = (1.0 - delta * ph.phi2) / (1.0 + delta * ph.phi3);
  if (!(a2 >= 0.0 && a2 <= 1.0))
    throw std::runtime_error("decoupled_init: predicted |alpha0|^2 outside [0,1]");
  out.predicted_alpha0_sq = a2;
  out.predicted_sigma2_0 = 1.0 - a2;
  return out;
}

AmpsResult amps_run(const ProblemInstance& inst, const std::function<double(double)>& T,
                    int iters, bool parallel) {
  const std::size_t n = inst.n, m = inst.m;
  const double delta = inst.delta;
  const double rootn = std::sqrt(double(n));
  rvec Tv(m);
  double tmin = 0.0, tsum = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    Tv[a] = T(inst.observations[a]);
    tmin = std::min(tmin, Tv[a]);
    tsum += Tv[a];
  }
  const double div0 = 2.0 * tsum / double(m); // div_p(h) at tau = 0
  if (div0 >= 0.0)
    throw StabilityError("amps_run: div_p(h) = " + std::to_string(div0) + " is not negative");
  const double edge = 1.0 + 1.0 / std::sqrt(delta);
  const double shift = std::max(0.0, -tmin) * edge * edge * 1.1;

  cvec x(n);
  {
    GaussianGen g(derive_seed(inst.seed, 3));
    for (std::size_t i = 0; i < n; ++i) x[i] = cplx(g.next(), g.next());
    const double sc = rootn / std::sqrt(norm2c(x));
    for (cplx& c : x) c *= sc;
  }

  // power phase with tau frozen at 0: r = x - (2Dx + 2s x)/div0 keeps the
  // Eq. (19c) shape while the shift suppresses the bottom-eigenvalue
  // oscillation of the raw recursion; Eq. (19d)'s sign alternation is kept
  cvec dx(n), r(n);
  int it = 0;
  bool settled = false;
  double residual = 0.0;
  for (; it < iters; ++it) {
    d_apply(inst.matrix, Tv.data(), x.data(), dx.data(), parallel);
    double lr = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      lr += x[i].real() * dx[i].real() + x[i].imag() * dx[i].imag();
    const double lambda = lr / double(n);
    double rs = 0.0;
    for (std::size_t i = 0; i < n; ++i) rs += std::norm(dx[i] - lambda * x[i]);
    residual = std::sqrt(rs) / std::max(std::abs(lambda) * rootn, 1e-300);
    if (residual < 1e-8) {
      settled = true;
      break;
    }
    for (std::size_t i = 0; i < n; ++i)
      r[i] = x[i] - (2.0 * dx[i] + 2.0 * shift * x[i]) / div0;
    const double rn = std::sqrt(norm2c(r));
    for (std::size_t i = 0; i < n; ++i) x[i] = -rootn * r[i] / rn;
  }
  if (!settled)
    throw std::runtime_error("amps_run: power phase did not settle after " +
                             std::to_string(iters) +
                             " iterations, residual = " + std::to_string(residual));
  phase_fix(x);

  // on the settled ray h(p_fix, tau) = 2T ∘ Ax for every tau, so the
  // Eq. (19a)/(20) consistency condition is scalar in tau_hat
  d_apply(inst.matrix, Tv.data(), x.data(), dx.data(), parallel);
  auto div_h = [&](double tau) {
    double s = 0.0;
    for (std::size_t a = 0; a < m; ++a) s += 2.0 * Tv[a] / (1.0 - 2.0 * tau * Tv[a]);
    return s / double(m);
  };
  auto G = [&](double tau) {
    const double dv = div_h(tau);
    double rs = 0.0;
    for (std::size_t i = 0; i < n; ++i) rs += std::norm(x[i] - 2.0 * dx[i] / dv);
    return (1.0 / delta) * (-1.0 / dv) * (rootn / std::sqrt(rs));
  };
  double lo = 0.0, hi = kTauMax - 1e-12;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid - G(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double tau_hat = 0.5 * (lo + hi);
  if (std::abs(tau_hat - G(tau_hat)) > 1e-6)
    throw std::runtime_error("amps_run: consistency equation has no root in (0, 1/2)");
  const double dv = div_h(tau_hat);
  if (dv >= 0.0)
    throw StabilityError("amps_run: div_p(h) at tau_hat is not negative");

  AmpsResult out;
  out.x_hat = x;
  out.tau_hat = tau_hat;
  out.div_h = dv;
  out.iters = it;
  out.p_hat.resize(m);
  matvec(inst.matrix, x.data(), out.p_hat.data(), parallel);
  cvec ax = out.p_hat;
  for (std::size_t a = 0; a < m; ++a)
    out.p_hat[a] *= 1.0 - 2.0 * tau_hat * Tv[a];
  double num = 0.0, den = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    const cplx h = 2.0 * Tv[a] / (1.0 - 2.0 * tau_hat * Tv[a]) * out.p_hat[a];
    num += std::norm(out.p_hat[a] - (ax[a] - tau_hat * h));
    den += std::norm(out.p_hat[a]);
  }
  out.eq20_residual = std::sqrt(num / den);
  return out;
}

} // namespace ampa
