// Acceptance gate: one pass/fail line per criterion, tolerances pinned below.
// Optional args restrict the run to the listed criteria (debugging aid).
#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "ampa/harness.hpp"
#include "ampa/kernels.hpp"
#include "ampa/metrics.hpp"
#include "ampa/model.hpp"
#include "ampa/rng.hpp"
#include "ampa/solver.hpp"
#include "ampa/spectral.hpp"
#include "ampa/state_evolution.hpp"

using namespace ampa;

namespace {

constexpr double kTwelveDigits = 1e-12;
constexpr double kSlope4Lo = 7.84, kSlope4Hi = 8.16;
constexpr double kSlope25Lo = 19.6, kSlope25Hi = 20.4;
constexpr double kSeMatchTol = 0.02;   // criterion 3, t <= 20
constexpr double kBlindDevTol = 0.05;  // criterion 4, some t <= 10
constexpr double kRateLow = 0.1;       // criterion 5 at delta = 2.2
constexpr double kRateHigh = 0.9;      // criterion 5 at delta = 2.8
constexpr double kOverlapTol = 0.02;   // criterion 6
constexpr double kFdRelTol = 1e-5;     // criterion 8a
constexpr double kStepRelTol = 1e-10;  // criterion 8b
constexpr double kMcSigmas = 4.0;      // criterion 8c
constexpr double kThetaGridSlop = 1e-12; // criterion 8d
constexpr double kEq20Tol = 1e-6;      // criterion 8e
constexpr double kTauAgreeTol = 1e-2;  // criterion 8e

int failures = 0;

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void report(int k, const char* name, bool pass, const std::string& detail, double secs) {
  std::printf("[%s] criterion %d: %s (%s; %.1fs)\n", pass ? "PASS" : "FAIL", k, name,
              detail.c_str(), secs);
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

SeConfig se512(int max_iter = 1000) {
  SeConfig c;
  c.quad_nodes = 512;
  c.max_iter = max_iter;
  return c;
}

// ---- criterion 1 -----------------------------------------------------------
void criterion1() {
  const double t0 = now_s();
  const auto [amp, global] = thresholds();
  bool pass = std::abs(amp - 2.484555753109618) < kTwelveDigits &&
              std::abs(global - 2.0) < kTwelveDigits;
  std::string detail = "delta_amp dev " + fmt(std::abs(amp - 2.484555753109618));
  const SeConfig cfg = se512();
  for (double delta : {2.49, 3.0, 4.0}) {
    const SeRunResult r = se_run({cplx(0.1, 0.0), 0.99}, delta, 0.0, cfg);
    const bool ok = r.classification == SeClass::converged_to_target;
    pass = pass && ok;
    detail += ", d" + fmt(delta) + (ok ? " conv" : " MISS");
  }
  for (double delta : {1.9, 2.0}) {
    const SeRunResult r = se_run({cplx(0.1, 0.0), 0.99}, delta, 0.0, cfg);
    const bool ok = r.classification != SeClass::converged_to_target;
    pass = pass && ok;
    detail += ", d" + fmt(delta) + (ok ? " fails" : " CONV");
  }
  report(1, "thresholds and SE convergence classes", pass, detail, now_s() - t0);
}

// ---- criterion 2 -----------------------------------------------------------
void criterion2() {
  const double t0 = now_s();
  const SeConfig cfg = se512(20000);
  const NoiseSlopeResult s4 = noise_slope(4.0, cfg);
  const NoiseSlopeResult s25 = noise_slope(2.5, cfg);
  const bool pass = s4.extrapolated >= kSlope4Lo && s4.extrapolated <= kSlope4Hi &&
                    s25.extrapolated >= kSlope25Lo && s25.extrapolated <= kSlope25Hi;
  report(2, "noise sensitivity slopes", pass,
         "slope(4) " + fmt(s4.extrapolated) + " in [7.84, 8.16], slope(2.5) " +
             fmt(s25.extrapolated) + " in [19.6, 20.4]",
         now_s() - t0);
}

// ---- criteria 3, 4, 6 share the same ten instances -------------------------
struct SharedSim {
  std::vector<double> dec_alpha, dec_sigma2;   // per-t means, t = 0..22
  std::vector<double> blind_sigma2;            // per-t means, t = 0..12
  std::vector<SePoint> se;                     // SE path from the predicted start
  double pred_a2 = 0.0, pred_s2 = 0.0;
  double mc_overlap = 0.0; // mean measured |alpha0|^2
  bool complete = false;
  std::string problem;
};

SharedSim run_shared() {
  SharedSim out;
  const int seeds = 10, dec_len = 23, blind_len = 13;
  out.dec_alpha.assign(dec_len, 0.0);
  out.dec_sigma2.assign(dec_len, 0.0);
  out.blind_sigma2.assign(blind_len, 0.0);
  AmpConfig dec_cfg, blind_cfg;
  dec_cfg.max_iter = dec_len - 1;
  dec_cfg.stop_mse = 0.0; // full-length rows for the mean paths
  blind_cfg.max_iter = blind_len - 1;
  blind_cfg.stop_mse = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const uint64_t seed = derive_seed(1000, 0, uint64_t(s));
    const ProblemInstance inst = gen_instance({}, 2000, 4.0, 0.0, seed);
    const SpectralInit si = decoupled_init(inst);
    out.mc_overlap +=
        std::norm(alignment(si.x0, inst.signal).alpha_hat) / (si.rho * si.rho);

    const RunResult dec = run(inst, {si.x0, si.p0}, dec_cfg);
    const RunResult blind = run(inst, {si.x0, {}}, blind_cfg);
    if (int(dec.record.rows.size()) != dec_len ||
        int(blind.record.rows.size()) != blind_len) {
      out.problem = "seed " + std::to_string(s) + " rows " +
                    std::to_string(dec.record.rows.size()) + "/" +
                    std::to_string(blind.record.rows.size());
      return out;
    }
    for (int t = 0; t < dec_len; ++t) {
      out.dec_alpha[t] += dec.record.rows[t].abs_alpha_hat / seeds;
      out.dec_sigma2[t] += dec.record.rows[t].sigma2_hat / seeds;
    }
    for (int t = 0; t < blind_len; ++t)
      out.blind_sigma2[t] += blind.record.rows[t].sigma2_hat / seeds;
    std::fprintf(stderr, "  shared runs: seed %d/%d done\n", s + 1, seeds);
  }
  out.mc_overlap /= seeds;
  const auto [a2, s2] = predict_finding1(4.0, 0.0);
  out.pred_a2 = a2;
  out.pred_s2 = s2;
  const SeRunResult sr = se_run({cplx(std::sqrt(a2), 0.0), s2}, 4.0, 0.0, se512(30));
  out.se = sr.path;
  out.complete = int(out.se.size()) >= dec_len;
  if (!out.complete) out.problem = "se path too short";
  return out;
}

void criterion3(const SharedSim& sh) {
  const double t0 = now_s();
  if (!sh.complete) {
    report(3, "SE matches decoupled-spectral simulation", false, sh.problem, 0.0);
    return;
  }
  double worst_a = 0.0, worst_s = 0.0;
  for (int t = 0; t <= 20; ++t) {
    worst_a = std::max(worst_a, std::abs(sh.dec_alpha[t] - std::abs(sh.se[t].alpha)));
    worst_s = std::max(worst_s, std::abs(sh.dec_sigma2[t] - sh.se[t].sigma2));
  }
  const bool pass = worst_a <= kSeMatchTol && worst_s <= kSeMatchTol;
  report(3, "SE matches decoupled-spectral simulation", pass,
         "max |alpha| dev " + fmt(worst_a) + ", max sigma2 dev " + fmt(worst_s) +
             ", tol 0.02, t <= 20",
         now_s() - t0);
}

void criterion4(const SharedSim& sh) {
  const double t0 = now_s();
  if (!sh.complete) {
    report(4, "blind init departs from SE", false, sh.problem, 0.0);
    return;
  }
  double worst = 0.0;
  int argt = 0;
  for (int t = 0; t <= 10; ++t) {
    const double dev = std::abs(sh.blind_sigma2[t] - sh.se[t].sigma2);
    if (dev > worst) {
      worst = dev;
      argt = t;
    }
  }
  report(4, "blind init departs from SE", worst > kBlindDevTol,
         "max sigma2 dev " + fmt(worst) + " at t = " + std::to_string(argt) + ", needs > 0.05",
         now_s() - t0);
}

void criterion6(const SharedSim& sh) {
  const double t0 = now_s();
  if (!sh.complete) {
    report(6, "Finding 1 predicts the spectral overlap", false, sh.problem, 0.0);
    return;
  }
  const double dev = std::abs(sh.mc_overlap - sh.pred_a2);
  const bool pass = dev <= kOverlapTol && sh.pred_a2 + sh.pred_s2 == 1.0;
  report(6, "Finding 1 predicts the spectral overlap", pass,
         "predicted " + fmt(sh.pred_a2) + ", measured " + fmt(sh.mc_overlap) + ", dev " +
             fmt(dev) + ", a2+s2-1 = " + fmt(sh.pred_a2 + sh.pred_s2 - 1.0),
         now_s() - t0);
}

// ---- criterion 5 -----------------------------------------------------------
void criterion5() {
  const double t0 = now_s();
  std::vector<std::pair<double, double>> rates;
  for (double delta : {2.2, 2.4, 2.6, 2.8}) {
    PtConfig pc;
    pc.n = 1000;
    pc.deltas = {delta};
    pc.trials = 100;
    pc.master_seed = derive_seed(2000, uint64_t(delta * 100));
    pc.success_threshold = 1e-10;
    pc.amp.max_iter = 1000;
    const auto pts = phase_transition(pc);
    rates.emplace_back(delta, pts[0].rate);
    std::fprintf(stderr, "  phase transition: delta %.1f rate %.2f (%zu misses as errors) %.0fs\n",
                 delta, pts[0].rate, std::size_t(pts[0].failures), now_s() - t0);
  }
  const double r22 = rates[0].second, r24 = rates[1].second;
  const double r26 = rates[2].second, r28 = rates[3].second;
  const bool pass = r22 <= kRateLow && r28 >= kRateHigh && r24 < 0.5 && r26 >= 0.5;
  report(5, "phase transition location", pass,
         "rates 2.2:" + fmt(r22) + " 2.4:" + fmt(r24) + " 2.6:" + fmt(r26) + " 2.8:" +
             fmt(r28) + "; need <=0.1, <0.5, >=0.5, >=0.9",
         now_s() - t0);
}

// ---- criterion 7 -----------------------------------------------------------
void criterion7() {
  const double t0 = now_s();
  const int g = 100;
  SeConfig cfg; // basin_grid raises nodes and budget internally
  const auto b235 = basin_grid(2.35, g, g, cfg);
  std::fprintf(stderr, "  basin 2.35 done %.0fs\n", now_s() - t0);
  const auto b240 = basin_grid(2.40, g, g, cfg);
  std::fprintf(stderr, "  basin 2.40 done %.0fs\n", now_s() - t0);
  const auto b245 = basin_grid(2.45, g, g, cfg);
  std::fprintf(stderr, "  basin 2.45 done %.0fs\n", now_s() - t0);
  int viol = 0, zero_viol = 0, n235 = 0, n240 = 0, n245 = 0;
  for (int c = 0; c < g * g; ++c) {
    if (b235[c] > b240[c] || b240[c] > b245[c]) ++viol;
    n235 += b235[c];
    n240 += b240[c];
    n245 += b245[c];
  }
  for (int j = 0; j < g; ++j)
    zero_viol += b235[j] + b240[j] + b245[j]; // alpha0 = 0 row of each grid
  const bool pass = viol == 0 && zero_viol == 0 && n235 > 0;
  report(7, "basin nesting on the 100x100 grid", pass,
         "cells 2.35:" + std::to_string(n235) + " 2.40:" + std::to_string(n240) + " 2.45:" +
             std::to_string(n245) + ", nesting violations " + std::to_string(viol) +
             ", alpha0=0 hits " + std::to_string(zero_viol),
         now_s() - t0);
}

// ---- criterion 8 -----------------------------------------------------------
bool prop_fd_divergence(std::string& detail) {
  GaussianGen gen(31);
  const double h = 1e-6;
  const double epss[3] = {1e-4, 1e-3, 1e-2};
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 40;
    cvec p(m);
    rvec y(m);
    for (auto& v : p) v = cplx(gen.next(), gen.next());
    for (auto& v : y) v = std::abs(gen.next()) + 0.1;
    const double eps = epss[trial % 3];
    const double exact = divergence_smooth(p, y, eps);
    double fd = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      const cplx pr1 = p[a] + h, pr2 = p[a] - h;
      const cplx pi1 = p[a] + cplx(0, h), pi2 = p[a] - cplx(0, h);
      const double dr =
          (g_smooth(pr1, y[a], eps).real() - g_smooth(pr2, y[a], eps).real()) / (2 * h);
      const double di =
          (g_smooth(pi1, y[a], eps).imag() - g_smooth(pi2, y[a], eps).imag()) / (2 * h);
      fd += 0.5 * (dr + di);
    }
    fd /= double(m);
    worst = std::max(worst, std::abs(fd - exact) / std::abs(exact));
  }
  detail += "8a fd rel " + fmt(worst);
  return worst <= kFdRelTol;
}

bool prop_step_identity(std::string& detail) {
  const ProblemInstance inst = gen_instance({}, 400, 4.0, 0.0, 33);
  cvec x0 = inst.signal;
  GaussianGen gen(34);
  for (auto& v : x0) v += 0.4 * cplx(gen.next(), gen.next());
  AmpConfig cfg;
  AmpState s;
  s.x = x0;
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const AmpState a = step_simplified(s, inst, cfg);
    AmpState sr = s;
    sr.lambda = -2.0 * s.div;
    const double mu = continuation_mu(a.div, sr.tau);
    const AmpState b = step_regularized(sr, inst, mu, cfg);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < inst.n; ++i) {
      num += std::norm(a.x[i] - b.x[i]);
      den += std::norm(a.x[i]);
    }
    worst = std::max(worst, std::sqrt(num / den));
    s = a;
  }
  detail += ", 8b step rel " + fmt(worst);
  return worst <= kStepRelTol;
}

bool prop_phi_mc(std::string& detail) {
  SplitMix64 rng(35);
  const int N = 1000000;
  double worst_sigmas = 0.0;
  for (double delta : {2.5, 4.0, 6.0}) {
    for (double tau : {0.15, 0.30, 0.45}) {
      const PhiMoments q = phi_moments(delta, tau, 0.0);
      double s1 = 0, s2 = 0, s3 = 0, q1 = 0, q2 = 0, q3 = 0;
      const double rd = std::sqrt(delta);
      for (int i = 0; i < N; ++i) {
        const double t = -std::log(rng.uniform_pos());
        const double T = (t - 1.0) / (t + rd - 1.0);
        const double u = 2.0 * tau * T / (1.0 - 2.0 * tau * T);
        const double v1 = (t - 1.0) * u, v2 = u * u, v3 = (t - 1.0) * u * u;
        s1 += v1;
        s2 += v2;
        s3 += v3;
        q1 += v1 * v1;
        q2 += v2 * v2;
        q3 += v3 * v3;
      }
      const double m1 = s1 / N, m2 = s2 / N, m3 = s3 / N;
      const double se1 = std::sqrt((q1 / N - m1 * m1) / N);
      const double se2 = std::sqrt((q2 / N - m2 * m2) / N);
      const double se3 = std::sqrt((q3 / N - m3 * m3) / N);
      worst_sigmas = std::max(worst_sigmas, std::abs(q.phi1 - m1) / se1);
      worst_sigmas = std::max(worst_sigmas, std::abs(q.phi2 - m2) / se2);
      worst_sigmas = std::max(worst_sigmas, std::abs(q.phi3 - m3) / se3);
    }
  }
  detail += ", 8c mc worst " + fmt(worst_sigmas) + " se";
  return worst_sigmas <= kMcSigmas;
}

bool prop_theta_grid(std::string& detail) {
  GaussianGen gen(36);
  double worst = -1e30;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 25;
    cvec x(n), xs(n);
    for (auto& v : x) v = cplx(gen.next(), gen.next());
    for (auto& v : xs) v = cplx(gen.next(), gen.next());
    double ns = 0.0;
    for (const auto& v : xs) ns += std::norm(v);
    const PhaseAlignedMse pm = phase_aligned_mse(x, xs);
    double grid_best = 1e30;
    for (int k = 0; k < 360; ++k) {
      const cplx r = std::polar(1.0, 2.0 * M_PI * k / 360.0);
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += std::norm(x[i] - r * xs[i]);
      grid_best = std::min(grid_best, s / ns);
    }
    worst = std::max(worst, pm.mse - grid_best);
  }
  detail += ", 8d mse-grid gap " + fmt(worst);
  return worst <= kThetaGridSlop;
}

bool prop_amps(std::string& detail) {
  const auto [tau_ref, tau_star] = solve_tau(4.0, 0.0);
  (void)tau_star;
  double tau_sum = 0.0, worst_res = 0.0;
  for (int s = 0; s < 5; ++s) {
    const uint64_t seed = derive_seed(3000, 0, uint64_t(s));
    const ProblemInstance inst = gen_instance({}, 2000, 4.0, 0.0, seed);
    const double delta = inst.delta;
    const AmpsResult r = amps_run(inst, [delta](double y) { return t_opt(y, delta); });
    tau_sum += r.tau_hat;
    worst_res = std::max(worst_res, r.eq20_residual);
    std::fprintf(stderr, "  amps seed %d: tau_hat %.6f res %.2e\n", s, r.tau_hat,
                 r.eq20_residual);
  }
  const double tau_mean = tau_sum / 5.0;
  detail += ", 8e res " + fmt(worst_res) + " tau dev " + fmt(std::abs(tau_mean - tau_ref));
  return worst_res < kEq20Tol && std::abs(tau_mean - tau_ref) <= kTauAgreeTol;
}

void criterion8() {
  const double t0 = now_s();
  std::string detail;
  bool pass = true;
  pass &= prop_fd_divergence(detail);
  pass &= prop_step_identity(detail);
  pass &= prop_phi_mc(detail);
  pass &= prop_theta_grid(detail);
  pass &= prop_amps(detail);
  report(8, "property suites", pass, detail, now_s() - t0);
}

} // namespace

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const auto want = [&only](int k) {
    return only.empty() || std::find(only.begin(), only.end(), k) != only.end();
  };
  const double t0 = now_s();
  if (want(1)) criterion1();
  if (want(2)) criterion2();
  if (want(3) || want(4) || want(6)) {
    const SharedSim sh = run_shared();
    if (want(3)) criterion3(sh);
    if (want(4)) criterion4(sh);
    if (want(5)) criterion5();
    if (want(6)) criterion6(sh);
  } else if (want(5)) {
    criterion5();
  }
  if (want(7)) criterion7();
  if (want(8)) criterion8();
  std::printf("%s: %d criteria failed, total %.0fs\n", failures ? "FAIL" : "OK", failures,
              now_s() - t0);
  return failures ? 1 : 0;
}
