#include "ampa/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ampa/kernels.hpp"
#include "ampa/rng.hpp"

namespace ampa {

InitKind init_kind_from_string(const std::string& s) {
  if (s == "decoupled_spectral") return InitKind::decoupled_spectral;
  if (s == "blind_spectral") return InitKind::blind_spectral;
  if (s == "ones") return InitKind::ones;
  if (s == "truth") return InitKind::truth;
  if (s == "random") return InitKind::random_unit;
  throw std::invalid_argument("unknown init kind: " + s);
}

std::string to_string(InitKind k) {
  switch (k) {
    case InitKind::decoupled_spectral: return "decoupled_spectral";
    case InitKind::blind_spectral: return "blind_spectral";
    case InitKind::ones: return "ones";
    case InitKind::truth: return "truth";
    case InitKind::random_unit: return "random";
  }
  return "?";
}

MadeInit make_init(const ProblemInstance& inst, InitKind kind, bool parallel) {
  MadeInit out;
  switch (kind) {
    case InitKind::decoupled_spectral: {
      SpectralInit si = decoupled_init(inst, {}, {}, parallel);
      out.init.x0 = si.x0;
      out.init.p0 = si.p0;
      out.spectral = std::move(si);
      break;
    }
    case InitKind::blind_spectral: {
      SpectralInit si = decoupled_init(inst, {}, {}, parallel);
      out.init.x0 = si.x0; // p0 dropped: first sweep uses p^0 = A x^0
      out.spectral = std::move(si);
      break;
    }
    case InitKind::ones:
      out.init.x0.assign(inst.n, cplx(1.0, 0.0));
      break;
    case InitKind::truth:
      out.init.x0 = inst.signal;
      break;
    case InitKind::random_unit: {
      GaussianGen gen(derive_seed(inst.seed, 4));
      cvec x(inst.n);
      double nrm2 = 0.0;
      for (auto& xi : x) {
        xi = cplx(gen.next(), gen.next());
        nrm2 += std::norm(xi);
      }
      const double s = std::sqrt(double(inst.n) / nrm2);
      for (auto& xi : x) xi *= s;
      out.init.x0 = std::move(x);
      break;
    }
  }
  return out;
}

namespace {

std::pair<double, double> measured_init_mean(const std::vector<TrialRecord>& recs) {
  double sa = 0.0, ss = 0.0;
  int c = 0;
  for (const auto& r : recs) {
    if (r.rows.empty()) continue;
    sa += r.rows[0].abs_alpha_hat;
    ss += r.rows[0].sigma2_hat;
    ++c;
  }
  if (c == 0) return {0.0, 0.0};
  return {sa / c, ss / c};
}

bool spectral_kind(InitKind k) {
  return k == InitKind::decoupled_spectral || k == InitKind::blind_spectral;
}

} // namespace

SimResult sim_experiment(const SimConfig& config) {
  if (config.trials < 1) throw std::invalid_argument("sim: trials must be >= 1");
  SimResult out;
  double actual_delta = config.delta;
  for (int trial = 0; trial < config.trials; ++trial) {
    const uint64_t seed = derive_seed(config.master_seed, 0, uint64_t(trial));
    ProblemInstance inst = gen_instance(config.model, config.n, config.delta,
                                        config.sigma_w2, seed, config.noise_kind);
    actual_delta = inst.delta;
    MadeInit mi = make_init(inst, config.init, config.amp.parallel);
    RunResult rr = run(inst, mi.init, config.amp);
    rr.record.seed = seed;
    out.records.push_back(std::move(rr.record));
  }

  std::size_t maxlen = 0;
  for (const auto& r : out.records) maxlen = std::max(maxlen, r.rows.size());
  out.mean_abs_alpha.assign(maxlen, 0.0);
  out.mean_sigma2.assign(maxlen, 0.0);
  out.counts.assign(maxlen, 0);
  for (const auto& r : out.records) {
    for (std::size_t t = 0; t < r.rows.size(); ++t) {
      out.mean_abs_alpha[t] += r.rows[t].abs_alpha_hat;
      out.mean_sigma2[t] += r.rows[t].sigma2_hat;
      out.counts[t] += 1;
    }
  }
  for (std::size_t t = 0; t < maxlen; ++t) {
    out.mean_abs_alpha[t] /= out.counts[t];
    out.mean_sigma2[t] /= out.counts[t];
  }

  if (spectral_kind(config.init)) {
    const auto [a2, s2] = predict_finding1(actual_delta, config.sigma_w2, config.noise_kind);
    out.se_init_abs_alpha = std::sqrt(a2);
    out.se_init_sigma2 = s2;
  } else {
    std::tie(out.se_init_abs_alpha, out.se_init_sigma2) = measured_init_mean(out.records);
  }
  if (out.se_init_abs_alpha != 0.0 || out.se_init_sigma2 != 0.0) {
    SeConfig se;
    se.quad_nodes = config.se_quad_nodes;
    se.max_iter = config.amp.max_iter;
    SeRunResult sr = se_run({cplx(out.se_init_abs_alpha, 0.0), out.se_init_sigma2},
                            actual_delta, config.sigma_w2, se);
    out.se_path = std::move(sr.path);
  }
  return out;
}

std::vector<PtPoint> phase_transition(const PtConfig& config) {
  if (config.deltas.empty()) throw std::invalid_argument("phase_transition: empty delta grid");
  if (config.trials < 1) throw std::invalid_argument("phase_transition: trials must be >= 1");
  std::vector<PtPoint> out;
  for (std::size_t d = 0; d < config.deltas.size(); ++d) {
    PtPoint pt;
    pt.delta = config.deltas[d];
    pt.trials = config.trials;
    for (int trial = 0; trial < config.trials; ++trial) {
      const uint64_t seed = derive_seed(config.master_seed, d, uint64_t(trial));
      ProblemInstance inst = gen_instance(config.model, config.n, config.deltas[d],
                                          config.sigma_w2, seed, config.noise_kind);
      try {
        MadeInit mi = make_init(inst, config.init, config.amp.parallel);
        RunResult rr = run(inst, mi.init, config.amp);
        if (success(rr.record, config.success_threshold)) ++pt.successes;
      } catch (const std::exception&) {
        ++pt.failures; // counted as a miss, the sweep continues
      }
      if (config.with_baseline) {
        MadeInit bi = make_init(inst, InitKind::random_unit, config.amp.parallel);
        BaselineConfig bc;
        bc.max_iter = config.amp.max_iter;
        bc.parallel = config.amp.parallel;
        const TrialRecord br = baseline_gd(inst, bi.init.x0, bc);
        if (success(br, config.success_threshold)) ++pt.baseline_successes;
      }
    }
    pt.rate = double(pt.successes) / config.trials;
    pt.baseline_rate = double(pt.baseline_successes) / config.trials;
    out.push_back(pt);
  }
  return out;
}

std::vector<NoisePoint> noise_curve(const NoiseCurveConfig& config) {
  if (config.snr_db.empty()) throw std::invalid_argument("noise_curve: empty snr grid");
  if (config.trials < 1) throw std::invalid_argument("noise_curve: trials must be >= 1");
  std::vector<NoisePoint> out;
  for (std::size_t k = 0; k < config.snr_db.size(); ++k) {
    NoisePoint np;
    np.snr_db = config.snr_db[k];
    const double snr_lin = std::pow(10.0, np.snr_db / 10.0);
    np.sigma_w2 = 1.0 / (config.delta * snr_lin);
    np.trials = config.trials;
    std::vector<TrialRecord> recs;
    double actual_delta = config.delta;
    for (int trial = 0; trial < config.trials; ++trial) {
      const uint64_t seed = derive_seed(config.master_seed, k, uint64_t(trial));
      ProblemInstance inst = gen_instance(config.model, config.n, config.delta,
                                          np.sigma_w2, seed, config.noise_kind);
      actual_delta = inst.delta;
      MadeInit mi = make_init(inst, config.init, config.amp.parallel);
      RunResult rr = run(inst, mi.init, config.amp);
      recs.push_back(std::move(rr.record));
    }
    double mean = 0.0;
    for (const auto& r : recs) mean += r.rows.back().mse;
    mean /= recs.size();
    double var = 0.0;
    for (const auto& r : recs) {
      const double d = r.rows.back().mse - mean;
      var += d * d;
    }
    np.mean_mse = mean;
    np.std_mse = recs.size() > 1 ? std::sqrt(var / (recs.size() - 1)) : 0.0;

    double a0 = 0.0, s0 = 0.0;
    if (spectral_kind(config.init)) {
      const auto [a2, s2] = predict_finding1(actual_delta, np.sigma_w2, config.noise_kind);
      a0 = std::sqrt(a2);
      s0 = s2;
    } else {
      std::tie(a0, s0) = measured_init_mean(recs);
    }
    if (a0 != 0.0 || s0 != 0.0) {
      SeConfig se;
      se.quad_nodes = config.se_quad_nodes;
      se.max_iter = config.amp.max_iter;
      const SeRunResult sr = se_run({cplx(a0, 0.0), s0}, actual_delta, np.sigma_w2, se);
      np.se_amse = amse(sr.path.back());
    } else {
      np.se_amse = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(np);
  }
  return out;
}

TrialRecord baseline_gd(const ProblemInstance& inst, const cvec& x0,
                        const BaselineConfig& config) {
  if (x0.size() != inst.n) throw std::invalid_argument("baseline_gd: x0 size mismatch");
  TrialRecord rec;
  rec.seed = inst.seed;
  double ymax = 0.0;
  for (double v : inst.observations) ymax = std::max(ymax, v);
  if (!(ymax > 0.0)) throw std::invalid_argument("baseline_gd: observations are all zero");
  const double eta = config.eta_scale / ymax;

  cvec x = x0;
  cvec p(inst.m), g(inst.m), grad(inst.n);
  double nrm2_star = 0.0;
  for (const auto& v : inst.signal) nrm2_star += std::norm(v);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (int t = 0;; ++t) {
    const Alignment al = alignment(x, inst.signal);
    const PhaseAlignedMse pm = phase_aligned_mse(x, inst.signal);
    TrialRow row{t, std::abs(al.alpha_hat), al.sigma2_hat, pm.mse, nan,
                 pm.mse * nrm2_star / double(inst.n)};
    if (!std::isfinite(pm.mse)) {
      rec.rows.push_back(row);
      rec.outcome = Outcome::diverged;
      rec.reason = "non-finite mse";
      return rec;
    }
    rec.rows.push_back(row);
    if (pm.mse < config.stop_mse || t == config.max_iter) break;
    matvec(inst.matrix, x.data(), p.data(), config.parallel);
    for (std::size_t a = 0; a < inst.m; ++a) g[a] = g_amp(p[a], inst.observations[a]);
    matvec_adjoint(inst.matrix, g.data(), grad.data(), config.parallel);
    for (std::size_t i = 0; i < inst.n; ++i) x[i] += eta * grad[i];
  }
  rec.outcome = rec.rows.back().mse < 1e-10 ? Outcome::success : Outcome::fail;
  return rec;
}

} // namespace ampa
