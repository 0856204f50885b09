#include "ampa/solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ampa {

cplx g_amp(cplx p, double y, cplx zero_p) {
  const double ap = std::abs(p);
  if (ap == 0.0) return y * zero_p;
  return p * (y / ap - 1.0);
}

cplx g_smooth(cplx p, double y, double eps) {
  return p * (y / std::sqrt(std::norm(p) + eps) - 1.0);
}

double divergence(const cvec& p, const rvec& y) {
  double s = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    const double ap = std::abs(p[a]);
    if (ap == 0.0)
      throw DivergenceEvent("divergence: p entry is zero, use divergence_smooth");
    s += y[a] / (2.0 * ap);
  }
  return s / double(p.size()) - 1.0;
}

double divergence_smooth(const cvec& p, const rvec& y, double eps) {
  double s = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    const double q = std::norm(p[a]);
    s += y[a] * (0.5 * q + eps) / ((q + eps) * std::sqrt(q + eps));
  }
  return s / double(p.size()) - 1.0;
}

double continuation_mu(double div, double tau) { return (1.0 + 2.0 * div) / (1.0 + 2.0 * tau); }

namespace {

struct SweepOut {
  double div;
};

// shared sweep plumbing: fills next.p, next.g_prev, acc = A^H g
SweepOut do_sweep(const AmpState& state, const ProblemInstance& inst, const AmpConfig& config,
                  double onsager, cvec& acc, AmpState& next) {
  const std::size_t m = inst.m;
  next.p.resize(m);
  next.g_prev.resize(m);
  acc.assign(inst.n, cplx(0.0));
  const cplx* pfix = (state.iter == 0 && state.p.size() == m) ? state.p.data() : nullptr;
  const cplx* gprev = state.g_prev.size() == m ? state.g_prev.data() : nullptr;
  AmpSweepResult r =
      amp_sweep(inst.matrix, state.x.data(), gprev, onsager, inst.observations.data(),
                config.epsilon, config.zero_p, pfix, next.p.data(), next.g_prev.data(),
                acc.data(), config.parallel);
  if (r.zero_p)
    throw DivergenceEvent("step: p entry hit zero with eps = 0; divergence undefined");
  const double div = r.divsum / double(m) - 1.0;
  if (!std::isfinite(div)) throw DivergenceEvent("step: non-finite divergence term");
  return {div};
}

AmpState step_reg_core(const AmpState& state, const ProblemInstance& inst, bool use_continuation,
                       double mu, const AmpConfig& config) {
  AmpState next;
  next.x.resize(inst.n);
  next.iter = state.iter + 1;
  cvec acc;
  const cplx* gprev = state.g_prev.size() == inst.m ? state.g_prev.data() : nullptr;
  const double onsager = gprev ? state.lambda / (inst.delta * (-state.div)) : 0.0;
  const SweepOut sw = do_sweep(state, inst, config, onsager, acc, next);
  if (-sw.div <= 0.0)
    throw StabilityError("step_regularized: -div_p(g) = " + std::to_string(-sw.div) +
                         " is not positive");
  const double mu_eff = use_continuation ? continuation_mu(sw.div, state.tau) : mu;
  const double lam = (-sw.div) / ((-sw.div) + mu_eff * (state.tau + 0.5));
  for (std::size_t i = 0; i < inst.n; ++i)
    next.x[i] = lam * (state.x[i] + acc[i] / (-sw.div));
  next.lambda = lam;
  next.tau = lam * (state.tau + 0.5) / (inst.delta * (-sw.div));
  next.div = sw.div;
  return next;
}

bool all_finite(const cvec& v) {
  for (const cplx& c : v)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

} // namespace

AmpState step_simplified(const AmpState& state, const ProblemInstance& inst,
                         const AmpConfig& config) {
  AmpState next;
  next.x.resize(inst.n);
  next.iter = state.iter + 1;
  next.lambda = state.lambda;
  next.tau = state.tau;
  cvec acc;
  const SweepOut sw = do_sweep(state, inst, config, 2.0 / inst.delta, acc, next);
  for (std::size_t i = 0; i < inst.n; ++i)
    next.x[i] = 2.0 * (-sw.div * state.x[i] + acc[i]);
  next.div = sw.div;
  return next;
}

AmpState step_regularized(const AmpState& state, const ProblemInstance& inst, double mu,
                          const AmpConfig& config) {
  return step_reg_core(state, inst, false, mu, config);
}

RunResult run(const ProblemInstance& inst, const AmpInit& init, const AmpConfig& config) {
  RunResult out;
  AmpState st;
  st.x = init.x0;
  if (init.p0) st.p = *init.p0;
  out.record.seed = inst.seed;

  double ns = 0.0;
  for (const cplx& c : inst.signal) ns += std::norm(c);
  const double n_over = ns / double(inst.n);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int t = 0; t <= config.max_iter; ++t) {
    const Alignment al = alignment(st.x, inst.signal);
    const PhaseAlignedMse pm = phase_aligned_mse(st.x, inst.signal);
    TrialRow row{t, std::abs(al.alpha_hat), al.sigma2_hat, pm.mse, nan, pm.mse * n_over};
    if (!std::isfinite(pm.mse)) {
      out.record.rows.push_back(row);
      out.record.outcome = Outcome::diverged;
      out.record.reason = "non-finite estimate";
      break;
    }
    AmpState next;
    try {
      switch (config.variant) {
        case AmpVariant::simplified:
          next = step_simplified(st, inst, config);
          break;
        case AmpVariant::regularized:
          next = step_reg_core(st, inst, false, config.mu, config);
          break;
        case AmpVariant::auto_continuation:
          next = step_reg_core(st, inst, true, 0.0, config);
          break;
      }
    } catch (const SolverError& e) {
      out.record.rows.push_back(row);
      out.record.outcome = Outcome::diverged;
      out.record.reason = e.what();
      break;
    }
    row.div_value = next.div;
    out.record.rows.push_back(row);
    if (config.keep_trajectory) out.trajectory.push_back(st);
    if (pm.mse < config.stop_mse) break;
    if (t == config.max_iter) break;
    if (!all_finite(next.x)) {
      out.record.outcome = Outcome::diverged;
      out.record.reason = "non-finite iterate";
      break;
    }
    st = std::move(next);
  }
  if (out.record.outcome != Outcome::diverged) {
    out.record.outcome =
        (!out.record.rows.empty() && out.record.rows.back().mse < 1e-10) ? Outcome::success
                                                                         : Outcome::fail;
  }
  out.final_state = std::move(st);
  return out;
}

} // namespace ampa
