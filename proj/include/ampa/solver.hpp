#pragma once

#include <optional>
#include <stdexcept>

#include "ampa/kernels.hpp"
#include "ampa/metrics.hpp"
#include "ampa/model.hpp"
#include "ampa/types.hpp"

namespace ampa {

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// step produced something undefined or non-finite
struct DivergenceEvent : SolverError {
  using SolverError::SolverError;
};
// -div_p(g) lost positivity
struct StabilityError : SolverError {
  using SolverError::SolverError;
};

// g(p, y) = y*p/|p| - p; zero_p is the unit stand-in for p/|p| at p = 0
cplx g_amp(cplx p, double y, cplx zero_p = cplx(0.0, 0.0));

// g_eps(p, y) = y*p/sqrt(|p|^2 + eps) - p
cplx g_smooth(cplx p, double y, double eps);

// (1/m) sum_a y_a/(2|p_a|) - 1; throws on any p_a = 0
double divergence(const cvec& p, const rvec& y);

// (1/m) sum_a y_a*(|p_a|^2/2 + eps)/(|p_a|^2 + eps)^{3/2} - 1
double divergence_smooth(const cvec& p, const rvec& y, double eps);

// mu^t = (1 + 2 div)/(1 + 2 tau)
double continuation_mu(double div, double tau);

enum class AmpVariant { simplified, regularized, auto_continuation };

struct AmpConfig {
  AmpVariant variant = AmpVariant::simplified;
  double mu = 0.0; // fixed weight for AmpVariant::regularized
  double epsilon = 0.0;
  int max_iter = 1000;
  cplx zero_p = cplx(0.0, 0.0);
  double stop_mse = 1e-13;
  bool parallel = true;
  bool keep_trajectory = false;
};

struct AmpState {
  cvec x;      // x^t
  cvec p;      // p^{t-1} (p^0 may be preset before the first step)
  cvec g_prev; // g(p^{t-1}, y)
  double lambda = 1.0;
  double tau = 0.5; // regularized variants only; stationary value at div = -1/2
  double div = 0.0; // div_p(g) of the last completed step
  int iter = 0;
};

// One iteration of Eq. (7): p^t = A x^t - (2/delta) g(p^{t-1}, y),
// x^{t+1} = 2[-div_p(g_t) x^t + A^H g(p^t, y)].
// If state.iter == 0 and state.p is nonempty, that p is used as p^0.
AmpState step_simplified(const AmpState& state, const ProblemInstance& inst,
                         const AmpConfig& config);

// Eq. (3a-d) with explicit mu (lambda_t, tau_t tracked in the state).
// Throws on -div_p(g_t) <= 0 (stability) or non-finite output (divergence);
// run() converts these into failed trial records.
AmpState step_regularized(const AmpState& state, const ProblemInstance& inst, double mu,
                          const AmpConfig& config);

struct RunResult {
  TrialRecord record;
  AmpState final_state;
  std::vector<AmpState> trajectory; // filled when config.keep_trajectory
};

struct AmpInit {
  cvec x0;
  std::optional<cvec> p0; // absent means g_prev = 0, i.e. p^{-1} = 0
};

RunResult run(const ProblemInstance& inst, const AmpInit& init, const AmpConfig& config);

} // namespace ampa
