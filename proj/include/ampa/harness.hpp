#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ampa/metrics.hpp"
#include "ampa/model.hpp"
#include "ampa/solver.hpp"
#include "ampa/spectral.hpp"
#include "ampa/state_evolution.hpp"

namespace ampa {

enum class InitKind { decoupled_spectral, blind_spectral, ones, truth, random_unit };

InitKind init_kind_from_string(const std::string& s);
std::string to_string(InitKind k);

struct MadeInit {
  AmpInit init;
  std::optional<SpectralInit> spectral;
};

// blind_spectral takes the spectral x0 but drops the Onsager-consistent p0
MadeInit make_init(const ProblemInstance& inst, InitKind kind, bool parallel = true);

struct SimConfig {
  SignalModel model;
  std::size_t n = 2000;
  double delta = 4.0;
  double sigma_w2 = 0.0;
  NoiseKind noise_kind = NoiseKind::real_gaussian;
  InitKind init = InitKind::decoupled_spectral;
  AmpConfig amp;
  int trials = 10;
  uint64_t master_seed = 1;
  int se_quad_nodes = 512;
};

struct SimResult {
  std::vector<TrialRecord> records;
  // per-iteration means over trials still running at that t
  std::vector<double> mean_abs_alpha;
  std::vector<double> mean_sigma2;
  std::vector<int> counts;
  std::vector<SePoint> se_path; // matched SE prediction, length max_iter+1
  double se_init_abs_alpha = 0.0;
  double se_init_sigma2 = 0.0;
};

SimResult sim_experiment(const SimConfig& config);

struct PtConfig {
  SignalModel model;
  std::size_t n = 1000;
  std::vector<double> deltas;
  double sigma_w2 = 0.0;
  NoiseKind noise_kind = NoiseKind::real_gaussian;
  InitKind init = InitKind::decoupled_spectral;
  AmpConfig amp; // max_iter 1000 per the transition protocol
  int trials = 100;
  uint64_t master_seed = 1;
  double success_threshold = 1e-10;
  bool with_baseline = false;
};

struct PtPoint {
  double delta;
  int successes = 0;
  int failures = 0; // trials that errored out (init or solver)
  int trials = 0;
  double rate = 0.0;
  int baseline_successes = 0;
  double baseline_rate = 0.0;
};

std::vector<PtPoint> phase_transition(const PtConfig& config);

struct NoiseCurveConfig {
  SignalModel model;
  std::size_t n = 2000;
  double delta = 4.0;
  std::vector<double> snr_db;
  NoiseKind noise_kind = NoiseKind::real_gaussian;
  InitKind init = InitKind::decoupled_spectral;
  AmpConfig amp;
  int trials = 10;
  uint64_t master_seed = 1;
  int se_quad_nodes = 512;
};

struct NoisePoint {
  double snr_db = 0.0;
  double sigma_w2 = 0.0;
  double mean_mse = 0.0;
  double std_mse = 0.0;
  double se_amse = 0.0;
  int trials = 0;
};

std::vector<NoisePoint> noise_curve(const NoiseCurveConfig& config);

struct BaselineConfig {
  double eta_scale = 0.2; // step = eta_scale / max_a y_a
  int max_iter = 1000;
  double stop_mse = 1e-13;
  bool parallel = true;
};

// plain amplitude-flow gradient descent on the unregularized loss
TrialRecord baseline_gd(const ProblemInstance& inst, const cvec& x0,
                        const BaselineConfig& config);

} // namespace ampa
