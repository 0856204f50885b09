#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ampa/types.hpp"

namespace ampa {

struct Alignment {
  cplx alpha_hat;
  double sigma2_hat;
};

// alpha_hat = x*^H x / ||x*||^2, sigma2_hat = ||x - alpha_hat x*||^2 / ||x*||^2
Alignment alignment(const cvec& x, const cvec& x_star);

struct PhaseAlignedMse {
  double mse;
  double theta;
};

// theta = angle(x*^H x) attains the infimum over global phases;
// x*^H x = 0 falls back to theta = 0
PhaseAlignedMse phase_aligned_mse(const cvec& x, const cvec& x_star);

enum class Outcome { success, fail, diverged };

struct TrialRow {
  int t;
  double abs_alpha_hat;
  double sigma2_hat;
  double mse;
  double div_value;
  double mse_n; // same numerator over n instead of ||x*||^2
};

struct TrialRecord {
  uint64_t seed = 0;
  std::string config_hash;
  std::vector<TrialRow> rows;
  Outcome outcome = Outcome::fail;
  std::string reason; // set for diverged/failed trials
};

// final-row mse < threshold; diverged records never succeed
bool success(const TrialRecord& record, double threshold = 1e-10);

} // namespace ampa
