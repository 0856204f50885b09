#pragma once

#include <cstdint>
#include <string>

#include "ampa/kernels.hpp"
#include "ampa/types.hpp"

namespace ampa {

enum class SignalKind { complex_gaussian, nonneg_sparse };

struct SignalModel {
  SignalKind kind = SignalKind::complex_gaussian;
  double sparsity = 0.1; // nonneg_sparse only
};

// Eq. (1) has real noise; one expectation in the text uses circular complex.
// Both are exposed; for complex_circular the observation is |(|z|+w)| so the
// stored residual stays real and the model invariant keeps its form.
enum class NoiseKind { real_gaussian, complex_circular };

struct ProblemInstance {
  std::size_t n = 0, m = 0;
  double delta = 0.0; // recomputed as m/n after rounding
  double sigma_w2 = 0.0;
  cvec signal;
  Matrix matrix;
  rvec noise;
  rvec observations;
  uint64_t seed = 0;
  SignalModel model;
  NoiseKind noise_kind = NoiseKind::real_gaussian;
};

// deterministic given seed; (1/n)||x||^2 = 1 enforced by explicit rescale
cvec gen_signal(const SignalModel& model, std::size_t n, uint64_t seed);

ProblemInstance gen_instance(const SignalModel& model, std::size_t n, double delta,
                             double sigma_w2, uint64_t seed,
                             NoiseKind noise_kind = NoiseKind::real_gaussian,
                             bool parallel = true);

// ||Ax||^2 / (m*sigma_w2); +inf sentinel at sigma_w2 = 0
double snr(const ProblemInstance& inst);

// flat JSON dump with interleaved (re, im) arrays
void dump_instance_json(const ProblemInstance& inst, const std::string& path);

} // namespace ampa
