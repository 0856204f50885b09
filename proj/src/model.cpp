#include "ampa/model.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "ampa/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ampa {

namespace {
// seed fan-out streams within one instance
enum : uint64_t { kStreamSignal = 0, kStreamMatrix = 1, kStreamNoise = 2 };
} // namespace

cvec gen_signal(const SignalModel& model, std::size_t n, uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_signal: n < 1");
  cvec x(n);
  if (model.kind == SignalKind::complex_gaussian) {
    GaussianGen g(derive_seed(seed, kStreamSignal));
    for (std::size_t i = 0; i < n; ++i) {
      const double re = g.next();
      const double im = g.next();
      x[i] = cplx(re, im);
    }
    double nrm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) nrm2 += std::norm(x[i]);
    const double scale = std::sqrt(double(n) / nrm2);
    for (std::size_t i = 0; i < n; ++i) x[i] *= scale;
  } else {
    if (!(model.sparsity > 0.0 && model.sparsity <= 1.0))
      throw std::invalid_argument("gen_signal: sparsity must be in (0,1]");
    const std::size_t k = std::size_t(std::llround(model.sparsity * double(n)));
    if (k < 1) throw std::invalid_argument("gen_signal: sparsity*n rounds to zero");
    // partial Fisher-Yates pick of k support positions
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t(0));
    SplitMix64 rng(derive_seed(seed, kStreamSignal));
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + std::size_t(rng.next() % (n - i));
      std::swap(idx[i], idx[j]);
    }
    const double v = std::sqrt(double(n) / double(k));
    for (std::size_t i = 0; i < k; ++i) x[idx[i]] = cplx(v, 0.0);
  }
  return x;
}

ProblemInstance gen_instance(const SignalModel& model, std::size_t n, double delta,
                             double sigma_w2, uint64_t seed, NoiseKind noise_kind,
                             bool parallel) {
  if (!(delta > 0.0)) throw std::invalid_argument("gen_instance: delta must be > 0");
  if (sigma_w2 < 0.0) throw std::invalid_argument("gen_instance: sigma_w2 < 0");
  const std::size_t m = std::size_t(std::llround(delta * double(n)));
  if (m < 1) throw std::invalid_argument("gen_instance: m rounds to zero");

  ProblemInstance inst;
  inst.n = n;
  inst.m = m;
  inst.delta = double(m) / double(n);
  inst.sigma_w2 = sigma_w2;
  inst.seed = seed;
  inst.model = model;
  inst.noise_kind = noise_kind;
  inst.signal = gen_signal(model, n, seed);

  inst.matrix.m = m;
  inst.matrix.n = n;
  inst.matrix.a.resize(m * n);
  const double s = 1.0 / std::sqrt(2.0 * double(m));
  // per-row streams: generation order (and thus the instance) is independent
  // of the thread count
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
  for (long long a = 0; a < (long long)m; ++a) {
    GaussianGen g(derive_seed(seed, kStreamMatrix, uint64_t(a)));
    cplx* row = inst.matrix.row(std::size_t(a));
    for (std::size_t j = 0; j < n; ++j) {
      const double re = g.next() * s;
      const double im = g.next() * s;
      row[j] = cplx(re, im);
    }
  }

  cvec z(m);
  matvec(inst.matrix, inst.signal.data(), z.data(), parallel);

  inst.noise.assign(m, 0.0);
  inst.observations.resize(m);
  if (sigma_w2 > 0.0) {
    GaussianGen g(derive_seed(seed, kStreamNoise));
    const double sw = std::sqrt(sigma_w2);
    if (noise_kind == NoiseKind::real_gaussian) {
      for (std::size_t a = 0; a < m; ++a) {
        inst.noise[a] = g.next() * sw;
        inst.observations[a] = std::abs(z[a]) + inst.noise[a];
      }
    } else {
      const double sw2 = sw / std::sqrt(2.0);
      for (std::size_t a = 0; a < m; ++a) {
        const cplx w(g.next() * sw2, g.next() * sw2);
        const double az = std::abs(z[a]);
        const double y = std::abs(az + w);
        inst.noise[a] = y - az;
        inst.observations[a] = y;
      }
    }
  } else {
    for (std::size_t a = 0; a < m; ++a) inst.observations[a] = std::abs(z[a]);
  }
  return inst;
}

double snr(const ProblemInstance& inst) {
  if (inst.sigma_w2 == 0.0) return std::numeric_limits<double>::infinity();
  double num = 0.0;
  for (std::size_t a = 0; a < inst.m; ++a) {
    const double az = inst.observations[a] - inst.noise[a];
    num += az * az;
  }
  return num / (double(inst.m) * inst.sigma_w2);
}

void dump_instance_json(const ProblemInstance& inst, const std::string& path) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["n"] = inst.n;
  j["m"] = inst.m;
  j["delta"] = inst.delta;
  j["sigma_w2"] = inst.sigma_w2;
  j["seed"] = inst.seed;
  j["signal_kind"] = inst.model.kind == SignalKind::complex_gaussian ? "complex_gaussian"
                                                                     : "nonneg_sparse";
  j["noise_kind"] = inst.noise_kind == NoiseKind::real_gaussian ? "real_gaussian"
                                                                : "complex_circular";
  auto interleave = [](const cvec& v) {
    rvec out;
    out.reserve(2 * v.size());
    for (const cplx& c : v) {
      out.push_back(c.real());
      out.push_back(c.imag());
    }
    return out;
  };
  j["signal_re_im"] = interleave(inst.signal);
  j["matrix_re_im"] = interleave(inst.matrix.a);
  j["noise"] = inst.noise;
  j["observations"] = inst.observations;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("dump_instance_json: cannot open " + path);
  f << j.dump();
}

} // namespace ampa
