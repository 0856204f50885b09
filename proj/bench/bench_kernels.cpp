#include <chrono>
#include <cstdio>
#include <vector>

#include "ampa/kernels.hpp"
#include "ampa/model.hpp"
#include "ampa/solver.hpp"

using namespace ampa;

namespace {

template <typename F>
double time_best(int reps, F&& f) {
  double best = 1e30;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

void report(const char* name, double serial, double parallel, double check) {
  std::printf("%-14s serial %9.3f ms   parallel %9.3f ms   speedup %5.2fx   check %.6e\n",
              name, serial * 1e3, parallel * 1e3, serial / parallel, check);
}

} // namespace

int main(int argc, char** argv) {
  std::size_t n = 2000;
  double delta = 4.0;
  int reps = 5;
  if (argc > 1) n = std::strtoull(argv[1], nullptr, 10);
  if (argc > 2) delta = std::strtod(argv[2], nullptr);
  if (argc > 3) reps = int(std::strtol(argv[3], nullptr, 10));

  const ProblemInstance inst = gen_instance({}, n, delta, 0.0, 7);
  const std::size_t m = inst.m;
  std::printf("n=%zu m=%zu threads=%d reps=%d (best-of)\n", n, m, max_threads(), reps);

  cvec x(inst.signal), p(m), g(m), acc(n), w(n);
  rvec T(m);
  for (std::size_t a = 0; a < m; ++a) T[a] = 2.0 * (inst.observations[a] - 0.5);
  for (std::size_t a = 0; a < m; ++a) g[a] = cplx(0.1, -0.2);

  double s, par;
  s = time_best(reps, [&] { matvec(inst.matrix, x.data(), p.data(), false); });
  par = time_best(reps, [&] { matvec(inst.matrix, x.data(), p.data(), true); });
  report("matvec", s, par, std::abs(p[0]));

  s = time_best(reps, [&] { matvec_adjoint(inst.matrix, g.data(), acc.data(), false); });
  par = time_best(reps, [&] { matvec_adjoint(inst.matrix, g.data(), acc.data(), true); });
  report("adjoint", s, par, std::abs(acc[0]));

  AmpSweepResult r{};
  s = time_best(reps, [&] {
    r = amp_sweep(inst.matrix, x.data(), nullptr, 0.0, inst.observations.data(), 0.0,
                  cplx(0, 0), nullptr, p.data(), g.data(), acc.data(), false);
  });
  par = time_best(reps, [&] {
    r = amp_sweep(inst.matrix, x.data(), nullptr, 0.0, inst.observations.data(), 0.0,
                  cplx(0, 0), nullptr, p.data(), g.data(), acc.data(), true);
  });
  report("amp_sweep", s, par, r.divsum);

  s = time_best(reps, [&] { d_apply(inst.matrix, T.data(), x.data(), w.data(), false); });
  par = time_best(reps, [&] { d_apply(inst.matrix, T.data(), x.data(), w.data(), true); });
  report("d_apply", s, par, std::abs(w[0]));

  return 0;
}
