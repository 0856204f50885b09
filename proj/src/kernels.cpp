#include "ampa/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ampa {

namespace {

inline cplx row_dot(const cplx* row, const cplx* x, std::size_t n) {
  double sr = 0.0, si = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double a = row[j].real(), b = row[j].imag();
    const double c = x[j].real(), d = x[j].imag();
    sr += a * c - b * d;
    si += a * d + b * c;
  }
  return {sr, si};
}

inline void row_axpy_conj(const cplx* row, cplx ga, cplx* acc, std::size_t n) {
  const double gr = ga.real(), gi = ga.imag();
  for (std::size_t j = 0; j < n; ++j) {
    const double a = row[j].real(), b = row[j].imag();
    acc[j] += cplx(a * gr + b * gi, a * gi - b * gr);
  }
}

} // namespace

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int k) {
#ifdef _OPENMP
  if (k > 0) omp_set_num_threads(k);
#else
  (void)k;
#endif
}

void matvec(const Matrix& A, const cplx* x, cplx* out, bool parallel) {
  const std::size_t m = A.m, n = A.n;
#ifdef _OPENMP
  if (parallel && max_threads() > 1) {
#pragma omp parallel for schedule(static)
    for (long long a = 0; a < (long long)m; ++a) out[a] = row_dot(A.row(a), x, n);
    return;
  }
#endif
  (void)parallel;
  for (std::size_t a = 0; a < m; ++a) out[a] = row_dot(A.row(a), x, n);
}

void matvec_adjoint(const Matrix& A, const cplx* g, cplx* out, bool parallel) {
  const std::size_t m = A.m, n = A.n;
#ifdef _OPENMP
  if (parallel && max_threads() > 1) {
    const int nt = max_threads();
    std::vector<cvec> accs(nt);
    int used = 1;
#pragma omp parallel
    {
      const int tid = omp_get_thread_num();
      const int k = omp_get_num_threads();
#pragma omp single
      used = k;
      const std::size_t lo = m * std::size_t(tid) / k;
      const std::size_t hi = m * std::size_t(tid + 1) / k;
      accs[tid].assign(n, cplx(0.0));
      for (std::size_t a = lo; a < hi; ++a) row_axpy_conj(A.row(a), g[a], accs[tid].data(), n);
    }
    std::fill(out, out + n, cplx(0.0));
    for (int t = 0; t < used; ++t)
      for (std::size_t j = 0; j < n; ++j) out[j] += accs[t][j];
    return;
  }
#endif
  (void)parallel;
  std::fill(out, out + n, cplx(0.0));
  for (std::size_t a = 0; a < m; ++a) row_axpy_conj(A.row(a), g[a], out, n);
}

namespace {

struct SweepArgs {
  const Matrix* A;
  const cplx* x;
  const cplx* gprev;
  double onsager;
  const double* y;
  double eps;
  cplx zero_p_conv;
  const cplx* p_fixed;
  cplx* p;
  cplx* g;
};

// per-row body shared by the serial and parallel paths so a 1-thread
// parallel run is bitwise identical to the reference
inline void sweep_range(const SweepArgs& s, std::size_t lo, std::size_t hi, cplx* acc,
                        double& divsum, bool& zero_p) {
  const std::size_t n = s.A->n;
  for (std::size_t a = lo; a < hi; ++a) {
    const cplx* row = s.A->row(a);
    cplx pa;
    if (s.p_fixed) {
      pa = s.p_fixed[a];
    } else {
      pa = row_dot(row, s.x, n);
      if (s.gprev) pa -= s.onsager * s.gprev[a];
    }
    s.p[a] = pa;
    const double ya = s.y[a];
    cplx ga;
    if (s.eps > 0.0) {
      const double q = std::norm(pa);
      const double rt = std::sqrt(q + s.eps);
      ga = pa * (ya / rt - 1.0);
      divsum += ya * (0.5 * q + s.eps) / (rt * (q + s.eps));
    } else {
      const double ap = std::abs(pa);
      if (ap == 0.0) {
        zero_p = true;
        ga = ya * s.zero_p_conv;
      } else {
        ga = pa * (ya / ap - 1.0);
        divsum += ya / (2.0 * ap);
      }
    }
    s.g[a] = ga;
    row_axpy_conj(row, ga, acc, n);
  }
}

} // namespace

AmpSweepResult amp_sweep(const Matrix& A, const cplx* x, const cplx* gprev, double onsager,
                         const double* y, double eps, cplx zero_p_conv, const cplx* p_fixed,
                         cplx* p, cplx* g, cplx* acc, bool parallel) {
  const std::size_t m = A.m, n = A.n;
  SweepArgs s{&A, x, gprev, onsager, y, eps, zero_p_conv, p_fixed, p, g};
  AmpSweepResult r;
#ifdef _OPENMP
  if (parallel && max_threads() > 1) {
    const int nt = max_threads();
    std::vector<cvec> accs(nt);
    std::vector<double> dsums(nt, 0.0);
    std::vector<char> zps(nt, 0);
    int used = 1;
#pragma omp parallel
    {
      const int tid = omp_get_thread_num();
      const int k = omp_get_num_threads();
#pragma omp single
      used = k;
      const std::size_t lo = m * std::size_t(tid) / k;
      const std::size_t hi = m * std::size_t(tid + 1) / k;
      accs[tid].assign(n, cplx(0.0));
      double ds = 0.0;
      bool zp = false;
      sweep_range(s, lo, hi, accs[tid].data(), ds, zp);
      dsums[tid] = ds;
      zps[tid] = zp;
    }
    std::fill(acc, acc + n, cplx(0.0));
    for (int t = 0; t < used; ++t) {
      for (std::size_t j = 0; j < n; ++j) acc[j] += accs[t][j];
      r.divsum += dsums[t];
      r.zero_p = r.zero_p || zps[t];
    }
    return r;
  }
#endif
  (void)parallel;
  std::fill(acc, acc + n, cplx(0.0));
  sweep_range(s, 0, m, acc, r.divsum, r.zero_p);
  return r;
}

void d_apply(const Matrix& A, const double* T, const cplx* v, cplx* w, bool parallel) {
  const std::size_t m = A.m, n = A.n;
#ifdef _OPENMP
  if (parallel && max_threads() > 1) {
    const int nt = max_threads();
    std::vector<cvec> accs(nt);
    int used = 1;
#pragma omp parallel
    {
      const int tid = omp_get_thread_num();
      const int k = omp_get_num_threads();
#pragma omp single
      used = k;
      const std::size_t lo = m * std::size_t(tid) / k;
      const std::size_t hi = m * std::size_t(tid + 1) / k;
      accs[tid].assign(n, cplx(0.0));
      for (std::size_t a = lo; a < hi; ++a) {
        const cplx* row = A.row(a);
        const cplx z = row_dot(row, v, n);
        row_axpy_conj(row, T[a] * z, accs[tid].data(), n);
      }
    }
    std::fill(w, w + n, cplx(0.0));
    for (int t = 0; t < used; ++t)
      for (std::size_t j = 0; j < n; ++j) w[j] += accs[t][j];
    return;
  }
#endif
  (void)parallel;
  std::fill(w, w + n, cplx(0.0));
  for (std::size_t a = 0; a < m; ++a) {
    const cplx* row = A.row(a);
    const cplx z = row_dot(row, v, n);
    row_axpy_conj(row, T[a] * z, w, n);
  }
}

} // namespace ampa
