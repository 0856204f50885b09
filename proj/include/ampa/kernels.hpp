#pragma once

#include <cstddef>

#include "ampa/types.hpp"

namespace ampa {

// dense row-major m x n, single copy serves both A and A^H products
struct Matrix {
  std::size_t m = 0, n = 0;
  cvec a;
  const cplx* row(std::size_t i) const { return a.data() + i * n; }
  cplx* row(std::size_t i) { return a.data() + i * n; }
};

// out = A x
void matvec(const Matrix& A, const cplx* x, cplx* out, bool parallel);

// out = A^H g; parallel version uses per-thread accumulators combined in
// thread order, so results are deterministic for a fixed thread count
void matvec_adjoint(const Matrix& A, const cplx* g, cplx* out, bool parallel);

// One pass over the matrix rows computing the whole AMP.A inner work:
//   p[a]   = dot(row_a, x) - onsager*gprev[a]   (or p_fixed[a] if given)
//   g[a]   = y[a]*p[a]/|p[a]| - p[a]            (eps = 0; zero_p at p = 0)
//            y[a]*p[a]/sqrt(|p[a]|^2+eps) - p[a] (eps > 0)
//   acc    = A^H g
//   divsum = sum_a y[a]/(2|p[a]|)                            (eps = 0)
//            sum_a y[a]*(|p[a]|^2/2+eps)/(|p[a]|^2+eps)^{3/2} (eps > 0)
// The row is reused from cache for the adjoint update, halving memory
// traffic versus separate forward/adjoint products.
struct AmpSweepResult {
  double divsum = 0.0;
  bool zero_p = false; // some p[a] == 0 with eps == 0: exact divergence undefined
};
AmpSweepResult amp_sweep(const Matrix& A, const cplx* x, const cplx* gprev,
                         double onsager, const double* y, double eps,
                         cplx zero_p_conv, const cplx* p_fixed, cplx* p, cplx* g,
                         cplx* acc, bool parallel);

// w = A^H (T ∘ (A v)), fused the same way
void d_apply(const Matrix& A, const double* T, const cplx* v, cplx* w, bool parallel);

int max_threads();

// no-op without OpenMP; k <= 0 leaves the runtime default
void set_threads(int k);

} // namespace ampa
