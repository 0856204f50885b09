#include "ampa/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace ampa {

namespace {
double norm2(const cvec& v) {
  double s = 0.0;
  for (const cplx& c : v) s += std::norm(c);
  return s;
}
} // namespace

Alignment alignment(const cvec& x, const cvec& x_star) {
  if (x.size() != x_star.size()) throw std::invalid_argument("alignment: length mismatch");
  const double ns = norm2(x_star);
  if (ns == 0.0) throw std::invalid_argument("alignment: x_star is zero");
  cplx ip(0.0, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) ip += std::conj(x_star[i]) * x[i];
  const cplx ah = ip / ns;
  double dev = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) dev += std::norm(x[i] - ah * x_star[i]);
  return {ah, dev / ns};
}

PhaseAlignedMse phase_aligned_mse(const cvec& x, const cvec& x_star) {
  if (x.size() != x_star.size())
    throw std::invalid_argument("phase_aligned_mse: length mismatch");
  const double ns = norm2(x_star);
  if (ns == 0.0) throw std::invalid_argument("phase_aligned_mse: x_star is zero");
  cplx ip(0.0, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) ip += std::conj(x_star[i]) * x[i];
  double theta = 0.0;
  if (ip != cplx(0.0, 0.0)) theta = std::arg(ip);
  const cplx ph = std::polar(1.0, theta);
  double num = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) num += std::norm(x[i] - ph * x_star[i]);
  return {num / ns, theta};
}

bool success(const TrialRecord& record, double threshold) {
  if (record.outcome == Outcome::diverged) return false;
  if (record.rows.empty()) return false;
  return record.rows.back().mse < threshold;
}

} // namespace ampa
