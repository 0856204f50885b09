#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ampa/kernels.hpp"
#include "ampa/metrics.hpp"
#include "ampa/model.hpp"
#include "ampa/rng.hpp"
#include "ampa/solver.hpp"
#include "ampa/spectral.hpp"

using namespace ampa;

TEST_CASE("t_opt worked values") {
  CHECK(t_opt(1.0, 4.0) == doctest::Approx(3.0 / 5.0).epsilon(1e-15));
  CHECK(t_opt(0.0, 4.0) == doctest::Approx(-1.0).epsilon(1e-15)); // floor at -1/(sqrt(d)-1+...)
  CHECK(t_opt(10.0, 4.0) < 1.0);                                  // bounded above by 1
  CHECK(t_opt(10.0, 4.0) > 0.9);
}

TEST_CASE("phi moments pinned at (delta, tau) = (4, 0.2), noiseless") {
  const PhiMoments ph = phi_moments(4.0, 0.2, 0.0);
  CHECK(ph.phi1 == doctest::Approx(0.152147848051889).epsilon(1e-10));
  CHECK(ph.phi2 == doctest::Approx(0.028185152554176).epsilon(1e-10));
  CHECK(ph.phi3 == doctest::Approx(0.007481390187340).epsilon(1e-9));
}

TEST_CASE("phi2 at the tau ceiling equals 1/delta") {
  for (double delta : {2.5, 4.0, 6.0}) {
    const PhiMoments ph = phi_moments(delta, 0.5 * (1.0 - 1e-12), 0.0);
    CHECK(ph.phi2 == doctest::Approx(1.0 / delta).epsilon(1e-6));
  }
}

TEST_CASE("phi moments reject tau outside [0, 1/2)") {
  CHECK_THROWS_AS(phi_moments(4.0, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(phi_moments(4.0, -0.1, 0.0), std::invalid_argument);
}

TEST_CASE("solve_tau pinned, noiseless") {
  const auto [tau, tau_star] = solve_tau(4.0, 0.0);
  CHECK(tau == doctest::Approx(0.312674599903).epsilon(1e-9));
  CHECK(std::abs(tau_star - 0.5) < 1e-9);
  const PhiMoments ph = phi_moments(4.0, tau, 0.0);
  CHECK(ph.phi1 == doctest::Approx(0.25).epsilon(1e-9)); // defining equation phi1 = 1/delta
}

TEST_CASE("solve_tau pinned, noisy") {
  const auto [tau, tau_star] = solve_tau(4.0, 0.04);
  CHECK(tau == doctest::Approx(0.3353409767).epsilon(1e-7));
  CHECK(tau_star == doctest::Approx(0.4404620244).epsilon(1e-7));
  CHECK(tau < tau_star);
}

TEST_CASE("solve_tau requires delta > 2") {
  CHECK_THROWS_AS(solve_tau(1.9, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_tau(2.0, 0.0), std::invalid_argument);
  CHECK_NOTHROW(solve_tau(2.1, 0.0));
}

TEST_CASE("predict_finding1 pinned overlaps") {
  const struct {
    double delta, a2;
  } pins[] = {{2.5, 0.408283112846}, {3.0, 0.490011192560}, {4.0, 0.602327308793},
              {6.0, 0.722960336796}};
  for (const auto& pin : pins) {
    const auto [a2, s2] = predict_finding1(pin.delta, 0.0);
    CHECK(a2 == doctest::Approx(pin.a2).epsilon(1e-9));
    CHECK(a2 + s2 == 1.0);
  }
}

TEST_CASE("principal eigenvector satisfies the eigen equation") {
  const ProblemInstance inst = gen_instance({}, 96, 4.0, 0.0, 3);
  const double delta = inst.delta;
  const EigResult e =
      principal_eigvec(inst, [delta](double y) { return t_opt(y, delta); });
  REQUIRE(e.v.size() == inst.n);
  CHECK(e.residual < 1e-8);
  double nrm2 = 0.0;
  for (const auto& v : e.v) nrm2 += std::norm(v);
  CHECK(nrm2 == doctest::Approx(double(inst.n)).epsilon(1e-10));

  rvec T(inst.m);
  for (std::size_t a = 0; a < inst.m; ++a) T[a] = t_opt(inst.observations[a], delta);
  cvec w(inst.n);
  d_apply(inst.matrix, T.data(), e.v.data(), w.data(), false);
  double num = 0.0;
  for (std::size_t i = 0; i < inst.n; ++i) num += std::norm(w[i] - e.lambda * e.v[i]);
  CHECK(std::sqrt(num) / (std::abs(e.lambda) * std::sqrt(nrm2)) < 1e-7);

  // phase fix: the largest-modulus coordinate is real positive
  std::size_t imax = 0;
  for (std::size_t i = 1; i < inst.n; ++i)
    if (std::abs(e.v[i]) > std::abs(e.v[imax])) imax = i;
  CHECK(e.v[imax].imag() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(e.v[imax].real() > 0.0);
}

TEST_CASE("eigensolver is deterministic and budget-limited") {
  const ProblemInstance inst = gen_instance({}, 80, 4.0, 0.0, 5);
  const double delta = inst.delta;
  auto T = [delta](double y) { return t_opt(y, delta); };
  const EigResult a = principal_eigvec(inst, T);
  const EigResult b = principal_eigvec(inst, T);
  CHECK(a.v == b.v);
  CHECK(a.lambda == b.lambda);
  EigConfig tight;
  tight.budget = 2;
  CHECK_THROWS_AS(principal_eigvec(inst, T, tight), std::runtime_error);
}

TEST_CASE("decoupled_init shapes, scales and predictions") {
  const ProblemInstance inst = gen_instance({}, 600, 4.0, 0.0, 7);
  const SpectralInit si = decoupled_init(inst);
  CHECK(si.tau == doctest::Approx(0.312674599903).epsilon(1e-8));
  const auto [a2, s2] = predict_finding1(inst.delta, 0.0);
  CHECK(si.predicted_alpha0_sq == doctest::Approx(a2).epsilon(1e-12));
  CHECK(si.predicted_sigma2_0 == doctest::Approx(s2).epsilon(1e-12));

  double ny2 = 0.0;
  for (double y : inst.observations) ny2 += y * y;
  CHECK(si.rho == doctest::Approx(std::sqrt(ny2 / double(inst.n))).epsilon(1e-13));
  double nx2 = 0.0;
  for (const auto& v : si.x0) nx2 += std::norm(v);
  CHECK(nx2 == doctest::Approx(si.rho * si.rho * double(inst.n)).epsilon(1e-10));

  // p0 = (1 - 2 tau T(y)) o (A x0)
  cvec ax(inst.m);
  matvec(inst.matrix, si.x0.data(), ax.data(), false);
  for (std::size_t a = 0; a < inst.m; ++a) {
    const cplx want = (1.0 - 2.0 * si.tau * t_opt(inst.observations[a], inst.delta)) * ax[a];
    CHECK(std::abs(si.p0[a] - want) < 1e-10);
  }

  // fixed rho override is honored
  const SpectralInit sr = decoupled_init(inst, 1.0);
  double nr2 = 0.0;
  for (const auto& v : sr.x0) nr2 += std::norm(v);
  CHECK(nr2 == doctest::Approx(double(inst.n)).epsilon(1e-10));

  // finite-size overlap lands near the prediction
  const double a2_hat = std::norm(alignment(si.x0, inst.signal).alpha_hat) /
                        (si.rho * si.rho);
  CHECK(a2_hat == doctest::Approx(a2).epsilon(0.25));
}

TEST_CASE("amps_run settles on the spectral ray and recovers tau") {
  const ProblemInstance inst = gen_instance({}, 600, 4.0, 0.0, 11);
  const double delta = inst.delta;
  const AmpsResult r =
      amps_run(inst, [delta](double y) { return t_opt(y, delta); });
  CHECK(r.eq20_residual < 1e-6);
  CHECK(r.div_h < 0.0);
  CHECK(r.tau_hat > 0.0);
  CHECK(r.tau_hat < 0.5);
  CHECK(std::abs(r.tau_hat - 0.312674599903) < 0.03); // n = 600 finite-size scatter
  double nx2 = 0.0;
  for (const auto& v : r.x_hat) nx2 += std::norm(v);
  CHECK(nx2 == doctest::Approx(double(inst.n)).epsilon(1e-8));
  REQUIRE(r.p_hat.size() == inst.m);

  // the settled direction matches the power-method eigenvector up to phase
  const EigResult e =
      principal_eigvec(inst, [delta](double y) { return t_opt(y, delta); });
  cplx ip = 0.0;
  for (std::size_t i = 0; i < inst.n; ++i) ip += std::conj(e.v[i]) * r.x_hat[i];
  CHECK(std::abs(ip) / double(inst.n) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("onsager_p0 matches the elementwise definition") {
  const ProblemInstance inst = gen_instance({}, 120, 3.0, 0.0, 13);
  cvec x0(inst.n);
  GaussianGen gen(14);
  for (auto& v : x0) v = cplx(gen.next(), gen.next());
  const double tau = 0.3;
  const cvec p0 = onsager_p0(inst, x0, tau);
  cvec ax(inst.m);
  matvec(inst.matrix, x0.data(), ax.data(), false);
  for (std::size_t a = 0; a < inst.m; ++a) {
    const cplx want = (1.0 - 2.0 * tau * t_opt(inst.observations[a], inst.delta)) * ax[a];
    CHECK(std::abs(p0[a] - want) < 1e-12);
  }
}
