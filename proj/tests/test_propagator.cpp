#include "doctest.h"
#include "oracles.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include "nhkz/observables.hpp"

using namespace nhkz;

namespace {

Mat2 sz() { Mat2 m; m << 1, 0, 0, -1; return m; }

std::function<CMatrix(double)> hamiltonian_of(const RampProtocol& pr, double p) {
  return [pr, p](double t) { return pr.hamiltonian(p, t); };
}

}  // namespace

TEST_SUITE("propagator") {

TEST_CASE("protocol schedules") {
  const RampProtocol h{ProtocolKind::Hermitian, 2.0, 4.0};
  CHECK(h.params_at(0.3, 0.0).gamma == cplx(0.0));
  CHECK(h.params_at(0.3, 2.0).gamma == cplx(0.0, -1.0));
  CHECK(h.params_at(0.3, 2.0).delta == cplx(0.0));
  const RampProtocol pt{ProtocolKind::PTSymmetric, 2.0, 4.0};
  CHECK(pt.params_at(0.3, 4.0).gamma == cplx(2.0));
  CHECK(pt.params_at(0.3, 4.0).delta == cplx(2.0));
  const RampProtocol full{ProtocolKind::FullNonHermitian, 2.0, 4.0};
  CHECK(full.params_at(0.3, 1.0).gamma == cplx(0.5));
  CHECK(full.params_at(0.3, 1.0).delta == cplx(0.0));
  const RampProtocol ep4{ProtocolKind::EP4, 1.0, 4.0};
  CHECK(ep4.dimension() == 4);
  CHECK(ep4.hamiltonian(0.0, 4.0).isApprox(build_h4({0.0, 1.0, 1.0})));
  CHECK(parse_protocol("pt") == ProtocolKind::PTSymmetric);
  CHECK_THROWS_AS(parse_protocol("ising"), Error);
  CHECK_THROWS_AS((RampProtocol{ProtocolKind::EP4, 1.0, 0.0}.validate()), Error);
}

TEST_CASE("step exponential against Pade") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (int i = 0; i < 50; ++i) {
    CMatrix h(2, 2);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) h(r, c) = cplx(g(rng), g(rng));
    const CMatrix ref = (cplx(0, -0.37) * h).exp();
    CHECK((step_exponential(h, 0.37) - ref).norm() < 1e-13 * (1.0 + ref.norm()));
  }
  // coalesced eigenvalues (nilpotent traceless part)
  CMatrix j(2, 2);
  j << 0.5, 1.0, 0.0, 0.5;
  CHECK((step_exponential(j, 0.7) - (cplx(0, -0.7) * j).exp()).norm() < 1e-14);
}

TEST_CASE("frozen Hamiltonian: Trotter product equals the exact exponential") {
  const Mat4 h = build_h4({0.4, 1.0, 0.6});
  for (std::int64_t n : {1, 7, 64}) {
    const CMatrix u = trotter_product([&](double) { return CMatrix(h); }, 3.0, n);
    const CMatrix ref = (cplx(0, -3.0) * h).exp();
    CHECK((u - ref).norm() < 1e-12 * ref.norm());
  }
  const Mat2 h2 = build_h2({0.4, 1.0, 0.6});
  const CMatrix u2 = trotter_product([&](double) { return CMatrix(h2); }, 5.0, 33);
  CHECK((u2 - (cplx(0, -5.0) * h2).exp()).norm() < 1e-12);
}

TEST_CASE("Hermitian ramp is unitary") {
  for (double p : {0.0, 0.3, 2.0})
    for (double tau : {1.0, 16.0, 64.0}) {
      const RampProtocol pr{ProtocolKind::Hermitian, 1.0, tau};
      CHECK(unitarity_defect(trotter_propagator(pr, p, 4096)) < 1e-10);
    }
  const RampProtocol pr{ProtocolKind::Hermitian, 1.0, 32.0};
  const EvolvedState s = evolve_state(pr, 0.5, initial_state(pr, 0.5));
  CHECK(std::abs(s.log_norm) < 1e-8);
  CHECK(std::abs(s.vector.norm() - 1.0) < 1e-12);
}

TEST_CASE("Trotter product against the ODE oracle") {
  struct Case { ProtocolKind kind; double p, tau; };
  for (const Case c : {Case{ProtocolKind::Hermitian, 0.5, 4.0}, Case{ProtocolKind::PTSymmetric, 1.0, 4.0},
                       Case{ProtocolKind::FullNonHermitian, 0.6, 4.0}, Case{ProtocolKind::EP4, 0.2, 4.0}}) {
    CAPTURE(protocol_name(c.kind));
    const RampProtocol pr{c.kind, 1.0, c.tau};
    const CMatrix ref = oracle::ode_propagator(hamiltonian_of(pr, c.p), c.tau, pr.dimension());
    const CMatrix u = trotter_propagator(pr, c.p, 1 << 14);
    CHECK((u - ref).norm() < 1e-8 * ref.norm());
  }
}

TEST_CASE("second-order convergence") {
  const RampProtocol pr{ProtocolKind::PTSymmetric, 1.0, 4.0};
  const CMatrix ref = oracle::ode_propagator(hamiltonian_of(pr, 0.7), 4.0, 2);
  std::vector<double> logs_dt, logs_err;
  for (std::int64_t n : {32, 64, 128, 256, 512}) {
    logs_dt.push_back(std::log(4.0 / n));
    logs_err.push_back(std::log((trotter_propagator(pr, 0.7, n) - ref).norm()));
  }
  const double slope = (logs_err.back() - logs_err.front()) / (logs_dt.back() - logs_dt.front());
  CHECK(slope == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("evolve_state") {
  const RampProtocol quick{ProtocolKind::Hermitian, 1.0, 1e-9};
  const CVector init = initial_state(quick, 0.8);
  CHECK((evolve_state(quick, 0.8, init).vector - init).norm() < 1e-6);

  const RampProtocol pr{ProtocolKind::Hermitian, 1.0, 8.0};
  const CVector psi0 = initial_state(pr, 0.4);
  const EvolvedState s = evolve_state(pr, 0.4, psi0);
  const CVector ref = oracle::ode_evolve(hamiltonian_of(pr, 0.4), 8.0, psi0, 0);
  CHECK((oracle::phase_fixed(s.vector) - oracle::phase_fixed(ref)).norm() < 1e-7);
  CHECK(s.steps_used >= 2 * kInitialSteps);

  // PT-broken mode amplifies
  const RampProtocol full{ProtocolKind::FullNonHermitian, 1.0, 32.0};
  CHECK(evolve_state(full, 0.3, initial_state(full, 0.3)).log_norm > 0.0);

  CHECK_THROWS_AS(evolve_state(pr, 0.4, 2.0 * psi0), Error);
  CHECK_THROWS_AS(evolve_state(pr, 0.4, psi0, 0.0), Error);
  CHECK_THROWS_AS(evolve_fixed(pr, 0.4, psi0, 0), Error);
}

TEST_CASE("non-convergence carries the last iterates") {
  // tolerance below roundoff can never be met
  const RampProtocol pr{ProtocolKind::Hermitian, 1.0, 0.5};
  try {
    evolve_state(pr, 0.4, initial_state(pr, 0.4), 1e-300);
    FAIL("expected NonConvergenceError");
  } catch (const NonConvergenceError& e) {
    CHECK(e.code() == ErrorCode::NonConvergence);
    CHECK(e.previous().size() == 2);
    CHECK(e.last().size() == 2);
  }
}

TEST_CASE("normalized expectation") {
  CVector up(2), plus(2), big(2);
  up << 1, 0;
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  big << 2, 0;
  CHECK(hermitian_expectation(up, sz()) == doctest::Approx(1.0));
  CHECK(std::abs(hermitian_expectation(plus, sz())) < 1e-16);
  CHECK(hermitian_expectation(big, sz()) == doctest::Approx(1.0));
  CVector psi(2);
  psi << cplx(0.3, 0.1), cplx(-0.2, 0.7);
  const cplx c(-1.7, 2.4);
  CHECK(std::abs(normalized_expectation(CVector(c * psi), sz()) - normalized_expectation(psi, sz())) < 1e-12);
  CHECK_THROWS_AS(normalized_expectation(CVector::Zero(2), sz()), Error);
  CHECK_THROWS_AS(normalized_expectation(up, Mat4::Identity()), Error);
}

TEST_CASE("determinism") {
  const RampProtocol pr{ProtocolKind::EP4, 1.0, 8.0};
  const EvolvedState a = evolve_state(pr, 0.3, initial_state(pr, 0.3));
  const EvolvedState b = evolve_state(pr, 0.3, initial_state(pr, 0.3));
  CHECK((a.vector - b.vector).norm() == 0.0);
  CHECK(a.log_norm == b.log_norm);
}

}
