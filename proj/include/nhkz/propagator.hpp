#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "nhkz/hamiltonians.hpp"
#include "nhkz/types.hpp"

namespace nhkz {

enum class ProtocolKind { Hermitian, PTSymmetric, FullNonHermitian, EP4 };

std::string_view protocol_name(ProtocolKind kind) noexcept;
ProtocolKind parse_protocol(std::string_view name);

// Linear ramp of the couplings over [0, tau]; gamma(0) = 0 for every kind.
//   Hermitian:        delta = 0,     gamma(t) = -i*scale*t/tau   (2x2)
//   PTSymmetric:      delta = scale, gamma(t) = scale*t/tau      (2x2)
//   FullNonHermitian: delta = 0,     gamma(t) = scale*t/tau      (2x2)
//   EP4:              delta = scale, gamma(t) = scale*t/tau      (4x4)
struct RampProtocol {
  ProtocolKind kind = ProtocolKind::Hermitian;
  double scale = 1.0;
  double tau = 1.0;

  int dimension() const noexcept { return kind == ProtocolKind::EP4 ? 4 : 2; }
  bool two_level() const noexcept { return kind != ProtocolKind::EP4; }
  ModeParams params_at(double p, double t) const noexcept;
  CMatrix hamiltonian(double p, double t) const;
  void validate() const;
};

// Normalized state after a non-unitary evolution. The bare state equals
// exp(log_norm) * vector.
struct EvolvedState {
  CVector vector;
  double log_norm = 0.0;
  std::int64_t steps_used = 0;
};

class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, CVector previous, CVector last)
      : Error(ErrorCode::NonConvergence, what),
        previous_(std::move(previous)),
        last_(std::move(last)) {}
  const CVector& previous() const noexcept { return previous_; }
  const CVector& last() const noexcept { return last_; }

 private:
  CVector previous_;
  CVector last_;
};

inline constexpr std::int64_t kInitialSteps = 256;
inline constexpr std::int64_t kMaxSteps = std::int64_t{1} << 22;
inline constexpr double kDefaultTrotterTol = 1e-8;

// exp(-i*h*dt). 2x2 uses the closed form for traceless b.sigma plus the
// trace part; larger matrices use Pade scaling-and-squaring.
CMatrix step_exponential(const CMatrix& h, double dt);

// prod_{k=1..N} exp(-i H(t_k) dt), t_k = (k - 1/2) dt, dt = tau/N, with the
// k = 1 factor rightmost. Bare product, no renormalization.
CMatrix trotter_propagator(const RampProtocol& protocol, double p, std::int64_t n_steps);

// Same product for an arbitrary Hamiltonian callable over [0, duration].
template <class HamiltonianFn>
CMatrix trotter_product(HamiltonianFn&& hamiltonian, double duration, std::int64_t n_steps) {
  if (n_steps < 1) throw Error(ErrorCode::InvalidArgument, "trotter_product: n_steps must be >= 1");
  const double dt = duration / static_cast<double>(n_steps);
  CMatrix out;
  for (std::int64_t k = 1; k <= n_steps; ++k) {
    const double t = (static_cast<double>(k) - 0.5) * dt;
    const CMatrix factor = step_exponential(hamiltonian(t), dt);
    out = (k == 1) ? factor : CMatrix(factor * out);
  }
  return out;
}

// Bare propagator refined by step-doubling from kInitialSteps until the
// relative Frobenius change between successive products drops below tol.
// `steps_used`, when given, receives the final step count.
CMatrix converged_propagator(const RampProtocol& protocol, double p, double tol = kDefaultTrotterTol,
                             std::int64_t* steps_used = nullptr);

// Applies the Trotter factors for a fixed step count, renormalizing after
// every step.
EvolvedState evolve_fixed(const RampProtocol& protocol, double p, const CVector& initial,
                          std::int64_t n_steps);

// Step-doubling from kInitialSteps until successive final vectors differ by
// less than tol (Euclidean norm). Throws NonConvergenceError past kMaxSteps.
EvolvedState evolve_state(const RampProtocol& protocol, double p, const CVector& initial,
                          double tol = kDefaultTrotterTol);

// <psi|O|psi>/<psi|psi>.
cplx normalized_expectation(const CVector& state, const CMatrix& observable);
inline cplx normalized_expectation(const EvolvedState& state, const CMatrix& observable) {
  return normalized_expectation(state.vector, observable);
}

// Real part of the normalized expectation of a Hermitian observable; throws
// if the imaginary residue exceeds 1e-10.
double hermitian_expectation(const CVector& state, const CMatrix& observable);

}  // namespace nhkz
