#include "nhkz/propagator.hpp"

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

namespace nhkz {

std::string_view protocol_name(ProtocolKind kind) noexcept {
  switch (kind) {
    case ProtocolKind::Hermitian: return "hermitian";
    case ProtocolKind::PTSymmetric: return "pt";
    case ProtocolKind::FullNonHermitian: return "full";
    case ProtocolKind::EP4: return "ep4";
  }
  return "unknown";
}

ProtocolKind parse_protocol(std::string_view name) {
  if (name == "hermitian") return ProtocolKind::Hermitian;
  if (name == "pt" || name == "pt_symmetric") return ProtocolKind::PTSymmetric;
  if (name == "full" || name == "full_nonhermitian") return ProtocolKind::FullNonHermitian;
  if (name == "ep4") return ProtocolKind::EP4;
  throw Error(ErrorCode::InvalidArgument, "unknown protocol '" + std::string(name) + "'");
}

ModeParams RampProtocol::params_at(double p, double t) const noexcept {
  const double ramp = scale * t / tau;
  switch (kind) {
    case ProtocolKind::Hermitian: return {p, 0.0, cplx(0.0, -ramp)};
    case ProtocolKind::PTSymmetric: return {p, scale, ramp};
    case ProtocolKind::FullNonHermitian: return {p, 0.0, ramp};
    case ProtocolKind::EP4: return {p, scale, ramp};
  }
  return {};
}

CMatrix RampProtocol::hamiltonian(double p, double t) const {
  const ModeParams params = params_at(p, t);
  if (kind == ProtocolKind::EP4) return build_h4(params);
  return build_h2(params);
}

void RampProtocol::validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw Error(ErrorCode::InvalidArgument, "protocol scale must be positive and finite");
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw Error(ErrorCode::InvalidArgument, "protocol tau must be positive and finite");
}

namespace {

// sin(z)/z, even in z.
cplx sinc(cplx z) {
  if (std::abs(z) < 1e-4) {
    const cplx z2 = z * z;
    return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
  }
  return std::sin(z) / z;
}

// exp(-i dt b.sigma) applied to (a0, a1) where b.sigma has entries
// [[bz, bx - i by], [bx + i by, -bz]].
inline void apply_su2_step(cplx bx, cplx by, cplx bz, double dt, cplx& a0, cplx& a1) {
  const cplx w = std::sqrt(bx * bx + by * by + bz * bz);
  const cplx c = std::cos(w * dt);
  const cplx s = dt * sinc(w * dt);
  const cplx h01 = bx - kI * by;
  const cplx h10 = bx + kI * by;
  const cplx n0 = c * a0 - kI * s * (bz * a0 + h01 * a1);
  const cplx n1 = c * a1 - kI * s * (h10 * a0 - bz * a1);
  a0 = n0;
  a1 = n1;
}

EvolvedState evolve_two_level(const RampProtocol& protocol, double p, const CVector& initial,
                              std::int64_t n_steps) {
  const double dt = protocol.tau / static_cast<double>(n_steps);
  cplx a0 = initial(0);
  cplx a1 = initial(1);
  double log_norm = 0.0;
  for (std::int64_t k = 1; k <= n_steps; ++k) {
    const double t = (static_cast<double>(k) - 0.5) * dt;
    const ModeParams m = protocol.params_at(p, t);
    apply_su2_step(cplx(m.p), m.delta, kI * m.gamma, dt, a0, a1);
    const double norm = std::sqrt(std::norm(a0) + std::norm(a1));
    log_norm += std::log(norm);
    a0 /= norm;
    a1 /= norm;
  }
  CVector out(2);
  out << a0, a1;
  return EvolvedState{out, log_norm, n_steps};
}

double max_column_sum(const Mat4& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

// exp(a) v by truncated Taylor series; a is split into substeps of 1-norm
// at most 1/2 and the series runs until the next term is below roundoff.
Eigen::Vector4cd apply_exponential(const Mat4& a, Eigen::Vector4cd v) {
  const double norm = max_column_sum(a);
  const int substeps = std::max(1, static_cast<int>(std::ceil(norm / 0.5)));
  const Mat4 piece = a / static_cast<double>(substeps);
  for (int s = 0; s < substeps; ++s) {
    Eigen::Vector4cd term = v;
    Eigen::Vector4cd acc = v;
    const double acc_norm = v.norm();
    for (int m = 1; m <= 40; ++m) {
      term = piece * term / static_cast<double>(m);
      acc += term;
      if (term.norm() <= 1e-17 * acc_norm) break;
    }
    v = acc;
  }
  return v;
}

EvolvedState evolve_four_level(const RampProtocol& protocol, double p, const CVector& initial,
                               std::int64_t n_steps) {
  const double dt = protocol.tau / static_cast<double>(n_steps);
  Eigen::Vector4cd v = initial;
  double log_norm = 0.0;
  for (std::int64_t k = 1; k <= n_steps; ++k) {
    const double t = (static_cast<double>(k) - 0.5) * dt;
    const Mat4 a = (-kI * dt) * build_h4(protocol.params_at(p, t));
    v = apply_exponential(a, v);
    const double norm = v.norm();
    log_norm += std::log(norm);
    v /= norm;
  }
  return EvolvedState{CVector(v), log_norm, n_steps};
}

}  // namespace

CMatrix step_exponential(const CMatrix& h, double dt) {
  if (h.rows() == 2 && h.cols() == 2) {
    const cplx shift = 0.5 * (h(0, 0) + h(1, 1));
    const cplx bz = h(0, 0) - shift;
    // traceless part squared is -det * I
    const cplx w = std::sqrt(bz * bz + h(0, 1) * h(1, 0));
    const cplx c = std::cos(w * dt);
    const cplx s = dt * sinc(w * dt);
    CMatrix traceless = h;
    traceless(0, 0) -= shift;
    traceless(1, 1) -= shift;
    CMatrix out = c * CMatrix::Identity(2, 2) - kI * s * traceless;
    return std::exp(-kI * dt * shift) * out;
  }
  const CMatrix a = (-kI * dt) * h;
  return a.exp();
}

CMatrix trotter_propagator(const RampProtocol& protocol, double p, std::int64_t n_steps) {
  protocol.validate();
  return trotter_product([&](double t) { return protocol.hamiltonian(p, t); }, protocol.tau,
                         n_steps);
}

CMatrix converged_propagator(const RampProtocol& protocol, double p, double tol,
                             std::int64_t* steps_used) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "converged_propagator: tol must be positive");
  CMatrix previous = trotter_propagator(protocol, p, kInitialSteps);
  for (std::int64_t n = 2 * kInitialSteps; n <= kMaxSteps; n *= 2) {
    CMatrix current = trotter_propagator(protocol, p, n);
    if (!current.allFinite())
      throw Error(ErrorCode::NonConvergence, "converged_propagator: propagator overflow");
    if ((current - previous).norm() < tol * current.norm()) {
      if (steps_used) *steps_used = n;
      return current;
    }
    previous = std::move(current);
  }
  throw Error(ErrorCode::NonConvergence, "converged_propagator: no convergence at p=" + std::to_string(p) +
                                             ", tau=" + std::to_string(protocol.tau));
}

EvolvedState evolve_fixed(const RampProtocol& protocol, double p, const CVector& initial,
                          std::int64_t n_steps) {
  protocol.validate();
  if (n_steps < 1) throw Error(ErrorCode::InvalidArgument, "evolve_fixed: n_steps must be >= 1");
  if (initial.size() != protocol.dimension())
    throw Error(ErrorCode::InvalidArgument, "evolve_fixed: state dimension mismatch");
  if (protocol.two_level()) return evolve_two_level(protocol, p, initial, n_steps);
  return evolve_four_level(protocol, p, initial, n_steps);
}

EvolvedState evolve_state(const RampProtocol& protocol, double p, const CVector& initial,
                          double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "evolve_state: tol must be positive");
  if (std::abs(initial.norm() - 1.0) > 1e-10)
    throw Error(ErrorCode::InvalidArgument, "evolve_state: initial state must have unit norm");
  EvolvedState before;
  EvolvedState previous = evolve_fixed(protocol, p, initial, kInitialSteps);
  for (std::int64_t n = 2 * kInitialSteps; n <= kMaxSteps; n *= 2) {
    EvolvedState current = evolve_fixed(protocol, p, initial, n);
    if ((current.vector - previous.vector).norm() < tol) return current;
    before = std::move(previous);
    previous = std::move(current);
  }
  throw NonConvergenceError("evolve_state: no convergence at p=" + std::to_string(p) +
                                ", tau=" + std::to_string(protocol.tau) + " after " +
                                std::to_string(kMaxSteps) + " steps",
                            before.vector, previous.vector);
}

cplx normalized_expectation(const CVector& state, const CMatrix& observable) {
  if (observable.rows() != state.size() || observable.cols() != state.size())
    throw Error(ErrorCode::InvalidArgument, "normalized_expectation: dimension mismatch");
  const double norm2 = state.squaredNorm();
  if (!(norm2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "normalized_expectation: zero-norm state");
  return state.dot(observable * state) / norm2;
}

double hermitian_expectation(const CVector& state, const CMatrix& observable) {
  const cplx value = normalized_expectation(state, observable);
  if (std::abs(value.imag()) > 1e-10)
    throw Error(ErrorCode::Internal, "hermitian_expectation: imaginary residue above 1e-10");
  return value.real();
}

}  // namespace nhkz
