#include "nhkz/observables.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <gsl/gsl_integration.h>

namespace nhkz {

QuadratureRule gauss_legendre(int order, double a, double b) {
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "gauss_legendre: order must be >= 1");
  if (!(a < b)) throw Error(ErrorCode::InvalidArgument, "gauss_legendre: require a < b");
  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(order);
  if (table == nullptr) throw Error(ErrorCode::Internal, "gauss_legendre: table allocation failed");
  QuadratureRule rule{order, a, b, {}, {}};
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    gsl_integration_glfixed_point(a, b, static_cast<std::size_t>(i), &rule.nodes[i],
                                  &rule.weights[i], table);
  }
  gsl_integration_glfixed_table_free(table);
  // GSL emits nodes symmetric-pair ordered; sort ascending with weights attached.
  std::vector<std::size_t> idx(order);
  for (int i = 0; i < order; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto l, auto r) { return rule.nodes[l] < rule.nodes[r]; });
  QuadratureRule sorted{order, a, b, {}, {}};
  for (auto i : idx) {
    sorted.nodes.push_back(rule.nodes[i]);
    sorted.weights.push_back(rule.weights[i]);
  }
  return sorted;
}

CMatrix defect_observable(ProtocolKind kind) {
  if (kind == ProtocolKind::EP4) return my_operator();
  CMatrix sz(2, 2);
  sz << 1, 0, 0, -1;
  return sz;
}

CVector initial_state(const RampProtocol& protocol, double p) {
  return ground_state_hermitian(protocol.hamiltonian(p, 0.0)).vector;
}

namespace {

struct Eigensystem {
  CVector values;
  CMatrix vectors;
};

Eigensystem eigensystem(const CMatrix& h) {
  Eigen::ComplexEigenSolver<CMatrix> solver(h);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::Internal, "eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

void reject_ep(const Eigensystem& es, const CMatrix& h, double p) {
  const double norm = std::max(1.0, h.norm());
  if (min_level_spacing(es.values) > kEpTolerance * norm) return;
  Eigen::JacobiSVD<CMatrix> svd(es.vectors);
  const auto& s = svd.singularValues();
  const double cond = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1)
                                             : std::numeric_limits<double>::infinity();
  throw EpProximityError("equilibrium_value: p=" + std::to_string(p) +
                             " lies on an exceptional point of the final Hamiltonian "
                             "(eigenvector condition " + std::to_string(cond) + ")",
                         cond);
}

Eigen::Index arg_min_real(const CVector& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v(i).real() < v(best).real()) best = i;
  return best;
}

Eigen::Index arg_max_imag(const CVector& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v(i).imag() > v(best).imag()) best = i;
  return best;
}

// Follows the eigenvector with maximal overlap as gamma ramps from 0 to its
// final value in 1024 equal steps.
CVector continue_adiabatically(const RampProtocol& protocol, double p) {
  constexpr int kSteps = 1024;
  CVector tracked = initial_state(protocol, p);
  for (int j = 1; j <= kSteps; ++j) {
    const double t = protocol.tau * static_cast<double>(j) / kSteps;
    const Eigensystem es = eigensystem(protocol.hamiltonian(p, t));
    Eigen::Index best = 0;
    double best_overlap = -1.0;
    for (Eigen::Index i = 0; i < es.values.size(); ++i) {
      const CVector v = es.vectors.col(i).normalized();
      const double overlap = std::abs(v.dot(tracked));
      if (overlap > best_overlap) {
        best_overlap = overlap;
        best = i;
      }
    }
    tracked = es.vectors.col(best).normalized();
  }
  return tracked;
}

}  // namespace

CVector equilibrium_state(const RampProtocol& protocol, double p) {
  protocol.validate();
  const CMatrix h = protocol.hamiltonian(p, protocol.tau);
  const Eigensystem es = eigensystem(h);
  reject_ep(es, h, p);
  Eigen::Index pick = 0;
  switch (protocol.kind) {
    case ProtocolKind::Hermitian:
    case ProtocolKind::PTSymmetric:
      pick = arg_min_real(es.values);
      break;
    case ProtocolKind::FullNonHermitian: {
      const double max_imag = es.values.imag().cwiseAbs().maxCoeff();
      if (max_imag <= kEpTolerance * std::max(1.0, h.norm())) return continue_adiabatically(protocol, p);
      pick = arg_max_imag(es.values);
      break;
    }
    case ProtocolKind::EP4:
      pick = arg_max_imag(es.values);
      break;
  }
  return es.vectors.col(pick).normalized();
}

double equilibrium_value(const RampProtocol& protocol, double p) {
  return hermitian_expectation(equilibrium_state(protocol, p), defect_observable(protocol.kind));
}

ModeResult evolve_defect(const RampProtocol& protocol, double p, double tol) {
  const EvolvedState state = evolve_state(protocol, p, initial_state(protocol, p), tol);
  return ModeResult{hermitian_expectation(state.vector, defect_observable(protocol.kind)),
                    state.log_norm, state.steps_used};
}

double sigma_z_defect(const RampProtocol& protocol, double p, double tol) {
  if (!protocol.two_level())
    throw Error(ErrorCode::InvalidArgument, "sigma_z_defect: protocol must be two-level");
  return evolve_defect(protocol, p, tol).defect;
}

std::pair<double, double> my_defect(const RampProtocol& protocol, double p, double tol) {
  if (protocol.kind != ProtocolKind::EP4)
    throw Error(ErrorCode::InvalidArgument, "my_defect: protocol must be EP4");
  return {evolve_defect(protocol, p, tol).defect, equilibrium_value(protocol, p)};
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = count;
  std::exception_ptr error;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

DefectProfile build_profile(const RampProtocol& protocol, const QuadratureRule& rule, double tol,
                            unsigned workers, const std::vector<double>* equilibria) {
  protocol.validate();
  if (rule.nodes.size() != rule.weights.size())
    throw Error(ErrorCode::InvalidArgument, "build_profile: malformed quadrature rule");
  if (equilibria != nullptr && equilibria->size() != rule.nodes.size())
    throw Error(ErrorCode::InvalidArgument, "build_profile: equilibria size mismatch");
  DefectProfile profile{protocol, std::vector<DefectSample>(rule.nodes.size())};
  parallel_for(rule.nodes.size(), workers, [&](std::size_t i) {
    const double p = rule.nodes[i];
    const ModeResult mode = evolve_defect(protocol, p, tol);
    const double eq = equilibria ? (*equilibria)[i] : equilibrium_value(protocol, p);
    profile.samples[i] = DefectSample{p, mode.defect, eq, rule.weights[i], mode.log_norm,
                                      mode.steps_used};
  });
  return profile;
}

DensityPair total_defect_density(const DefectProfile& profile) {
  DensityPair out;
  for (const auto& s : profile.samples) {
    out.n += s.quad_weight * s.defect;
    out.n_eq += s.quad_weight * s.equilibrium;
  }
  out.n /= 2.0 * kPi;
  out.n_eq /= 2.0 * kPi;
  return out;
}

RegionDensities region_split_density(const RampProtocol& protocol, const RegionSplitOptions& options) {
  if (protocol.kind != ProtocolKind::FullNonHermitian)
    throw Error(ErrorCode::InvalidArgument, "region_split_density: protocol must be full");
  protocol.validate();
  const double ep = protocol.scale;
  const double p_max = options.p_max_factor * ep;
  if (!(options.p_min < ep) || !(ep < p_max))
    throw Error(ErrorCode::InvalidArgument, "region_split_density: need p_min < scale < p_max");
  const QuadratureRule left = gauss_legendre(options.order, options.p_min, ep);
  const QuadratureRule right = gauss_legendre(options.order, ep, p_max);
  for (const auto* rule : {&left, &right})
    for (double p : rule->nodes)
      if (std::abs(p - ep) <= 1e-6 * ep)
        throw Error(ErrorCode::Internal, "region_split_density: node on the exceptional point");
  RegionDensities out;
  out.left_profile = build_profile(protocol, left, options.tol, options.workers);
  out.right_profile = build_profile(protocol, right, options.tol, options.workers);
  out.left = total_defect_density(out.left_profile);
  out.right = total_defect_density(out.right_profile);
  return out;
}

}  // namespace nhkz
