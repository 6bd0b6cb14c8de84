#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "nhkz/propagator.hpp"

namespace nhkz {

struct QuadratureRule {
  int order = 0;
  double a = 0.0;
  double b = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre nodes and weights mapped affinely onto (a, b), ascending.
QuadratureRule gauss_legendre(int order, double a, double b);

struct DefectSample {
  double p = 0.0;
  double defect = 0.0;
  double equilibrium = 0.0;
  double quad_weight = 0.0;
  double log_norm = 0.0;
  std::int64_t steps_used = 0;
};

struct DefectProfile {
  RampProtocol protocol;
  std::vector<DefectSample> samples;

  double tau() const noexcept { return protocol.tau; }
};

struct DensityPair {
  double n = 0.0;
  double n_eq = 0.0;
  double excess() const noexcept { return n - n_eq; }
};

class EpProximityError : public Error {
 public:
  EpProximityError(const std::string& what, double condition)
      : Error(ErrorCode::EpProximity, what), condition_(condition) {}
  // Condition number of the eigenvector matrix at the rejected point.
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

// Relative level spacing below which the final Hamiltonian counts as sitting
// on an exceptional point.
inline constexpr double kEpTolerance = 1e-9;

// sigma_z for two-level kinds, M_y for EP4.
CMatrix defect_observable(ProtocolKind kind);

// Ground state of H_p at t = 0 (always Hermitian).
CVector initial_state(const RampProtocol& protocol, double p);

// Right eigenvector of H(tau) defining the adiabatic reference:
// smallest real eigenvalue for Hermitian and PT-symmetric ramps, largest
// imaginary part for the full non-Hermitian drive and EP4. Real-spectrum modes
// of the full drive (p > scale) are continued adiabatically from the initial
// ground state in steps of scale/1024.
CVector equilibrium_state(const RampProtocol& protocol, double p);

// Normalized defect observable in equilibrium_state. Independent of tau.
double equilibrium_value(const RampProtocol& protocol, double p);

struct ModeResult {
  double defect = 0.0;
  double log_norm = 0.0;
  std::int64_t steps_used = 0;
};

// Evolves the initial ground state and measures the defect observable.
ModeResult evolve_defect(const RampProtocol& protocol, double p, double tol = kDefaultTrotterTol);

// Two-level kinds only.
double sigma_z_defect(const RampProtocol& protocol, double p, double tol = kDefaultTrotterTol);

// EP4 only: (M_y(p, tau), M_y^eq(p)).
std::pair<double, double> my_defect(const RampProtocol& protocol, double p,
                                    double tol = kDefaultTrotterTol);

// Evaluates every quadrature node (parallel map over `workers` threads,
// 0 = hardware concurrency). Sample order follows the rule's node order.
// `equilibria`, when given, must hold one equilibrium value per node.
DefectProfile build_profile(const RampProtocol& protocol, const QuadratureRule& rule,
                            double tol = kDefaultTrotterTol, unsigned workers = 0,
                            const std::vector<double>* equilibria = nullptr);

// n = (2 pi)^-1 sum w_i defect_i and n_eq likewise over the equilibria.
DensityPair total_defect_density(const DefectProfile& profile);

struct RegionSplitOptions {
  int order = 32;
  double p_min = 0.0;
  double p_max_factor = 4.0;  // right region ends at p_max_factor * scale
  double tol = kDefaultTrotterTol;
  unsigned workers = 0;
};

struct RegionDensities {
  DensityPair left;   // (p_min, scale)
  DensityPair right;  // (scale, p_max_factor * scale)
  DefectProfile left_profile;
  DefectProfile right_profile;
};

// Full non-Hermitian drive sampled separately on both sides of the final
// exceptional point p = scale.
RegionDensities region_split_density(const RampProtocol& protocol,
                                     const RegionSplitOptions& options = {});

// Runs fn(i) for i in [0, count) across worker threads.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

}  // namespace nhkz
