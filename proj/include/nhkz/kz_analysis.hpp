#pragma once

#include <utility>
#include <vector>

#include "nhkz/observables.hpp"

namespace nhkz {

struct PowerLawFit {
  double alpha = 0.0;      // value ~ amplitude * tau^-alpha
  double amplitude = 0.0;
  double alpha_stderr = 0.0;
  double r_squared = 0.0;
  std::pair<double, double> tau_range{0.0, 0.0};
};

class FitError : public Error {
 public:
  FitError(const std::string& what, double tau) : Error(ErrorCode::FitFailure, what), tau_(tau) {}
  double tau() const noexcept { return tau_; }

 private:
  double tau_;
};

// Unweighted least squares on (log tau, log value). Needs at least four
// points with strictly positive values; pass |n - n_eq|.
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points);

struct CriticalExponents {
  double d = 1.0;
  double z = 1.0;
  double nu = 1.0;
  bool nonhermitian = false;

  double effective_dimension() const noexcept { return nonhermitian ? d + z : d; }
};

// d* nu / (z nu + 1) with d* = d + z for exceptional points.
double predicted_exponent(const CriticalExponents& exps);

// Universality data for each ramp kind.
CriticalExponents exponents_for(ProtocolKind kind);

struct CollapseCurve {
  double tau = 0.0;
  std::vector<double> x;  // p * tau^a
  std::vector<double> y;  // (defect - equilibrium) * tau^b
};

struct CollapseResult {
  std::vector<CollapseCurve> curves;
  double quality = 0.0;
};

// Rescales every profile and measures the worst spread between linearly
// interpolated curves on the common scaled-momentum range, normalized by the
// largest |y| there.
CollapseResult collapse_rescale(const std::vector<DefectProfile>& profiles, double a, double b);

}  // namespace nhkz
