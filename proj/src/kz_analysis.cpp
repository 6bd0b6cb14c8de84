#include "nhkz/kz_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <gsl/gsl_fit.h>

namespace nhkz {

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 4)
    throw FitError("fit_power_law: need at least 4 points", std::numeric_limits<double>::quiet_NaN());
  std::vector<double> lx, ly;
  lx.reserve(points.size());
  ly.reserve(points.size());
  for (const auto& [tau, value] : points) {
    if (!(tau > 0.0)) throw FitError("fit_power_law: non-positive tau " + std::to_string(tau), tau);
    if (!(value > 0.0))
      throw FitError("fit_power_law: non-positive value at tau=" + std::to_string(tau), tau);
    lx.push_back(std::log(tau));
    ly.push_back(std::log(value));
  }
  double c0 = 0, c1 = 0, cov00 = 0, cov01 = 0, cov11 = 0, sumsq = 0;
  gsl_fit_linear(lx.data(), 1, ly.data(), 1, lx.size(), &c0, &c1, &cov00, &cov01, &cov11, &sumsq);
  const double mean = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
  double total = 0.0;
  for (double y : ly) total += (y - mean) * (y - mean);
  PowerLawFit fit;
  fit.alpha = -c1;
  fit.amplitude = std::exp(c0);
  fit.alpha_stderr = std::sqrt(std::max(0.0, cov11));
  fit.r_squared = total > 0.0 ? std::clamp(1.0 - sumsq / total, 0.0, 1.0) : 1.0;
  const auto [lo, hi] = std::minmax_element(points.begin(), points.end());
  fit.tau_range = {lo->first, hi->first};
  return fit;
}

double predicted_exponent(const CriticalExponents& exps) {
  if (!(exps.d > 0.0 && exps.z > 0.0 && exps.nu > 0.0))
    throw Error(ErrorCode::InvalidArgument, "predicted_exponent: exponents must be positive");
  return exps.effective_dimension() * exps.nu / (exps.z * exps.nu + 1.0);
}

CriticalExponents exponents_for(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::Hermitian: return {1.0, 1.0, 1.0, false};
    case ProtocolKind::PTSymmetric: return {1.0, 1.0, 0.5, true};
    case ProtocolKind::FullNonHermitian: return {1.0, 0.5, 1.0, true};
    case ProtocolKind::EP4: return {1.0, 0.25, 2.0, true};
  }
  return {};
}

namespace {

double interpolate(const CollapseCurve& c, double x) {
  auto it = std::lower_bound(c.x.begin(), c.x.end(), x);
  if (it == c.x.begin()) return c.y.front();
  if (it == c.x.end()) return c.y.back();
  const auto j = static_cast<std::size_t>(it - c.x.begin());
  const double t = (x - c.x[j - 1]) / (c.x[j] - c.x[j - 1]);
  return c.y[j - 1] + t * (c.y[j] - c.y[j - 1]);
}

}  // namespace

CollapseResult collapse_rescale(const std::vector<DefectProfile>& profiles, double a, double b) {
  if (profiles.empty()) throw Error(ErrorCode::InvalidArgument, "collapse_rescale: no profiles");
  CollapseResult out;
  for (const auto& prof : profiles) {
    if (prof.samples.size() < 2)
      throw Error(ErrorCode::InvalidArgument, "collapse_rescale: profile needs >= 2 samples");
    CollapseCurve c;
    c.tau = prof.tau();
    const double sx = std::pow(c.tau, a);
    const double sy = std::pow(c.tau, b);
    std::vector<DefectSample> sorted = prof.samples;
    std::sort(sorted.begin(), sorted.end(), [](auto& l, auto& r) { return l.p < r.p; });
    for (const auto& s : sorted) {
      c.x.push_back(s.p * sx);
      c.y.push_back((s.defect - s.equilibrium) * sy);
    }
    out.curves.push_back(std::move(c));
  }
  if (out.curves.size() == 1) return out;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& c : out.curves) {
    lo = std::max(lo, c.x.front());
    hi = std::min(hi, c.x.back());
  }
  if (!(lo < hi)) throw Error(ErrorCode::EmptyOverlap, "collapse_rescale: curves do not overlap");
  constexpr int kGrid = 512;
  double spread = 0.0;
  double amplitude = 0.0;
  for (int g = 0; g <= kGrid; ++g) {
    const double x = lo + (hi - lo) * g / kGrid;
    double ymin = std::numeric_limits<double>::infinity();
    double ymax = -ymin;
    for (const auto& c : out.curves) {
      const double y = interpolate(c, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
      amplitude = std::max(amplitude, std::abs(y));
    }
    spread = std::max(spread, ymax - ymin);
  }
  out.quality = amplitude > 0.0 ? spread / amplitude : 0.0;
  return out;
}

}  // namespace nhkz
