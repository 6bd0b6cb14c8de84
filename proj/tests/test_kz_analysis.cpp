#include "doctest.h"
#include "oracles.hpp"

#include "nhkz/kz_analysis.hpp"

using namespace nhkz;

namespace {

std::vector<std::pair<double, double>> synthetic(double c, double alpha, double wobble = 0.0) {
  std::vector<std::pair<double, double>> pts;
  for (int k = 0; k <= 10; ++k) {
    const double tau = std::exp2(2.0 + 0.5 * k);
    pts.emplace_back(tau, c * std::pow(tau, -alpha) * (1.0 + wobble * std::sin(tau)));
  }
  return pts;
}

}  // namespace

TEST_SUITE("kz_analysis") {

TEST_CASE("exact power law") {
  const PowerLawFit f = fit_power_law(synthetic(3.0, 2.0 / 3.0));
  CHECK(std::abs(f.alpha - 2.0 / 3.0) < 1e-12);
  CHECK(std::abs(f.amplitude - 3.0) < 1e-12);
  CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.alpha_stderr < 1e-10);
  CHECK(f.tau_range.first == 4.0);
  CHECK(f.tau_range.second == 128.0);
}

TEST_CASE("perturbed power law") {
  const PowerLawFit f = fit_power_law(synthetic(0.4, 1.0, 0.01));
  CHECK(std::abs(f.alpha - 1.0) < 0.01);
  CHECK(f.r_squared <= 1.0);
  CHECK(f.r_squared >= 0.0);
  CHECK(f.alpha_stderr >= 0.0);
}

TEST_CASE("scale covariance") {
  const auto pts = synthetic(0.7, 0.55, 0.05);
  auto scaled = pts;
  for (auto& [t, v] : scaled) v *= 12.5;
  const PowerLawFit a = fit_power_law(pts), b = fit_power_law(scaled);
  CHECK(std::abs(a.alpha - b.alpha) < 1e-12);
  CHECK(b.amplitude == doctest::Approx(12.5 * a.amplitude).epsilon(1e-12));
}

TEST_CASE("fit rejections") {
  auto pts = synthetic(1.0, 0.5);
  pts[3].second = -1e-3;
  try {
    fit_power_law(pts);
    FAIL("expected FitError");
  } catch (const FitError& e) {
    CHECK(e.tau() == pts[3].first);
    CHECK(e.code() == ErrorCode::FitFailure);
  }
  CHECK_THROWS_AS(fit_power_law({{1, 1}, {2, 0.5}, {4, 0.25}}), FitError);
}

TEST_CASE("predicted exponents") {
  CHECK(predicted_exponent({1, 1, 0.5, true}) == doctest::Approx(2.0 / 3.0));
  CHECK(predicted_exponent({1, 0.5, 1, true}) == doctest::Approx(1.0));
  CHECK(predicted_exponent({1, 0.25, 2, true}) == doctest::Approx(5.0 / 3.0));
  CHECK(predicted_exponent({1, 1, 1, false}) == doctest::Approx(0.5));
  CHECK(predicted_exponent({1, 1, 0.5, false}) == doctest::Approx(1.0 / 3.0));
  CHECK(predicted_exponent(exponents_for(ProtocolKind::Hermitian)) == doctest::Approx(0.5));
  CHECK(predicted_exponent(exponents_for(ProtocolKind::EP4)) == doctest::Approx(5.0 / 3.0));
  CHECK(CriticalExponents{1, 0.25, 2, true}.effective_dimension() == 1.25);
  CHECK_THROWS_AS(predicted_exponent({0, 1, 1, false}), Error);
}

TEST_CASE("data collapse of Hermitian profiles") {
  std::vector<DefectProfile> profiles;
  for (double tau : {16.0, 32.0, 64.0}) {
    const RampProtocol pr{ProtocolKind::Hermitian, 1.0, tau};
    // denser rule resolves the oscillating tail for interpolation
    profiles.push_back(build_profile(pr, gauss_legendre(96, 0.0, 3.0)));
  }
  const CollapseResult rescaled = collapse_rescale(profiles, 0.5, 0.0);
  const CollapseResult raw = collapse_rescale(profiles, 0.0, 0.0);
  CHECK(rescaled.curves.size() == 3);
  CHECK(rescaled.quality < 0.05);
  CHECK(raw.quality > rescaled.quality);

  CHECK(collapse_rescale({profiles[0]}, 0.5, 0.0).quality == 0.0);

  // disjoint scaled ranges
  DefectProfile far = profiles[0];
  for (auto& s : far.samples) s.p += 1e6;
  far.protocol.tau = 20.0;
  CHECK_THROWS_AS(collapse_rescale({profiles[0], far}, 0.5, 0.0), Error);
}

}
