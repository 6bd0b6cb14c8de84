// Acceptance suite: one PASS/FAIL line per criterion.
//   nhkz_acceptance            run all criteria
//   nhkz_acceptance 3 5        run the listed criteria
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "nhkz/experiment.hpp"
#include "oracles.hpp"

using namespace nhkz;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) { return format_double(v); }

fs::path scratch_dir(int id) {
  const fs::path dir = fs::temp_directory_path() / ("nhkz_acceptance_" + std::to_string(id));
  fs::remove_all(dir);
  return dir;
}

ScalingRun scaling_for(const std::string& protocol, int id) {
  ExperimentConfig cfg = parse_config("protocol = " + protocol + "\n");
  cfg.output = scratch_dir(id);
  ScalingRun run = run_scaling(cfg);
  fs::remove_all(cfg.output);
  return run;
}

bool within(double v, double lo, double hi) { return v >= lo && v <= hi; }

Outcome criterion_1() {
  const auto t0 = Clock::now();
  const ScalingRun run = scaling_for("hermitian", 1);
  const double secs = seconds_since(t0);
  const double a = run.regions.at(0).fit->alpha;
  return {within(a, 0.47, 0.53) && secs < 60.0 && run.regions[0].taus.size() == 11,
          "alpha=" + fmt(a) + " target 0.50+-0.03, runtime " + fmt(secs) + "s (< 60s)"};
}

Outcome criterion_2() {
  const double a = scaling_for("pt", 2).regions.at(0).fit->alpha;
  return {within(a, 0.63, 0.71), "alpha=" + fmt(a) + " target 0.67+-0.04"};
}

Outcome criterion_3() {
  const ScalingRun run = scaling_for("full", 3);
  const double l = run.regions.at(0).fit->alpha, r = run.regions.at(1).fit->alpha;
  return {within(l, 0.9, 1.1) && within(r, 0.9, 1.1),
          "alpha_left=" + fmt(l) + " alpha_right=" + fmt(r) + " target 1.00+-0.10 in both regions"};
}

Outcome criterion_4() {
  const auto t0 = Clock::now();
  const double a = scaling_for("ep4", 4).regions.at(0).fit->alpha;
  const double secs = seconds_since(t0);
  return {within(a, 5.0 / 3.0 - 0.15, 5.0 / 3.0 + 0.15) && secs < 600.0,
          "alpha=" + fmt(a) + " target 1.667+-0.15, runtime " + fmt(secs) + "s (< 600s)"};
}

Outcome criterion_5() {
  const RampProtocol pr{ProtocolKind::EP4, 1.0, 1.0};
  const double pref = -std::sqrt(1.0 + std::sqrt(2.0));
  double lo = 1e300, hi = -1e300;
  for (double p : {1e-4, 3e-5, 1e-5, 1e-6, 1e-7, 1e-8, -1e-4, -1e-6}) {
    const double r = equilibrium_value(pr, p) / (pref * std::pow(std::abs(p), 0.25));
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return {lo >= 0.99 && hi <= 1.01, "ratio range [" + fmt(lo) + ", " + fmt(hi) + "] target [0.99, 1.01]"};
}

Outcome criterion_6() {
  double worst = 0.0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      for (int k = 0; k < 10; ++k) {
        const ModeParams m{-2.0 + 0.43 * i + 0.011, 0.15 + 0.29 * j, -1.4 + 0.31 * k + 0.017};
        CVector an(4);
        const auto br = spectrum_h4_analytic(m);
        for (int b = 0; b < 4; ++b) an(b) = br[b].energy;
        worst = std::max(worst, oracle::multiset_distance(oracle::eigenvalues(build_h4(m)), an));
      }
  auto largest = [](double p) {
    double best = 0.0;
    for (const auto& b : spectrum_h4_analytic({p, 1.0, 1.0})) best = std::max(best, std::abs(b.energy));
    return best;
  };
  const double z = std::log(largest(1e-3) / largest(1e-6)) / std::log(1e3);
  auto gap = [](double dg) {
    const CVector ev = oracle::eigenvalues(build_h4({0.0, 1.0, 1.0 + dg}));
    double best = 1e300;
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b) best = std::min(best, std::abs(ev(a) - ev(b)));
    return best;
  };
  const double znu = std::log(gap(1e-2) / gap(1e-5)) / std::log(1e3);
  return {worst < 1e-10 && std::abs(z - 0.25) <= 0.01 && std::abs(znu - 0.5) <= 0.01,
          "max eigenvalue deviation=" + fmt(worst) + " (< 1e-10), dispersion slope=" + fmt(z) +
              " (0.25+-0.01), gap slope=" + fmt(znu) + " (0.50+-0.01)"};
}

Outcome criterion_7() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Mat2 t;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) t(r, c) = std::polar(std::sqrt(u(rng)), 2.0 * kPi * u(rng));
    worst = std::max(worst, decompose_2x2(t).residual());
  }
  return {worst < 1e-10, "max residual=" + fmt(worst) + " over 1000 targets (< 1e-10)"};
}

Outcome criterion_8() {
  ExperimentConfig cfg = parse_config("protocol = ep4\ncompile_modules = 3\n");
  cfg.output = scratch_dir(8);
  const auto t0 = Clock::now();
  const CompileRun run = run_compile(cfg);
  fs::remove_all(cfg.output);
  double worst = 0.0;
  for (const auto& t : run.targets) worst = std::max(worst, t.distance);
  return {worst < 1e-4 && run.targets.size() == 40,
          "max distance=" + fmt(worst) + " over " + std::to_string(run.targets.size()) +
              " (p, tau) targets with 3 modules (< 1e-4), " + fmt(seconds_since(t0)) + "s"};
}

Outcome criterion_9() {
  struct Case { ProtocolKind kind; double p, tau; };
  double worst = 0.0;
  for (const Case c : {Case{ProtocolKind::Hermitian, 0.5, 8.0}, Case{ProtocolKind::PTSymmetric, 1.0, 4.0},
                       Case{ProtocolKind::FullNonHermitian, 0.6, 8.0}, Case{ProtocolKind::EP4, 0.2, 8.0}}) {
    const RampProtocol pr{c.kind, 1.0, c.tau};
    const auto h = [&](double t) { return pr.hamiltonian(c.p, t); };
    const CMatrix ref = oracle::ode_propagator(h, c.tau, pr.dimension());
    const CMatrix u = converged_propagator(pr, c.p, 1e-10);
    worst = std::max(worst, (u - ref).norm() / ref.norm());
  }
  double unitarity = 0.0;
  for (double p : {0.0, 0.4, 3.0})
    unitarity = std::max(unitarity, unitarity_defect(trotter_propagator({ProtocolKind::Hermitian, 1.0, 16.0}, p, 4096)));
  const RampProtocol pt{ProtocolKind::PTSymmetric, 1.0, 4.0};
  const CMatrix ref = oracle::ode_propagator([&](double t) { return pt.hamiltonian(0.7, t); }, 4.0, 2);
  const double e1 = (trotter_propagator(pt, 0.7, 32) - ref).norm();
  const double e2 = (trotter_propagator(pt, 0.7, 512) - ref).norm();
  const double order = std::log(e1 / e2) / std::log(16.0);
  return {worst < 1e-8 && unitarity < 1e-10 && std::abs(order - 2.0) <= 0.2,
          "max relative deviation from ODE oracle=" + fmt(worst) + " (< 1e-8), unitarity defect=" + fmt(unitarity) +
              " (< 1e-10), observed order=" + fmt(order) + " (2.0+-0.2)"};
}

Outcome criterion_10() {
  const RampProtocol pr{ProtocolKind::FullNonHermitian, 1.0, 16.0};
  const RegionDensities r = region_split_density(pr);
  double lowest = 1e300, at = 0.0;
  for (const auto* prof : {&r.left_profile, &r.right_profile})
    for (const auto& s : prof->samples)
      if (s.defect - s.equilibrium < lowest) {
        lowest = s.defect - s.equilibrium;
        at = s.p;
      }
  return {lowest < 0.0, "min sigma_z - sigma_z^eq=" + fmt(lowest) + " at p=" + fmt(at) + " (< 0 required)"};
}

const std::map<int, std::pair<std::string, std::function<Outcome()>>>& registry() {
  static const std::map<int, std::pair<std::string, std::function<Outcome()>>> r{
      {1, {"Hermitian ramp exponent", criterion_1}},
      {2, {"PT-symmetric ramp exponent", criterion_2}},
      {3, {"full non-Hermitian drive exponents", criterion_3}},
      {4, {"EP4 ramp exponent", criterion_4}},
      {5, {"M_y equilibrium asymptotics", criterion_5}},
      {6, {"four-band spectral oracle and critical slopes", criterion_6}},
      {7, {"2x2 compiler exactness", criterion_7}},
      {8, {"4x4 compiler distance on the EP4 grid", criterion_8}},
      {9, {"propagator correctness", criterion_9}},
      {10, {"non-Hermitian undershoot signature", criterion_10}},
  };
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty())
    for (const auto& [id, _] : registry()) ids.push_back(id);

  int failures = 0;
  for (int id : ids) {
    const auto it = registry().find(id);
    if (it == registry().end()) {
      std::printf("criterion %d: unknown\n", id);
      ++failures;
      continue;
    }
    Outcome o;
    try {
      o = it->second.second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %2d %s: %s | %s\n", id, o.passed ? "PASS" : "FAIL", it->second.first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
    failures += o.passed ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
