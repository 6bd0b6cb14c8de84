#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nhkz/kz_analysis.hpp"
#include "nhkz/optics.hpp"

namespace nhkz {

// Flat `key = value` configuration; '#' starts a comment. Energies are in
// units of `scale`, times in units of 1/scale. Lists are comma separated.
//
//   protocol             hermitian | pt | full | ep4           (required)
//   scale                > 0                                    [1]
//   tau                  explicit list, strictly increasing
//   tau_log2_min/max/step  used when `tau` is absent            [2, 7, 0.5]
//   p_min, p_max         momentum window; for `full`, p_max ends the right
//                        region (default 3, 8, 4, 0.5 by protocol)
//   quad_order           Gauss-Legendre order per window        [32]
//   trotter_tol          step-doubling tolerance                [1e-8]
//   fit_tau_min/max      inclusive fit window                   [all taus]
//   collapse_a/b         rescaling exponents                    [nu/(z nu + 1), 0]
//   compile_modules      list of cascade lengths                [3]
//   compile_seed, compile_d_goal, compile_max_restarts          [1, 1e-4, 64]
//   compile_tau          targets' ramp times                    [16, 32, 64, 128]
//   compile_p            targets' momenta                       [10 Gauss-Legendre nodes on (0, 1)]
//   spectrum_p           momenta for the spectrum sweep         [0, 0.01, 0.1, 0.5, 1]
//   spectrum_points      gamma samples on [0, scale]             [101]
//   output               output directory                       [out]
//   workers              0 = hardware concurrency               [0]
struct ExperimentConfig {
  ProtocolKind protocol = ProtocolKind::Hermitian;
  double scale = 1.0;
  std::vector<double> taus;
  double p_min = 0.0;
  double p_max = 3.0;
  int quad_order = 32;
  double trotter_tol = kDefaultTrotterTol;
  std::optional<double> fit_tau_min;
  std::optional<double> fit_tau_max;
  double collapse_a = 0.0;
  double collapse_b = 0.0;
  std::vector<int> compile_modules{3};
  std::uint64_t compile_seed = 1;
  double compile_d_goal = 1e-4;
  int compile_max_restarts = 64;
  std::vector<double> compile_taus{16.0, 32.0, 64.0, 128.0};
  std::vector<double> compile_ps = gauss_legendre(10, 0.0, 1.0).nodes;
  std::vector<double> spectrum_ps{0.0, 0.01, 0.1, 0.5, 1.0};
  int spectrum_points = 101;
  std::filesystem::path output = "out";
  unsigned workers = 0;

  RampProtocol protocol_at(double tau) const { return RampProtocol{protocol, scale, tau}; }
};

// Default momentum window upper edge for a protocol, in units of scale.
double default_p_max(ProtocolKind kind);

// Throws Error(Config) naming the offending key.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
void validate_config(const ExperimentConfig& config);

// Shortest round-trip decimal form.
std::string format_double(double value);

struct ProfileRun {
  std::vector<std::filesystem::path> files;
  std::vector<DensityPair> densities;  // one per file
};

struct RegionFit {
  std::string region;  // "all", "left" or "right"
  std::vector<double> taus;
  std::vector<DensityPair> densities;
  std::optional<PowerLawFit> fit;
  std::string fit_error;  // set when the fit failed
  double collapse_quality = 0.0;
};

struct ScalingRun {
  std::vector<RegionFit> regions;
  double predicted = 0.0;
  std::filesystem::path csv;
  std::filesystem::path summary;
};

struct CompileTarget {
  double tau = 0.0;
  double p = 0.0;
  int n_modules = 0;  // 0 for exact two-level decompositions
  double distance = 0.0;  // residual for two-level targets
  bool goal_met = false;
};

struct CompileRun {
  std::vector<CompileTarget> targets;
  std::filesystem::path summary;
  int unmet = 0;
};

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// profile_<protocol>_tau<tau>[_<region>].csv per ramp time.
ProfileRun run_profile(const ExperimentConfig& config);
// scaling_<protocol>.csv and scaling_<protocol>.json. A failed fit is
// recorded in the run and rethrown as FitError after both files are written.
ScalingRun run_scaling(const ExperimentConfig& config);
// compile/<tau>_<p>.json per target plus compile_summary.csv. Unmet goals are
// flagged in the files and counted, not thrown.
CompileRun run_compile(const ExperimentConfig& config);
// spectrum_<protocol>.csv
std::filesystem::path run_spectrum(const ExperimentConfig& config);
// Quick consistency checks of the numerical core; writes selftest.txt.
std::vector<SelftestCheck> run_selftest(const ExperimentConfig& config);

}  // namespace nhkz
