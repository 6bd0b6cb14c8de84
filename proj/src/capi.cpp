#include "nhkz/nhkz.h"

#include <exception>
#include <string>

#include "nhkz/experiment.hpp"

struct nhkz_config {
  nhkz::ExperimentConfig value;
  std::string protocol;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const std::string& message) {
  g_last_error = message;
  return code;
}

template <class Fn>
int guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return NHKZ_OK;
  } catch (const nhkz::Error& e) {
    return fail(static_cast<int>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(NHKZ_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(NHKZ_INTERNAL, e.what());
  } catch (...) {
    return fail(NHKZ_INTERNAL, "unknown exception");
  }
}

nhkz::CMatrix read_matrix(const double* data, std::size_t n) {
  nhkz::CMatrix m(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m(r, c) = {data[2 * (r * n + c)], data[2 * (r * n + c) + 1]};
  return m;
}

nhkz_config* make_handle(nhkz::ExperimentConfig cfg) {
  auto* h = new nhkz_config{std::move(cfg), {}};
  h->protocol = std::string(nhkz::protocol_name(h->value.protocol));
  return h;
}

#define NHKZ_REQUIRE(cond, what) \
  if (!(cond)) return fail(NHKZ_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* nhkz_version(void) { return "1.0.0"; }

const char* nhkz_status_name(int status) {
  return nhkz::error_code_name(static_cast<nhkz::ErrorCode>(status));
}

const char* nhkz_last_error(void) { return g_last_error.c_str(); }

int nhkz_config_load(const char* path, nhkz_config** out) {
  NHKZ_REQUIRE(path && out, "nhkz_config_load: null argument");
  *out = nullptr;
  return guarded([&] { *out = make_handle(nhkz::load_config(path)); });
}

int nhkz_config_parse(const char* text, nhkz_config** out) {
  NHKZ_REQUIRE(text && out, "nhkz_config_parse: null argument");
  *out = nullptr;
  return guarded([&] { *out = make_handle(nhkz::parse_config(text)); });
}

void nhkz_config_free(nhkz_config* config) { delete config; }

int nhkz_config_set_output(nhkz_config* config, const char* directory) {
  NHKZ_REQUIRE(config && directory && *directory, "nhkz_config_set_output: null or empty argument");
  return guarded([&] { config->value.output = directory; });
}

int nhkz_config_set_workers(nhkz_config* config, unsigned workers) {
  NHKZ_REQUIRE(config, "nhkz_config_set_workers: null config");
  config->value.workers = workers;
  return NHKZ_OK;
}

int nhkz_config_set_seed(nhkz_config* config, uint64_t seed) {
  NHKZ_REQUIRE(config, "nhkz_config_set_seed: null config");
  config->value.compile_seed = seed;
  return NHKZ_OK;
}

const char* nhkz_config_protocol(const nhkz_config* config) {
  return config ? config->protocol.c_str() : "";
}

int nhkz_run_profile(const nhkz_config* config, int* files_written) {
  NHKZ_REQUIRE(config, "nhkz_run_profile: null config");
  return guarded([&] {
    const auto run = nhkz::run_profile(config->value);
    if (files_written) *files_written = static_cast<int>(run.files.size());
  });
}

int nhkz_run_scaling(const nhkz_config* config, nhkz_scaling_summary* summary) {
  NHKZ_REQUIRE(config, "nhkz_run_scaling: null config");
  nhkz::ScalingRun run;
  int status = guarded([&] { run = nhkz::run_scaling(config->value); });
  if (summary && status == NHKZ_OK) {
    *summary = nhkz_scaling_summary{};
    summary->n_regions = static_cast<int>(run.regions.size());
    summary->predicted_exponent = run.predicted;
    for (int r = 0; r < summary->n_regions && r < NHKZ_MAX_REGIONS; ++r) {
      const auto& fit = *run.regions[r].fit;
      summary->alpha[r] = fit.alpha;
      summary->alpha_stderr[r] = fit.alpha_stderr;
      summary->r_squared[r] = fit.r_squared;
      summary->collapse_quality[r] = run.regions[r].collapse_quality;
    }
  }
  return status;
}

int nhkz_run_compile(const nhkz_config* config, int* targets, int* unmet_goals) {
  NHKZ_REQUIRE(config, "nhkz_run_compile: null config");
  return guarded([&] {
    const auto run = nhkz::run_compile(config->value);
    if (targets) *targets = static_cast<int>(run.targets.size());
    if (unmet_goals) *unmet_goals = run.unmet;
  });
}

int nhkz_run_spectrum(const nhkz_config* config) {
  NHKZ_REQUIRE(config, "nhkz_run_spectrum: null config");
  return guarded([&] { nhkz::run_spectrum(config->value); });
}

int nhkz_run_selftest(const nhkz_config* config, int* checks, int* failed) {
  NHKZ_REQUIRE(config, "nhkz_run_selftest: null config");
  return guarded([&] {
    const auto result = nhkz::run_selftest(config->value);
    int bad = 0;
    for (const auto& c : result) bad += c.passed ? 0 : 1;
    if (checks) *checks = static_cast<int>(result.size());
    if (failed) *failed = bad;
  });
}

int nhkz_spectrum_h4(double p, double delta, double gamma, double energies[8]) {
  NHKZ_REQUIRE(energies, "nhkz_spectrum_h4: null output");
  return guarded([&] {
    const auto branches = nhkz::spectrum_h4_analytic(nhkz::ModeParams{p, delta, gamma});
    for (int i = 0; i < 4; ++i) {
      energies[2 * i] = branches[i].energy.real();
      energies[2 * i + 1] = branches[i].energy.imag();
    }
  });
}

int nhkz_fit_power_law(const double* tau, const double* value, size_t count, double* alpha,
                       double* alpha_stderr, double* r_squared) {
  NHKZ_REQUIRE(tau && value && alpha, "nhkz_fit_power_law: null argument");
  return guarded([&] {
    std::vector<std::pair<double, double>> points;
    for (size_t i = 0; i < count; ++i) points.emplace_back(tau[i], value[i]);
    const auto fit = nhkz::fit_power_law(points);
    *alpha = fit.alpha;
    if (alpha_stderr) *alpha_stderr = fit.alpha_stderr;
    if (r_squared) *r_squared = fit.r_squared;
  });
}

int nhkz_distance(const double* u, const double* v, size_t dimension, double* out) {
  NHKZ_REQUIRE(u && v && out, "nhkz_distance: null argument");
  NHKZ_REQUIRE(dimension >= 1 && dimension <= 64, "nhkz_distance: dimension must be in [1, 64]");
  return guarded([&] { *out = nhkz::distance(read_matrix(u, dimension), read_matrix(v, dimension)); });
}

int nhkz_decompose_2x2(const double target[8], double angles[8], double global[2], double* residual) {
  NHKZ_REQUIRE(target && angles, "nhkz_decompose_2x2: null argument");
  return guarded([&] {
    const nhkz::Mat2 t = read_matrix(target, 2);
    const auto c = nhkz::decompose_2x2(t);
    const double out[8] = {c.r1.theta, c.r1.phi, c.r1.vartheta, c.r2.theta,
                           c.r2.phi,   c.r2.vartheta, c.phi_h, c.phi_v};
    std::copy(out, out + 8, angles);
    if (global) {
      global[0] = c.global_factor.real();
      global[1] = c.global_factor.imag();
    }
    if (residual) *residual = c.residual();
  });
}

}  // extern "C"
