#include "doctest.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include "nhkz/nhkz.h"

namespace fs = std::filesystem;

TEST_SUITE("capi") {

TEST_CASE("config handle lifecycle and errors") {
  nhkz_config* cfg = nullptr;
  CHECK(nhkz_config_parse("protocol = nope\n", &cfg) == NHKZ_CONFIG);
  CHECK(cfg == nullptr);
  CHECK(std::string(nhkz_last_error()).find("protocol") != std::string::npos);
  CHECK(std::string(nhkz_status_name(NHKZ_CONFIG)) == "config");
  CHECK(nhkz_config_load("/nonexistent.cfg", &cfg) == NHKZ_IO);
  CHECK(nhkz_config_parse(nullptr, &cfg) == NHKZ_INVALID_ARGUMENT);

  REQUIRE(nhkz_config_parse("protocol = ep4\nspectrum_points = 5\n", &cfg) == NHKZ_OK);
  CHECK(std::string(nhkz_last_error()).empty());
  CHECK(std::string(nhkz_config_protocol(cfg)) == "ep4");
  const fs::path out = fs::temp_directory_path() / "nhkz_capi";
  fs::remove_all(out);
  CHECK(nhkz_config_set_output(cfg, out.c_str()) == NHKZ_OK);
  CHECK(nhkz_config_set_workers(cfg, 1) == NHKZ_OK);
  CHECK(nhkz_config_set_seed(cfg, 3) == NHKZ_OK);
  CHECK(nhkz_config_set_output(cfg, "") == NHKZ_INVALID_ARGUMENT);
  CHECK(nhkz_run_spectrum(cfg) == NHKZ_OK);
  CHECK(fs::exists(out / "spectrum_ep4.csv"));
  nhkz_config_free(cfg);
  nhkz_config_free(nullptr);
  fs::remove_all(out);
  CHECK(nhkz_run_spectrum(nullptr) == NHKZ_INVALID_ARGUMENT);
}

TEST_CASE("scaling through the C API") {
  nhkz_config* cfg = nullptr;
  REQUIRE(nhkz_config_parse("protocol = pt\ntau = 4, 8, 16, 32\nquad_order = 8\n", &cfg) == NHKZ_OK);
  const fs::path out = fs::temp_directory_path() / "nhkz_capi_scaling";
  nhkz_config_set_output(cfg, out.c_str());
  nhkz_scaling_summary s{};
  CHECK(nhkz_run_scaling(cfg, &s) == NHKZ_OK);
  CHECK(s.n_regions == 1);
  CHECK(s.predicted_exponent == doctest::Approx(2.0 / 3.0));
  CHECK(s.alpha[0] > 0.0);
  CHECK(s.r_squared[0] <= 1.0);
  int files = 0;
  CHECK(nhkz_run_profile(cfg, &files) == NHKZ_OK);
  CHECK(files == 4);
  nhkz_config_free(cfg);
  fs::remove_all(out);
}

TEST_CASE("direct calls") {
  double e[8];
  REQUIRE(nhkz_spectrum_h4(0.0, 1.0, 1.0, e) == NHKZ_OK);
  for (double v : e) CHECK(v == 0.0);

  const double tau[] = {1, 2, 4, 8, 16};
  double value[5];
  for (int i = 0; i < 5; ++i) value[i] = 2.0 / tau[i];
  double alpha = 0, se = 0, r2 = 0;
  CHECK(nhkz_fit_power_law(tau, value, 5, &alpha, &se, &r2) == NHKZ_OK);
  CHECK(alpha == doctest::Approx(1.0));
  CHECK(nhkz_fit_power_law(tau, value, 3, &alpha, &se, &r2) == NHKZ_FIT_FAILURE);

  const double id[8] = {1, 0, 0, 0, 0, 0, 1, 0};
  const double flip[8] = {0, 0, 1, 0, 1, 0, 0, 0};
  double d = -1;
  CHECK(nhkz_distance(id, id, 2, &d) == NHKZ_OK);
  CHECK(d == doctest::Approx(0.0));
  CHECK(nhkz_distance(id, flip, 2, &d) == NHKZ_OK);
  CHECK(d == doctest::Approx(1.0));
  const double zero[8] = {};
  CHECK(nhkz_distance(id, zero, 2, &d) == NHKZ_INVALID_ARGUMENT);

  const double target[8] = {0.3, 0.1, -0.5, 0.2, 0.05, -0.7, 0.4, 0.4};
  double angles[8], global[2], residual = 1;
  CHECK(nhkz_decompose_2x2(target, angles, global, &residual) == NHKZ_OK);
  CHECK(residual < 1e-10);
  CHECK(std::sin(2 * angles[6]) == doctest::Approx(1.0));
}

}
