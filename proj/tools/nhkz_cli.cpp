// Command-line front end over the shared-library API.
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "nhkz/nhkz.h"

namespace {

std::string escape(const char* s) {
  std::string out;
  for (; *s; ++s) {
    const char c = *s;
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

// One JSON object per line on stderr so wrappers can parse failures.
int report(int status, const char* command) {
  if (status == NHKZ_OK) return 0;
  std::fprintf(stderr, "{\"error\":\"%s\",\"code\":%d,\"command\":\"%s\",\"message\":\"%s\"}\n",
               nhkz_status_name(status), status, command, escape(nhkz_last_error()).c_str());
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-Hermitian Kibble-Zurek simulator and optical compiler"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  int workers = -1;
  long long seed = -1;

  app.add_option("--config", config_path, "Experiment config file");
  app.add_option("--out", out_dir, "Output directory (overrides config)");
  app.add_option("--workers", workers, "Worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "Compiler seed (overrides config)")->check(CLI::NonNegativeNumber);
  app.add_flag_callback("--version", [] {
    std::printf("%s\n", nhkz_version());
    throw CLI::Success();
  });

  auto* profile = app.add_subcommand("profile", "Per-momentum defect profiles, one CSV per tau");
  auto* scaling = app.add_subcommand("scaling", "Defect density versus tau with power-law fit");
  auto* compile = app.add_subcommand("compile", "Wave-plate parameters for the mode propagators");
  auto* spectrum = app.add_subcommand("spectrum", "Instantaneous spectrum along the ramp");
  auto* selftest = app.add_subcommand("selftest", "Consistency checks of the numerical core");
  for (auto* sub : {profile, scaling, compile, spectrum, selftest}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  const std::string command = app.get_subcommands().front()->get_name();

  nhkz_config* cfg = nullptr;
  int status = NHKZ_OK;
  if (!config_path.empty()) {
    status = nhkz_config_load(config_path.c_str(), &cfg);
  } else if (command == "selftest") {
    status = nhkz_config_parse("protocol = hermitian\n", &cfg);
  } else {
    std::fprintf(stderr, "{\"error\":\"config\",\"code\":%d,\"command\":\"%s\",\"message\":\"--config is required\"}\n",
                 NHKZ_CONFIG, command.c_str());
    return NHKZ_CONFIG;
  }
  if (status != NHKZ_OK) return report(status, command.c_str());
  if (!out_dir.empty()) status = nhkz_config_set_output(cfg, out_dir.c_str());
  if (status == NHKZ_OK && workers >= 0) status = nhkz_config_set_workers(cfg, static_cast<unsigned>(workers));
  if (status == NHKZ_OK && seed >= 0) status = nhkz_config_set_seed(cfg, static_cast<uint64_t>(seed));

  if (status == NHKZ_OK) {
    if (command == "profile") {
      int files = 0;
      status = nhkz_run_profile(cfg, &files);
      if (status == NHKZ_OK) std::printf("profile: wrote %d files\n", files);
    } else if (command == "scaling") {
      nhkz_scaling_summary s{};
      status = nhkz_run_scaling(cfg, &s);
      if (status == NHKZ_OK) {
        for (int r = 0; r < s.n_regions; ++r)
          std::printf("scaling %s region %d: alpha = %.6g +- %.2g (r^2 %.6f), predicted %.6g\n",
                      nhkz_config_protocol(cfg), r, s.alpha[r], s.alpha_stderr[r], s.r_squared[r],
                      s.predicted_exponent);
      }
    } else if (command == "compile") {
      int targets = 0, unmet = 0;
      status = nhkz_run_compile(cfg, &targets, &unmet);
      if (status == NHKZ_OK) {
        std::printf("compile: %d targets, %d above the distance goal\n", targets, unmet);
        if (unmet > 0) std::fprintf(stderr, "{\"warning\":\"d_goal_unmet\",\"count\":%d}\n", unmet);
      }
    } else if (command == "spectrum") {
      status = nhkz_run_spectrum(cfg);
      if (status == NHKZ_OK) std::printf("spectrum: done\n");
    } else {
      int checks = 0, failed = 0;
      status = nhkz_run_selftest(cfg, &checks, &failed);
      if (status == NHKZ_OK) {
        std::printf("selftest: %d checks, %d failed\n", checks, failed);
        if (failed > 0) status = NHKZ_INTERNAL;
      }
    }
  }
  const int code = report(status, command.c_str());
  nhkz_config_free(cfg);
  return code;
}
