#include "nhkz/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "json.hpp"

namespace nhkz {

namespace fs = std::filesystem;
using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Config parsing

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void config_error(std::string_view key, const std::string& message) {
  throw Error(ErrorCode::Config, "config field '" + std::string(key) + "': " + message);
}

double parse_number(std::string_view key, std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    config_error(key, "expected a number, got '" + std::string(text) + "'");
  if (!std::isfinite(value)) config_error(key, "value must be finite");
  return value;
}

long long parse_integer(std::string_view key, std::string_view text) {
  text = trim(text);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    config_error(key, "expected an integer, got '" + std::string(text) + "'");
  return value;
}

std::vector<double> parse_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_number(key, text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

bool strictly_increasing(const std::vector<double>& v) {
  return std::adjacent_find(v.begin(), v.end(), [](double a, double b) { return !(a < b); }) == v.end();
}

}  // namespace

double default_p_max(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::Hermitian: return 3.0;
    case ProtocolKind::PTSymmetric: return 8.0;
    case ProtocolKind::FullNonHermitian: return 4.0;
    case ProtocolKind::EP4: return 0.5;
  }
  return 1.0;
}

ExperimentConfig parse_config(std::string_view text) {
  std::map<std::string, std::string, std::less<>> entries;
  int line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::Config, "config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw Error(ErrorCode::Config, "config line " + std::to_string(line_no) + ": empty key");
    if (value.empty()) config_error(key, "empty value");
    if (!entries.emplace(key, value).second) config_error(key, "duplicate key");
  }

  ExperimentConfig cfg;
  auto take = [&](std::string_view key) -> std::optional<std::string> {
    auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    std::string v = it->second;
    entries.erase(it);
    return v;
  };

  const auto protocol = take("protocol");
  if (!protocol) config_error("protocol", "required");
  try {
    cfg.protocol = parse_protocol(*protocol);
  } catch (const Error&) {
    config_error("protocol", "unknown protocol '" + *protocol + "' (hermitian, pt, full, ep4)");
  }
  if (auto v = take("scale")) cfg.scale = parse_number("scale", *v);

  if (auto v = take("tau")) {
    cfg.taus = parse_list("tau", *v);
    for (const char* k : {"tau_log2_min", "tau_log2_max", "tau_log2_step"})
      if (entries.count(k)) config_error(k, "conflicts with explicit tau list");
  } else {
    double lo = 2.0, hi = 7.0, step = 0.5;
    if (auto s = take("tau_log2_min")) lo = parse_number("tau_log2_min", *s);
    if (auto s = take("tau_log2_max")) hi = parse_number("tau_log2_max", *s);
    if (auto s = take("tau_log2_step")) step = parse_number("tau_log2_step", *s);
    if (!(step > 0.0)) config_error("tau_log2_step", "must be positive");
    if (!(hi >= lo)) config_error("tau_log2_max", "must be >= tau_log2_min");
    const auto count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (int k = 0; k < count; ++k) cfg.taus.push_back(std::exp2(lo + step * k));
  }

  cfg.p_max = default_p_max(cfg.protocol);
  if (auto v = take("p_min")) cfg.p_min = parse_number("p_min", *v);
  if (auto v = take("p_max")) cfg.p_max = parse_number("p_max", *v);
  if (auto v = take("quad_order")) cfg.quad_order = static_cast<int>(parse_integer("quad_order", *v));
  if (auto v = take("trotter_tol")) cfg.trotter_tol = parse_number("trotter_tol", *v);
  if (auto v = take("fit_tau_min")) cfg.fit_tau_min = parse_number("fit_tau_min", *v);
  if (auto v = take("fit_tau_max")) cfg.fit_tau_max = parse_number("fit_tau_max", *v);

  const CriticalExponents exps = exponents_for(cfg.protocol);
  cfg.collapse_a = exps.nu / (exps.z * exps.nu + 1.0);
  if (auto v = take("collapse_a")) cfg.collapse_a = parse_number("collapse_a", *v);
  if (auto v = take("collapse_b")) cfg.collapse_b = parse_number("collapse_b", *v);

  if (auto v = take("compile_modules")) {
    cfg.compile_modules.clear();
    for (double m : parse_list("compile_modules", *v)) {
      if (m != std::floor(m)) config_error("compile_modules", "entries must be integers");
      cfg.compile_modules.push_back(static_cast<int>(m));
    }
  }
  if (auto v = take("compile_seed")) {
    const long long seed = parse_integer("compile_seed", *v);
    if (seed < 0) config_error("compile_seed", "must be non-negative");
    cfg.compile_seed = static_cast<std::uint64_t>(seed);
  }
  if (auto v = take("compile_d_goal")) cfg.compile_d_goal = parse_number("compile_d_goal", *v);
  if (auto v = take("compile_max_restarts"))
    cfg.compile_max_restarts = static_cast<int>(parse_integer("compile_max_restarts", *v));
  if (auto v = take("compile_tau")) cfg.compile_taus = parse_list("compile_tau", *v);
  if (auto v = take("compile_p")) cfg.compile_ps = parse_list("compile_p", *v);
  if (auto v = take("spectrum_p")) cfg.spectrum_ps = parse_list("spectrum_p", *v);
  if (auto v = take("spectrum_points"))
    cfg.spectrum_points = static_cast<int>(parse_integer("spectrum_points", *v));
  if (auto v = take("output")) cfg.output = *v;
  if (auto v = take("workers")) {
    const long long w = parse_integer("workers", *v);
    if (w < 0) config_error("workers", "must be non-negative");
    cfg.workers = static_cast<unsigned>(w);
  }

  if (!entries.empty()) config_error(entries.begin()->first, "unknown key");
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate_config(const ExperimentConfig& c) {
  if (!(c.scale > 0.0) || !std::isfinite(c.scale)) config_error("scale", "must be positive");
  if (c.taus.empty()) config_error("tau", "at least one ramp time required");
  if (!strictly_increasing(c.taus)) config_error("tau", "must be strictly increasing");
  if (!(c.taus.front() > 0.0)) config_error("tau", "must be positive");
  if (!(c.p_min >= 0.0)) config_error("p_min", "must be >= 0");
  if (!(c.p_max > c.p_min)) config_error("p_max", "must exceed p_min");
  if (c.protocol == ProtocolKind::FullNonHermitian) {
    if (!(c.p_min < 1.0)) config_error("p_min", "must lie below the exceptional point p = scale");
    if (!(c.p_max > 1.0)) config_error("p_max", "must lie above the exceptional point p = scale");
  }
  if (c.quad_order < 1 || c.quad_order > 1024) config_error("quad_order", "must be in [1, 1024]");
  if (!(c.trotter_tol > 0.0)) config_error("trotter_tol", "must be positive");
  if (c.fit_tau_min && c.fit_tau_max && !(*c.fit_tau_min <= *c.fit_tau_max))
    config_error("fit_tau_max", "must be >= fit_tau_min");
  if (c.compile_modules.empty()) config_error("compile_modules", "at least one entry required");
  for (int m : c.compile_modules)
    if (m < 1 || m > 16) config_error("compile_modules", "entries must be in [1, 16]");
  if (!(c.compile_d_goal > 0.0)) config_error("compile_d_goal", "must be positive");
  if (c.compile_max_restarts < 1) config_error("compile_max_restarts", "must be >= 1");
  if (c.compile_taus.empty()) config_error("compile_tau", "at least one entry required");
  for (double t : c.compile_taus)
    if (!(t > 0.0)) config_error("compile_tau", "entries must be positive");
  if (c.compile_ps.empty()) config_error("compile_p", "at least one entry required");
  if (c.spectrum_ps.empty()) config_error("spectrum_p", "at least one entry required");
  if (c.spectrum_points < 2) config_error("spectrum_points", "must be >= 2");
  if (c.output.empty()) config_error("output", "must not be empty");
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw Error(ErrorCode::Internal, "format_double failed");
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// Output helpers

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create directory " + path.parent_path().string());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

class CsvWriter {
 public:
  explicit CsvWriter(std::initializer_list<std::string_view> header) {
    bool first = true;
    for (auto h : header) {
      if (!first) out_ << ',';
      out_ << h;
      first = false;
    }
    out_ << "\r\n";
  }
  CsvWriter& field(double v) { return raw(format_double(v)); }
  CsvWriter& field(std::int64_t v) { return raw(std::to_string(v)); }
  CsvWriter& field(std::string_view s) { return raw(s); }
  void end_row() {
    out_ << "\r\n";
    fresh_ = true;
  }
  std::string str() const { return out_.str(); }

 private:
  CsvWriter& raw(std::string_view s) {
    if (!fresh_) out_ << ',';
    out_ << s;
    fresh_ = false;
    return *this;
  }
  std::ostringstream out_;
  bool fresh_ = true;
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json angles_json(const WavePlateAngles& a) {
  return json{{"theta", a.theta}, {"phi", a.phi}, {"vartheta", a.vartheta}};
}

json complex_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

std::string tau_tag(double tau) { return "tau" + format_double(tau); }

// Profile columns in units of the protocol scale.
std::string profile_csv(const DefectProfile& profile, double scale) {
  CsvWriter csv{"p", "defect", "equilibrium", "defect_minus_eq", "quad_weight", "log_norm", "steps_used"};
  for (const auto& s : profile.samples) {
    csv.field(s.p / scale).field(s.defect).field(s.equilibrium).field(s.defect - s.equilibrium);
    csv.field(s.quad_weight / scale).field(s.log_norm).field(s.steps_used);
    csv.end_row();
  }
  return csv.str();
}

DensityPair scaled(const DensityPair& d, double scale) { return {d.n / scale, d.n_eq / scale}; }

struct TauProfiles {
  std::vector<std::pair<std::string, DefectProfile>> regions;  // label, profile
  std::vector<DensityPair> densities;
};

TauProfiles profiles_at(const ExperimentConfig& cfg, double tau) {
  const RampProtocol protocol = cfg.protocol_at(tau / cfg.scale);
  TauProfiles out;
  if (cfg.protocol == ProtocolKind::FullNonHermitian) {
    RegionSplitOptions opts;
    opts.order = cfg.quad_order;
    opts.p_min = cfg.p_min * cfg.scale;
    opts.p_max_factor = cfg.p_max;
    opts.tol = cfg.trotter_tol;
    opts.workers = cfg.workers;
    RegionDensities r = region_split_density(protocol, opts);
    out.regions.emplace_back("left", std::move(r.left_profile));
    out.regions.emplace_back("right", std::move(r.right_profile));
    out.densities = {scaled(r.left, cfg.scale), scaled(r.right, cfg.scale)};
  } else {
    const QuadratureRule rule = gauss_legendre(cfg.quad_order, cfg.p_min * cfg.scale, cfg.p_max * cfg.scale);
    DefectProfile profile = build_profile(protocol, rule, cfg.trotter_tol, cfg.workers);
    out.densities = {scaled(total_defect_density(profile), cfg.scale)};
    out.regions.emplace_back("all", std::move(profile));
  }
  return out;
}

std::string profile_name(const ExperimentConfig& cfg, double tau, const std::string& region) {
  std::string name = "profile_" + std::string(protocol_name(cfg.protocol)) + "_" + tau_tag(tau);
  if (region != "all") name += "_" + region;
  return name + ".csv";
}

}  // namespace

// ---------------------------------------------------------------------------
// Subcommands

ProfileRun run_profile(const ExperimentConfig& cfg) {
  validate_config(cfg);
  ProfileRun run;
  for (double tau : cfg.taus) {
    const TauProfiles tp = profiles_at(cfg, tau);
    for (std::size_t r = 0; r < tp.regions.size(); ++r) {
      const fs::path path = cfg.output / profile_name(cfg, tau, tp.regions[r].first);
      write_file(path, profile_csv(tp.regions[r].second, cfg.scale));
      run.files.push_back(path);
      run.densities.push_back(tp.densities[r]);
    }
  }
  return run;
}

ScalingRun run_scaling(const ExperimentConfig& cfg) {
  validate_config(cfg);
  if (cfg.taus.size() < 4) config_error("tau", "scaling runs need at least 4 ramp times");
  ScalingRun run;
  run.predicted = predicted_exponent(exponents_for(cfg.protocol));

  std::vector<std::vector<DefectProfile>> region_profiles;
  for (double tau : cfg.taus) {
    TauProfiles tp = profiles_at(cfg, tau);
    if (run.regions.empty()) {
      for (const auto& [label, _] : tp.regions) run.regions.push_back(RegionFit{label, {}, {}, {}, {}, 0.0});
      region_profiles.resize(tp.regions.size());
    }
    for (std::size_t r = 0; r < tp.regions.size(); ++r) {
      run.regions[r].taus.push_back(tau);
      run.regions[r].densities.push_back(tp.densities[r]);
      region_profiles[r].push_back(std::move(tp.regions[r].second));
    }
  }

  const std::string name = "scaling_" + std::string(protocol_name(cfg.protocol));
  const bool split = run.regions.size() > 1;
  CsvWriter csv = split ? CsvWriter{"region", "tau", "n", "n_eq", "abs_n_minus_neq"}
                        : CsvWriter{"tau", "n", "n_eq", "abs_n_minus_neq"};
  std::optional<FitError> failure;
  json regions = json::array();
  for (std::size_t r = 0; r < run.regions.size(); ++r) {
    RegionFit& region = run.regions[r];
    std::vector<std::pair<double, double>> points;
    for (std::size_t k = 0; k < region.taus.size(); ++k) {
      const double tau = region.taus[k];
      const DensityPair& d = region.densities[k];
      if (split) csv.field(region.region);
      csv.field(tau).field(d.n).field(d.n_eq).field(std::abs(d.excess()));
      csv.end_row();
      if ((!cfg.fit_tau_min || tau >= *cfg.fit_tau_min) && (!cfg.fit_tau_max || tau <= *cfg.fit_tau_max))
        points.emplace_back(tau, std::abs(d.excess()));
    }
    json entry{{"region", region.region}};
    try {
      region.fit = fit_power_law(points);
      entry["alpha"] = region.fit->alpha;
      entry["alpha_stderr"] = region.fit->alpha_stderr;
      entry["r_squared"] = region.fit->r_squared;
      entry["amplitude"] = region.fit->amplitude;
      entry["tau_min"] = region.fit->tau_range.first;
      entry["tau_max"] = region.fit->tau_range.second;
    } catch (const FitError& e) {
      region.fit_error = e.what();
      entry["alpha"] = nullptr;
      entry["error"] = region.fit_error;
      if (!failure) failure.emplace("region " + region.region + ": " + region.fit_error, e.tau());
    }
    json collapse{{"a", cfg.collapse_a}, {"b", cfg.collapse_b}};
    try {
      region.collapse_quality = collapse_rescale(region_profiles[r], cfg.collapse_a, cfg.collapse_b).quality;
      collapse["quality"] = region.collapse_quality;
    } catch (const Error& e) {
      region.collapse_quality = std::nan("");
      collapse["quality"] = nullptr;
      collapse["error"] = e.what();
    }
    entry["collapse"] = collapse;
    regions.push_back(entry);
  }

  run.csv = cfg.output / (name + ".csv");
  run.summary = cfg.output / (name + ".json");
  write_file(run.csv, csv.str());
  const json summary{{"protocol", protocol_name(cfg.protocol)},
                     {"scale", cfg.scale},
                     {"quad_order", cfg.quad_order},
                     {"p_window", {cfg.p_min, cfg.p_max}},
                     {"predicted_exponent", run.predicted},
                     {"regions", regions}};
  write_file(run.summary, dump(summary));
  if (failure) throw *failure;
  return run;
}

CompileRun run_compile(const ExperimentConfig& cfg) {
  validate_config(cfg);
  struct Job {
    double tau, p;
  };
  std::vector<Job> jobs;
  for (double tau : cfg.compile_taus)
    for (double p : cfg.compile_ps) jobs.push_back({tau, p});

  const bool two_level = cfg.protocol != ProtocolKind::EP4;
  std::vector<json> documents(jobs.size());
  std::vector<std::vector<CompileTarget>> results(jobs.size());
  parallel_for(jobs.size(), cfg.workers, [&](std::size_t i) {
    const Job job = jobs[i];
    const RampProtocol protocol = cfg.protocol_at(job.tau / cfg.scale);
    std::int64_t steps = 0;
    const CMatrix target = converged_propagator(protocol, job.p * cfg.scale, cfg.trotter_tol, &steps);
    json doc{{"protocol", protocol_name(cfg.protocol)}, {"tau", job.tau}, {"p", job.p}, {"trotter_steps", steps}};
    if (two_level) {
      const WavePlateCircuit2 c = decompose_2x2(target);
      const double residual = c.residual() / target.norm();
      doc["r1"] = angles_json(c.r1);
      doc["r2"] = angles_json(c.r2);
      doc["phi_h"] = c.phi_h;
      doc["phi_v"] = c.phi_v;
      doc["global_factor"] = complex_json(c.global_factor);
      doc["relative_residual"] = residual;
      results[i].push_back({job.tau, job.p, 0, residual, residual < 1e-10});
    } else {
      json cascades = json::array();
      std::optional<ModuleCascade4> previous;
      std::vector<int> counts = cfg.compile_modules;
      std::sort(counts.begin(), counts.end());
      for (int n : counts) {
        CompileOptions opts;
        opts.n_modules = n;
        opts.seed = cfg.compile_seed;
        opts.d_goal = cfg.compile_d_goal;
        opts.max_restarts = cfg.compile_max_restarts;
        opts.warm_start = previous;
        const ModuleCascade4 c = compile_4x4(target, opts);
        json modules = json::array();
        for (const auto& m : c.modules)
          modules.push_back({{"first_upper", angles_json(m.first_upper)},
                             {"first_lower", angles_json(m.first_lower)},
                             {"phi_u", m.phi_u},
                             {"phi_m", m.phi_m},
                             {"phi_l", m.phi_l},
                             {"second_upper", angles_json(m.second_upper)},
                             {"second_lower", angles_json(m.second_lower)}});
        cascades.push_back({{"n_modules", n},
                            {"modules", modules},
                            {"global_factor", complex_json(c.global_factor)},
                            {"distance", c.achieved_distance},
                            {"goal_met", c.goal_met},
                            {"restarts_used", c.restarts_used}});
        results[i].push_back({job.tau, job.p, n, c.achieved_distance, c.goal_met});
        previous = c;
      }
      doc["d_goal"] = cfg.compile_d_goal;
      doc["seed"] = cfg.compile_seed;
      doc["cascades"] = cascades;
    }
    documents[i] = std::move(doc);
  });

  CompileRun run;
  CsvWriter csv{"tau", "p", "n_modules", "distance", "goal_met"};
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    write_file(cfg.output / "compile" / (tau_tag(jobs[i].tau) + "_p" + format_double(jobs[i].p) + ".json"),
               dump(documents[i]));
    for (const auto& t : results[i]) {
      csv.field(t.tau).field(t.p).field(std::int64_t{t.n_modules}).field(t.distance);
      csv.field(t.goal_met ? "true" : "false");
      csv.end_row();
      if (!t.goal_met) ++run.unmet;
      run.targets.push_back(t);
    }
  }
  run.summary = cfg.output / "compile_summary.csv";
  write_file(run.summary, csv.str());
  return run;
}

fs::path run_spectrum(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const fs::path path = cfg.output / ("spectrum_" + std::string(protocol_name(cfg.protocol)) + ".csv");
  const RampProtocol protocol = cfg.protocol_at(1.0);
  const bool four = cfg.protocol == ProtocolKind::EP4;
  CsvWriter csv = four ? CsvWriter{"p", "gamma_re", "gamma_im", "re_pp", "im_pp", "re_mp", "im_mp",
                                   "re_pm", "im_pm", "re_mm", "im_mm"}
                       : CsvWriter{"p", "gamma_re", "gamma_im", "re_plus", "im_plus", "re_minus", "im_minus"};
  for (double p : cfg.spectrum_ps) {
    for (int k = 0; k < cfg.spectrum_points; ++k) {
      // ramp fraction t/tau with tau = 1
      const double s = static_cast<double>(k) / static_cast<double>(cfg.spectrum_points - 1);
      ModeParams m = protocol.params_at(p * cfg.scale, s);
      csv.field(p).field(m.gamma.real() / cfg.scale).field(m.gamma.imag() / cfg.scale);
      if (four) {
        for (const auto& b : spectrum_h4_analytic(m))
          csv.field(b.energy.real() / cfg.scale).field(b.energy.imag() / cfg.scale);
      } else {
        const auto [plus, minus] = spectrum_h2(m);
        csv.field(plus.real() / cfg.scale).field(plus.imag() / cfg.scale);
        csv.field(minus.real() / cfg.scale).field(minus.imag() / cfg.scale);
      }
      csv.end_row();
    }
  }
  write_file(path, csv.str());
  return path;
}

std::vector<SelftestCheck> run_selftest(const ExperimentConfig& cfg) {
  std::vector<SelftestCheck> checks;
  auto record = [&](std::string name, bool ok, double value) {
    checks.push_back({std::move(name), ok, format_double(value)});
  };

  {  // order-n Gauss-Legendre is exact through degree 2n - 1
    const QuadratureRule r = gauss_legendre(32, 0.0, 1.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) sum += r.weights[i] * std::pow(r.nodes[i], 63);
    const double err = std::abs(sum - 1.0 / 64.0);
    record("quadrature_exact_degree_63", err < 1e-14, err);
  }
  {  // closed-form bands against the dense eigensolver, away from exceptional points
    double worst = 0.0;
    for (double p : {0.3, 0.7, 1.9})
      for (double g : {0.0, 0.25, 0.6, 1.3}) {
        const ModeParams m{p, 1.0, g};
        const CVector num = numerical_eigenvalues(build_h4(m));
        for (const auto& b : spectrum_h4_analytic(m)) {
          double best = 1e300;
          for (Eigen::Index i = 0; i < num.size(); ++i) best = std::min(best, std::abs(num(i) - b.energy));
          worst = std::max(worst, best);
        }
      }
    record("h4_spectrum_vs_eigensolver", worst < 1e-10, worst);
  }
  {  // two-level decomposition round trip
    std::mt19937_64 rng(cfg.compile_seed);
    std::normal_distribution<double> g;
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      Mat2 t;
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) t(r, c) = cplx(g(rng), g(rng));
      worst = std::max(worst, decompose_2x2(t).residual() / t.norm());
    }
    record("decompose_2x2_round_trip", worst < 1e-10, worst);
  }
  {  // identity padding module
    const double d = distance(OpticalModule::identity().matrix(), Mat4::Identity());
    record("identity_module", d < 1e-14, d);
  }
  {  // midpoint product converges at second order
    const RampProtocol pr{ProtocolKind::PTSymmetric, 1.0, 4.0};
    const CMatrix ref = trotter_propagator(pr, 0.5, 1 << 14);
    const double e1 = (trotter_propagator(pr, 0.5, 64) - ref).norm();
    const double e2 = (trotter_propagator(pr, 0.5, 128) - ref).norm();
    const double order = std::log2(e1 / e2);
    record("trotter_order", std::abs(order - 2.0) < 0.2, order);
  }
  {  // Hermitian ramp stays unitary
    const RampProtocol pr{ProtocolKind::Hermitian, 1.0, 8.0};
    const double defect = unitarity_defect(trotter_propagator(pr, 0.4, 2048));
    record("hermitian_unitarity", defect < 1e-10, defect);
  }
  {  // M_y expectation is bounded by its spectral radius
    const RampProtocol pr{ProtocolKind::EP4, 1.0, 8.0};
    const double bound = 0.5 * (1.0 + std::sqrt(5.0));
    double worst = 0.0;
    for (double p : {0.05, 0.2, 0.45}) worst = std::max(worst, std::abs(evolve_defect(pr, p).defect));
    record("my_spectral_bound", worst <= bound + 1e-12, worst);
  }

  std::ostringstream out;
  for (const auto& c : checks) out << (c.passed ? "PASS " : "FAIL ") << c.name << " " << c.detail << "\n";
  write_file(cfg.output / "selftest.txt", out.str());
  return checks;
}

}  // namespace nhkz
