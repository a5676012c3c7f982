// Copyright 2026 The macrocat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "macrocat_cli/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "macrocat/analytic.hpp"
#include "macrocat/errors.hpp"
#include "macrocat/serialization.hpp"
#include "macrocat/wigner.hpp"

namespace macrocat::cli {

namespace {

namespace fs = std::filesystem;

struct Invocation {
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

nlohmann::json parse_json_file(const fs::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const IoError& e) {
    throw ConfigError(std::string("cannot read config: ") + e.what());
  }
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
}

// A manifest carries the command and the full input document.
const nlohmann::json& unwrap_manifest(const nlohmann::json& doc) {
  if (doc.is_object() && doc.contains("command") && doc.contains("config")) return doc.at("config");
  return doc;
}

void write_json(const fs::path& path, const nlohmann::json& doc) { write_text_file(path, doc.dump(2) + "\n"); }

class OutputDir {
 public:
  explicit OutputDir(const fs::path& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  fs::path file(const std::string& name) {
    files_.push_back(name);
    return dir_ / name;
  }

  void manifest(const std::string& command, const nlohmann::json& config, std::uint64_t seed) {
    std::vector<std::string> outputs = files_;
    std::sort(outputs.begin(), outputs.end());
    nlohmann::json m = {
        {"command", command},
        {"config", config},
        {"config_hash", fnv1a_hex(config.dump())},
        {"seed", seed},
        {"version", MACROCAT_VERSION},
        {"outputs", outputs},
    };
    write_json(dir_ / "manifest.json", m);
  }

  const fs::path& path() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

nlohmann::json summary(std::optional<double> variance_ratio, std::optional<double> discrimination_error,
                       std::optional<double> concurrence) {
  auto value = [](std::optional<double> v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"variance_ratio", value(variance_ratio)},
          {"discrimination_error", value(discrimination_error)},
          {"concurrence", value(concurrence)}};
}

pipeline::ExperimentConfig resolve_config(const Invocation& inv) {
  pipeline::ExperimentConfig c = inv.config_path.empty() ? pipeline::ExperimentConfig{} : load_config(inv.config_path);
  if (inv.seed) c.seed = *inv.seed;
  c.validate();
  return c;
}

void say(const Invocation& inv, const std::string& line) {
  if (!inv.quiet) std::cout << line << '\n';
}

void cmd_analytic(const Invocation& inv) {
  const auto config = resolve_config(inv);
  const pipeline::ScenarioOptions opt;
  OutputDir out(inv.out_dir);
  const analytic::CountModelParams p0{config.alpha, config.eta_total, 0.0};
  const analytic::CountModelParams p90{config.alpha, config.eta_total, std::numbers::pi / 2.0};
  p0.validate_gaussian();
  const double reach = opt.bin_sigmas * analytic::alice_marginal_std(p0);
  const auto grid = fock::linspace(-reach, reach, 401);
  for (const auto& [name, params] : {std::pair{"curves_phi0.csv", p0}, std::pair{"curves_phi90.csv", p90}}) {
    std::ostringstream os;
    analytic::write_curve_csv(os, analytic::analytic_curve(params, grid));
    write_text_file(out.file(name), os.str());
  }
  const double err = analytic::distinguishability_error(p0, opt.deltaA);
  const double ratio = analytic::variance_peak_ratio(config.eta_total);
  write_json(out.file("summary.json"), summary(ratio, err, std::nullopt));
  write_json(out.file("details.json"),
             {{"deltaA", opt.deltaA},
              {"discrimination_error_likelihood_ratio", err},
              {"discrimination_error_threshold",
               analytic::distinguishability_error(p0, opt.deltaA, analytic::DecisionRule::kThreshold)},
              {"asymptotic_variance", analytic::asymptotic_variance(config.alpha)},
              {"alice_marginal_std", analytic::alice_marginal_std(p0)},
              {"variance_peak_ratio", ratio}});
  out.manifest(inv.command, pipeline::to_json(config), config.seed);
  say(inv, "variance_ratio " + format_double(ratio) + ", discrimination_error " + format_double(err));
}

void cmd_simulate_counts(const Invocation& inv) {
  const auto config = resolve_config(inv);
  OutputDir out(inv.out_dir);
  const auto fig = pipeline::run_counts_scenario(config);
  out.file("curves_phi0.csv");
  out.file("curves_phi90.csv");
  out.file("histograms.csv");
  pipeline::write_fig2_csv(out.path(), fig);
  write_json(out.file("summary.json"), summary(fig.variance_ratio, fig.discrimination_error, std::nullopt));
  write_json(out.file("details.json"), pipeline::fig2_details(fig));
  out.manifest(inv.command, pipeline::to_json(config), config.seed);
  say(inv, "variance_ratio " + format_double(fig.variance_ratio) + ", discrimination_error " +
               format_double(fig.discrimination_error));
}

void cmd_tomography(const Invocation& inv) {
  const auto config = resolve_config(inv);
  OutputDir out(inv.out_dir);
  const auto tomo = pipeline::run_tomography_scenario(config);
  write_json(out.file("summary.json"), summary(std::nullopt, std::nullopt, tomo.result.concurrence));
  write_json(out.file("tomography.json"), tomo::result_to_json(tomo.result));
  write_json(out.file("details.json"), pipeline::tomography_details(tomo));
  out.manifest(inv.command, pipeline::to_json(config), config.seed);
  say(inv, "concurrence " + format_double(tomo.result.concurrence) + " after " +
               std::to_string(tomo.result.iterations) + " iterations");
}

void cmd_roundtrip(const Invocation& inv) {
  const auto config = resolve_config(inv);
  OutputDir out(inv.out_dir);
  constexpr double kAlpha = 2.0;
  std::ostringstream os;
  os << "mismatch_eta,fidelity,concurrence_initial,concurrence_final,concurrence_reference\n";
  nlohmann::json rows = nlohmann::json::array();
  bool monotone = true;
  double previous = 1.0 + 1e-6;
  for (double eta : {1.0, 0.99, 0.95}) {
    const auto r = pipeline::displacement_roundtrip_check(kAlpha, eta);
    os << format_double(eta) << ',' << format_double(r.fidelity) << ',' << format_double(r.concurrence_initial)
       << ',' << format_double(r.concurrence_final) << ',' << format_double(r.concurrence_reference) << '\n';
    monotone = monotone && r.concurrence_final <= r.concurrence_initial + 1e-6 && r.concurrence_final <= previous;
    previous = r.concurrence_final + 1e-6;
    rows.push_back({{"mismatch_eta", eta},
                    {"fidelity", r.fidelity},
                    {"concurrence_initial", r.concurrence_initial},
                    {"concurrence_final", r.concurrence_final},
                    {"concurrence_reference", r.concurrence_reference}});
  }
  write_text_file(out.file("roundtrip.csv"), os.str());
  write_json(out.file("roundtrip.json"), {{"alpha", kAlpha}, {"runs", rows}, {"monotone", monotone}});
  out.manifest(inv.command, pipeline::to_json(config), config.seed);
  say(inv, std::string("roundtrip concurrence ") + (monotone ? "nonincreasing" : "INCREASED"));
  if (!monotone) throw NumericError("roundtrip-check: concurrence increased under local operations");
}

void cmd_wigner(const Invocation& inv) {
  const nlohmann::json doc =
      inv.config_path.empty() ? default_wigner_spec() : unwrap_manifest(parse_json_file(inv.config_path));
  const auto spec = parse_wigner_spec(doc);
  OutputDir out(inv.out_dir);
  const auto w = fock::wigner(spec.rho, spec.x, spec.p);
  {
    std::ostringstream os;
    fock::write_wigner_csv(os, w);
    write_text_file(out.file("wigner.csv"), os.str());
  }
  const auto wm = w.x_marginal();
  const auto qm = fock::quadrature_marginal(spec.rho, 0.0, spec.x);
  std::ostringstream os;
  os << "x,wigner_marginal,quadrature_marginal\n";
  for (std::size_t i = 0; i < spec.x.size(); ++i)
    os << format_double(spec.x[i]) << ',' << format_double(wm[i]) << ',' << format_double(qm[i]) << '\n';
  write_text_file(out.file("marginal.csv"), os.str());
  out.manifest(inv.command, spec.doc, inv.seed.value_or(0));
  say(inv, "wigner integral " + format_double(w.integral()));
}

double number_field(const nlohmann::json& doc, const char* key, double fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc.at(key).is_number()) throw ConfigError(std::string("state spec field '") + key + "' must be a number");
  return doc.at(key).get<double>();
}

std::vector<double> number_array(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key)) return {};
  const auto& a = doc.at(key);
  if (!a.is_array()) throw ConfigError(std::string("state spec field '") + key + "' must be an array");
  std::vector<double> out;
  for (const auto& v : a) {
    if (!v.is_number()) throw ConfigError(std::string("state spec field '") + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

pipeline::ExperimentConfig load_config(const std::filesystem::path& path) {
  return pipeline::config_from_json(unwrap_manifest(parse_json_file(path)));
}

nlohmann::json default_wigner_spec() {
  const double h = 1.0 / std::numbers::sqrt2;
  return {{"kind", "amplitudes"},
          {"dim", 16},
          {"re", {h, h}},
          {"im", {0.0, 0.0}},
          {"displacement", 1.0},
          {"grid", {{"x_min", -8.0}, {"x_max", 8.0}, {"nx", 321}, {"p_min", -8.0}, {"p_max", 8.0}, {"np", 321}}}};
}

WignerSpec parse_wigner_spec(const nlohmann::json& in) {
  if (!in.is_object()) throw ConfigError("state spec must be a JSON object");
  const nlohmann::json defaults = default_wigner_spec();
  nlohmann::json doc = {{"kind", "amplitudes"}, {"dim", defaults.at("dim")}, {"grid", defaults.at("grid")}};
  for (const auto& [key, value] : in.items()) {
    static const std::vector<std::string> known = {"kind", "dim", "re", "im", "displacement", "grid", "nA",
                                                   "alpha", "phi", "density", "mode"};
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown state spec field '" + key + "'");
    }
    if (key == "grid") {
      if (!value.is_object()) throw ConfigError("state spec 'grid' must be an object");
      for (const auto& [gk, gv] : value.items()) doc["grid"][gk] = gv;
    } else {
      doc[key] = value;
    }
  }

  WignerSpec spec;
  const std::string kind = doc.at("kind").is_string() ? doc.at("kind").get<std::string>() : "";
  const double dim_d = number_field(doc, "dim", 16);
  const int dim = static_cast<int>(dim_d);
  if (dim < 2 || dim != dim_d) throw ConfigError("state spec 'dim' must be an integer >= 2");

  if (kind == "amplitudes") {
    const auto re = number_array(doc, "re");
    auto im = number_array(doc, "im");
    if (re.empty()) throw ConfigError("state spec 'amplitudes' needs 're'");
    im.resize(std::max(im.size(), re.size()), 0.0);
    if (re.size() != im.size() || re.size() > static_cast<std::size_t>(dim)) {
      throw ConfigError("state spec amplitudes must have matching lengths <= dim");
    }
    fock::CVector psi = fock::CVector::Zero(dim);
    for (std::size_t n = 0; n < re.size(); ++n) psi(static_cast<Eigen::Index>(n)) = {re[n], im[n]};
    if (!(psi.norm() > 0.0)) throw ConfigError("state spec amplitudes are all zero");
    spec.rho = fock::FockDensityMatrix::from_pure(dim, 1, psi);
  } else if (kind == "conditional_bob") {
    const double na = number_field(doc, "nA", -1.0);
    if (na < 0.0 || std::floor(na) != na) throw ConfigError("state spec 'nA' must be a non-negative integer");
    const double alpha = number_field(doc, "alpha", 0.0);
    const double phi = number_field(doc, "phi", 0.0);
    spec.rho = fock::FockDensityMatrix::from_pure(
        dim, 1, fock::conditional_bob_state(static_cast<long>(na), alpha, phi, dim));
  } else if (kind == "density_matrix") {
    if (!doc.contains("density")) throw ConfigError("state spec 'density_matrix' needs 'density'");
    auto rho = density_from_json(doc.at("density"));
    if (rho.modes() == 2) rho = fock::partial_trace(rho, static_cast<int>(number_field(doc, "mode", 0)));
    spec.rho = rho;
    doc["dim"] = rho.dim();
  } else {
    throw ConfigError("state spec 'kind' must be amplitudes, conditional_bob or density_matrix");
  }

  if (doc.contains("displacement")) {
    const auto& d = doc.at("displacement");
    fock::Complex beta;
    if (d.is_number()) {
      beta = d.get<double>();
    } else if (d.is_array() && d.size() == 2 && d[0].is_number() && d[1].is_number()) {
      beta = {d[0].get<double>(), d[1].get<double>()};
    } else {
      throw ConfigError("state spec 'displacement' must be a number or [re, im]");
    }
    spec.rho = fock::apply_operator(spec.rho, fock::displacement_matrix(beta, spec.rho.dim()), 0);
  }

  const auto& g = doc.at("grid");
  auto count = [&](const char* key) {
    const double v = number_field(g, key, 0);
    if (v < 2 || std::floor(v) != v) throw ConfigError(std::string("grid '") + key + "' must be an integer >= 2");
    return static_cast<std::size_t>(v);
  };
  const double x_min = number_field(g, "x_min", -5), x_max = number_field(g, "x_max", 5);
  const double p_min = number_field(g, "p_min", -5), p_max = number_field(g, "p_max", 5);
  if (!(x_max > x_min && p_max > p_min)) throw ConfigError("grid bounds must be increasing");
  spec.x = fock::linspace(x_min, x_max, count("nx"));
  spec.p = fock::linspace(p_min, p_max, count("np"));
  spec.doc = doc;
  return spec;
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Simulation and analysis of displaced single-photon entanglement", "macrocat"};
  app.require_subcommand(1);
  app.set_version_flag("--version", MACROCAT_VERSION);
  Invocation inv;
  std::uint64_t seed = 0;

  struct Entry {
    const char* name;
    const char* help;
    void (*fn)(const Invocation&);
  };
  const Entry entries[] = {
      {"analytic", "Analytic conditional curves and distinguishability", cmd_analytic},
      {"simulate-counts", "Monte Carlo photon-counting scenario", cmd_simulate_counts},
      {"tomography", "Homodyne tomography scenario", cmd_tomography},
      {"wigner", "Wigner function of a single-mode state spec", cmd_wigner},
      {"roundtrip-check", "Displacement round trip under mismatch loss", cmd_roundtrip},
  };
  std::vector<std::pair<CLI::App*, const Entry*>> subs;
  for (const auto& e : entries) {
    auto* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--config", inv.config_path, "Config JSON or run manifest");
    sub->add_option("--out", inv.out_dir, "Output directory (created if absent)");
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_flag("--quiet", inv.quiet, "Suppress progress output and warnings");
    subs.emplace_back(sub, &e);
  }

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  const Entry* chosen = nullptr;
  for (const auto& [sub, e] : subs) {
    if (sub->parsed()) {
      chosen = e;
      if (sub->count("--seed") > 0) inv.seed = seed;
    }
  }
  inv.command = chosen->name;

  std::optional<ScopedWarningHandler> silence;
  if (inv.quiet) silence.emplace([](const std::string&) {});
  try {
    chosen->fn(inv);
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "macrocat: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidArgument& e) {
    std::cerr << "macrocat: invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    std::cerr << "macrocat: I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "macrocat: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "macrocat: numeric error: " << e.what() << '\n';
    return kNumericError;
  }
}

int run(int argc, char** argv) { return run(std::vector<std::string>(argv, argv + argc)); }

}  // namespace macrocat::cli
