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

#include "macrocat/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

#include "macrocat/errors.hpp"
#include "macrocat/serialization.hpp"

namespace macrocat::pipeline {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kCompactDim = 8;

bool in_unit_interval(double x) { return std::isfinite(x) && x > 0.0 && x <= 1.0; }

double read_number(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("config field '" + key + "' must be a number");
  return v.get<double>();
}

std::uint64_t read_count(const nlohmann::json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0.0 && d < 0x1.0p64 && std::floor(d) == d) return static_cast<std::uint64_t>(d);
  }
  throw ConfigError("config field '" + key + "' must be a non-negative integer");
}

EtaBudget budget_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config field 'eta_budget' must be an object or null");
  EtaBudget b;
  for (const auto& [key, value] : doc.items()) {
    if (key == "modematch") {
      b.modematch = read_number(value, "eta_budget." + key);
    } else if (key == "optics") {
      b.optics = read_number(value, "eta_budget." + key);
    } else if (key == "detector") {
      b.detector = read_number(value, "eta_budget." + key);
    } else if (key == "undisplacement") {
      b.undisplacement = read_number(value, "eta_budget." + key);
    } else {
      throw ConfigError("unknown eta_budget field '" + key + "'");
    }
  }
  return b;
}

CurveSet analyse_phase(const std::vector<mc::CountRecord>& records, const analytic::CountModelParams& params,
                       const ScenarioOptions& opt) {
  CurveSet cs;
  cs.phi = params.phi;
  const double reach = opt.bin_sigmas * analytic::alice_marginal_std(params);
  cs.bins = binning::bin_conditional(records, opt.n_bins, -reach, reach);
  cs.model = binning::analytic_bin_moments(cs.bins, params);
  cs.mean_line = binning::fit_mean_line(cs.bins);
  cs.chi2_mean = binning::reduced_chi_square_mean(cs.bins, params);
  cs.chi2_variance = binning::reduced_chi_square_variance(cs.bins, params);
  cs.variance_fit = binning::fit_variance_curve(cs.bins, params.phi);
  cs.center_tail_ratio = binning::center_tail_ratio(cs.bins);
  return cs;
}

void write_curve(const std::filesystem::path& path, const CurveSet& cs) {
  std::ostringstream os;
  os << "nA,mean_nB,var_nB,count,se_mean,se_var,model_mean,model_var,bin_lo,bin_hi\n";
  for (std::size_t k = 0; k < cs.bins.size(); ++k) {
    const auto& b = cs.bins[k];
    os << format_double(b.center) << ',' << format_double(b.mean) << ',' << format_double(b.variance) << ','
       << b.count << ',' << format_double(b.se_mean) << ',' << format_double(b.se_variance) << ','
       << format_double(cs.model[k].mean) << ',' << format_double(cs.model[k].variance) << ','
       << format_double(b.lo) << ',' << format_double(b.hi) << '\n';
  }
  write_text_file(path, os.str());
}

nlohmann::json curve_details(const CurveSet& cs) {
  return {
      {"phi", cs.phi},
      {"mean_slope", cs.mean_line.slope},
      {"mean_slope_se", cs.mean_line.slope_se},
      {"chi2_mean", cs.chi2_mean},
      {"chi2_variance", cs.chi2_variance},
      {"fit_alpha", cs.variance_fit.alpha},
      {"fit_eta", cs.variance_fit.eta},
      {"fit_eta_se", cs.variance_fit.eta_se},
      {"fit_variance_ratio", cs.variance_fit.ratio},
      {"fit_variance_ratio_se", cs.variance_fit.ratio_se},
      {"fit_reduced_chi2", cs.variance_fit.reduced_chi_square},
      {"center_tail_ratio", cs.center_tail_ratio},
  };
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!(std::isfinite(alpha) && alpha > 0.0)) throw ConfigError("alpha must be a positive number");
  if (!(std::isfinite(phi) && phi >= 0.0 && phi < kTwoPi)) throw ConfigError("phi must lie in [0, 2 pi)");
  if (!in_unit_interval(eta_total)) throw ConfigError("eta_total must lie in (0, 1]");
  if (eta_budget) {
    const auto& b = *eta_budget;
    for (double f : {b.modematch, b.optics, b.detector, b.undisplacement})
      if (!in_unit_interval(f)) throw ConfigError("eta_budget factors must lie in (0, 1]");
    if (std::abs(b.product() - eta_total) > kBudgetTolerance) {
      throw ConfigError("eta_budget product " + format_double(b.product()) + " differs from eta_total " +
                        format_double(eta_total) + " by more than 0.02");
    }
  }
  if (n_count_shots == 0) throw ConfigError("n_count_shots must be positive");
  if (n_quad_shots == 0) throw ConfigError("n_quad_shots must be positive");
  if (!(std::isfinite(phase_noise_sigma) && phase_noise_sigma >= 0.0)) {
    throw ConfigError("phase_noise_sigma must be a non-negative number");
  }
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json budget = nullptr;
  if (c.eta_budget) {
    budget = {{"modematch", c.eta_budget->modematch},
              {"optics", c.eta_budget->optics},
              {"detector", c.eta_budget->detector},
              {"undisplacement", c.eta_budget->undisplacement}};
  }
  return {{"alpha", c.alpha},
          {"phi", c.phi},
          {"eta_total", c.eta_total},
          {"eta_budget", budget},
          {"n_count_shots", c.n_count_shots},
          {"n_quad_shots", c.n_quad_shots},
          {"phase_noise_sigma", c.phase_noise_sigma},
          {"seed", c.seed}};
}

ExperimentConfig config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  for (const auto& [key, value] : doc.items()) {
    if (key == "alpha") {
      c.alpha = read_number(value, key);
    } else if (key == "phi") {
      c.phi = read_number(value, key);
    } else if (key == "eta_total") {
      c.eta_total = read_number(value, key);
    } else if (key == "eta_budget") {
      c.eta_budget = value.is_null() ? std::nullopt : std::optional<EtaBudget>(budget_from_json(value));
    } else if (key == "n_count_shots") {
      c.n_count_shots = read_count(value, key);
    } else if (key == "n_quad_shots") {
      c.n_quad_shots = read_count(value, key);
    } else if (key == "phase_noise_sigma") {
      c.phase_noise_sigma = read_number(value, key);
    } else if (key == "seed") {
      c.seed = read_count(value, key);
    } else {
      throw ConfigError("unknown config field '" + key + "'");
    }
  }
  c.validate();
  return c;
}

Fig2Output run_counts_scenario(const ExperimentConfig& config, const ScenarioOptions& opt) {
  config.validate();
  if (!(opt.deltaA > 0.0)) throw ConfigError("deltaA must be positive");
  if (!(opt.delta_window > 0.0)) throw ConfigError("delta_window must be positive");
  const mc::Parallelism par{opt.workers};
  Fig2Output out;

  const analytic::CountModelParams p0{config.alpha, config.eta_total, 0.0};
  p0.validate_gaussian();
  {
    const auto records = mc::sample_counts(p0, config.n_count_shots, config.seed, par, rng::StreamTag::kCounts);
    out.phi0 = analyse_phase(records, p0, opt);

    const double half = opt.delta_window * config.alpha;
    const double reach = opt.bin_sigmas * analytic::alice_marginal_std(p0);
    std::vector<double> plus, minus;
    std::uint64_t wrong_plus = 0, wrong_minus = 0;
    for (const auto& r : records) {
      if (std::abs(r.dnA - opt.deltaA) <= half) {
        plus.push_back(r.dnB);
        if (!analytic::favours_plus(r.dnB, opt.deltaA, p0)) ++wrong_plus;
      } else if (std::abs(r.dnA + opt.deltaA) <= half) {
        minus.push_back(r.dnB);
        if (analytic::favours_plus(r.dnB, opt.deltaA, p0)) ++wrong_minus;
      }
    }
    if (plus.empty() || minus.empty()) {
      throw DegenerateInput("run_counts_scenario: no shots fell in the +-deltaA windows");
    }
    out.hist_plus = binning::histogram(plus, -reach, reach, opt.n_hist_bins);
    out.hist_minus = binning::histogram(minus, -reach, reach, opt.n_hist_bins);
    out.discrimination_error = 0.5 * (static_cast<double>(wrong_plus) / static_cast<double>(plus.size()) +
                                      static_cast<double>(wrong_minus) / static_cast<double>(minus.size()));
  }
  const analytic::CountModelParams p90{config.alpha, config.eta_total, std::numbers::pi / 2.0};
  {
    const auto records = mc::sample_counts(p90, config.n_count_shots, config.seed, par, rng::StreamTag::kCountsPhi90);
    out.phi90 = analyse_phase(records, p90, opt);
  }
  out.discrimination_error_analytic = analytic::distinguishability_error(p0, opt.deltaA);
  out.discrimination_error_threshold =
      analytic::distinguishability_error(p0, opt.deltaA, analytic::DecisionRule::kThreshold);
  out.variance_ratio = out.phi0.variance_fit.ratio;
  out.variance_ratio_se = out.phi0.variance_fit.ratio_se;
  out.variance_ratio_analytic = analytic::variance_peak_ratio(config.eta_total);
  return out;
}

void write_fig2_csv(const std::filesystem::path& dir, const Fig2Output& out) {
  write_curve(dir / "curves_phi0.csv", out.phi0);
  write_curve(dir / "curves_phi90.csv", out.phi90);
  std::ostringstream os;
  os << "dnB,count_plus,count_minus\n";
  for (std::size_t k = 0; k < out.hist_plus.counts.size(); ++k) {
    os << format_double(out.hist_plus.center(k)) << ',' << out.hist_plus.counts[k] << ','
       << out.hist_minus.counts[k] << '\n';
  }
  write_text_file(dir / "histograms.csv", os.str());
}

nlohmann::json fig2_details(const Fig2Output& out) {
  return {
      {"phi0", curve_details(out.phi0)},
      {"phi90", curve_details(out.phi90)},
      {"discrimination_error", out.discrimination_error},
      {"discrimination_error_analytic", out.discrimination_error_analytic},
      {"discrimination_error_threshold", out.discrimination_error_threshold},
      {"n_plus", out.hist_plus.underflow + out.hist_plus.overflow +
                     std::accumulate(out.hist_plus.counts.begin(), out.hist_plus.counts.end(), std::uint64_t{0})},
      {"n_minus", out.hist_minus.underflow + out.hist_minus.overflow +
                      std::accumulate(out.hist_minus.counts.begin(), out.hist_minus.counts.end(), std::uint64_t{0})},
      {"variance_ratio", out.variance_ratio},
      {"variance_ratio_se", out.variance_ratio_se},
      {"variance_ratio_analytic", out.variance_ratio_analytic},
  };
}

std::vector<mc::QuadratureRecord> tomography_records(const ExperimentConfig& config, const ScenarioOptions& opt,
                                                     const fock::FockDensityMatrix& model) {
  const auto schedule = mc::phase_schedule(opt.phase_settings, opt.phase_mode);
  const auto k = static_cast<std::uint64_t>(schedule.size());
  std::vector<mc::QuadratureRecord> records;
  records.reserve(config.n_quad_shots);
  std::uint64_t first = 0;
  for (std::uint64_t s = 0; s < k; ++s) {
    const std::uint64_t n = config.n_quad_shots / k + (s < config.n_quad_shots % k ? 1 : 0);
    if (n == 0) continue;
    const auto part = mc::sample_quadratures(model, schedule[s].thetaA, schedule[s].thetaB, n, config.seed, first,
                                             {}, mc::Parallelism{opt.workers});
    records.insert(records.end(), part.begin(), part.end());
    first += n;
  }
  return records;
}

TomographyOutput run_tomography_scenario(const ExperimentConfig& config, const ScenarioOptions& opt) {
  config.validate();
  TomographyOutput out;
  const double coherence = std::exp(-0.5 * config.phase_noise_sigma * config.phase_noise_sigma);
  out.model = fock::lossy_delocalized_photon(config.eta_total, config.phi, opt.mle.dim, coherence);
  out.model_concurrence = tomo::concurrence(out.model);
  out.schedule = mc::phase_schedule(opt.phase_settings, opt.phase_mode);
  const auto records = tomography_records(config, opt, out.model);
  tomo::MleOptions mle = opt.mle;
  if (mle.workers == 0) mle.workers = opt.workers;
  out.result = tomo::mle_reconstruct(records, mle);
  out.fidelity_to_model = tomo::fidelity(out.result.rho, out.model);
  const auto target = fock::FockDensityMatrix::from_pure(opt.mle.dim, 2, fock::delocalized_photon(config.phi, opt.mle.dim));
  out.fidelity_to_target = tomo::fidelity(out.result.rho, target);
  return out;
}

nlohmann::json tomography_details(const TomographyOutput& out) {
  nlohmann::json schedule = nlohmann::json::array();
  for (const auto& s : out.schedule) schedule.push_back({s.thetaA, s.thetaB});
  return {
      {"reconstruction", tomo::result_to_json(out.result)},
      {"model", density_to_json(out.model)},
      {"model_concurrence", out.model_concurrence},
      {"fidelity_to_model", out.fidelity_to_model},
      {"fidelity_to_target", out.fidelity_to_target},
      {"rho_00_00", out.result.rho.element(0, 0, 0, 0).real()},
      {"abs_rho_01_10", std::abs(out.result.rho.element(0, 1, 1, 0))},
      {"phase_schedule", schedule},
      {"dephasing", "coherence scaled by exp(-phase_noise_sigma^2 / 2), a one-parameter surrogate"},
  };
}

double phase_noise_for_concurrence(double eta, double target) {
  if (!in_unit_interval(eta)) throw InvalidArgument("phase_noise_for_concurrence: eta must lie in (0, 1]");
  if (!(target > 0.0 && target <= eta)) {
    throw InvalidArgument("phase_noise_for_concurrence: target must lie in (0, eta]");
  }
  return std::sqrt(-2.0 * std::log(target / eta));
}

RoundtripResult displacement_roundtrip_check(double alpha_small, double mismatch_eta, int dim) {
  if (!(std::isfinite(alpha_small) && alpha_small >= 0.0)) {
    throw InvalidArgument("displacement_roundtrip_check: alpha must be a non-negative number");
  }
  if (alpha_small * alpha_small > dim / 8.0) {
    throw InvalidArgument("displacement_roundtrip_check: alpha^2 = " + format_double(alpha_small * alpha_small) +
                          " exceeds dim/8 = " + format_double(dim / 8.0));
  }
  if (!in_unit_interval(mismatch_eta)) {
    throw InvalidArgument("displacement_roundtrip_check: mismatch_eta must lie in (0, 1]");
  }
  RoundtripResult res;
  res.alpha = alpha_small;
  res.mismatch_eta = mismatch_eta;
  const auto psi0 = fock::FockDensityMatrix::from_pure(dim, 2, fock::delocalized_photon(0.0, dim));
  const auto forward = fock::displacement_matrix(alpha_small, dim);
  const auto backward = fock::displacement_matrix(-alpha_small, dim);

  auto rho = psi0;
  for (int m = 0; m < 2; ++m) rho = fock::apply_operator(rho, forward, m);
  for (int m = 0; m < 2; ++m) rho = fock::apply_loss(rho, mismatch_eta, m);
  for (int m = 0; m < 2; ++m) rho = fock::apply_operator(rho, backward, m);
  rho = rho.normalized();
  if (fock::check_truncation(rho, "displacement_roundtrip_check")) {
    throw NumericError("displacement_roundtrip_check: truncation too small for alpha");
  }

  // The round-tripped state sits near vacuum again; diagnostics run on a
  // compact copy so the eigensolvers stay small.
  const auto compact = fock::truncate(rho, kCompactDim);
  const double discarded = 1.0 - compact.trace();
  if (discarded > 1e-9) {
    throw NumericError("displacement_roundtrip_check: " + format_double(discarded) +
                       " of the population lies above the compact subspace");
  }
  const auto final_state = compact.normalized();
  const auto initial = fock::FockDensityMatrix::from_pure(kCompactDim, 2, fock::delocalized_photon(0.0, kCompactDim));
  auto reference = initial;
  for (int m = 0; m < 2; ++m) reference = fock::apply_loss(reference, mismatch_eta, m);

  res.fidelity = tomo::fidelity(final_state, reference);
  res.concurrence_initial = tomo::concurrence(initial);
  res.concurrence_final = tomo::concurrence(final_state);
  res.concurrence_reference = tomo::concurrence(reference);
  return res;
}

}  // namespace macrocat::pipeline
