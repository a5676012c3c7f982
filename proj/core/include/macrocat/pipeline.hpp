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

// End-to-end scenarios: the macroscopic photon-counting experiment and the
// microscopic homodyne tomography after undisplacement.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "macrocat/analytic.hpp"
#include "macrocat/binning.hpp"
#include "macrocat/fock.hpp"
#include "macrocat/montecarlo.hpp"
#include "macrocat/tomography.hpp"

namespace macrocat::pipeline {

/// Factors of the total efficiency.
struct EtaBudget {
  double modematch = 0.81;
  double optics = 0.77;
  double detector = 0.86;
  double undisplacement = 0.95;

  double product() const { return modematch * optics * detector * undisplacement; }
  friend bool operator==(const EtaBudget&, const EtaBudget&) = default;
};

inline constexpr double kBudgetTolerance = 0.02;

struct ExperimentConfig {
  double alpha = 1.05e4;
  double phi = 0.0;
  double eta_total = 0.49;
  /// When present, its product must match eta_total within kBudgetTolerance.
  std::optional<EtaBudget> eta_budget = EtaBudget{};
  std::uint64_t n_count_shots = 5'000'000;
  std::uint64_t n_quad_shots = 200'000;
  double phase_noise_sigma = 0.0;
  std::uint64_t seed = 20140407;

  /// Throws ConfigError.
  void validate() const;
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

nlohmann::json to_json(const ExperimentConfig& config);
/// Accepts exactly the ExperimentConfig field names; absent fields keep
/// their defaults, unknown fields and wrong types throw ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& doc);

/// Knobs that are not part of the experiment record.
struct ScenarioOptions {
  double deltaA = 3.1e4;
  double delta_window = 0.1;  ///< half-width of the +-deltaA windows, in units of alpha
  int n_bins = 41;
  double bin_sigmas = 4.0;  ///< binning covers +-bin_sigmas marginal standard deviations
  int n_hist_bins = 81;
  int phase_settings = 12;
  mc::PhaseMode phase_mode = mc::PhaseMode::kSweep;
  tomo::MleOptions mle{};
  unsigned workers = 0;
};

/// Binned conditional statistics of one phase setting.
struct CurveSet {
  double phi = 0.0;
  std::vector<binning::ConditionalBin> bins;
  std::vector<analytic::BinMoments> model;
  binning::LineFit mean_line;
  double chi2_mean = 0.0;
  double chi2_variance = 0.0;
  binning::VarianceFit variance_fit;
  double center_tail_ratio = 0.0;
};

struct Fig2Output {
  CurveSet phi0;
  CurveSet phi90;
  /// Bob's counts when Alice's count fell near +deltaA and near -deltaA.
  binning::Histogram hist_plus;
  binning::Histogram hist_minus;
  double discrimination_error = 0.0;  ///< empirical, likelihood-ratio rule
  double discrimination_error_analytic = 0.0;
  double discrimination_error_threshold = 0.0;  ///< analytic, best threshold
  double variance_ratio = 0.0;                  ///< fitted peak ratio at phi = 0
  double variance_ratio_se = 0.0;
  double variance_ratio_analytic = 0.0;
};

/// Samples both phi = 0 and phi = pi/2 with the Gaussian-regime sampler.
Fig2Output run_counts_scenario(const ExperimentConfig& config, const ScenarioOptions& options = {});

/// Writes curves_phi0.csv, curves_phi90.csv and histograms.csv.
void write_fig2_csv(const std::filesystem::path& dir, const Fig2Output& out);
nlohmann::json fig2_details(const Fig2Output& out);

struct TomographyOutput {
  fock::FockDensityMatrix model = fock::FockDensityMatrix::vacuum(2, 2);
  tomo::TomographyResult result;
  double model_concurrence = 0.0;
  double fidelity_to_model = 0.0;
  double fidelity_to_target = 0.0;  ///< against the lossless |Psi0>
  std::vector<mc::PhaseSetting> schedule;
};

/// eta |Psi0><Psi0| + (1 - eta)|00><00| with the coherence damped by
/// exp(-sigma^2 / 2), sampled over the phase schedule and reconstructed.
TomographyOutput run_tomography_scenario(const ExperimentConfig& config, const ScenarioOptions& options = {});

/// Quadrature records the tomography scenario reconstructs from.
std::vector<mc::QuadratureRecord> tomography_records(const ExperimentConfig& config, const ScenarioOptions& options,
                                                     const fock::FockDensityMatrix& model);

nlohmann::json tomography_details(const TomographyOutput& out);

/// sigma with exp(-sigma^2 / 2) eta = target, the dephasing that brings the
/// model concurrence from eta down to target.
double phase_noise_for_concurrence(double eta, double target);

struct RoundtripResult {
  double alpha = 0.0;
  double mismatch_eta = 1.0;
  double fidelity = 0.0;  ///< to the loss-only reference
  double concurrence_initial = 0.0;
  double concurrence_final = 0.0;
  double concurrence_reference = 0.0;
};

inline constexpr int kRoundtripDim = 32;

/// D(alpha) on both modes of |Psi0>, loss mismatch_eta on both, then
/// D(-alpha) on both. Requires alpha^2 <= dim / 8.
RoundtripResult displacement_roundtrip_check(double alpha_small, double mismatch_eta, int dim = kRoundtripDim);

}  // namespace macrocat::pipeline
