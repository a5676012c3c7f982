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

// Closed-form photon-counting statistics of the displaced delocalized
// photon.
//
// Two regimes are covered. The exact Fock path works with integer counts
// and the number-basis amplitudes Xi0/Xi1 of the displaced vacuum and
// displaced single photon. The Gaussian path (alpha >= 10) works with
// continuous counts: `joint_prob` takes counts centered at alpha^2, and
// every "_ref" function takes reference-relative counts, i.e. signal minus
// an independent reference pulse of the same mean, which is centered at
// zero by construction.

#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace macrocat::analytic {

inline constexpr double kGaussianMinAlpha = 10.0;

struct CountModelParams {
  double alpha = 0.0;  ///< displacement amplitude, photons^{1/2}
  double eta = 1.0;    ///< total efficiency
  double phi = 0.0;    ///< relative phase, rad

  /// alpha > 0, 0 <= eta <= 1, 0 <= phi < 2 pi.
  void validate() const;
  /// validate() plus alpha >= kGaussianMinAlpha.
  void validate_gaussian() const;
};

// Number-basis amplitudes <n|D(alpha)|0> and <n|D(alpha)|1> for real
// alpha >= 0, evaluated in log space. Negative n throws.
double xi0(long n, double alpha);
double xi1(long n, double alpha);
/// |Xi1 / Xi0| = |n/alpha - alpha|.
double xi_ratio(long n, double alpha);

double poisson_pmf(long n, double mean);

/// Exact pr(nA, nB) of the lossy displaced delocalized photon, integer
/// counts.
double exact_joint_prob(long nA, long nB, double alpha, double eta, double phi);
/// Alice's exact marginal sum_nB pr(nA, nB).
double exact_alice_marginal(long nA, double alpha, double eta);

/// Gaussian-regime joint density of counts centered at alpha^2.
double joint_prob(double dnA, double dnB, const CountModelParams& params);

/// Reference-relative joint density (closed form).
double joint_prob_ref(double nA, double nB, const CountModelParams& params);

/// Same density by numerically convolving joint_prob with a Gaussian
/// reference of variance alpha^2 in each channel. Slow; for cross-checks.
double joint_prob_ref_numeric(double nA, double nB, const CountModelParams& params);

/// Alice's reference-relative marginal density and its CDF.
double alice_marginal_ref(double nA, const CountModelParams& params);
double alice_marginal_cdf_ref(double nA, const CountModelParams& params);
/// Standard deviation of Alice's reference-relative count, alpha sqrt(2 + eta).
double alice_marginal_std(const CountModelParams& params);

/// Bob's reference-relative density conditioned on Alice's result nA.
double conditional_density(double nB, double nA, const CountModelParams& params);
double conditional_mean(double nA, const CountModelParams& params);
double conditional_variance(double nA, const CountModelParams& params);
/// (4 + eta)/(4 - eta): conditional variance at nA = 0 over its nA -> inf limit.
double variance_peak_ratio(double eta);
/// Conditional-variance limit for |nA| -> infinity, 2 alpha^2.
inline double asymptotic_variance(double alpha) { return 2.0 * alpha * alpha; }

/// Conditional statistics of Bob's count averaged over Alice's results
/// falling in [lo, hi). Either bound may be infinite.
struct BinMoments {
  double mass = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};
BinMoments bin_moments(const CountModelParams& params, double lo, double hi);

enum class DecisionRule {
  kLikelihoodRatio,  ///< Bayes rule with equal priors
  kThreshold,        ///< best single threshold on Bob's count
};

/// Single-shot error for telling Bob's conditional distributions apart when
/// Alice registered +deltaA versus -deltaA (equal priors).
double distinguishability_error(const CountModelParams& params, double deltaA,
                                DecisionRule rule = DecisionRule::kLikelihoodRatio);

/// Decision of the likelihood-ratio rule: true when Bob's count favours
/// Alice's +deltaA outcome.
bool favours_plus(double nB, double deltaA, const CountModelParams& params);

struct CurvePoint {
  double nA = 0.0;
  double mean_nB = 0.0;
  double var_nB = 0.0;
};

std::vector<CurvePoint> analytic_curve(const CountModelParams& params,
                                       std::span<const double> nA_points);

/// CSV with header `nA,mean_nB,var_nB`.
void write_curve_csv(std::ostream& os, std::span<const CurvePoint> curve);

}  // namespace macrocat::analytic
