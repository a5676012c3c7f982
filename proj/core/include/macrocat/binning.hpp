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

// Conditional statistics of Bob's counts binned on Alice's counts, and the
// comparisons against the analytic model.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "macrocat/analytic.hpp"
#include "macrocat/montecarlo.hpp"

namespace macrocat::binning {

struct ConditionalBin {
  double lo = 0.0;  ///< nominal edges; the outer bins also absorb overflow
  double hi = 0.0;
  double center = 0.0;
  std::uint64_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
  double se_mean = 0.0;
  double se_variance = 0.0;
};

/// n_bins uniform bins over [lo, hi) in dnA. Records outside the range land
/// in the first or last bin, so the counts always sum to records.size().
std::vector<ConditionalBin> bin_conditional(std::span<const mc::CountRecord> records, int n_bins, double lo,
                                            double hi);

/// Analytic moments matching the bins, with the outer bins extended to
/// infinity the same way the data were.
std::vector<analytic::BinMoments> analytic_bin_moments(std::span<const ConditionalBin> bins,
                                                       const analytic::CountModelParams& params);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};

/// Weighted least-squares line through (center, mean), weights 1/se_mean^2.
LineFit fit_mean_line(std::span<const ConditionalBin> bins, std::uint64_t min_count = 100);

/// Reduced chi-square of the binned means (or variances) against the
/// analytic bin moments. Uncertainties come from the model, so a perfect
/// sampler gives values near 1. Bins with fewer than min_count entries are
/// skipped.
double reduced_chi_square_mean(std::span<const ConditionalBin> bins, const analytic::CountModelParams& params,
                               std::uint64_t min_count = 100);
double reduced_chi_square_variance(std::span<const ConditionalBin> bins,
                                   const analytic::CountModelParams& params, std::uint64_t min_count = 100);

struct VarianceFit {
  double alpha = 0.0;
  double eta = 0.0;
  double eta_se = 0.0;
  double ratio = 0.0;  ///< (4 + eta)/(4 - eta), the peak-to-asymptote ratio
  double ratio_se = 0.0;
  double reduced_chi_square = 0.0;
  int iterations = 0;
};

/// Fits the bin-averaged analytic conditional variance at the given phase
/// to the binned variances over (alpha, eta) by damped Gauss-Newton.
VarianceFit fit_variance_curve(std::span<const ConditionalBin> bins, double phi, std::uint64_t min_count = 100);

/// Variance of the central bin over the mean variance of the two outermost
/// interior bins. Biased high against the asymptotic ratio because the
/// tails at a few standard deviations have not reached the limit.
double center_tail_ratio(std::span<const ConditionalBin> bins);

struct Histogram {
  double lo = 0.0;
  double width = 0.0;
  std::vector<std::uint64_t> counts;
  std::uint64_t underflow = 0;
  std::uint64_t overflow = 0;

  double center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * width; }
};

Histogram histogram(std::span<const double> values, double lo, double hi, int n_bins);

/// Joint (dnA, dnB) histogram on a square grid; out-of-range samples are
/// dropped into a single overflow cell so probabilities still sum to 1.
struct Histogram2D {
  double lo = 0.0;
  double width = 0.0;
  int n = 0;
  std::vector<std::uint64_t> counts;  ///< n*n cells row-major in dnA, plus one overflow cell
};

Histogram2D joint_histogram(std::span<const mc::CountRecord> records, double lo, double hi, int n_bins);

/// Total-variation distance between the normalized cell frequencies.
double total_variation(const Histogram2D& a, const Histogram2D& b);

}  // namespace macrocat::binning
