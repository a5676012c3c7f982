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

#include "macrocat/binning.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "macrocat/errors.hpp"

namespace macrocat::binning {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int bin_index(double x, double lo, double width, int n) {
  if (!(x >= lo)) return 0;
  const double k = std::floor((x - lo) / width);
  return k >= n ? n - 1 : static_cast<int>(k);
}

}  // namespace

std::vector<ConditionalBin> bin_conditional(std::span<const mc::CountRecord> records, int n_bins, double lo,
                                            double hi) {
  if (n_bins < 1) throw InvalidArgument("bin_conditional: n_bins must be positive");
  if (!(hi > lo)) throw InvalidArgument("bin_conditional: empty range");
  const double width = (hi - lo) / n_bins;
  std::vector<ConditionalBin> bins(static_cast<std::size_t>(n_bins));
  for (int k = 0; k < n_bins; ++k) {
    auto& b = bins[static_cast<std::size_t>(k)];
    b.lo = lo + k * width;
    b.hi = k + 1 == n_bins ? hi : lo + (k + 1) * width;
    b.center = 0.5 * (b.lo + b.hi);
  }
  std::vector<int> idx(records.size());
  std::vector<double> sum(bins.size(), 0.0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    idx[i] = bin_index(records[i].dnA, lo, width, n_bins);
    ++bins[static_cast<std::size_t>(idx[i])].count;
    sum[static_cast<std::size_t>(idx[i])] += records[i].dnB;
  }
  for (std::size_t k = 0; k < bins.size(); ++k)
    if (bins[k].count > 0) bins[k].mean = sum[k] / static_cast<double>(bins[k].count);
  std::vector<double> m2(bins.size(), 0.0), m4(bins.size(), 0.0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto k = static_cast<std::size_t>(idx[i]);
    const double d = records[i].dnB - bins[k].mean;
    m2[k] += d * d;
    m4[k] += d * d * d * d;
  }
  for (std::size_t k = 0; k < bins.size(); ++k) {
    auto& b = bins[k];
    if (b.count < 2) continue;
    const double n = static_cast<double>(b.count);
    b.variance = m2[k] / (n - 1.0);
    b.se_mean = std::sqrt(b.variance / n);
    const double mu2 = m2[k] / n, mu4 = m4[k] / n;
    b.se_variance = std::sqrt(std::max(0.0, mu4 - mu2 * mu2) / n);
  }
  return bins;
}

std::vector<analytic::BinMoments> analytic_bin_moments(std::span<const ConditionalBin> bins,
                                                       const analytic::CountModelParams& params) {
  std::vector<analytic::BinMoments> out(bins.size());
  for (std::size_t k = 0; k < bins.size(); ++k) {
    const double lo = k == 0 ? -kInf : bins[k].lo;
    const double hi = k + 1 == bins.size() ? kInf : bins[k].hi;
    out[k] = analytic::bin_moments(params, lo, hi);
  }
  return out;
}

LineFit fit_mean_line(std::span<const ConditionalBin> bins, std::uint64_t min_count) {
  double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int used = 0;
  for (const auto& b : bins) {
    if (b.count < min_count || !(b.se_mean > 0.0)) continue;
    const double w = 1.0 / (b.se_mean * b.se_mean);
    sw += w;
    sx += w * b.center;
    sy += w * b.mean;
    sxx += w * b.center * b.center;
    sxy += w * b.center * b.mean;
    ++used;
  }
  if (used < 3) throw DegenerateInput("fit_mean_line: fewer than 3 populated bins");
  const double det = sw * sxx - sx * sx;
  if (!(det > 0.0)) throw DegenerateInput("fit_mean_line: singular design");
  LineFit f;
  f.slope = (sw * sxy - sx * sy) / det;
  f.intercept = (sxx * sy - sx * sxy) / det;
  f.slope_se = std::sqrt(sw / det);
  return f;
}

double reduced_chi_square_mean(std::span<const ConditionalBin> bins, const analytic::CountModelParams& params,
                               std::uint64_t min_count) {
  const auto model = analytic_bin_moments(bins, params);
  double chi2 = 0.0;
  int used = 0;
  for (std::size_t k = 0; k < bins.size(); ++k) {
    if (bins[k].count < min_count || !(model[k].variance > 0.0)) continue;
    const double se = std::sqrt(model[k].variance / static_cast<double>(bins[k].count));
    const double r = (bins[k].mean - model[k].mean) / se;
    chi2 += r * r;
    ++used;
  }
  if (used == 0) throw DegenerateInput("reduced_chi_square_mean: no populated bins");
  return chi2 / used;
}

double reduced_chi_square_variance(std::span<const ConditionalBin> bins,
                                   const analytic::CountModelParams& params, std::uint64_t min_count) {
  const auto model = analytic_bin_moments(bins, params);
  double chi2 = 0.0;
  int used = 0;
  for (std::size_t k = 0; k < bins.size(); ++k) {
    if (bins[k].count < min_count || !(bins[k].se_variance > 0.0)) continue;
    const double r = (bins[k].variance - model[k].variance) / bins[k].se_variance;
    chi2 += r * r;
    ++used;
  }
  if (used == 0) throw DegenerateInput("reduced_chi_square_variance: no populated bins");
  return chi2 / used;
}

VarianceFit fit_variance_curve(std::span<const ConditionalBin> bins, double phi, std::uint64_t min_count) {
  std::vector<std::size_t> use;
  for (std::size_t k = 0; k < bins.size(); ++k)
    if (bins[k].count >= min_count && bins[k].se_variance > 0.0) use.push_back(k);
  if (use.size() < 5) throw DegenerateInput("fit_variance_curve: fewer than 5 populated bins");
  const auto m = static_cast<Eigen::Index>(use.size());

  // The asymptotic variance is 2 alpha^2; widest populated bins give a start.
  double tail = 0.0;
  for (std::size_t k : {use.front(), use.back()}) tail += 0.5 * bins[k].variance;
  double alpha = std::max(analytic::kGaussianMinAlpha, std::sqrt(tail / 2.0));
  double eta = 0.5;

  auto residuals = [&](double a, double e) {
    const analytic::CountModelParams p{a, e, phi};
    const auto model = analytic_bin_moments(bins, p);
    Eigen::VectorXd r(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto k = use[static_cast<std::size_t>(i)];
      r(i) = (bins[k].variance - model[k].variance) / bins[k].se_variance;
    }
    return r;
  };

  auto clamp_eta = [](double e) { return std::clamp(e, 0.0, 1.0); };
  Eigen::VectorXd r = residuals(alpha, eta);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
  VarianceFit fit;
  bool done = false;
  for (int it = 0; it < 100 && !done; ++it) {
    fit.iterations = it + 1;
    // alpha enters on a log scale so both Jacobian columns are O(1).
    const double ha = 1e-6, he = 1e-6;
    const double e_lo = clamp_eta(eta - he), e_hi = clamp_eta(eta + he);
    Eigen::MatrixXd jac(m, 2);
    jac.col(0) = (residuals(alpha * std::exp(ha), eta) - residuals(alpha * std::exp(-ha), eta)) / (2.0 * ha);
    jac.col(1) = (residuals(alpha, e_hi) - residuals(alpha, e_lo)) / (e_hi - e_lo);
    jtj = jac.transpose() * jac;
    const Eigen::Vector2d g = jac.transpose() * r;
    bool improved = false;
    for (int tries = 0; tries < 20 && !improved; ++tries) {
      Eigen::Matrix2d a = jtj;
      a.diagonal() *= 1.0 + lambda;
      const Eigen::Vector2d step = a.ldlt().solve(-g);
      const double na = std::max(analytic::kGaussianMinAlpha, alpha * std::exp(step(0)));
      const double ne = clamp_eta(eta + step(1));
      const Eigen::VectorXd rn = residuals(na, ne);
      const double cn = rn.squaredNorm();
      if (cn <= cost) {
        const double rel = (cost - cn) / std::max(cost, 1e-300);
        alpha = na;
        eta = ne;
        r = rn;
        cost = cn;
        lambda = std::max(1e-9, lambda / 10.0);
        improved = true;
        done = rel < 1e-12 && std::abs(step(1)) < 1e-10;
      } else {
        lambda *= 10.0;
      }
    }
    if (!improved) break;
  }
  fit.alpha = alpha;
  fit.eta = eta;
  const Eigen::Matrix2d cov = jtj.inverse();
  fit.eta_se = std::sqrt(std::max(0.0, cov(1, 1)));
  fit.ratio = analytic::variance_peak_ratio(eta);
  // d/d eta of (4 + eta)/(4 - eta) = 8/(4 - eta)^2.
  fit.ratio_se = fit.eta_se * 8.0 / ((4.0 - eta) * (4.0 - eta));
  fit.reduced_chi_square = cost / std::max<double>(1.0, static_cast<double>(m - 2));
  return fit;
}

double center_tail_ratio(std::span<const ConditionalBin> bins) {
  if (bins.size() < 5) throw InvalidArgument("center_tail_ratio: need at least 5 bins");
  const auto& c = bins[bins.size() / 2];
  const double tail = 0.5 * (bins[1].variance + bins[bins.size() - 2].variance);
  if (!(tail > 0.0)) throw DegenerateInput("center_tail_ratio: empty tail bins");
  return c.variance / tail;
}

Histogram histogram(std::span<const double> values, double lo, double hi, int n_bins) {
  if (n_bins < 1) throw InvalidArgument("histogram: n_bins must be positive");
  if (!(hi > lo)) throw InvalidArgument("histogram: empty range");
  Histogram h;
  h.lo = lo;
  h.width = (hi - lo) / n_bins;
  h.counts.assign(static_cast<std::size_t>(n_bins), 0);
  for (double v : values) {
    if (!(v >= lo)) {
      ++h.underflow;
    } else if (v >= hi) {
      ++h.overflow;
    } else {
      const auto k = std::min<std::size_t>(static_cast<std::size_t>((v - lo) / h.width), h.counts.size() - 1);
      ++h.counts[k];
    }
  }
  return h;
}

Histogram2D joint_histogram(std::span<const mc::CountRecord> records, double lo, double hi, int n_bins) {
  if (n_bins < 1) throw InvalidArgument("joint_histogram: n_bins must be positive");
  if (!(hi > lo)) throw InvalidArgument("joint_histogram: empty range");
  Histogram2D h;
  h.lo = lo;
  h.width = (hi - lo) / n_bins;
  h.n = n_bins;
  const auto cells = static_cast<std::size_t>(n_bins) * static_cast<std::size_t>(n_bins);
  h.counts.assign(cells + 1, 0);
  for (const auto& r : records) {
    if (!(r.dnA >= lo && r.dnA < hi && r.dnB >= lo && r.dnB < hi)) {
      ++h.counts[cells];
      continue;
    }
    const auto i = std::min(static_cast<std::size_t>((r.dnA - lo) / h.width), static_cast<std::size_t>(n_bins - 1));
    const auto j = std::min(static_cast<std::size_t>((r.dnB - lo) / h.width), static_cast<std::size_t>(n_bins - 1));
    ++h.counts[i * static_cast<std::size_t>(n_bins) + j];
  }
  return h;
}

double total_variation(const Histogram2D& a, const Histogram2D& b) {
  if (a.counts.size() != b.counts.size() || a.lo != b.lo || a.width != b.width) {
    throw InvalidArgument("total_variation: histograms use different grids");
  }
  double na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < a.counts.size(); ++k) {
    na += static_cast<double>(a.counts[k]);
    nb += static_cast<double>(b.counts[k]);
  }
  if (!(na > 0.0 && nb > 0.0)) throw DegenerateInput("total_variation: empty histogram");
  double tv = 0.0;
  for (std::size_t k = 0; k < a.counts.size(); ++k)
    tv += std::abs(static_cast<double>(a.counts[k]) / na - static_cast<double>(b.counts[k]) / nb);
  return 0.5 * tv;
}

}  // namespace macrocat::binning
