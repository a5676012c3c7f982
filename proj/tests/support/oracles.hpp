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

// Reference implementations used only by the tests. Each one takes a
// different route from the library code it checks.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>
#include <utility>
#include <vector>

#include "macrocat/fock.hpp"

namespace oracle {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

inline double simpson(auto&& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

inline CMatrix annihilation(int dim) {
  CMatrix a = CMatrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

/// exp(alpha a^dag - conj(alpha) a) on a padded space, cut to dim x dim.
inline CMatrix displacement_expm(Complex alpha, int dim, int padded) {
  const CMatrix a = annihilation(padded);
  const CMatrix gen = alpha * a.adjoint() - std::conj(alpha) * a;
  const CMatrix full = gen.exp();
  return full.topLeftCorner(dim, dim);
}

/// psi_n(x) from physicists' Hermite polynomials; fine for n <~ 30.
inline double hermite_function(int n, double x) {
  double h0 = 1.0, h1 = 2.0 * x;
  double hn = n == 0 ? h0 : h1;
  for (int k = 1; k < n; ++k) {
    hn = 2.0 * x * h1 - 2.0 * k * h0;
    h0 = h1;
    h1 = hn;
  }
  const double log_norm = 0.5 * (n * std::log(2.0) + std::lgamma(n + 1.0) + 0.5 * std::log(std::numbers::pi));
  return hn * std::exp(-0.5 * x * x - log_norm);
}

/// <n|D(alpha)|0> and <n|D(alpha)|1> for real alpha from the coherent-state
/// expansion D|1> = (a^dag - alpha) D|0>.
inline double amp0(long n, double alpha) {
  return std::exp(-0.5 * alpha * alpha + n * std::log(alpha) - 0.5 * std::lgamma(n + 1.0));
}
inline double amp1(long n, double alpha) { return amp0(n, alpha) * (n / alpha - alpha); }

inline double poisson(long n, double mean) {
  if (n < 0) return 0.0;
  return std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0));
}

/// pr(nA, nB) of D(alpha) (x) D(alpha) applied to eta |Psi0><Psi0| + (1 - eta)|00><00|.
inline double exact_joint(long na, long nb, double alpha, double eta, double phi) {
  const Complex psi = (amp0(na, alpha) * amp1(nb, alpha) + std::polar(1.0, phi) * amp1(na, alpha) * amp0(nb, alpha)) /
                      std::numbers::sqrt2;
  return eta * std::norm(psi) + (1.0 - eta) * poisson(na, alpha * alpha) * poisson(nb, alpha * alpha);
}

/// Reference-subtracted law P(dA, dB), dense over [d_lo, d_lo + width)^2.
struct DiscreteLaw {
  long d_lo = 0;
  long width = 0;
  std::vector<double> p;  // row-major, index (dA - d_lo) * width + (dB - d_lo)

  double at(long da, long db) const {
    if (da < d_lo || db < d_lo || da >= d_lo + width || db >= d_lo + width) return 0.0;
    return p[static_cast<std::size_t>((da - d_lo) * width + (db - d_lo))];
  }
};

inline DiscreteLaw exact_reference_law(double alpha, double eta, double phi) {
  const double m = alpha * alpha;
  const long lo = std::max(0L, static_cast<long>(m - 10 * alpha - 10));
  const long hi = static_cast<long>(m + 10 * alpha + 10);
  const long n = hi - lo + 1;
  // Reference kernel Pois(r) for r in [lo, hi]; d = signal - reference.
  DiscreteLaw law;
  law.d_lo = lo - hi;
  law.width = 2 * n - 1;
  std::vector<double> kernel(static_cast<std::size_t>(n));
  for (long r = 0; r < n; ++r) kernel[static_cast<std::size_t>(r)] = poisson(lo + r, m);
  std::vector<double> joint(static_cast<std::size_t>(n * n));
  for (long a = 0; a < n; ++a)
    for (long b = 0; b < n; ++b) joint[static_cast<std::size_t>(a * n + b)] = exact_joint(lo + a, lo + b, alpha, eta, phi);
  // Convolve along B, then along A.
  std::vector<double> half(static_cast<std::size_t>(n * law.width), 0.0);
  for (long a = 0; a < n; ++a)
    for (long b = 0; b < n; ++b) {
      const double v = joint[static_cast<std::size_t>(a * n + b)];
      if (v < 1e-300) continue;
      for (long r = 0; r < n; ++r) half[static_cast<std::size_t>(a * law.width + (b - r + n - 1))] += v * kernel[static_cast<std::size_t>(r)];
    }
  law.p.assign(static_cast<std::size_t>(law.width * law.width), 0.0);
  for (long a = 0; a < n; ++a)
    for (long r = 0; r < n; ++r) {
      const double k = kernel[static_cast<std::size_t>(r)];
      const long da = a - r + n - 1;
      for (long db = 0; db < law.width; ++db)
        law.p[static_cast<std::size_t>(da * law.width + db)] += k * half[static_cast<std::size_t>(a * law.width + db)];
    }
  return law;
}

/// Weak-coupling joint density of the measured counts, written as an
/// isotropic Gaussian of variance 2 alpha^2 per axis times a quadratic form.
inline double gaussian_joint_density(double x, double y, double alpha, double eta, double phi) {
  const double a2 = alpha * alpha;
  const double s2 = 2.0 * a2;
  const double gauss = std::exp(-(x * x + y * y) / (2.0 * s2)) / (2.0 * std::numbers::pi * s2);
  const double q = eta * (x * x + y * y + 2.0 * std::cos(phi) * x * y) + 4.0 * (2.0 - eta) * a2;
  return gauss * q / (8.0 * a2);
}

/// Rejection sampler for gaussian_joint_density with an envelope of twice
/// the variance.
inline std::vector<std::pair<double, double>> rejection_counts(double alpha, double eta, double phi, std::size_t n,
                                                               std::uint64_t seed) {
  const double s2 = 2.0 * alpha * alpha;
  const double bound = 4.0 * eta / std::numbers::e + (2.0 - eta);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(2.0 * s2));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::pair<double, double>> out;
  out.reserve(n);
  while (out.size() < n) {
    const double x = normal(gen), y = normal(gen);
    const double envelope = std::exp(-(x * x + y * y) / (4.0 * s2)) / (4.0 * std::numbers::pi * s2);
    const double ratio = gaussian_joint_density(x, y, alpha, eta, phi) / (bound * envelope);
    if (ratio > 1.0 + 1e-9) throw std::runtime_error("rejection envelope bound violated");
    if (unif(gen) < ratio) out.emplace_back(x, y);
  }
  return out;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

/// One-sample KS statistic against a CDF.
inline double ks_one_sample(std::vector<double> a, auto&& cdf) {
  std::sort(a.begin(), a.end());
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double f = cdf(a[i]);
    d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
  }
  return d;
}

/// Asymptotic 1% critical value of the KS statistic, scaled.
inline double ks_critical_1pct(double n_eff) { return 1.6276 / std::sqrt(n_eff); }

/// Single-mode quadrature operator X_theta on dim levels.
inline CMatrix quadrature_operator(double theta, int dim) {
  const CMatrix a = annihilation(dim);
  return (a * std::polar(1.0, -theta) + a.adjoint() * std::polar(1.0, theta)) / std::numbers::sqrt2;
}

/// tr(rho (A (x) B)) for a two-mode state, A and B on the full dim.
inline double expect_two_mode(const macrocat::fock::FockDensityMatrix& rho, const CMatrix& a, const CMatrix& b) {
  const CMatrix op = Eigen::kroneckerProduct(a, b).eval();
  return (rho.matrix() * op).trace().real();
}

// Kraus sum E_k = sum_n sqrt(C(n,k) eta^{n-k} (1-eta)^k) |n-k><n| built here.
inline macrocat::fock::FockDensityMatrix kraus_loss(const macrocat::fock::FockDensityMatrix& rho, double eta, int mode) {
  const int d = rho.dim();
  CMatrix out = CMatrix::Zero(rho.size(), rho.size());
  const CMatrix id = CMatrix::Identity(d, d);
  for (int k = 0; k < d; ++k) {
    CMatrix e = CMatrix::Zero(d, d);
    for (int n = k; n < d; ++n) {
      const double binom = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
      e(n - k, n) = std::sqrt(binom * std::pow(eta, n - k) * std::pow(1.0 - eta, k));
    }
    const CMatrix full = mode == 0 ? CMatrix(Eigen::kroneckerProduct(e, id)) : CMatrix(Eigen::kroneckerProduct(id, e));
    out += full * rho.matrix() * full.adjoint();
  }
  return {d, 2, out};
}

}  // namespace oracle
