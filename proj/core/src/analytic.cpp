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

#include "macrocat/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "macrocat/errors.hpp"
#include "macrocat/serialization.hpp"

namespace macrocat::analytic {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTolerance = 1e-10;

// Adaptive Gauss-Kronrod on a finite interval.
template <class F>
double integrate(F&& f, double a, double b) {
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, kTolerance, &err);
}

void check_count(long n) {
  if (n < 0) throw InvalidArgument("photon number must be >= 0, got " + std::to_string(n));
}

double log_xi0_abs(long n, double alpha) {
  return -0.5 * alpha * alpha + static_cast<double>(n) * std::log(alpha) - 0.5 * std::lgamma(n + 1.0);
}

// Normal density with standard deviation s.
double norm_pdf(double x, double s) { return std::exp(-0.5 * x * x / (s * s)) / (std::sqrt(2.0 * kPi) * s); }

// For a density proportional to N(x; 0, s^2) (a x^2 + b x + c) normalized
// by Z = a s^2 + c, the integral from -inf to t.
double quad_gauss_cdf(double t, double s, double a, double b, double c) {
  const double z = t / s;
  const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi);
  const double Phi = 0.5 * std::erfc(-z / std::sqrt(2.0));
  const double num = a * s * s * (Phi - z * phi) - b * s * phi + c * Phi;
  return num / (a * s * s + c);
}

// Bob's conditional law given Alice's reference-relative count nA: density
// N(nB; 0, 2 alpha^2) (eta nB^2 + 2 eta cos(phi) nA nB + C) / Z.
struct ConditionalQuadratic {
  double s;  // sqrt(2) alpha
  double a, b, c;
};

ConditionalQuadratic conditional_quadratic(double nA, const CountModelParams& p) {
  const double a2 = p.alpha * p.alpha;
  return {std::sqrt(2.0 * a2), p.eta, 2.0 * p.eta * std::cos(p.phi) * nA,
          p.eta * nA * nA + 4.0 * (2.0 - p.eta) * a2};
}

}  // namespace

void CountModelParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be positive and finite");
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("eta must lie in [0, 1]");
  if (!(phi >= 0.0 && phi < 2.0 * kPi)) throw InvalidArgument("phi must lie in [0, 2 pi)");
}

void CountModelParams::validate_gaussian() const {
  validate();
  if (alpha < kGaussianMinAlpha) {
    throw InvalidArgument("Gaussian count model needs alpha >= 10 (got " + std::to_string(alpha) +
                          "); use the exact Fock-basis path for small displacements");
  }
}

double xi0(long n, double alpha) {
  check_count(n);
  if (alpha < 0.0) throw InvalidArgument("xi0: alpha must be >= 0");
  if (alpha == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(log_xi0_abs(n, alpha));
}

double xi1(long n, double alpha) {
  check_count(n);
  if (alpha < 0.0) throw InvalidArgument("xi1: alpha must be >= 0");
  if (alpha == 0.0) return n == 1 ? 1.0 : 0.0;
  const double r = static_cast<double>(n) / alpha - alpha;
  if (r == 0.0) return 0.0;
  // Fold |r| into the exponent so the product cannot overflow before it
  // underflows.
  return std::copysign(std::exp(log_xi0_abs(n, alpha) + std::log(std::abs(r))), r);
}

double xi_ratio(long n, double alpha) {
  check_count(n);
  if (!(alpha > 0.0)) throw InvalidArgument("xi_ratio: alpha must be > 0");
  return std::abs(static_cast<double>(n) / alpha - alpha);
}

double poisson_pmf(long n, double mean) {
  check_count(n);
  if (mean < 0.0) throw InvalidArgument("poisson_pmf: negative mean");
  if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(-mean + static_cast<double>(n) * std::log(mean) - std::lgamma(n + 1.0));
}

double exact_joint_prob(long nA, long nB, double alpha, double eta, double phi) {
  check_count(nA);
  check_count(nB);
  if (!(alpha > 0.0)) throw InvalidArgument("exact_joint_prob: alpha must be > 0");
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("exact_joint_prob: eta must lie in [0, 1]");
  // Xi1 = Xi0 r with r = n/alpha - alpha, so pr factors as
  // Xi0(nA)^2 Xi0(nB)^2 [eta/2 (rA^2 + rB^2 + 2 cos(phi) rA rB) + 1 - eta].
  const double ra = static_cast<double>(nA) / alpha - alpha;
  const double rb = static_cast<double>(nB) / alpha - alpha;
  const double base = std::exp(2.0 * (log_xi0_abs(nA, alpha) + log_xi0_abs(nB, alpha)));
  return base * (0.5 * eta * (ra * ra + rb * rb + 2.0 * std::cos(phi) * ra * rb) + 1.0 - eta);
}

double exact_alice_marginal(long nA, double alpha, double eta) {
  check_count(nA);
  if (!(alpha > 0.0)) throw InvalidArgument("exact_alice_marginal: alpha must be > 0");
  // Xi0 and Xi1 are orthonormal columns, so summing over nB leaves
  // eta/2 (Xi0^2 + Xi1^2) + (1 - eta) Xi0^2.
  const double r = static_cast<double>(nA) / alpha - alpha;
  const double p0 = std::exp(2.0 * log_xi0_abs(nA, alpha));
  return p0 * (0.5 * eta * (1.0 + r * r) + 1.0 - eta);
}

double joint_prob(double dnA, double dnB, const CountModelParams& p) {
  p.validate_gaussian();
  const double a2 = p.alpha * p.alpha;
  const double g = std::exp(-(dnA * dnA + dnB * dnB) / (2.0 * a2)) / (2.0 * kPi * a2 * a2);
  return g * (0.5 * p.eta * (dnA * dnA + dnB * dnB + 2.0 * std::cos(p.phi) * dnA * dnB) +
              (1.0 - p.eta) * a2);
}

double joint_prob_ref(double nA, double nB, const CountModelParams& p) {
  p.validate_gaussian();
  const double a2 = p.alpha * p.alpha;
  const double g = std::exp(-(nA * nA + nB * nB) / (4.0 * a2)) / (32.0 * kPi * a2 * a2);
  return g * (p.eta * (nA * nA + nB * nB + 2.0 * std::cos(p.phi) * nA * nB) + 4.0 * (2.0 - p.eta) * a2);
}

double joint_prob_ref_numeric(double nA, double nB, const CountModelParams& p) {
  p.validate_gaussian();
  const double s = p.alpha;  // reference standard deviation
  const double reach = 10.0 * s;
  // Measured count = signal - reference; the reference law is even, so the
  // convolution integrates joint_prob(nA + rA, nB + rB) against both pdfs.
  auto inner = [&](double rA) {
    auto f = [&](double rB) { return joint_prob(nA + rA, nB + rB, p) * norm_pdf(rB, s); };
    return integrate(f, -reach, reach) * norm_pdf(rA, s);
  };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(inner, -reach, reach, 15, kTolerance, &err);
}

double alice_marginal_ref(double nA, const CountModelParams& p) {
  p.validate_gaussian();
  const double a2 = p.alpha * p.alpha;
  return std::exp(-nA * nA / (4.0 * a2)) / (16.0 * std::sqrt(kPi) * a2 * p.alpha) *
         (p.eta * nA * nA + (8.0 - 2.0 * p.eta) * a2);
}

double alice_marginal_cdf_ref(double nA, const CountModelParams& p) {
  p.validate_gaussian();
  const double a2 = p.alpha * p.alpha;
  return quad_gauss_cdf(nA, std::sqrt(2.0 * a2), p.eta, 0.0, (8.0 - 2.0 * p.eta) * a2);
}

double alice_marginal_std(const CountModelParams& p) {
  p.validate();
  return p.alpha * std::sqrt(2.0 + p.eta);
}

double conditional_density(double nB, double nA, const CountModelParams& p) {
  p.validate_gaussian();
  const auto q = conditional_quadratic(nA, p);
  return norm_pdf(nB, q.s) * (q.a * nB * nB + q.b * nB + q.c) / (q.a * q.s * q.s + q.c);
}

double conditional_mean(double nA, const CountModelParams& p) {
  p.validate_gaussian();
  const double a2 = p.alpha * p.alpha;
  return 4.0 * a2 * nA * p.eta * std::cos(p.phi) / (p.eta * (nA * nA - 2.0 * a2) + 8.0 * a2);
}

double conditional_variance(double nA, const CountModelParams& p) {
  p.validate_gaussian();
  const double a2 = p.alpha * p.alpha;
  const double denom = 2.0 * a2 * (4.0 - p.eta) + nA * nA * p.eta;
  const double c = std::cos(p.phi);
  return 2.0 * a2 * (2.0 * a2 * (p.eta + 4.0) + nA * nA * p.eta) / denom -
         16.0 * a2 * a2 * nA * nA * p.eta * p.eta * c * c / (denom * denom);
}

double variance_peak_ratio(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("variance_peak_ratio: eta must lie in [0, 1]");
  return (4.0 + eta) / (4.0 - eta);
}

BinMoments bin_moments(const CountModelParams& p, double lo, double hi) {
  p.validate_gaussian();
  if (!(hi > lo)) throw InvalidArgument("bin_moments: empty interval");
  const double reach = 14.0 * alice_marginal_std(p);
  lo = std::max(lo, -reach);
  hi = std::min(hi, reach);
  if (!(hi > lo)) return {0.0, 0.0, 0.0};
  auto mass_f = [&](double x) { return alice_marginal_ref(x, p); };
  auto m1_f = [&](double x) { return alice_marginal_ref(x, p) * conditional_mean(x, p); };
  auto m2_f = [&](double x) {
    const double m = conditional_mean(x, p);
    return alice_marginal_ref(x, p) * (conditional_variance(x, p) + m * m);
  };
  // Integrands are smooth on the scale of alpha; fixed Gauss-Legendre per
  // alpha-sized panel is accurate to far below sampling noise.
  const double panel = p.alpha;
  const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / panel)));
  const double h = (hi - lo) / panels;
  double mass = 0.0, m1 = 0.0, m2 = 0.0;
  using GL = boost::math::quadrature::gauss<double, 20>;
  for (int i = 0; i < panels; ++i) {
    const double a = lo + i * h, b = a + h;
    mass += GL::integrate(mass_f, a, b);
    m1 += GL::integrate(m1_f, a, b);
    m2 += GL::integrate(m2_f, a, b);
  }
  if (!(mass > 0.0)) return {0.0, 0.0, 0.0};
  const double mean = m1 / mass;
  return {mass, mean, m2 / mass - mean * mean};
}

bool favours_plus(double nB, double deltaA, const CountModelParams& p) {
  return conditional_density(nB, deltaA, p) > conditional_density(nB, -deltaA, p);
}

double distinguishability_error(const CountModelParams& p, double deltaA, DecisionRule rule) {
  p.validate_gaussian();
  if (!(deltaA > 0.0)) throw InvalidArgument("distinguishability_error: deltaA must be > 0");
  const auto qp = conditional_quadratic(deltaA, p);
  const auto qm = conditional_quadratic(-deltaA, p);
  const double s = qp.s;

  if (rule == DecisionRule::kThreshold) {
    // Decide "+" when nB > t. Errors: P+(nB < t) and P-(nB > t).
    auto err = [&](double t) {
      return 0.5 * (quad_gauss_cdf(t, s, qp.a, qp.b, qp.c) + 1.0 - quad_gauss_cdf(t, s, qm.a, qm.b, qm.c));
    };
    const auto best = boost::math::tools::brent_find_minima(err, -6.0 * s, 6.0 * s, 52);
    return std::min(best.second, 0.5);
  }

  // Bayes error: half the integral of min(p+, p-). Locate the crossings on a
  // scan and integrate each smooth piece separately.
  const double reach = 12.0 * s + std::abs(deltaA);
  auto fp = [&](double x) { return conditional_density(x, deltaA, p); };
  auto fm = [&](double x) { return conditional_density(x, -deltaA, p); };
  auto diff = [&](double x) { return fp(x) - fm(x); };
  std::vector<double> cuts{-reach};
  constexpr int kScan = 4000;
  const double h = 2.0 * reach / kScan;
  for (int i = 0; i < kScan; ++i) {
    double a = -reach + i * h, b = a + h;
    if (i == kScan - 1) b = reach;
    const double da = diff(a), db = diff(b);
    if (da == 0.0 || (da > 0.0) == (db > 0.0)) continue;
    for (int it = 0; it < 200 && b - a > 1e-12 * s; ++it) {
      const double mid = 0.5 * (a + b);
      ((diff(mid) > 0.0) == (da > 0.0) ? a : b) = mid;
    }
    cuts.push_back(0.5 * (a + b));
  }
  cuts.push_back(reach);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto f = [&](double x) { return std::min(fp(x), fm(x)); };
    total += integrate(f, cuts[i], cuts[i + 1]);
  }
  return 0.5 * total;
}

std::vector<CurvePoint> analytic_curve(const CountModelParams& p, std::span<const double> nA_points) {
  p.validate_gaussian();
  std::vector<CurvePoint> out;
  out.reserve(nA_points.size());
  for (double nA : nA_points) out.push_back({nA, conditional_mean(nA, p), conditional_variance(nA, p)});
  return out;
}

void write_curve_csv(std::ostream& os, std::span<const CurvePoint> curve) {
  os << "nA,mean_nB,var_nB\n";
  for (const auto& c : curve) {
    os << format_double(c.nA) << ',' << format_double(c.mean_nB) << ',' << format_double(c.var_nB) << '\n';
  }
}

}  // namespace macrocat::analytic
