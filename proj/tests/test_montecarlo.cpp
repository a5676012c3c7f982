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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "macrocat/analytic.hpp"
#include "macrocat/binning.hpp"
#include "macrocat/errors.hpp"
#include "macrocat/fock.hpp"
#include "macrocat/montecarlo.hpp"
#include "support/oracles.hpp"

namespace {

using namespace macrocat;
using analytic::CountModelParams;
using fock::CMatrix;
using fock::CVector;
using fock::FockDensityMatrix;

constexpr double kPi = std::numbers::pi;

struct Summary {
  double mean = 0, var = 0, se_mean = 0;
};

Summary summarize(const std::vector<double>& v) {
  Summary s;
  for (double x : v) s.mean += x;
  s.mean /= v.size();
  for (double x : v) s.var += (x - s.mean) * (x - s.mean);
  s.var /= v.size() - 1;
  s.se_mean = std::sqrt(s.var / v.size());
  return s;
}

TEST(CountSampler, DeterministicAndWorkerInvariant) {
  const CountModelParams p{1e4, 0.49, 0.0};
  const auto a = mc::sample_counts(p, 5000, 11, {1});
  const auto b = mc::sample_counts(p, 5000, 11, {3});
  const auto c = mc::sample_counts(p, 5000, 12, {1});
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  const auto e1 = mc::sample_counts_exact(20.0, 0.7, 1.0, 3000, 5, {1});
  const auto e3 = mc::sample_counts_exact(20.0, 0.7, 1.0, 3000, 5, {3});
  EXPECT_EQ(e1, e3);
  const auto rho = fock::lossy_delocalized_photon(0.49, 0.0, 4);
  EXPECT_EQ(mc::sample_quadratures(rho, 0.3, 0.0, 3000, 9, 100, {}, {1}),
            mc::sample_quadratures(rho, 0.3, 0.0, 3000, 9, 100, {}, {3}));
}

TEST(CountSampler, FirstShotOffsetsAreContiguous) {
  const auto rho = fock::lossy_delocalized_photon(0.8, 0.0, 4);
  const auto whole = mc::sample_quadratures(rho, 0.0, 0.0, 400, 3, 0);
  const auto tail = mc::sample_quadratures(rho, 0.0, 0.0, 200, 3, 200);
  for (std::size_t i = 0; i < 200; ++i) EXPECT_EQ(whole[200 + i], tail[i]);
}

TEST(CountSampler, BobMeanIsZero) {
  const CountModelParams p{1e4, 0.49, 0.0};
  const auto recs = mc::sample_counts(p, 1'000'000, 2024);
  std::vector<double> nb;
  nb.reserve(recs.size());
  for (const auto& r : recs) nb.push_back(r.dnB);
  const auto s = summarize(nb);
  EXPECT_LT(std::abs(s.mean), 4.0 * s.se_mean);
}

TEST(CountSampler, AliceMarginalKolmogorovSmirnov) {
  for (double eta : {0.0, 0.49, 1.0}) {
    const CountModelParams p{1e4, eta, 0.0};
    const auto recs = mc::sample_counts(p, 200'000, 77);
    std::vector<double> na;
    for (const auto& r : recs) na.push_back(r.dnA);
    const double d = oracle::ks_one_sample(na, [&](double x) { return analytic::alice_marginal_cdf_ref(x, p); });
    EXPECT_LT(d, oracle::ks_critical_1pct(static_cast<double>(na.size()))) << eta;
  }
}

TEST(CountSampler, AgreesWithRejectionOracle) {
  const double alpha = 1e4;
  for (double eta : {0.3, 1.0})
    for (double phi : {0.0, kPi / 2, 2.5}) {
      const std::size_t n = 100'000;
      const auto mix = mc::sample_counts({alpha, eta, phi}, n, 501);
      const auto rej = oracle::rejection_counts(alpha, eta, phi, n, 902);
      // Projections onto several directions probe the joint law.
      for (double t : {0.0, kPi / 4, kPi / 2, 3 * kPi / 4}) {
        std::vector<double> a, b;
        for (std::size_t i = 0; i < n; ++i) {
          a.push_back(mix[i].dnA * std::cos(t) + mix[i].dnB * std::sin(t));
          b.push_back(rej[i].first * std::cos(t) + rej[i].second * std::sin(t));
        }
        // Bonferroni over the 4 directions.
        const double crit = 1.8 * std::sqrt(2.0 / n);
        EXPECT_LT(oracle::ks_two_sample(a, b), crit) << eta << " " << phi << " " << t;
      }
      // Squared projections are sensitive to the |cos phi| correlation.
      std::vector<double> qa, qb;
      for (std::size_t i = 0; i < n; ++i) {
        qa.push_back(mix[i].dnA * mix[i].dnB);
        qb.push_back(rej[i].first * rej[i].second);
      }
      EXPECT_LT(oracle::ks_two_sample(qa, qb), 1.63 * std::sqrt(2.0 / n)) << eta << " " << phi;
    }
}

// Conditional variance of dB for dA in a set of windows, and its standard error.
struct WindowVariance {
  double var = 0, se = 0;
};

template <class InWindow>
WindowVariance window_variance_samples(const std::vector<mc::CountRecord>& recs, InWindow in) {
  std::vector<double> v;
  for (const auto& r : recs)
    if (in(r.dnA)) v.push_back(r.dnB);
  const auto s = summarize(v);
  double m4 = 0;
  for (double x : v) m4 += std::pow(x - s.mean, 4);
  m4 /= v.size();
  return {s.var, std::sqrt(std::max(0.0, m4 - s.var * s.var) / v.size())};
}

template <class InWindow>
double window_variance_law(const oracle::DiscreteLaw& law, InWindow in) {
  double m0 = 0, m1 = 0, m2 = 0;
  for (long da = law.d_lo; da < law.d_lo + law.width; ++da) {
    if (!in(static_cast<double>(da))) continue;
    for (long db = law.d_lo; db < law.d_lo + law.width; ++db) {
      const double p = law.at(da, db);
      m0 += p;
      m1 += p * db;
      m2 += p * db * db;
    }
  }
  return m2 / m0 - (m1 / m0) * (m1 / m0);
}

TEST(ExactSampler, VarianceRatioMatchesEnumeration) {
  const double alpha = 20.0;
  const auto law = oracle::exact_reference_law(alpha, 1.0, 0.0);
  double total = 0;
  for (double p : law.p) total += p;
  ASSERT_NEAR(total, 1.0, 1e-9);

  auto centre = [&](double d) { return std::abs(d) <= 0.5 * alpha; };
  auto tail = [&](double d) { return std::abs(d) >= 3.0 * alpha && std::abs(d) <= 4.0 * alpha; };
  const double ratio_law = window_variance_law(law, centre) / window_variance_law(law, tail);

  const auto recs = mc::sample_counts_exact(alpha, 1.0, 0.0, 1'000'000, 31337);
  const auto c = window_variance_samples(recs, centre);
  const auto t = window_variance_samples(recs, tail);
  const double ratio = c.var / t.var;
  const double se = ratio * std::hypot(c.se / c.var, t.se / t.var);
  EXPECT_NEAR(ratio, ratio_law, 4.0 * se) << "se " << se;
  EXPECT_GT(ratio_law, 1.1);
}

TEST(ExactSampler, JointLawChiSquare) {
  const double alpha = 12.0;
  const auto law = oracle::exact_reference_law(alpha, 0.6, 0.9);
  const std::size_t n = 400'000;
  const auto recs = mc::sample_counts_exact(alpha, 0.6, 0.9, n, 8);
  // Cells of 6 x 6 integer counts over +-60.
  const long w = 6, lo = -60, cells = 20;
  std::vector<double> expect(cells * cells, 0.0), seen(cells * cells, 0.0);
  for (long i = 0; i < cells; ++i)
    for (long j = 0; j < cells; ++j)
      for (long a = 0; a < w; ++a)
        for (long b = 0; b < w; ++b) expect[i * cells + j] += law.at(lo + i * w + a, lo + j * w + b) * n;
  for (const auto& r : recs) {
    const long i = static_cast<long>(std::floor((r.dnA - lo) / w)), j = static_cast<long>(std::floor((r.dnB - lo) / w));
    if (i >= 0 && i < cells && j >= 0 && j < cells) seen[i * cells + j] += 1;
  }
  double chi2 = 0;
  int dof = 0;
  for (std::size_t k = 0; k < expect.size(); ++k) {
    if (expect[k] < 20) continue;
    chi2 += (seen[k] - expect[k]) * (seen[k] - expect[k]) / expect[k];
    ++dof;
  }
  // Wilson-Hilferty 0.999 quantile.
  const double z = 3.09, k = dof;
  const double q = k * std::pow(1 - 2 / (9 * k) + z * std::sqrt(2 / (9 * k)), 3);
  EXPECT_LT(chi2, q) << "dof " << dof;
}

TEST(ExactSampler, AgreesWithGaussianSamplerAtModerateAlpha) {
  const double alpha = 25.0;
  const std::size_t n = 1'000'000;
  for (double phi : {0.0, kPi / 2}) {
    const auto exact = mc::sample_counts_exact(alpha, 0.49, phi, n, 17);
    const auto gauss = mc::sample_counts({alpha, 0.49, phi}, n, 18);
    // Half-integer edges so integer counts never sit on a boundary.
    const auto he = binning::joint_histogram(exact, -155.5, 154.5, 31);
    const auto hg = binning::joint_histogram(gauss, -155.5, 154.5, 31);
    EXPECT_LE(binning::total_variation(he, hg), 0.03) << phi;
  }
}

TEST(QuadratureSampler, VacuumVariance) {
  const auto rho = FockDensityMatrix::vacuum(4, 2);
  const auto recs = mc::sample_quadratures(rho, 0.7, 0.0, 200'000, 1);
  std::vector<double> xa;
  for (const auto& r : recs) xa.push_back(r.xA);
  const auto s = summarize(xa);
  const double se_var = s.var * std::sqrt(2.0 / xa.size());
  EXPECT_NEAR(s.var, fock::kVacuumQuadratureVariance, 4.0 * se_var);
  EXPECT_NEAR(s.mean, 0.0, 4.0 * s.se_mean);
}

TEST(QuadratureSampler, PhotonNodeAtOrigin) {
  CVector psi = CVector::Zero(16);
  psi(fock::two_mode_index(1, 0, 4)) = 1.0;
  const auto rho = FockDensityMatrix::from_pure(4, 2, psi);
  const auto recs = mc::sample_quadratures(rho, 0.0, 0.0, 1'000'000, 4);
  std::vector<double> xa;
  for (const auto& r : recs) xa.push_back(r.xA);
  const auto h = binning::histogram(xa, -5.05, 5.05, 101);
  const auto peak = *std::max_element(h.counts.begin(), h.counts.end());
  EXPECT_LT(static_cast<double>(h.counts[50]), 0.01 * static_cast<double>(peak));
}

// Oracle moments of X_thetaA, X_thetaB and their product from the Fock matrices.
struct QuadMoments {
  double a, b, aa, bb, ab;
};

QuadMoments oracle_moments(const FockDensityMatrix& rho, double ta, double tb) {
  const int d = rho.dim();
  const CMatrix id = CMatrix::Identity(d, d);
  const CMatrix xa = oracle::quadrature_operator(ta, d), xb = oracle::quadrature_operator(tb, d);
  return {oracle::expect_two_mode(rho, xa, id), oracle::expect_two_mode(rho, id, xb),
          oracle::expect_two_mode(rho, xa * xa, id), oracle::expect_two_mode(rho, id, xb * xb),
          oracle::expect_two_mode(rho, xa, xb)};
}

void expect_moments(const FockDensityMatrix& rho, double ta, double tb, std::uint64_t seed) {
  const std::size_t n = 200'000;
  const auto recs = mc::sample_quadratures(rho, ta, tb, n, seed);
  const auto ref = oracle_moments(rho, ta, tb);
  std::vector<double> a, b, aa, bb, ab;
  for (const auto& r : recs) {
    a.push_back(r.xA);
    b.push_back(r.xB);
    aa.push_back(r.xA * r.xA);
    bb.push_back(r.xB * r.xB);
    ab.push_back(r.xA * r.xB);
  }
  auto check = [](const std::vector<double>& v, double want, const char* what) {
    const auto s = summarize(v);
    EXPECT_NEAR(s.mean, want, 5.0 * s.se_mean) << what;
  };
  check(a, ref.a, "xA");
  check(b, ref.b, "xB");
  check(aa, ref.aa, "xA^2");
  check(bb, ref.bb, "xB^2");
  check(ab, ref.ab, "xA xB");
}

TEST(QuadratureSampler, DelocalizedPhotonCorrelation) {
  const auto rho = FockDensityMatrix::from_pure(4, 2, fock::delocalized_photon(0.0, 4));
  EXPECT_NEAR(oracle_moments(rho, 0, 0).ab, 0.5, 1e-12);
  expect_moments(rho, 0.0, 0.0, 21);
}

TEST(QuadratureSampler, MomentsForSeveralStates) {
  const int dim = 6;
  // Small displacement gives nonzero first moments and complex coherences.
  auto shifted = FockDensityMatrix::from_pure(dim, 2, fock::delocalized_photon(0.9, dim));
  shifted = fock::apply_operator(shifted, fock::displacement_matrix({0.4, -0.2}, dim), 0);
  expect_moments(fock::lossy_delocalized_photon(0.49, 1.7, dim), 0.4, 2.1, 31);
  expect_moments(fock::lossy_delocalized_photon(0.8, 0.0, dim, 0.6), kPi / 2, 0.0, 32);
  expect_moments(shifted, 1.1, 4.0, 33);
}

TEST(QuadratureSampler, RejectsBadInput) {
  const auto rho = FockDensityMatrix::vacuum(4, 2);
  EXPECT_THROW(mc::sample_quadratures(FockDensityMatrix::vacuum(4, 1), 0, 0, 10, 1), InvalidArgument);
  EXPECT_THROW(mc::sample_quadratures(rho, 0, 0, 0, 1), InvalidArgument);
  EXPECT_THROW(mc::sample_quadratures(rho, 0, 0, 10, 1, 0, {8.0, 0.05}), InvalidArgument);
  // A grid far too narrow for the state loses mass.
  const auto d = fock::displacement_matrix(2.0, 24);
  auto far = fock::apply_operator(FockDensityMatrix::vacuum(24, 2), d, 0);
  EXPECT_THROW(mc::sample_quadratures(far, 0, 0, 10, 1, 0, {1.0, 0.02}), NumericError);
}

TEST(CountSampler, RejectsBadInput) {
  EXPECT_THROW(mc::sample_counts({5.0, 0.5, 0.0}, 10, 1), InvalidArgument);
  EXPECT_THROW(mc::sample_counts({1e4, 0.5, 0.0}, 0, 1), InvalidArgument);
  EXPECT_THROW(mc::sample_counts_exact(31.0, 0.5, 0.0, 10, 1), InvalidArgument);
  EXPECT_THROW(mc::sample_counts_exact(10.0, 1.5, 0.0, 10, 1), InvalidArgument);
}

TEST(PhaseSchedule, UniformGrids) {
  const auto four = mc::phase_schedule(4);
  ASSERT_EQ(four.size(), 4u);
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(four[k].thetaA, k * kPi / 2, 1e-15);
    EXPECT_EQ(four[k].thetaB, 0.0);
  }
  const auto twelve = mc::phase_schedule(12);
  ASSERT_EQ(twelve.size(), 12u);
  for (int k = 0; k < 12; ++k) {
    EXPECT_NEAR(twelve[k].thetaA, 2 * kPi * k / 12, 1e-15);
    EXPECT_EQ(twelve[k].thetaB, 0.0);
  }
  const auto sweep = mc::phase_schedule(12, mc::PhaseMode::kSweep);
  for (const auto& s : sweep) {
    EXPECT_GE(s.thetaB, 0.0);
    EXPECT_LT(s.thetaB, 2 * kPi);
  }
  EXPECT_NE(sweep[1].thetaB, sweep[2].thetaB);
  EXPECT_THROW(mc::phase_schedule(3), InvalidArgument);
}

TEST(WrapPhase, Range) {
  EXPECT_EQ(mc::wrap_phase(0.0), 0.0);
  EXPECT_NEAR(mc::wrap_phase(-0.5), 2 * kPi - 0.5, 1e-15);
  EXPECT_NEAR(mc::wrap_phase(7.0), 7.0 - 2 * kPi, 1e-15);
  EXPECT_LT(mc::wrap_phase(2 * kPi), 2 * kPi);
}

TEST(RecordCsv, RoundTrip) {
  const auto counts = mc::sample_counts({1e4, 0.49, 0.0}, 50, 3);
  std::stringstream cs;
  mc::write_counts_csv(cs, counts);
  EXPECT_EQ(mc::read_counts_csv(cs), counts);

  const auto quads = mc::sample_quadratures(FockDensityMatrix::vacuum(3, 2), 1.0, 2.0, 50, 3, 7);
  std::stringstream qs;
  mc::write_quadratures_csv(qs, quads);
  EXPECT_EQ(mc::read_quadratures_csv(qs), quads);

  std::stringstream bad("a,b\n1,2\n");
  EXPECT_THROW(mc::read_counts_csv(bad), ConfigError);
  std::stringstream empty;
  EXPECT_THROW(mc::read_quadratures_csv(empty), IoError);
}

}  // namespace
