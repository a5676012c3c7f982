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

#include "macrocat/errors.hpp"
#include "macrocat/fock.hpp"
#include "macrocat/hermite.hpp"
#include "macrocat/wigner.hpp"
#include "support/oracles.hpp"

namespace {

using namespace macrocat;
using fock::CVector;
using fock::FockDensityMatrix;

TEST(Hermite, MatchesPolynomialForm) {
  std::vector<double> out(25);
  for (double x : {-3.7, -1.0, 0.0, 0.4, 2.2, 5.0}) {
    fock::hermite_functions(x, out);
    for (int n = 0; n < 25; ++n) EXPECT_NEAR(out[n], oracle::hermite_function(n, x), 1e-12) << n << " " << x;
  }
}

TEST(Hermite, HighOrderOrthonormal) {
  const int dim = 120;
  auto overlap = [&](int m, int n) {
    std::vector<double> buf(dim);
    return oracle::simpson(
        [&](double x) {
          fock::hermite_functions(x, buf);
          return buf[m] * buf[n];
        },
        -22.0, 22.0, 8000);
  };
  EXPECT_NEAR(overlap(100, 100), 1.0, 1e-9);
  EXPECT_NEAR(overlap(119, 119), 1.0, 1e-9);
  EXPECT_NEAR(overlap(100, 102), 0.0, 1e-9);
  EXPECT_NEAR(overlap(3, 117), 0.0, 1e-9);
}

TEST(Hermite, TableRows) {
  const std::vector<double> grid{-1.5, 0.0, 2.5};
  const fock::HermiteTable table(grid, 10);
  std::vector<double> ref(10);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    fock::hermite_functions(grid[i], ref);
    for (int n = 0; n < 10; ++n) EXPECT_EQ(table(i, n), ref[n]);
    EXPECT_EQ(table.row(i).size(), 10u);
  }
}

// W(x, p) = (1/pi) int <x+y|rho|x-y> e^{-2ipy} dy.
double wigner_oracle(const FockDensityMatrix& rho, double x, double p) {
  const int d = rho.dim();
  auto integrand_re = [&](double y) {
    std::complex<double> s = 0.0;
    for (int m = 0; m < d; ++m)
      for (int n = 0; n < d; ++n)
        s += rho(m, n) * oracle::hermite_function(m, x + y) * oracle::hermite_function(n, x - y);
    return (s * std::polar(1.0, -2.0 * p * y)).real();
  };
  return oracle::simpson(integrand_re, -10.0, 10.0, 2000) / std::numbers::pi;
}

FockDensityMatrix test_state() {
  CVector psi(5);
  psi << 0.6, std::complex<double>(0.3, -0.4), 0.2, std::complex<double>(0.0, 0.5), 0.1;
  return FockDensityMatrix::from_pure(5, 1, psi);
}

// W at one phase-space point, through a minimal two-point grid.
double wigner_at(const FockDensityMatrix& rho, double x, double p) {
  const std::vector<double> xs{x, x + 0.1}, ps{p, p + 0.1};
  return fock::wigner(rho, xs, ps).at(0, 0);
}

TEST(Wigner, KnownOriginValues) {
  EXPECT_NEAR(wigner_at(FockDensityMatrix::vacuum(4, 1), 0.0, 0.0), 1.0 / std::numbers::pi, 1e-14);
  EXPECT_NEAR(wigner_at(FockDensityMatrix::number_state(4, 1), 0.0, 0.0), -1.0 / std::numbers::pi, 1e-14);
}

TEST(Wigner, MatchesWeylIntegral) {
  const auto rho = test_state();
  const auto xs = fock::linspace(-1.3, 0.8, 8), ps = fock::linspace(-0.6, 1.9, 6);
  const auto grid = fock::wigner(rho, xs, ps);
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < ps.size(); ++j) EXPECT_NEAR(grid.at(i, j), wigner_oracle(rho, xs[i], ps[j]), 1e-10);
}

TEST(Wigner, NormalizedAndMarginals) {
  const auto rho = test_state();
  const auto x = fock::linspace(-8, 8, 321);
  const auto grid = fock::wigner(rho, x, x);
  EXPECT_NEAR(grid.integral(), 1.0, 1e-9);

  const auto xm = grid.x_marginal();
  const auto qx = fock::quadrature_marginal(rho, 0.0, x);
  // Integrating over x instead gives the p quadrature.
  std::vector<double> pm(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    std::vector<double> col(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) col[i] = grid.at(i, j);
    pm[j] = fock::trapezoid(x, col);
  }
  const auto qp = fock::quadrature_marginal(rho, std::numbers::pi / 2, x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_NEAR(xm[i], qx[i], 1e-9);
    EXPECT_NEAR(pm[i], qp[i], 1e-9);
  }
}

TEST(Wigner, CoherentStateCentre) {
  const int dim = 40;
  const std::complex<double> alpha(1.0, -0.5);
  const auto d = fock::displacement_matrix(alpha, dim);
  const auto rho = FockDensityMatrix::from_pure(dim, 1, d.elements.col(0));
  EXPECT_NEAR(wigner_at(rho, std::numbers::sqrt2 * alpha.real(), std::numbers::sqrt2 * alpha.imag()),
              1.0 / std::numbers::pi, 1e-10);
}

TEST(Wigner, RejectsBadGrids) {
  const auto rho = FockDensityMatrix::vacuum(3, 1);
  const std::vector<double> coarse{0.0, 1.0}, backwards{1.0, 0.5}, ok{0.0};
  EXPECT_THROW(fock::wigner(rho, coarse, ok), InvalidArgument);
  EXPECT_THROW(fock::wigner(rho, backwards, ok), InvalidArgument);
  EXPECT_THROW(fock::wigner(FockDensityMatrix::vacuum(3, 2), ok, ok), InvalidArgument);
}

TEST(Wigner, CsvLayout) {
  const std::vector<double> g{-0.25, 0.25};
  std::ostringstream os;
  fock::write_wigner_csv(os, fock::wigner(FockDensityMatrix::vacuum(3, 1), g, g));
  std::istringstream is(os.str());
  std::string line;
  int rows = 0;
  std::getline(is, line);
  EXPECT_EQ(line, "x,p,W");
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 4);
}

}  // namespace
