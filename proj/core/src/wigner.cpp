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

#include "macrocat/wigner.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "macrocat/errors.hpp"
#include "macrocat/serialization.hpp"

namespace macrocat::fock {

namespace {

void check_grid(std::span<const double> g, const char* name) {
  if (g.size() < 2) throw InvalidArgument(std::string("wigner: ") + name + " grid needs >= 2 points");
  for (std::size_t i = 1; i < g.size(); ++i) {
    const double h = g[i] - g[i - 1];
    if (!(h > 0.0)) throw InvalidArgument(std::string("wigner: ") + name + " grid must increase");
    if (h > kMaxWignerSpacing) {
      throw InvalidArgument(std::string("wigner: ") + name + " grid spacing " + std::to_string(h) +
                            " is coarser than 0.5");
    }
  }
}

}  // namespace

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + h * static_cast<double>(i);
  out.back() = hi;
  return out;
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return s;
}

std::vector<double> WignerGrid::x_marginal() const {
  std::vector<double> out(x.size());
  for (std::size_t ix = 0; ix < x.size(); ++ix) {
    out[ix] = trapezoid(p, {values.data() + ix * p.size(), p.size()});
  }
  return out;
}

double WignerGrid::integral() const {
  const auto m = x_marginal();
  return trapezoid(x, m);
}

// Iterative Laguerre recurrence for the Wigner function of |m><n|, built
// column by column so each grid point costs O(dim^2).
WignerGrid wigner(const FockDensityMatrix& rho, std::span<const double> x_grid,
                  std::span<const double> p_grid) {
  if (rho.modes() != 1) throw InvalidArgument("wigner: single-mode state required");
  check_grid(x_grid, "x");
  check_grid(p_grid, "p");
  const int d = rho.dim();
  WignerGrid out;
  out.x.assign(x_grid.begin(), x_grid.end());
  out.p.assign(p_grid.begin(), p_grid.end());
  out.values.resize(x_grid.size() * p_grid.size());

  std::vector<Complex> wl(static_cast<std::size_t>(d));
  for (std::size_t ix = 0; ix < x_grid.size(); ++ix) {
    for (std::size_t ip = 0; ip < p_grid.size(); ++ip) {
      const Complex a(x_grid[ix] / std::sqrt(2.0), p_grid[ip] / std::sqrt(2.0));
      wl[0] = std::exp(-2.0 * std::norm(a)) / std::numbers::pi;
      double w = rho(0, 0).real() * wl[0].real();
      for (int n = 1; n < d; ++n) {
        wl[n] = 2.0 * a * wl[n - 1] / std::sqrt(static_cast<double>(n));
        w += 2.0 * (rho(0, n) * wl[n]).real();
      }
      for (int m = 1; m < d; ++m) {
        Complex temp = wl[m];
        wl[m] = (2.0 * std::conj(a) * temp - std::sqrt(static_cast<double>(m)) * wl[m - 1]) /
                std::sqrt(static_cast<double>(m));
        w += (rho(m, m) * wl[m]).real();
        for (int n = m + 1; n < d; ++n) {
          const Complex next = (2.0 * a * wl[n - 1] - std::sqrt(static_cast<double>(m)) * temp) /
                               std::sqrt(static_cast<double>(n));
          temp = wl[n];
          wl[n] = next;
          w += 2.0 * (rho(m, n) * wl[n]).real();
        }
      }
      out.values[ix * p_grid.size() + ip] = w;
    }
  }
  return out;
}

void write_wigner_csv(std::ostream& os, const WignerGrid& grid) {
  os << "x,p,W\n";
  for (std::size_t ix = 0; ix < grid.x.size(); ++ix)
    for (std::size_t ip = 0; ip < grid.p.size(); ++ip)
      os << format_double(grid.x[ix]) << ',' << format_double(grid.p[ip]) << ','
         << format_double(grid.at(ix, ip)) << '\n';
}

}  // namespace macrocat::fock
