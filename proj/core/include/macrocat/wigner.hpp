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

#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "macrocat/fock.hpp"

namespace macrocat::fock {

/// Largest grid spacing accepted by wigner().
inline constexpr double kMaxWignerSpacing = 0.5;

/// W(x, p) sampled on a rectangular grid; values are row-major in x.
/// Normalized so that the integral over the plane is 1 (vacuum peak 1/pi).
struct WignerGrid {
  std::vector<double> x;
  std::vector<double> p;
  std::vector<double> values;

  double at(std::size_t ix, std::size_t ip) const { return values[ix * p.size() + ip]; }
  /// Trapezoid integral over p for each x.
  std::vector<double> x_marginal() const;
  /// Trapezoid integral over the whole grid.
  double integral() const;
};

WignerGrid wigner(const FockDensityMatrix& rho, std::span<const double> x_grid,
                  std::span<const double> p_grid);

/// CSV with header `x,p,W`, x-major.
void write_wigner_csv(std::ostream& os, const WignerGrid& grid);

/// n equally spaced points from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t n);

/// Trapezoid rule for samples on an arbitrary increasing grid.
double trapezoid(std::span<const double> x, std::span<const double> y);

}  // namespace macrocat::fock
