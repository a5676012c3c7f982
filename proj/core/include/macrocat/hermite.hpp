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

#include <span>
#include <vector>

namespace macrocat::fock {

/// Normalized oscillator eigenfunctions psi_0..psi_{out.size()-1} at x,
/// with psi_0 = pi^{-1/4} exp(-x^2/2). Uses the three-term recurrence on
/// the normalized functions, so it stays finite for large n.
void hermite_functions(double x, std::span<double> out);

/// Row-major table psi_n(grid[i]) of shape grid.size() x dim.
class HermiteTable {
 public:
  HermiteTable(std::span<const double> grid, int dim);

  int dim() const { return dim_; }
  std::size_t points() const { return points_; }
  double operator()(std::size_t i, int n) const { return values_[i * dim_ + n]; }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * dim_, static_cast<std::size_t>(dim_)};
  }

 private:
  int dim_;
  std::size_t points_;
  std::vector<double> values_;
};

}  // namespace macrocat::fock
