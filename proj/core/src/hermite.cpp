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

#include "macrocat/hermite.hpp"

#include <cmath>

#include "macrocat/errors.hpp"

namespace macrocat::fock {

void hermite_functions(double x, std::span<double> out) {
  if (out.empty()) return;
  constexpr double kPiQuarter = 0.75112554446494248;  // pi^{-1/4}
  out[0] = kPiQuarter * std::exp(-0.5 * x * x);
  if (out.size() == 1) return;
  out[1] = std::sqrt(2.0) * x * out[0];
  for (std::size_t n = 1; n + 1 < out.size(); ++n) {
    const double np1 = static_cast<double>(n + 1);
    out[n + 1] = std::sqrt(2.0 / np1) * x * out[n] - std::sqrt(static_cast<double>(n) / np1) * out[n - 1];
  }
}

HermiteTable::HermiteTable(std::span<const double> grid, int dim)
    : dim_(dim), points_(grid.size()) {
  if (dim < 1) throw InvalidArgument("HermiteTable: dim must be positive");
  values_.resize(points_ * static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < points_; ++i) {
    hermite_functions(grid[i], {values_.data() + i * dim_, static_cast<std::size_t>(dim_)});
  }
}

}  // namespace macrocat::fock
