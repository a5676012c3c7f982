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

// Two-mode homodyne tomography by maximum likelihood.
//
// Each record (thetaA, xA, thetaB, xB) is the rank-1 POVM element |v><v|,
// v = |xA, thetaA> (x) |xB, thetaB>, with <n|x, theta> = psi_n(x) e^{i n theta}.
// The iteration is rho <- R rho R / tr, R = (1/N) sum_j |v_j><v_j| / p_j,
// optionally over-relaxed to R^t rho R^t while the likelihood keeps rising.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "macrocat/fock.hpp"
#include "macrocat/montecarlo.hpp"

namespace macrocat::tomo {

inline constexpr std::size_t kMinRecords = 1000;
inline constexpr int kMinPhaseSettings = 4;

/// <n|x, theta> for n < dim.
fock::CVector quadrature_povm_vector(double theta, double x, int dim);

struct MleOptions {
  int dim = 4;
  int max_iter = 2000;
  double tol = 1e-8;  ///< max-element change between iterates
  /// Largest exponent t of the over-relaxed step R^t rho R^t; 1 gives the
  /// plain iteration.
  double max_power = 16.0;
  /// Histogram x in bins of `bin_width` over [-bin_range, bin_range] per
  /// phase setting instead of using every record. Faster, slightly biased.
  bool binned = false;
  double bin_width = 0.1;
  double bin_range = 8.0;
  unsigned workers = 0;
};

struct TomographyResult {
  fock::FockDensityMatrix rho = fock::FockDensityMatrix::vacuum(2, 2);
  /// Mean log-likelihood per record: the start value, then one per iteration.
  std::vector<double> loglik_trace;
  int iterations = 0;
  bool converged = false;
  double concurrence = 0.0;
};

TomographyResult mle_reconstruct(std::span<const mc::QuadratureRecord> records, const MleOptions& options = {});

/// 2 (|rho_{01,10}| - sqrt(rho_{00,00} rho_{11,11})), clamped to [0, 1].
/// Warns when more than 5% of the population lies outside span{|00>, |01>,
/// |10>, |11>}.
double concurrence(const fock::FockDensityMatrix& rho);

/// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const fock::FockDensityMatrix& rho, const fock::FockDensityMatrix& sigma);

/// {dim, modes, re, im, loglik, concurrence, iterations, converged}.
nlohmann::json result_to_json(const TomographyResult& result);

}  // namespace macrocat::tomo
