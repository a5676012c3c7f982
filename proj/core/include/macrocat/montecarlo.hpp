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

// Seeded samplers for synthetic detector records.
//
// Every shot draws from its own counter-based stream keyed by (seed, shot
// index), so results do not depend on the worker count and records always
// come back ordered by shot index.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "macrocat/analytic.hpp"
#include "macrocat/fock.hpp"
#include "macrocat/rng.hpp"

namespace macrocat::mc {

/// One balanced-detection shot: signal minus reference photon numbers in
/// each channel, plus the phase setting that produced it.
struct CountRecord {
  std::uint64_t shot = 0;
  double dnA = 0.0;
  double dnB = 0.0;
  double phi_setting = 0.0;

  friend bool operator==(const CountRecord&, const CountRecord&) = default;
};

/// One two-mode homodyne shot. Phases lie in [0, 2 pi).
struct QuadratureRecord {
  std::uint64_t shot = 0;
  double thetaA = 0.0;
  double xA = 0.0;
  double thetaB = 0.0;
  double xB = 0.0;

  friend bool operator==(const QuadratureRecord&, const QuadratureRecord&) = default;
};

inline constexpr double kMaxExactAlpha = 30.0;

/// 0 selects std::thread::hardware_concurrency().
struct Parallelism {
  unsigned workers = 0;
};

/// Exact draws from the reference-relative Gaussian-regime law. In rotated
/// coordinates u = (nA + nB)/sqrt(2), v = (nA - nB)/sqrt(2) the law is a
/// three-component mixture (plain 2D Gaussian, and a Gaussian weighted by
/// u^2 or by v^2), sampled component-wise with signed chi(3) radii.
std::vector<CountRecord> sample_counts(const analytic::CountModelParams& params, std::uint64_t n_shots,
                                       std::uint64_t seed, Parallelism par = {},
                                       rng::StreamTag tag = rng::StreamTag::kCounts);

/// Draws integer counts from the exact Fock-basis law (alpha <= 30) and
/// subtracts independent Poissonian reference counts of mean alpha^2.
std::vector<CountRecord> sample_counts_exact(double alpha, double eta, double phi, std::uint64_t n_shots,
                                             std::uint64_t seed, Parallelism par = {});

/// Grid used for tabulating quadrature densities.
struct QuadratureGrid {
  double half_range = 8.0;
  double spacing = 0.02;
};

/// Joint (xA, xB) samples at fixed LO phases from a two-mode state by
/// conditional inverse-CDF sampling of the bilinear interpolant of the joint
/// density on the grid. Shot indices run first_shot, first_shot + 1, ...
std::vector<QuadratureRecord> sample_quadratures(const fock::FockDensityMatrix& rho, double thetaA,
                                                 double thetaB, std::uint64_t n_shots, std::uint64_t seed,
                                                 std::uint64_t first_shot = 0, QuadratureGrid grid = {},
                                                 Parallelism par = {});

enum class PhaseMode {
  kLocked,  ///< Bob locked at 0, Alice on a uniform grid over [0, 2 pi)
  kSweep,   ///< Alice on the uniform grid, Bob stepped by a golden-ratio stride
};

struct PhaseSetting {
  double thetaA = 0.0;
  double thetaB = 0.0;
  friend bool operator==(const PhaseSetting&, const PhaseSetting&) = default;
};

/// n_settings >= 4 LO phase pairs.
std::vector<PhaseSetting> phase_schedule(int n_settings, PhaseMode mode = PhaseMode::kLocked);

/// Wraps an angle into [0, 2 pi).
double wrap_phase(double theta);

// CSV with headers `shot,dnA,dnB,phi` and `shot,thetaA,xA,thetaB,xB`;
// floating fields use 17 significant digits.
void write_counts_csv(std::ostream& os, std::span<const CountRecord> records);
std::vector<CountRecord> read_counts_csv(std::istream& is);
void write_quadratures_csv(std::ostream& os, std::span<const QuadratureRecord> records);
std::vector<QuadratureRecord> read_quadratures_csv(std::istream& is);

}  // namespace macrocat::mc
