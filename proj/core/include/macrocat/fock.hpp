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

// Truncated Fock-space states of one or two optical modes.
//
// Two-mode basis ordering is |nA, nB> -> row nA * dim + nB (Alice is the
// slow index). Quadratures follow a = (X + iP)/sqrt(2), so the vacuum has
// quadrature variance 1/2 and a real displacement alpha moves the mean of X
// to alpha * sqrt(2).

#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace macrocat::fock {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kVacuumQuadratureVariance = 0.5;
inline constexpr double kHermitianTolerance = 1e-10;
inline constexpr double kTraceTolerance = 1e-8;
inline constexpr double kPsdTolerance = 1e-8;
/// Population in the last retained Fock level above which truncation is
/// reported.
inline constexpr double kTruncationWarnPopulation = 1e-6;

/// Mean of X after a displacement by real alpha.
inline double displaced_x_mean(double alpha) { return alpha * 1.4142135623730951; }

/// Single-mode operator on a dim-level truncated Fock space.
struct ModeOperator {
  int dim = 0;
  CMatrix elements;
};

/// Hermitian operator on (dim)^modes, modes in {1, 2}.
///
/// Construction checks shape and Hermiticity and stores the exact Hermitian
/// part; trace and positivity are checked by validate(), which is not run
/// implicitly because it needs a full eigendecomposition.
class FockDensityMatrix {
 public:
  FockDensityMatrix(int dim, int modes, CMatrix elements);

  /// |psi><psi| / <psi|psi>.
  static FockDensityMatrix from_pure(int dim, int modes, const CVector& psi);
  static FockDensityMatrix vacuum(int dim, int modes);
  /// Single-mode |n><n|.
  static FockDensityMatrix number_state(int dim, int n);

  int dim() const { return dim_; }
  int modes() const { return modes_; }
  Eigen::Index size() const { return elements_.rows(); }
  const CMatrix& matrix() const { return elements_; }
  Complex operator()(Eigen::Index row, Eigen::Index col) const { return elements_(row, col); }

  /// Element <nA,nB| rho |mA,mB> of a two-mode state.
  Complex element(int nA, int nB, int mA, int mB) const;

  double trace() const;
  FockDensityMatrix normalized() const;
  double min_eigenvalue() const;

  /// Throws NumericError unless |tr - 1| <= trace_tol and all eigenvalues
  /// are >= -psd_tol.
  void validate(double trace_tol = kTraceTolerance, double psd_tol = kPsdTolerance) const;

  /// Largest population found in Fock level dim-1 over all modes.
  double trailing_population() const;

 private:
  int dim_;
  int modes_;
  CMatrix elements_;
};

/// Two-mode basis index of |nA, nB>.
inline Eigen::Index two_mode_index(int nA, int nB, int dim) {
  return static_cast<Eigen::Index>(nA) * dim + nB;
}

/// <m|D(alpha)|n> for m, n < dim from the associated-Laguerre closed form.
/// Warns when |alpha|^2 > dim / 4.
ModeOperator displacement_matrix(Complex alpha, int dim);

/// U rho U^dagger with U acting on `mode`. No renormalization.
FockDensityMatrix apply_operator(const FockDensityMatrix& rho, const ModeOperator& op, int mode);

/// U psi on `mode` of a state vector with the given number of modes.
CVector apply_operator(const CVector& psi, const ModeOperator& op, int mode, int modes);

/// Bosonic loss (beam splitter of transmissivity eta to vacuum) on `mode`,
/// via the Kraus sum E_k = sum_n sqrt(C(n,k) eta^(n-k) (1-eta)^k) |n-k><n|.
FockDensityMatrix apply_loss(const FockDensityMatrix& rho, double eta, int mode);

/// (|0,1> + e^{i phi} |1,0>) / sqrt(2).
CVector delocalized_photon(double phi, int dim);

/// eta |Psi0><Psi0| + (1 - eta) |00><00|, with the |01><10| coherence
/// scaled by `coherence_factor` (1 = no dephasing).
FockDensityMatrix lossy_delocalized_photon(double eta, double phi, int dim,
                                           double coherence_factor = 1.0);

/// Pure two-mode state (D|0>D|1> + e^{i phi} D|1>D|0>) / sqrt(2), D = D(alpha).
FockDensityMatrix build_macro_state(double alpha, double phi, int dim);

/// Restriction to the first new_dim Fock levels of every mode, without
/// renormalization.
FockDensityMatrix truncate(const FockDensityMatrix& rho, int new_dim);

/// Reduced single-mode state of a two-mode rho.
FockDensityMatrix partial_trace(const FockDensityMatrix& rho, int keep_mode);

/// Photon-number distribution of one mode.
std::vector<double> photon_distribution(const FockDensityMatrix& rho, int mode);

struct PhotonMoments {
  double mean = 0.0;
  double variance = 0.0;
};

PhotonMoments photon_moments(const FockDensityMatrix& rho, int mode);

/// Bob's normalized state after Alice counts nA photons on the displaced
/// delocalized photon: Xi1(nA) D|0> + e^{i phi} Xi0(nA) D|1>.
/// Throws DegenerateInput if both amplitudes underflow.
CVector conditional_bob_state(long nA, double alpha, double phi, int dim);

/// pr(x | theta) = sum rho_mn psi_m(x) psi_n(x) e^{-i theta (m - n)} for a
/// single-mode state, or for `mode` of a two-mode state.
std::vector<double> quadrature_marginal(const FockDensityMatrix& rho, double theta,
                                        std::span<const double> grid, int mode = 0);

/// Emits a warning when rho has more than kTruncationWarnPopulation in its
/// last Fock level. Returns true if it warned.
bool check_truncation(const FockDensityMatrix& rho, const char* context);

}  // namespace macrocat::fock
