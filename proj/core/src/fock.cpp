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

#include "macrocat/fock.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <string>

#include "macrocat/analytic.hpp"
#include "macrocat/errors.hpp"
#include "macrocat/hermite.hpp"

namespace macrocat::fock {

namespace {

Eigen::Index full_size(int dim, int modes) {
  return modes == 1 ? dim : static_cast<Eigen::Index>(dim) * dim;
}

void check_mode(const FockDensityMatrix& rho, int mode) {
  if (mode < 0 || mode >= rho.modes()) {
    throw InvalidArgument("mode index " + std::to_string(mode) + " out of range for a " +
                          std::to_string(rho.modes()) + "-mode state");
  }
}

}  // namespace

FockDensityMatrix::FockDensityMatrix(int dim, int modes, CMatrix elements)
    : dim_(dim), modes_(modes), elements_(std::move(elements)) {
  if (dim < 1) throw InvalidArgument("FockDensityMatrix: dim must be positive");
  if (modes != 1 && modes != 2) throw InvalidArgument("FockDensityMatrix: modes must be 1 or 2");
  const Eigen::Index n = full_size(dim, modes);
  if (elements_.rows() != n || elements_.cols() != n) {
    throw InvalidArgument("FockDensityMatrix: matrix must be dim^modes square");
  }
  const double asym = (elements_ - elements_.adjoint()).cwiseAbs().maxCoeff();
  if (!(asym <= kHermitianTolerance)) {
    throw NumericError("FockDensityMatrix: matrix is not Hermitian (max |rho - rho^dag| = " +
                       std::to_string(asym) + ")");
  }
  CMatrix herm = 0.5 * (elements_ + elements_.adjoint());
  elements_ = std::move(herm);
}

FockDensityMatrix FockDensityMatrix::from_pure(int dim, int modes, const CVector& psi) {
  if (psi.size() != full_size(dim, modes)) {
    throw InvalidArgument("from_pure: vector length must be dim^modes");
  }
  const double norm2 = psi.squaredNorm();
  if (!(norm2 > 0.0)) throw NumericError("from_pure: zero vector");
  return FockDensityMatrix(dim, modes, psi * psi.adjoint() / norm2);
}

FockDensityMatrix FockDensityMatrix::vacuum(int dim, int modes) {
  CVector psi = CVector::Zero(full_size(dim, modes));
  psi(0) = 1.0;
  return from_pure(dim, modes, psi);
}

FockDensityMatrix FockDensityMatrix::number_state(int dim, int n) {
  if (n < 0 || n >= dim) throw InvalidArgument("number_state: n outside truncation");
  CVector psi = CVector::Zero(dim);
  psi(n) = 1.0;
  return from_pure(dim, 1, psi);
}

Complex FockDensityMatrix::element(int nA, int nB, int mA, int mB) const {
  if (modes_ != 2) throw InvalidArgument("element(nA, nB, mA, mB) needs a two-mode state");
  return elements_(two_mode_index(nA, nB, dim_), two_mode_index(mA, mB, dim_));
}

double FockDensityMatrix::trace() const { return elements_.trace().real(); }

FockDensityMatrix FockDensityMatrix::normalized() const {
  const double tr = trace();
  if (!(tr > 0.0)) throw NumericError("normalize: non-positive trace");
  return FockDensityMatrix(dim_, modes_, elements_ / tr);
}

double FockDensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(elements_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void FockDensityMatrix::validate(double trace_tol, double psd_tol) const {
  const double tr = trace();
  if (!(std::abs(tr - 1.0) <= trace_tol)) {
    throw NumericError("density matrix trace " + std::to_string(tr) + " differs from 1");
  }
  const double lmin = min_eigenvalue();
  if (!(lmin >= -psd_tol)) {
    throw NumericError("density matrix has negative eigenvalue " + std::to_string(lmin));
  }
}

double FockDensityMatrix::trailing_population() const {
  double worst = 0.0;
  for (int mode = 0; mode < modes_; ++mode) {
    const auto p = photon_distribution(*this, mode);
    worst = std::max(worst, p.back());
  }
  return worst;
}

bool check_truncation(const FockDensityMatrix& rho, const char* context) {
  const double tail = rho.trailing_population();
  if (tail > kTruncationWarnPopulation) {
    warn(std::string(context) + ": population " + std::to_string(tail) +
         " in the last Fock level; truncation dim=" + std::to_string(rho.dim()) + " is too small");
    return true;
  }
  return false;
}

ModeOperator displacement_matrix(Complex alpha, int dim) {
  if (dim < 2) throw InvalidArgument("displacement_matrix: dim must be >= 2");
  const double a2 = std::norm(alpha);
  if (a2 > dim / 4.0) {
    warn("displacement_matrix: |alpha|^2 = " + std::to_string(a2) + " exceeds dim/4 (dim=" +
         std::to_string(dim) + "); truncation dominates");
  }
  ModeOperator op{dim, CMatrix::Identity(dim, dim)};
  if (a2 == 0.0) return op;

  const double log_abs = 0.5 * std::log(a2);
  const Complex unit = alpha / std::abs(alpha);
  std::vector<double> lag(static_cast<std::size_t>(dim));

  // <m|D|n> = sqrt(n!/m!) alpha^(m-n) e^{-|a|^2/2} L_n^(m-n)(|a|^2), m >= n,
  // and <m|D|n> = sqrt(m!/n!) (-alpha*)^(n-m) e^{-|a|^2/2} L_m^(n-m)(|a|^2), m < n.
  for (int k = 0; k < dim; ++k) {
    // L_j^(k)(a2) for j = 0 .. dim-1-k by the three-term recurrence.
    const int jmax = dim - 1 - k;
    lag[0] = 1.0;
    if (jmax >= 1) lag[1] = 1.0 + k - a2;
    for (int j = 1; j < jmax; ++j) {
      lag[j + 1] = ((2.0 * j + 1.0 + k - a2) * lag[j] - (j + k) * lag[j - 1]) / (j + 1.0);
    }
    const Complex phase_down = std::pow(unit, k);
    const Complex phase_up = std::pow(-std::conj(unit), k);
    for (int j = 0; j <= jmax; ++j) {
      const int lo = j, hi = j + k;
      const double log_mag = 0.5 * (std::lgamma(lo + 1.0) - std::lgamma(hi + 1.0)) +
                             k * log_abs - 0.5 * a2;
      const double mag = std::exp(log_mag) * lag[j];
      op.elements(hi, lo) = mag * phase_down;
      if (k > 0) op.elements(lo, hi) = mag * phase_up;
    }
  }
  return op;
}

FockDensityMatrix apply_operator(const FockDensityMatrix& rho, const ModeOperator& op, int mode) {
  check_mode(rho, mode);
  if (op.dim != rho.dim()) throw InvalidArgument("apply_operator: dimension mismatch");
  if (rho.modes() == 1) {
    return FockDensityMatrix(rho.dim(), 1, op.elements * rho.matrix() * op.elements.adjoint());
  }
  const Eigen::Index d = rho.dim();
  const CMatrix& U = op.elements;
  const Eigen::Index n = d * d;
  CMatrix out(n, n);
  if (mode == 0) {
    // (U (x) I) rho (U (x) I)^dag; treat rho as a d x d grid of d x d blocks.
    CMatrix tmp = CMatrix::Zero(n, n);
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index c = 0; c < d; ++c)
        if (U(a, c) != Complex(0.0)) tmp.middleRows(a * d, d) += U(a, c) * rho.matrix().middleRows(c * d, d);
    out.setZero();
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index c = 0; c < d; ++c)
        if (U(a, c) != Complex(0.0)) out.middleCols(a * d, d) += std::conj(U(a, c)) * tmp.middleCols(c * d, d);
  } else {
    // (I (x) U) rho (I (x) U)^dag: apply U to every d x d block.
    for (Eigen::Index bi = 0; bi < d; ++bi)
      for (Eigen::Index bj = 0; bj < d; ++bj)
        out.block(bi * d, bj * d, d, d) = U * rho.matrix().block(bi * d, bj * d, d, d) * U.adjoint();
  }
  return FockDensityMatrix(rho.dim(), 2, CMatrix(0.5 * (out + out.adjoint())));
}

CVector apply_operator(const CVector& psi, const ModeOperator& op, int mode, int modes) {
  const Eigen::Index d = op.dim;
  if (modes == 1) {
    if (psi.size() != d) throw InvalidArgument("apply_operator: vector length mismatch");
    return op.elements * psi;
  }
  if (modes != 2 || psi.size() != d * d) throw InvalidArgument("apply_operator: vector length mismatch");
  if (mode != 0 && mode != 1) throw InvalidArgument("apply_operator: mode must be 0 or 1");
  // psi viewed as a d x d matrix M(nA, nB) in row-major order.
  Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> M(psi.data(), d, d);
  Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out =
      mode == 0 ? (op.elements * M).eval() : (M * op.elements.transpose()).eval();
  return Eigen::Map<const CVector>(out.data(), d * d);
}

FockDensityMatrix apply_loss(const FockDensityMatrix& rho, double eta, int mode) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("apply_loss: eta must lie in [0, 1]");
  check_mode(rho, mode);
  const int d = rho.dim();
  // coef(n, k) = sqrt(C(n, k) eta^(n-k) (1-eta)^k): amplitude of losing k of n photons.
  Eigen::MatrixXd coef = Eigen::MatrixXd::Zero(d, d);
  for (int n = 0; n < d; ++n) {
    for (int k = 0; k <= n; ++k) {
      const double log_binom = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
      coef(n, k) = std::sqrt(std::exp(log_binom) * std::pow(eta, n - k) * std::pow(1.0 - eta, k));
    }
  }
  const CMatrix& in = rho.matrix();
  CMatrix out = CMatrix::Zero(in.rows(), in.cols());
  if (rho.modes() == 1) {
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int k = 0; a + k < d && b + k < d; ++k)
          out(a, b) += coef(a + k, k) * coef(b + k, k) * in(a + k, b + k);
    return FockDensityMatrix(d, 1, std::move(out));
  }
  const Eigen::Index D = d;
  if (mode == 0) {
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int k = 0; a + k < d && b + k < d; ++k)
          out.block(a * D, b * D, D, D) += coef(a + k, k) * coef(b + k, k) *
                                           in.block((a + k) * D, (b + k) * D, D, D);
  } else {
    for (Eigen::Index bi = 0; bi < D; ++bi) {
      for (Eigen::Index bj = 0; bj < D; ++bj) {
        auto src = in.block(bi * D, bj * D, D, D);
        auto dst = out.block(bi * D, bj * D, D, D);
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b)
            for (int k = 0; a + k < d && b + k < d; ++k)
              dst(a, b) += coef(a + k, k) * coef(b + k, k) * src(a + k, b + k);
      }
    }
  }
  return FockDensityMatrix(d, 2, std::move(out));
}

CVector delocalized_photon(double phi, int dim) {
  if (dim < 2) throw InvalidArgument("delocalized_photon: dim must be >= 2");
  CVector psi = CVector::Zero(static_cast<Eigen::Index>(dim) * dim);
  const double s = 1.0 / std::sqrt(2.0);
  psi(two_mode_index(0, 1, dim)) = s;
  psi(two_mode_index(1, 0, dim)) = s * std::polar(1.0, phi);
  return psi;
}

FockDensityMatrix lossy_delocalized_photon(double eta, double phi, int dim, double coherence_factor) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("lossy_delocalized_photon: eta must lie in [0, 1]");
  if (!(coherence_factor >= 0.0 && coherence_factor <= 1.0)) {
    throw InvalidArgument("lossy_delocalized_photon: coherence factor must lie in [0, 1]");
  }
  const CVector psi = delocalized_photon(phi, dim);
  CMatrix m = eta * psi * psi.adjoint();
  const auto i01 = two_mode_index(0, 1, dim), i10 = two_mode_index(1, 0, dim);
  m(i01, i10) *= coherence_factor;
  m(i10, i01) *= coherence_factor;
  m(0, 0) += 1.0 - eta;
  return FockDensityMatrix(dim, 2, std::move(m));
}

FockDensityMatrix build_macro_state(double alpha, double phi, int dim) {
  const ModeOperator D = displacement_matrix(alpha, dim);
  const CVector psi = apply_operator(apply_operator(delocalized_photon(phi, dim), D, 0, 2), D, 1, 2);
  FockDensityMatrix rho = FockDensityMatrix::from_pure(dim, 2, psi);
  check_truncation(rho, "build_macro_state");
  return rho;
}

FockDensityMatrix truncate(const FockDensityMatrix& rho, int new_dim) {
  const int d = rho.dim();
  if (new_dim < 1 || new_dim > d) throw InvalidArgument("truncate: new_dim must lie in [1, dim]");
  if (rho.modes() == 1) return FockDensityMatrix(new_dim, 1, rho.matrix().topLeftCorner(new_dim, new_dim));
  const Eigen::Index n = static_cast<Eigen::Index>(new_dim) * new_dim;
  CMatrix out(n, n);
  for (int a = 0; a < new_dim; ++a)
    for (int b = 0; b < new_dim; ++b)
      for (int c = 0; c < new_dim; ++c)
        for (int e = 0; e < new_dim; ++e)
          out(two_mode_index(a, b, new_dim), two_mode_index(c, e, new_dim)) = rho.element(a, b, c, e);
  return FockDensityMatrix(new_dim, 2, std::move(out));
}

FockDensityMatrix partial_trace(const FockDensityMatrix& rho, int keep_mode) {
  if (rho.modes() != 2) throw InvalidArgument("partial_trace needs a two-mode state");
  check_mode(rho, keep_mode);
  const int d = rho.dim();
  CMatrix out = CMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int t = 0; t < d; ++t)
        out(i, j) += keep_mode == 0 ? rho.element(i, t, j, t) : rho.element(t, i, t, j);
  return FockDensityMatrix(d, 1, std::move(out));
}

std::vector<double> photon_distribution(const FockDensityMatrix& rho, int mode) {
  check_mode(rho, mode);
  const int d = rho.dim();
  std::vector<double> p(static_cast<std::size_t>(d), 0.0);
  if (rho.modes() == 1) {
    for (int n = 0; n < d; ++n) p[n] = rho(n, n).real();
    return p;
  }
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      const double v = rho(two_mode_index(a, b, d), two_mode_index(a, b, d)).real();
      p[mode == 0 ? a : b] += v;
    }
  return p;
}

PhotonMoments photon_moments(const FockDensityMatrix& rho, int mode) {
  const auto p = photon_distribution(rho, mode);
  double total = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    const double nn = static_cast<double>(n);
    total += p[n];
    m1 += nn * p[n];
    m2 += nn * nn * p[n];
  }
  if (!(total > 0.0)) throw NumericError("photon_moments: zero trace");
  m1 /= total;
  m2 /= total;
  return {m1, m2 - m1 * m1};
}

CVector conditional_bob_state(long nA, double alpha, double phi, int dim) {
  if (nA < 0) throw InvalidArgument("conditional_bob_state: nA must be >= 0");
  if (nA >= dim) throw InvalidArgument("conditional_bob_state: nA outside truncation");
  const double x0 = analytic::xi0(nA, alpha);
  const double x1 = analytic::xi1(nA, alpha);
  if (std::abs(x0) < DBL_MIN && std::abs(x1) < DBL_MIN) {
    throw DegenerateInput("conditional_bob_state: both Xi0 and Xi1 vanish numerically at nA=" +
                          std::to_string(nA));
  }
  const ModeOperator D = displacement_matrix(alpha, dim);
  CVector psi = x1 * D.elements.col(0) + std::polar(1.0, phi) * x0 * D.elements.col(1);
  return psi / psi.norm();
}

std::vector<double> quadrature_marginal(const FockDensityMatrix& rho, double theta,
                                        std::span<const double> grid, int mode) {
  if (rho.modes() == 2) return quadrature_marginal(partial_trace(rho, mode), theta, grid, 0);
  check_mode(rho, mode);
  const int d = rho.dim();
  // rho_theta = U^dag rho U with U = diag(e^{i n theta}); only its real
  // part contributes since psi_m psi_n is symmetric in (m, n).
  Eigen::MatrixXd rt(d, d);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) rt(m, n) = (rho(m, n) * std::polar(1.0, -theta * (m - n))).real();

  // Six standard deviations of X_theta = (a e^{-i theta} + a^dag e^{i theta}) / sqrt(2).
  CMatrix x = CMatrix::Zero(d, d);
  for (int n = 1; n < d; ++n) {
    x(n - 1, n) = std::sqrt(0.5 * n) * std::polar(1.0, -theta);
    x(n, n - 1) = std::conj(x(n - 1, n));
  }
  const double x1 = (rho.matrix() * x).trace().real();
  const double x2 = (rho.matrix() * x * x).trace().real();
  const double spread = 6.0 * std::sqrt(std::max(0.0, x2 - x1 * x1));
  if (!grid.empty() && (grid.front() > x1 - spread || grid.back() < x1 + spread)) {
    warn("quadrature_marginal: grid [" + std::to_string(grid.front()) + ", " +
         std::to_string(grid.back()) + "] may not cover the state's support");
  }
  std::vector<double> out(grid.size());
  Eigen::VectorXd psi(d);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    hermite_functions(grid[i], {psi.data(), static_cast<std::size_t>(d)});
    out[i] = psi.dot(rt * psi);
  }
  return out;
}

}  // namespace macrocat::fock
