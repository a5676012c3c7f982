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

#include "macrocat/tomography.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>

#include "macrocat/errors.hpp"
#include "macrocat/hermite.hpp"
#include "macrocat/serialization.hpp"
#include "parallel.hpp"

namespace macrocat::tomo {

using fock::CMatrix;
using fock::Complex;
using fock::CVector;

namespace {

// All records sharing one (thetaA, thetaB) setting. Rows of `u` are the real
// POVM amplitudes psi_m(xA) psi_k(xB); the phases live in `phase`.
struct Group {
  Eigen::MatrixXd u;
  Eigen::VectorXd weight;
  CVector phase;
};

struct Evaluation {
  double loglik = 0.0;  // sum of weight * log p
  CMatrix r;
};

std::vector<Group> build_groups(std::span<const mc::QuadratureRecord> records, const MleOptions& opt) {
  const int d = opt.dim;
  const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
  std::map<std::pair<double, double>, std::vector<std::size_t>> by_setting;
  for (std::size_t i = 0; i < records.size(); ++i)
    by_setting[{records[i].thetaA, records[i].thetaB}].push_back(i);

  std::vector<Group> groups;
  groups.reserve(by_setting.size());
  std::vector<double> pa(static_cast<std::size_t>(d)), pb(static_cast<std::size_t>(d));
  for (const auto& [setting, idx] : by_setting) {
    Group g;
    g.phase.resize(n);
    for (int m = 0; m < d; ++m)
      for (int k = 0; k < d; ++k)
        g.phase(fock::two_mode_index(m, k, d)) = std::polar(1.0, m * setting.first + k * setting.second);

    // (xA, xB) points with multiplicities.
    std::vector<std::pair<double, double>> points;
    std::vector<double> counts;
    if (opt.binned) {
      const int nb = static_cast<int>(std::llround(2.0 * opt.bin_range / opt.bin_width));
      auto cell = [&](double x) {
        return std::clamp(static_cast<int>(std::floor((x + opt.bin_range) / opt.bin_width)), 0, nb - 1);
      };
      auto center = [&](int c) { return -opt.bin_range + (c + 0.5) * opt.bin_width; };
      std::map<std::pair<int, int>, double> hist;
      for (std::size_t i : idx) hist[{cell(records[i].xA), cell(records[i].xB)}] += 1.0;
      for (const auto& [c, w] : hist) {
        points.emplace_back(center(c.first), center(c.second));
        counts.push_back(w);
      }
    } else {
      for (std::size_t i : idx) {
        points.emplace_back(records[i].xA, records[i].xB);
        counts.push_back(1.0);
      }
    }

    const auto rows = static_cast<Eigen::Index>(points.size());
    g.u.resize(rows, n);
    g.weight.resize(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
      fock::hermite_functions(points[static_cast<std::size_t>(r)].first, pa);
      fock::hermite_functions(points[static_cast<std::size_t>(r)].second, pb);
      for (int m = 0; m < d; ++m)
        for (int k = 0; k < d; ++k)
          g.u(r, fock::two_mode_index(m, k, d)) = pa[static_cast<std::size_t>(m)] * pb[static_cast<std::size_t>(k)];
      g.weight(r) = counts[static_cast<std::size_t>(r)];
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

Evaluation evaluate(const std::vector<Group>& groups, const CMatrix& rho, double total_weight, unsigned workers) {
  const Eigen::Index n = rho.rows();
  std::vector<Evaluation> parts(groups.size());
  detail::parallel_for(groups.size(), workers, [&](std::uint64_t b, std::uint64_t e) {
    for (std::uint64_t gi = b; gi < e; ++gi) {
      const Group& g = groups[gi];
      // Real part of D^dag rho D with D = diag(phase).
      const Eigen::MatrixXd m = (g.phase.conjugate().asDiagonal() * rho * g.phase.asDiagonal()).real();
      const Eigen::VectorXd p = ((g.u * m).array() * g.u.array()).rowwise().sum().cwiseMax(1e-300);
      Evaluation& out = parts[gi];
      out.loglik = (g.weight.array() * p.array().log()).sum();
      const Eigen::VectorXd s = g.weight.cwiseQuotient(p);
      const Eigen::MatrixXd acc = g.u.transpose() * s.asDiagonal() * g.u;
      out.r = g.phase.asDiagonal() * acc.cast<Complex>() * g.phase.conjugate().asDiagonal();
    }
  });
  Evaluation total;
  total.r = CMatrix::Zero(n, n);
  for (const auto& p : parts) {
    total.loglik += p.loglik;
    total.r += p.r;
  }
  total.r /= total_weight;
  return total;
}

CMatrix matrix_power(const CMatrix& r, double t) {
  if (t == 1.0) return r;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(r);
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).array().pow(t);
  return es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix sandwich(const CMatrix& a, const CMatrix& rho) {
  CMatrix out = a * rho * a.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  return out / out.trace().real();
}

}  // namespace

CVector quadrature_povm_vector(double theta, double x, int dim) {
  if (dim < 1) throw InvalidArgument("quadrature_povm_vector: dim must be positive");
  std::vector<double> psi(static_cast<std::size_t>(dim));
  fock::hermite_functions(x, psi);
  CVector v(dim);
  for (int n = 0; n < dim; ++n) v(n) = psi[static_cast<std::size_t>(n)] * std::polar(1.0, n * theta);
  return v;
}

TomographyResult mle_reconstruct(std::span<const mc::QuadratureRecord> records, const MleOptions& opt) {
  if (opt.dim < 2) throw InvalidArgument("mle_reconstruct: dim must be >= 2");
  if (opt.max_iter < 1) throw InvalidArgument("mle_reconstruct: max_iter must be positive");
  if (!(opt.tol > 0.0)) throw InvalidArgument("mle_reconstruct: tol must be positive");
  if (!(opt.max_power >= 1.0)) throw InvalidArgument("mle_reconstruct: max_power must be >= 1");
  if (opt.binned && !(opt.bin_width > 0.0 && opt.bin_range > opt.bin_width)) {
    throw InvalidArgument("mle_reconstruct: bad binning");
  }
  if (records.size() < kMinRecords) {
    throw InvalidArgument("mle_reconstruct: need at least " + std::to_string(kMinRecords) + " records, got " +
                          std::to_string(records.size()));
  }
  std::set<double> thetas;
  for (const auto& r : records) thetas.insert(r.thetaA);
  if (thetas.size() < static_cast<std::size_t>(kMinPhaseSettings)) {
    throw DegenerateInput("mle_reconstruct: records cover " + std::to_string(thetas.size()) +
                          " distinct thetaA settings; at least 4 are needed");
  }

  const auto groups = build_groups(records, opt);
  const double total = static_cast<double>(records.size());
  const Eigen::Index n = static_cast<Eigen::Index>(opt.dim) * opt.dim;
  const CMatrix eye = CMatrix::Identity(n, n);

  TomographyResult res;
  CMatrix rho = eye / static_cast<double>(n);
  Evaluation cur = evaluate(groups, rho, total, opt.workers);
  res.loglik_trace.push_back(cur.loglik / total);

  double power = 1.0;
  for (int it = 0; it < opt.max_iter; ++it) {
    // Over-relaxed step R^t rho R^t; t doubles while the likelihood keeps
    // rising and falls back to the plain step otherwise.
    CMatrix next = sandwich(matrix_power(cur.r, power), rho);
    Evaluation ev = evaluate(groups, next, total, opt.workers);
    if (ev.loglik < cur.loglik && power > 1.0) {
      power = 1.0;
      next = sandwich(cur.r, rho);
      ev = evaluate(groups, next, total, opt.workers);
    } else {
      power = std::min(2.0 * power, opt.max_power);
    }
    if (ev.loglik < cur.loglik) {
      // Diluted step (I + eps R)/(1 + eps) restores monotonicity for small eps.
      double eps = 1.0;
      for (int k = 0; k < 40 && ev.loglik < cur.loglik; ++k, eps *= 0.5) {
        next = sandwich(eye + eps * cur.r, rho);
        ev = evaluate(groups, next, total, opt.workers);
      }
      if ((ev.loglik - cur.loglik) / total < -1e-9) {
        throw NumericError("mle_reconstruct: log-likelihood decreased at iteration " + std::to_string(it + 1));
      }
    }
    const double change = (next - rho).cwiseAbs().maxCoeff();
    rho = std::move(next);
    cur = std::move(ev);
    res.loglik_trace.push_back(cur.loglik / total);
    res.iterations = it + 1;
    if (change < opt.tol) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged) {
    warn("mle_reconstruct: no convergence after " + std::to_string(opt.max_iter) + " iterations");
  }
  res.rho = fock::FockDensityMatrix(opt.dim, 2, rho);
  res.concurrence = concurrence(res.rho);
  return res;
}

double concurrence(const fock::FockDensityMatrix& rho) {
  if (rho.modes() != 2) throw InvalidArgument("concurrence: two-mode state required");
  if (rho.dim() < 2) throw InvalidArgument("concurrence: dim must be >= 2");
  rho.validate();
  const double p00 = rho.element(0, 0, 0, 0).real();
  const double p11 = rho.element(1, 1, 1, 1).real();
  const double inside = p00 + p11 + rho.element(0, 1, 0, 1).real() + rho.element(1, 0, 1, 0).real();
  const double outside = rho.trace() - inside;
  if (outside > 0.05) {
    warn("concurrence: " + std::to_string(outside) + " of the population lies outside the single-photon subspace");
  }
  const double c = 2.0 * (std::abs(rho.element(0, 1, 1, 0)) - std::sqrt(std::max(0.0, p00 * p11)));
  return std::clamp(c, 0.0, 1.0);
}

double fidelity(const fock::FockDensityMatrix& rho, const fock::FockDensityMatrix& sigma) {
  if (rho.dim() != sigma.dim() || rho.modes() != sigma.modes()) {
    throw InvalidArgument("fidelity: states have different dimensions");
  }
  auto psd_sqrt = [](const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return CMatrix(es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint());
  };
  const CMatrix s = psd_sqrt(rho.matrix());
  CMatrix inner = s * sigma.matrix() * s;
  inner = 0.5 * (inner + inner.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(inner, Eigen::EigenvaluesOnly);
  // Eigenvalues at round-off level are zero; their square roots would not be.
  const Eigen::VectorXd& lam = es.eigenvalues();
  const double floor = 4.0 * static_cast<double>(lam.size()) * std::numeric_limits<double>::epsilon() *
                       std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
  const double t = (lam.array() > floor).select(lam.array().cwiseMax(0.0).sqrt(), 0.0).sum();
  return std::clamp(t * t, 0.0, 1.0);
}

nlohmann::json result_to_json(const TomographyResult& result) {
  nlohmann::json doc = density_to_json(result.rho);
  doc["loglik"] = result.loglik_trace;
  doc["concurrence"] = result.concurrence;
  doc["iterations"] = result.iterations;
  doc["converged"] = result.converged;
  return doc;
}

}  // namespace macrocat::tomo
