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

#include "macrocat/montecarlo.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>

#include "macrocat/errors.hpp"
#include "macrocat/hermite.hpp"
#include "macrocat/serialization.hpp"
#include "parallel.hpp"

namespace macrocat::mc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Index of the first cumulative entry strictly above u * total.
std::size_t search_cdf(const std::vector<double>& cdf, double u) {
  const double target = u * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

// Piecewise-linear density with node values f on a uniform grid of step h.
// `cum[k]` is the mass of cells 0..k.
struct LinearCdf {
  std::vector<double> cum;

  static LinearCdf build(std::span<const double> f, double h) {
    LinearCdf out;
    out.cum.resize(f.size() - 1);
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < f.size(); ++k) {
      acc += 0.5 * h * (f[k] + f[k + 1]);
      out.cum[k] = acc;
    }
    return out;
  }

  double total() const { return cum.back(); }

  // Draw a position (offset from the grid start) for uniform u.
  double sample(std::span<const double> f, double h, double u) const {
    const double target = u * total();
    const auto it = std::upper_bound(cum.begin(), cum.end(), target);
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
    const double before = k == 0 ? 0.0 : cum[k - 1];
    const double t = std::clamp(target - before, 0.0, 0.5 * h * (f[k] + f[k + 1]));
    const double f0 = f[k], f1 = f[k + 1];
    // Solve f0 s + (f1 - f0) s^2 / (2h) = t in the cancellation-free form.
    const double disc = std::max(0.0, f0 * f0 + 2.0 * (f1 - f0) * t / h);
    const double denom = f0 + std::sqrt(disc);
    const double s = denom > 0.0 ? 2.0 * t / denom : 0.0;
    return static_cast<double>(k) * h + std::clamp(s, 0.0, h);
  }
};

}  // namespace

double wrap_phase(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

std::vector<CountRecord> sample_counts(const analytic::CountModelParams& params, std::uint64_t n_shots,
                                       std::uint64_t seed, Parallelism par, rng::StreamTag tag) {
  params.validate_gaussian();
  if (n_shots == 0) throw InvalidArgument("sample_counts: n_shots must be positive");
  const double s = std::sqrt(2.0) * params.alpha;
  const double c = std::cos(params.phi);
  // Mixture weights of the u^2-weighted, v^2-weighted and plain components.
  const double w_u = params.eta * (1.0 + c) / 4.0;
  const double w_v = params.eta * (1.0 - c) / 4.0;
  std::vector<CountRecord> out(n_shots);
  detail::parallel_for(n_shots, par.workers, [&](std::uint64_t b, std::uint64_t e) {
    for (std::uint64_t i = b; i < e; ++i) {
      rng::SeededStream st(seed, tag, i);
      const double pick = st.uniform();
      auto signed_chi3 = [&] {
        const double g1 = st.normal(), g2 = st.normal(), g3 = st.normal();
        const double r = std::sqrt(g1 * g1 + g2 * g2 + g3 * g3);
        return st.uniform() < 0.5 ? -r : r;
      };
      double u, v;
      if (pick < w_u) {
        u = s * signed_chi3();
        v = s * st.normal();
      } else if (pick < w_u + w_v) {
        v = s * signed_chi3();
        u = s * st.normal();
      } else {
        u = s * st.normal();
        v = s * st.normal();
      }
      out[i] = {i, (u + v) / std::sqrt(2.0), (u - v) / std::sqrt(2.0), params.phi};
    }
  });
  return out;
}

std::vector<CountRecord> sample_counts_exact(double alpha, double eta, double phi, std::uint64_t n_shots,
                                             std::uint64_t seed, Parallelism par) {
  if (!(alpha > 0.0)) throw InvalidArgument("sample_counts_exact: alpha must be > 0");
  if (alpha > kMaxExactAlpha) {
    throw InvalidArgument("sample_counts_exact: alpha > 30 is not enumerable; use sample_counts");
  }
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("sample_counts_exact: eta must lie in [0, 1]");
  if (n_shots == 0) throw InvalidArgument("sample_counts_exact: n_shots must be positive");

  // Support window: twelve standard deviations plus slack around alpha^2
  // holds all but a negligible tail of every distribution involved.
  const double a2 = alpha * alpha;
  const long lo = std::max(0L, static_cast<long>(std::floor(a2 - 12.0 * alpha - 20.0)));
  const long hi = static_cast<long>(std::ceil(a2 + 12.0 * alpha + 20.0));
  const std::size_t w = static_cast<std::size_t>(hi - lo + 1);

  std::vector<double> margin_cdf(w), ref_cdf(w);
  std::vector<std::vector<double>> cond_cdf(w, std::vector<double>(w));
  double acc_m = 0.0, acc_r = 0.0;
  for (std::size_t a = 0; a < w; ++a) {
    const long na = lo + static_cast<long>(a);
    double acc = 0.0;
    for (std::size_t b = 0; b < w; ++b) {
      acc += analytic::exact_joint_prob(na, lo + static_cast<long>(b), alpha, eta, phi);
      cond_cdf[a][b] = acc;
    }
    acc_m += acc;
    margin_cdf[a] = acc_m;
    acc_r += analytic::poisson_pmf(na, a2);
    ref_cdf[a] = acc_r;
  }

  std::vector<CountRecord> out(n_shots);
  detail::parallel_for(n_shots, par.workers, [&](std::uint64_t b, std::uint64_t e) {
    for (std::uint64_t i = b; i < e; ++i) {
      rng::SeededStream st(seed, rng::StreamTag::kCountsExact, i);
      const std::size_t ia = search_cdf(margin_cdf, st.uniform());
      const std::size_t ib = search_cdf(cond_cdf[ia], st.uniform());
      const std::size_t ra = search_cdf(ref_cdf, st.uniform());
      const std::size_t rb = search_cdf(ref_cdf, st.uniform());
      out[i] = {i, static_cast<double>(static_cast<long>(ia) - static_cast<long>(ra)),
                static_cast<double>(static_cast<long>(ib) - static_cast<long>(rb)), phi};
    }
  });
  return out;
}

std::vector<QuadratureRecord> sample_quadratures(const fock::FockDensityMatrix& rho, double thetaA,
                                                 double thetaB, std::uint64_t n_shots, std::uint64_t seed,
                                                 std::uint64_t first_shot, QuadratureGrid grid,
                                                 Parallelism par) {
  if (rho.modes() != 2) throw InvalidArgument("sample_quadratures: two-mode state required");
  if (n_shots == 0) throw InvalidArgument("sample_quadratures: n_shots must be positive");
  if (!(grid.spacing > 0.0 && grid.spacing <= 0.02)) {
    throw InvalidArgument("sample_quadratures: grid spacing must lie in (0, 0.02]");
  }
  if (!(grid.half_range > 0.0)) throw InvalidArgument("sample_quadratures: bad grid range");
  fock::check_truncation(rho, "sample_quadratures");
  thetaA = wrap_phase(thetaA);
  thetaB = wrap_phase(thetaB);

  const int d = rho.dim();
  const auto npts = static_cast<std::size_t>(std::llround(2.0 * grid.half_range / grid.spacing)) + 1;
  const double h = 2.0 * grid.half_range / static_cast<double>(npts - 1);
  const double x0 = -grid.half_range;
  std::vector<double> xs(npts);
  for (std::size_t i = 0; i < npts; ++i) xs[i] = x0 + h * static_cast<double>(i);
  const fock::HermiteTable psi(xs, d);

  // Real part of U^dag rho U, U = diag(e^{i (m thetaA + k thetaB)}).
  const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
  Eigen::MatrixXd rt(n, n);
  for (int m = 0; m < d; ++m)
    for (int k = 0; k < d; ++k)
      for (int mm = 0; mm < d; ++mm)
        for (int kk = 0; kk < d; ++kk) {
          const double ph = -(thetaA * (m - mm) + thetaB * (k - kk));
          rt(fock::two_mode_index(m, k, d), fock::two_mode_index(mm, kk, d)) =
              (rho.element(m, k, mm, kk) * std::polar(1.0, ph)).real();
        }

  // joint[j * npts + i] = density at (xA = xs[i], xB = xs[j]).
  std::vector<double> joint(npts * npts);
  std::vector<double> col_mass(npts);
  {
    Eigen::MatrixXd sigma(d, d);
    Eigen::VectorXd pa(d);
    for (std::size_t j = 0; j < npts; ++j) {
      // Operator on Alice's mode after contracting Bob's wavefunctions at xB.
      sigma.setZero();
      for (int m = 0; m < d; ++m)
        for (int mm = 0; mm < d; ++mm) {
          double acc = 0.0;
          for (int k = 0; k < d; ++k)
            for (int kk = 0; kk < d; ++kk)
              acc += rt(fock::two_mode_index(m, k, d), fock::two_mode_index(mm, kk, d)) * psi(j, k) * psi(j, kk);
          sigma(m, mm) = acc;
        }
      for (std::size_t i = 0; i < npts; ++i) {
        for (int m = 0; m < d; ++m) pa(m) = psi(i, m);
        joint[j * npts + i] = std::max(0.0, pa.dot(sigma * pa));
      }
    }
  }
  std::vector<LinearCdf> cond(npts);
  for (std::size_t j = 0; j < npts; ++j) {
    cond[j] = LinearCdf::build({joint.data() + j * npts, npts}, h);
    col_mass[j] = cond[j].total();
  }
  const LinearCdf marginal_b = LinearCdf::build(col_mass, h);
  const double mass = marginal_b.total();
  if (!(std::abs(mass - rho.trace()) <= 1e-3)) {
    throw NumericError("sample_quadratures: tabulated density integrates to " + std::to_string(mass) +
                       "; the grid does not cover the state");
  }

  std::vector<QuadratureRecord> out(n_shots);
  detail::parallel_for(n_shots, par.workers, [&](std::uint64_t b, std::uint64_t e) {
    for (std::uint64_t i = b; i < e; ++i) {
      const std::uint64_t shot = first_shot + i;
      rng::SeededStream st(seed, rng::StreamTag::kQuadratures, shot);
      const double offB = marginal_b.sample(col_mass, h, st.uniform());
      const std::size_t jb = std::min(static_cast<std::size_t>(offB / h), npts - 2);
      const double t = std::clamp(offB / h - static_cast<double>(jb), 0.0, 1.0);
      // The bilinear interpolant conditioned on xB is a two-column mixture.
      const double wl = (1.0 - t) * col_mass[jb], wr = t * col_mass[jb + 1];
      const std::size_t col = st.uniform() * (wl + wr) < wl ? jb : jb + 1;
      const double offA = cond[col].sample({joint.data() + col * npts, npts}, h, st.uniform());
      out[i] = {shot, thetaA, x0 + offA, thetaB, x0 + offB};
    }
  });
  return out;
}

std::vector<PhaseSetting> phase_schedule(int n_settings, PhaseMode mode) {
  if (n_settings < 4) {
    throw InvalidArgument("phase_schedule: at least 4 settings are needed for two-mode tomography");
  }
  constexpr double kGoldenStride = 0.6180339887498949;
  std::vector<PhaseSetting> out(static_cast<std::size_t>(n_settings));
  for (int k = 0; k < n_settings; ++k) {
    const double thetaA = kTwoPi * k / n_settings;
    const double thetaB = mode == PhaseMode::kLocked ? 0.0 : wrap_phase(kTwoPi * kGoldenStride * k);
    out[static_cast<std::size_t>(k)] = {thetaA, thetaB};
  }
  return out;
}

void write_counts_csv(std::ostream& os, std::span<const CountRecord> records) {
  os << "shot,dnA,dnB,phi\n";
  for (const auto& r : records) {
    os << r.shot << ',' << format_double(r.dnA) << ',' << format_double(r.dnB) << ','
       << format_double(r.phi_setting) << '\n';
  }
}

namespace {

template <class Row>
std::vector<Row> read_csv(std::istream& is, std::string_view header, std::size_t columns,
                          Row (*make)(const std::vector<std::string_view>&)) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("empty CSV input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw ConfigError("unexpected CSV header '" + line + "', want '" + std::string(header) + "'");
  std::vector<Row> out;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != columns) throw ConfigError("CSV row has wrong number of fields: " + line);
    out.push_back(make(f));
  }
  return out;
}

std::uint64_t parse_shot(std::string_view s) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw ConfigError("bad shot index '" + std::string(s) + "'");
  return v;
}

}  // namespace

std::vector<CountRecord> read_counts_csv(std::istream& is) {
  return read_csv<CountRecord>(is, "shot,dnA,dnB,phi", 4, [](const std::vector<std::string_view>& f) {
    return CountRecord{parse_shot(f[0]), parse_double(f[1]), parse_double(f[2]), parse_double(f[3])};
  });
}

void write_quadratures_csv(std::ostream& os, std::span<const QuadratureRecord> records) {
  os << "shot,thetaA,xA,thetaB,xB\n";
  for (const auto& r : records) {
    os << r.shot << ',' << format_double(r.thetaA) << ',' << format_double(r.xA) << ','
       << format_double(r.thetaB) << ',' << format_double(r.xB) << '\n';
  }
}

std::vector<QuadratureRecord> read_quadratures_csv(std::istream& is) {
  return read_csv<QuadratureRecord>(is, "shot,thetaA,xA,thetaB,xB", 5, [](const std::vector<std::string_view>& f) {
    return QuadratureRecord{parse_shot(f[0]), parse_double(f[1]), parse_double(f[2]), parse_double(f[3]),
                            parse_double(f[4])};
  });
}

}  // namespace macrocat::mc
