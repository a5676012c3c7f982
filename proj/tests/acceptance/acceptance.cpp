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

// Prints one PASS/FAIL line per acceptance criterion and exits nonzero if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "macrocat/analytic.hpp"
#include "macrocat/binning.hpp"
#include "macrocat/errors.hpp"
#include "macrocat/fock.hpp"
#include "macrocat/montecarlo.hpp"
#include "macrocat/pipeline.hpp"
#include "macrocat/serialization.hpp"
#include "macrocat/tomography.hpp"
#include "macrocat_cli/cli.hpp"
#include "support/oracles.hpp"

namespace {

using namespace macrocat;
using fock::CMatrix;
using fock::CVector;
using fock::FockDensityMatrix;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  failures += ok ? 0 : 1;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double max_abs_diff(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

pipeline::Fig2Output variance_ratio() {
  const double closed = analytic::variance_peak_ratio(0.49);
  const analytic::CountModelParams p{1e4, 0.49, 0.0};
  const double from_curve = analytic::conditional_variance(0.0, p) / analytic::asymptotic_variance(p.alpha);
  const bool exact = std::abs(closed - 4.49 / 3.51) < 1e-15 && std::abs(from_curve - closed) < 1e-12 &&
                     std::abs(closed - 1.28) < 0.005;

  pipeline::ExperimentConfig cfg;
  cfg.alpha = 1e4;
  const auto t0 = Clock::now();
  const auto out = pipeline::run_counts_scenario(cfg);
  const double elapsed = seconds_since(t0);
  const bool mc = std::abs(out.variance_ratio - 1.28) <= 0.02;
  report(1, exact && mc && elapsed < 120.0,
         fmt::format("analytic {:.6f} (4.49/3.51 = {:.6f}), MC {:.4f} +- {:.4f} at 5e6 shots, {:.1f} s", closed,
                     4.49 / 3.51, out.variance_ratio, out.variance_ratio_se, elapsed));
  return out;
}

void phase_dependence(const pipeline::Fig2Output& out) {
  const auto& curve = out.phi0;
  const double slope_z = std::abs(out.phi90.mean_line.slope) / out.phi90.mean_line.slope_se;
  report(3, slope_z < 3.0 && curve.chi2_mean < 2.0,
         fmt::format("phi=pi/2 slope {:.3e} = {:.2f} SE, phi=0 reduced chi2 of means {:.3f}",
                     out.phi90.mean_line.slope, slope_z, curve.chi2_mean));
}

void displaced_moments() {
  const int dim = 64;
  double worst = 0.0;
  for (double alpha : {1.0, 2.0, 3.0}) {
    const auto d = fock::displacement_matrix(alpha, dim);
    const auto m0 = fock::photon_moments(fock::apply_operator(FockDensityMatrix::number_state(dim, 0), d, 0), 0);
    const auto m1 = fock::photon_moments(fock::apply_operator(FockDensityMatrix::number_state(dim, 1), d, 0), 0);
    const double a2 = alpha * alpha;
    for (double e : {m0.mean - a2, m0.variance - a2, m1.mean - (a2 + 1.0), m1.variance - 3.0 * a2})
      worst = std::max(worst, std::abs(e));
  }
  report(2, worst <= 1e-6, fmt::format("max moment deviation {:.2e} over alpha in {{1,2,3}}, dim 64", worst));
}

void distinguishability() {
  const pipeline::ExperimentConfig cfg;
  const pipeline::ScenarioOptions opt;
  const double analytic_err =
      analytic::distinguishability_error({cfg.alpha, cfg.eta_total, 0.0}, opt.deltaA);
  const auto out = pipeline::run_counts_scenario(cfg, opt);
  const bool ok = std::abs(analytic_err - 0.36) <= 0.03 && std::abs(out.discrimination_error - analytic_err) < 0.01;
  report(4, ok,
         fmt::format("analytic {:.4f}, Monte Carlo {:.4f} (difference {:.4f})", analytic_err, out.discrimination_error,
                     std::abs(out.discrimination_error - analytic_err)));
}

bool nondecreasing(const std::vector<double>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (trace[i] - trace[i - 1] < -1e-9) return false;
  return true;
}

void tomography() {
  ScopedWarningHandler quiet([](const std::string&) {});
  pipeline::ExperimentConfig cfg;
  const auto t0 = Clock::now();
  const auto out = pipeline::run_tomography_scenario(cfg);
  const double elapsed = seconds_since(t0);
  const double c = out.result.concurrence;
  const double p00 = out.result.rho.element(0, 0, 0, 0).real();
  const bool mono = nondecreasing(out.result.loglik_trace);

  cfg.phase_noise_sigma = pipeline::phase_noise_for_concurrence(0.49, 0.32);
  const auto t1 = Clock::now();
  const auto noisy = pipeline::run_tomography_scenario(cfg);
  const double elapsed_noisy = seconds_since(t1);
  const double cn = noisy.result.concurrence;
  const bool mono_noisy = nondecreasing(noisy.result.loglik_trace);

  const bool ok = std::abs(c - 0.49) <= 0.05 && std::abs(p00 - 0.51) <= 0.02 && mono && elapsed < 300.0 &&
                  std::abs(cn - 0.32) <= 0.05 && mono_noisy && elapsed_noisy < 300.0;
  report(5, ok,
         fmt::format("C {:.4f}, rho00 {:.4f}, {} iterations, loglik {}, {:.1f} s; dephased (sigma {:.4f}) C {:.4f}, "
                     "loglik {}, {:.1f} s",
                     c, p00, out.result.iterations, mono ? "nondecreasing" : "DECREASED", elapsed,
                     cfg.phase_noise_sigma, cn, mono_noisy ? "nondecreasing" : "DECREASED", elapsed_noisy));
}

void oracle_equivalences() {
  double tv = 0.0;
  const std::size_t n = 1'000'000;
  for (double phi : {0.0, std::numbers::pi / 2}) {
    const auto exact = mc::sample_counts_exact(25.0, 0.49, phi, n, 31);
    const auto gauss = mc::sample_counts({25.0, 0.49, phi}, n, 32);
    const auto he = binning::joint_histogram(exact, -155.5, 154.5, 31);
    const auto hg = binning::joint_histogram(gauss, -155.5, 154.5, 31);
    tv = std::max(tv, binning::total_variation(he, hg));
  }

  double conv = 0.0;
  for (double eta : {0.3, 0.49, 1.0})
    for (double phi : {0.0, std::numbers::pi / 2})
      for (auto [u, v] : {std::pair{0.0, 0.0}, std::pair{150.0, -80.0}, std::pair{-310.0, -310.0}}) {
        const analytic::CountModelParams p{100.0, eta, phi};
        const double closed = analytic::joint_prob_ref(u, v, p);
        conv = std::max(conv, std::abs(analytic::joint_prob_ref_numeric(u, v, p) - closed) / closed);
      }

  double kraus = 0.0;
  for (double eta : {0.1, 0.49, 0.8})
    for (double phi : {0.0, 1.1}) {
      const int dim = 4;
      auto rho = FockDensityMatrix::from_pure(dim, 2, fock::delocalized_photon(phi, dim));
      rho = oracle::kraus_loss(oracle::kraus_loss(rho, eta, 0), eta, 1);
      kraus = std::max(kraus, max_abs_diff(rho.matrix(), fock::lossy_delocalized_photon(eta, phi, dim).matrix()));
    }

  double disp = 0.0;
  for (fock::Complex alpha : {fock::Complex(1.0, 0.0), fock::Complex(2.0, 0.0), fock::Complex(0.7, -0.9),
                              fock::Complex(-2.0, 0.5)})
    disp = std::max(disp, max_abs_diff(fock::displacement_matrix(alpha, 64).elements,
                                       oracle::displacement_expm(alpha, 64, 192)));

  report(6, tv <= 0.03 && conv <= 1e-4 && kraus <= 1e-10 && disp <= 1e-8,
         fmt::format("count-law TV {:.4f}, convolution rel {:.2e}, Kraus {:.2e}, displacement {:.2e}", tv, conv,
                     kraus, disp));
}

void undisplacement() {
  double last = 0.0;
  bool ok = true;
  std::string detail;
  for (double eta : {1.0, 0.99, 0.95}) {
    const auto r = pipeline::displacement_roundtrip_check(2.0, eta);
    if (eta == 1.0) last = r.concurrence_initial;
    ok = ok && r.concurrence_final <= last + 1e-6 && r.concurrence_final <= r.concurrence_initial + 1e-6;
    last = r.concurrence_final;
    detail += fmt::format("eta {}: C {:.6f}, F {:.6f}; ", eta, r.concurrence_final, r.fidelity);
  }
  report(7, ok, detail.substr(0, detail.size() - 2));
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) out[e.path().filename().string()] = read_text_file(e.path());
  return out;
}

void determinism() {
  const auto root = fs::temp_directory_path() / "macrocat_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  pipeline::ExperimentConfig small;
  small.n_quad_shots = 20'000;
  small.n_count_shots = 1'000'000;
  write_text_file(root / "config.json", pipeline::to_json(small).dump(2));

  bool ok = true;
  std::string detail;
  for (const std::string cmd : {"analytic", "simulate-counts", "tomography", "wigner", "roundtrip-check"}) {
    std::vector<std::map<std::string, std::string>> runs;
    for (int rep = 0; rep < 2; ++rep) {
      const auto dir = root / (cmd + std::to_string(rep));
      std::vector<std::string> args{"macrocat", cmd, "--out", dir.string(), "--seed", "4242", "--quiet"};
      if (cmd != "wigner") args.insert(args.end(), {"--config", (root / "config.json").string()});
      const int code = cli::run(args);
      if (code != 0) {
        ok = false;
        detail += cmd + " exit " + std::to_string(code) + "; ";
      }
      runs.push_back(snapshot(dir));
    }
    const bool same = !runs[0].empty() && runs[0] == runs[1];
    ok = ok && same;
    detail += fmt::format("{} {} files {}; ", cmd, runs[0].size(), same ? "identical" : "DIFFER");
  }
  report(8, ok, detail.substr(0, detail.size() - 2));
}

}  // namespace

int main() {
  try {
    const auto counts = variance_ratio();
    displaced_moments();
    phase_dependence(counts);
    distinguishability();
    tomography();
    oracle_equivalences();
    undisplacement();
    determinism();
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
