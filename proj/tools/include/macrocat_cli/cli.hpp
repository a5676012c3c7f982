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

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "macrocat/pipeline.hpp"
#include "macrocat/fock.hpp"

namespace macrocat::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kNumericError = 2,
  kIoError = 3,
};

/// Runs one subcommand. args[0] is the program name.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

// Pieces of the front end exposed for tests.

/// Reads an ExperimentConfig from a config file or from a run manifest.
pipeline::ExperimentConfig load_config(const std::filesystem::path& path);

/// State and grid for the wigner subcommand.
struct WignerSpec {
  fock::FockDensityMatrix rho = fock::FockDensityMatrix::vacuum(2, 1);
  std::vector<double> x;
  std::vector<double> p;
  nlohmann::json doc;  ///< the spec as given, defaults filled in
};

/// Parses a state spec. Kinds: "amplitudes" (single-mode Fock amplitudes
/// re/im), "conditional_bob" (Bob's state after Alice counts nA), and
/// "density_matrix" (density JSON; two-mode input takes "mode"). An optional
/// "displacement" (number or [re, im]) is applied afterwards. Grid keys:
/// x_min, x_max, nx, p_min, p_max, np.
WignerSpec parse_wigner_spec(const nlohmann::json& doc);
nlohmann::json default_wigner_spec();

}  // namespace macrocat::cli
