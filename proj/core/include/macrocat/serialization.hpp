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
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "macrocat/fock.hpp"

namespace macrocat {

/// Shortest text for `value` with 17 significant digits ("%.17g").
std::string format_double(double value);

/// Splits one CSV line on commas. No quoting support; none of our formats
/// need it.
std::vector<std::string_view> split_csv_line(std::string_view line);
double parse_double(std::string_view field);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

/// {"dim", "modes", "re", "im"} with row-major element arrays.
nlohmann::json density_to_json(const fock::FockDensityMatrix& rho);

/// Inverse of density_to_json. Validates Hermiticity, unit trace and
/// positivity; throws ConfigError on malformed documents and NumericError
/// on invariant violations.
fock::FockDensityMatrix density_from_json(const nlohmann::json& doc);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace macrocat
