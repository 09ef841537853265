// Copyright (C) 2026 The genescan authors. All rights reserved.

// Licensed under the Apache License, Version 2.0 (the "License");
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

#include <iosfwd>
#include <string>
#include <vector>

#include "genescan/matcher.hpp"

namespace genescan {

/// Exit statuses, following sysexits where it has one to offer.
inline constexpr int kExitOk = 0;
inline constexpr int kExitLintFindings = 1;
inline constexpr int kExitScanFailure = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitNoInput = 66;

struct CliConfig {
    enum class Command { Scan, Lint, Blocks, Export };
    enum class Output { Text, Json };

    Command command = Command::Scan;
    std::vector<std::string> model_paths;
    std::string signature_path;  // file or directory of *.json
    std::string rules_path;      // empty = compiled-in default rules
    ScanMode mode = ScanMode::AllMatches;
    Output output = Output::Text;
    bool canonicalize = true;
    bool dot = false;  // blocks: DOT instead of JSON
    unsigned jobs = 1;
};

/// Loads one signature file, or every *.json in a directory (sorted, merged).
/// Duplicate family names across files are an error.
std::vector<FamilySignature> load_signature_db(const std::string& path);

/// Executes a parsed configuration. Reports go to `out`, diagnostics to `err`.
int run(const CliConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv (CLI11 grammar, GENESCAN_SIGS as the default signature path)
/// and runs. Returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace genescan
