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

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "genescan/cli.hpp"

#include "support/testutil.hpp"

using namespace genescan;
using namespace genescan::test;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int status = 0;
    std::string out;
    std::string err;
};

RunResult run_config(const CliConfig& config) {
    std::ostringstream out, err;
    int status = run(config, out, err);
    return {status, out.str(), err.str()};
}

RunResult run_argv(std::vector<std::string> args) {
    std::vector<const char*> argv{"genescan"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int status = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {status, out.str(), err.str()};
}

CliConfig scan_config(std::vector<std::string> models,
                      CliConfig::Output output = CliConfig::Output::Json) {
    CliConfig c;
    c.command = CliConfig::Command::Scan;
    c.model_paths = std::move(models);
    c.signature_path = source_path("signatures");
    c.output = output;
    return c;
}

std::string strip_ms(std::string text) {
    static const std::regex ms_re("\"ms\":[0-9.eE+-]+");
    return std::regex_replace(text, ms_re, "\"ms\":0");
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("genescan_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int n = 0;
        return n;
    }
    std::string file(const std::string& name, const std::string& content) const {
        fs::path p = path / name;
        std::ofstream(p) << content;
        return p.string();
    }
};

}  // namespace

TEST_CASE("scan emits one JSON report with the expected detection") {
    RunResult r = run_config(scan_config({source_path("fixtures/deberta.json")}));
    CHECK(r.status == kExitOk);
    CHECK(r.out.find("\"family\":\"DebertaModel\"") != std::string::npos);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 1);
}

TEST_CASE("lint on the shipped signatures is clean") {
    CliConfig c;
    c.command = CliConfig::Command::Lint;
    c.signature_path = source_path("signatures");
    RunResult r = run_config(c);
    CHECK(r.status == kExitOk);
    CHECK(r.out.find("0 findings") != std::string::npos);
}

TEST_CASE("lint exits 1 on findings and on invalid databases") {
    TempDir tmp;
    CliConfig c;
    c.command = CliConfig::Command::Lint;
    c.signature_path = tmp.file("broad.json",
                                R"({"Broad":{"blocks":[{"id":0,"ops":["*"],
                                "repeats":[1,1]}],"edges":[],"min_repeats":1}})");
    RunResult r = run_config(c);
    CHECK(r.status == kExitLintFindings);
    CHECK(r.out.find("matches any op sequence") != std::string::npos);

    c.signature_path = tmp.file("bad.json", "{\"X\": 1}");
    CHECK(run_config(c).status == kExitLintFindings);
}

TEST_CASE("blocks --dot renders records; --sigs adds colors") {
    CliConfig c;
    c.command = CliConfig::Command::Blocks;
    c.model_paths = {source_path("fixtures/figure1.json")};
    c.dot = true;
    RunResult r = run_config(c);
    CHECK(r.status == kExitOk);
    for (const char* needle : {"b0 [", "b1 [", "b2 [", "b3 [", "->"}) {
        CHECK(r.out.find(needle) != std::string::npos);
    }

    CliConfig colored;
    colored.command = CliConfig::Command::Blocks;
    colored.model_paths = {source_path("fixtures/ocr.json")};
    colored.dot = true;
    colored.signature_path = source_path("signatures");
    RunResult cr = run_config(colored);
    CHECK(cr.status == kExitOk);
    CHECK(cr.out.find("fillcolor") != std::string::npos);
    CHECK(cr.err.find("ResNetFamily") != std::string::npos);
}

TEST_CASE("export emits the interchange document") {
    CliConfig c;
    c.command = CliConfig::Command::Export;
    c.model_paths = {source_path("fixtures/conv_relu_opset17.onnx")};
    RunResult r = run_config(c);
    CHECK(r.status == kExitOk);
    CHECK(r.out.find("\"initializers\"") != std::string::npos);
    CHECK(r.out.find("\"Conv\"") != std::string::npos);
}

TEST_CASE("missing model files exit 66, unreadable ones exit 2") {
    RunResult missing = run_config(scan_config({"no/such/file.json"}));
    CHECK(missing.status == kExitNoInput);
    CHECK(missing.err.find("error:") != std::string::npos);

    TempDir tmp;
    std::string garbage = tmp.file("bad.json", "this is not a model");
    RunResult broken = run_config(scan_config({garbage}));
    CHECK(broken.status == kExitScanFailure);

    // Good models still produce reports when one of the batch fails.
    RunResult mixed =
        run_config(scan_config({source_path("fixtures/deberta.json"), garbage}));
    CHECK(mixed.status == kExitScanFailure);
    CHECK(mixed.out.find("DebertaModel") != std::string::npos);
}

TEST_CASE("bad flags exit with the usage status") {
    CHECK(run_argv({"scan"}).status == kExitUsage);           // no models, no sigs
    CHECK(run_argv({"frobnicate"}).status == kExitUsage);     // unknown command
    CHECK(run_argv({"scan", "--sigs"}).status == kExitUsage); // missing value
    CHECK(run_argv({"--help"}).status == kExitOk);
}

TEST_CASE("GENESCAN_SIGS provides the default signature path") {
    ::setenv("GENESCAN_SIGS", source_path("signatures").c_str(), 1);
    RunResult r = run_argv({"scan", "--format", "json",
                            source_path("fixtures/ocr.json")});
    ::unsetenv("GENESCAN_SIGS");
    CHECK(r.status == kExitOk);
    CHECK(r.out.find("Sequencer2D") != std::string::npos);
}

TEST_CASE("duplicate family names across merged files are rejected") {
    TempDir tmp;
    const std::string sig =
        R"({"Twin":{"blocks":[{"id":0,"ops":["Conv"],"repeats":[1,1]}],
            "edges":[],"min_repeats":1}})";
    tmp.file("a.json", sig);
    tmp.file("b.json", sig);
    CliConfig c = scan_config({source_path("fixtures/ocr.json")});
    c.signature_path = tmp.path.string();
    RunResult r = run_config(c);
    CHECK(r.status == kExitScanFailure);
    CHECK(r.err.find("duplicate family name 'Twin'") != std::string::npos);
}

TEST_CASE("parallel scans keep report order and content") {
    std::vector<std::string> models = {
        source_path("fixtures/deberta.json"), source_path("fixtures/bert.json"),
        source_path("fixtures/roberta.json"), source_path("fixtures/vit.json"),
        source_path("fixtures/ocr.json"),     source_path("fixtures/figure1.json"),
    };
    CliConfig serial = scan_config(models);
    serial.jobs = 1;
    CliConfig parallel = scan_config(models);
    parallel.jobs = 4;

    RunResult a = run_config(serial);
    RunResult b = run_config(parallel);
    CHECK(a.status == kExitOk);
    CHECK(b.status == kExitOk);
    CHECK(strip_ms(a.out) == strip_ms(b.out));
}

TEST_CASE("scan --no-canonicalize drops the fused-dialect detection") {
    RunResult with = run_argv({"scan", "--sigs", source_path("signatures"),
                               "--format", "json",
                               source_path("fixtures/bert_opset16.json")});
    CHECK(with.out.find("BertEncoder") != std::string::npos);

    RunResult without = run_argv({"scan", "--sigs", source_path("signatures"),
                                  "--format", "json", "--no-canonicalize",
                                  source_path("fixtures/bert_opset16.json")});
    CHECK(without.out.find("BertEncoder") == std::string::npos);
    CHECK(without.out.find("BertDerivative") != std::string::npos);
}
