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

#include "genescan/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "genescan/error.hpp"
#include "genescan/ingest.hpp"
#include "genescan/rewrite.hpp"

namespace genescan {

namespace {

namespace fs = std::filesystem;

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    return load_file(path).payload;
}

std::vector<RewriteRule> rules_for(const CliConfig& config) {
    if (!config.canonicalize) return {};
    if (config.rules_path.empty()) return default_rules();
    return parse_rules(read_file_bytes(config.rules_path));
}

std::string format_detection(const Detection& d) {
    std::ostringstream line;
    line << "  " << d.family << "  specificity=" << d.specificity
         << "  components=" << d.total_components
         << "  occurrences=" << d.start_block_ids.size();
    return line.str();
}

int run_scan(const CliConfig& config, const std::vector<FamilySignature>& db,
             std::ostream& out, std::ostream& err) {
    ScanOptions options;
    options.mode = config.mode;
    options.rules = rules_for(config);

    struct Result {
        std::string text;
        std::string error;
        bool missing = false;
    };
    std::vector<Result> results(config.model_paths.size());

    auto worker_body = [&](std::size_t i) {
        const std::string& path = config.model_paths[i];
        try {
            ModelSource source = load_file(path);
            std::vector<std::string> ingest_warnings;
            AgnosticGraph graph = load_model(source, &ingest_warnings);
            ScanReport report = scan(graph, db, options);
            report.origin = path;
            report.warnings.insert(report.warnings.begin(),
                                   ingest_warnings.begin(), ingest_warnings.end());
            if (config.output == CliConfig::Output::Json) {
                results[i].text = report_to_json(report) + "\n";
            } else {
                std::ostringstream block;
                block << report.origin << "  nodes=" << report.stats.nodes
                      << " blocks=" << report.stats.blocks << "\n";
                for (const std::string& w : report.warnings) {
                    block << "  warning: " << w << "\n";
                }
                if (report.detections.empty()) {
                    block << "  (no detections)\n";
                }
                for (const Detection& d : report.detections) {
                    block << format_detection(d) << "\n";
                }
                results[i].text = block.str();
            }
        } catch (const Error& e) {
            results[i].error = e.what();
            results[i].missing = e.kind() == ErrorKind::Io;
        }
    };

    const unsigned jobs =
        std::max(1u, std::min<unsigned>(config.jobs,
                                        static_cast<unsigned>(results.size())));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < results.size(); ++i) worker_body(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t) {
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= results.size()) return;
                    worker_body(i);
                }
            });
        }
        for (std::thread& t : pool) t.join();
    }

    int status = kExitOk;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (!results[i].error.empty()) {
            err << "error: " << results[i].error << "\n";
            if (results[i].missing) {
                status = kExitNoInput;
            } else if (status != kExitNoInput) {
                status = kExitScanFailure;
            }
        } else {
            out << results[i].text;
        }
    }
    return status;
}

int run_lint(const CliConfig& config, std::ostream& out, std::ostream& err) {
    std::vector<FamilySignature> db;
    try {
        db = load_signature_db(config.signature_path);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Io) throw;
        err << "error: " << e.what() << "\n";
        return kExitLintFindings;
    }
    std::vector<LintFinding> findings = lint_signatures(db);
    for (const LintFinding& f : findings) {
        out << f.message << "\n";
    }
    out << db.size() << " famil" << (db.size() == 1 ? "y" : "ies") << ", "
        << findings.size() << " finding" << (findings.size() == 1 ? "" : "s")
        << "\n";
    return findings.empty() ? kExitOk : kExitLintFindings;
}

// A readable qualitative palette; families cycle through it.
const char* kPalette[] = {"#a6cee3", "#b2df8a", "#fb9a99", "#fdbf6f",
                          "#cab2d6", "#ffff99", "#1f78b4", "#33a02c"};

int run_blocks(const CliConfig& config, std::ostream& out, std::ostream& err) {
    ModelSource source = load_file(config.model_paths.front());
    AgnosticGraph graph = load_model(source);
    std::vector<RewriteRule> rules = rules_for(config);
    if (!rules.empty()) {
        graph = apply_rules(graph, rules);
    }
    BlockGraph blocks = extract_blocks(graph);

    if (!config.dot) {
        out << block_graph_to_json(blocks);
        return kExitOk;
    }
    std::unordered_map<BlockId, std::string> fill;
    if (!config.signature_path.empty()) {
        std::vector<FamilySignature> db = load_signature_db(config.signature_path);
        std::size_t color = 0;
        for (const FamilySignature& family : db) {
            std::vector<BlockId> hits = matched_blocks(family, blocks);
            if (hits.empty()) continue;
            const char* c = kPalette[color++ % std::size(kPalette)];
            for (BlockId b : hits) fill.emplace(b, c);
            err << "# " << family.name << " -> " << c << "\n";
        }
    }
    out << block_graph_to_dot(blocks, fill);
    return kExitOk;
}

int run_export(const CliConfig& config, std::ostream& out) {
    ModelSource source = load_file(config.model_paths.front());
    AgnosticGraph graph = load_model(source);
    out << export_json_graph(graph);
    return kExitOk;
}

}  // namespace

std::vector<FamilySignature> load_signature_db(const std::string& path) {
    if (path.empty()) {
        raise(ErrorKind::Validation, "no signature path given");
    }
    std::vector<std::string> files;
    std::error_code ec;
    if (fs::is_directory(path, ec)) {
        for (const auto& entry : fs::directory_iterator(path)) {
            if (entry.is_regular_file() && entry.path().extension() == ".json") {
                files.push_back(entry.path().string());
            }
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) {
            raise(ErrorKind::Io, "no *.json signature files in '" + path + "'");
        }
    } else {
        files.push_back(path);
    }

    std::vector<FamilySignature> db;
    std::set<std::string> names;
    for (const std::string& file : files) {
        std::vector<FamilySignature> part;
        try {
            part = parse_signatures(read_file_bytes(file));
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Io) throw;
            throw Error(e.kind(), file + ": " + e.what());
        }
        for (FamilySignature& family : part) {
            if (!names.insert(family.name).second) {
                raise(ErrorKind::Validation,
                      "duplicate family name '" + family.name + "' in '" + file + "'");
            }
            db.push_back(std::move(family));
        }
    }
    return db;
}

int run(const CliConfig& config, std::ostream& out, std::ostream& err) {
    try {
        switch (config.command) {
            case CliConfig::Command::Scan: {
                std::vector<FamilySignature> db = load_signature_db(config.signature_path);
                return run_scan(config, db, out, err);
            }
            case CliConfig::Command::Lint:
                return run_lint(config, out, err);
            case CliConfig::Command::Blocks:
                return run_blocks(config, out, err);
            case CliConfig::Command::Export:
                return run_export(config, out);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::Io ? kExitNoInput : kExitScanFailure;
    }
    return kExitUsage;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"signature-based model genealogy scanner"};
    app.require_subcommand(1);

    CliConfig config;
    const char* env_sigs = std::getenv("GENESCAN_SIGS");
    std::string default_sigs = env_sigs ? env_sigs : "";
    config.signature_path = default_sigs;

    bool best = false;
    bool no_canonicalize = false;
    std::string format = "text";

    CLI::App* scan_cmd = app.add_subcommand("scan", "scan models against a signature database");
    scan_cmd->add_option("models", config.model_paths, "model files (.onnx or .json)")
        ->required();
    auto* sigs_opt = scan_cmd->add_option("--sigs", config.signature_path,
                                          "signature file or directory");
    if (default_sigs.empty()) sigs_opt->required();
    scan_cmd->add_option("--rules", config.rules_path, "rewrite rules file");
    scan_cmd->add_flag("--best", best, "report only the most specific family");
    scan_cmd->add_flag("--no-canonicalize", no_canonicalize,
                       "skip the operator-fusion rewrite pass");
    scan_cmd->add_option("--format", format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
    scan_cmd->add_option("--jobs", config.jobs, "parallel model scans")
        ->check(CLI::PositiveNumber);

    CLI::App* lint_cmd = app.add_subcommand("lint", "validate and lint signatures");
    lint_cmd->add_option("sigs", config.signature_path, "signature file or directory");

    CLI::App* blocks_cmd =
        app.add_subcommand("blocks", "dump a model's block decomposition");
    blocks_cmd->add_option("model", config.model_paths, "model file")
        ->required()
        ->expected(1);
    blocks_cmd->add_flag("--dot", config.dot, "emit Graphviz DOT instead of JSON");
    blocks_cmd->add_option("--sigs", config.signature_path,
                           "color DOT blocks by matching family");
    blocks_cmd->add_flag("--no-canonicalize", no_canonicalize,
                         "skip the operator-fusion rewrite pass");
    blocks_cmd->add_option("--rules", config.rules_path, "rewrite rules file");

    CLI::App* export_cmd =
        app.add_subcommand("export", "emit the graph in the JSON interchange format");
    export_cmd->add_option("model", config.model_paths, "model file")
        ->required()
        ->expected(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream sink;
        int code = app.exit(e, out, sink);
        if (code != 0) err << sink.str();
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (scan_cmd->parsed()) config.command = CliConfig::Command::Scan;
    if (lint_cmd->parsed()) config.command = CliConfig::Command::Lint;
    if (blocks_cmd->parsed()) {
        config.command = CliConfig::Command::Blocks;
        // Coloring is opt-in for blocks; the env default would force a
        // signature load on every dump.
        if (!blocks_cmd->count("--sigs")) config.signature_path.clear();
    }
    if (export_cmd->parsed()) config.command = CliConfig::Command::Export;

    config.mode = best ? ScanMode::BestMatch : ScanMode::AllMatches;
    config.canonicalize = !no_canonicalize;
    config.output = format == "json" ? CliConfig::Output::Json : CliConfig::Output::Text;

    if (config.command == CliConfig::Command::Lint && config.signature_path.empty()) {
        err << "error: lint needs a signature path (argument or GENESCAN_SIGS)\n";
        return kExitUsage;
    }
    return run(config, out, err);
}

}  // namespace genescan
