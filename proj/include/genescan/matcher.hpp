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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "genescan/blocking.hpp"
#include "genescan/rewrite.hpp"
#include "genescan/signature.hpp"

namespace genescan {

/// True iff, after removing the pattern's ignored_ops from the block's op
/// sequence, the rest is generated by the pattern's ops repeated r times
/// depth-wise for some r in [repeats_min, repeats_max]. Matching is anchored
/// at both ends.
bool match_block_pattern(const BlockPattern& pattern, const Block& block);

/// Prefilter: every block pattern of the component matches at least one block
/// somewhere in the graph. Necessary but not sufficient.
bool check_all_blocks(const ComponentSignature& component, const BlockGraph& blocks);

/// Ids of the blocks matching the component's start pattern.
std::vector<BlockId> get_start_nodes(const ComponentSignature& component,
                                     const BlockGraph& blocks);

/// Per-attempt bookkeeping: realized count per pattern edge (src, dst).
using VisitedEdgeCounts = std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t>;

/// Recursive subgraph walk from `current`, which must match the pattern at
/// `pattern_id`. True iff every outgoing edge pattern is realized by enough
/// outgoing block edges (weighted by stored multiplicity) whose destinations
/// match and recurse successfully; the sink pattern holds unconditionally.
bool traverse_from_start(const ComponentSignature& component, BlockId current,
                         std::uint32_t pattern_id, VisitedEdgeCounts& visited,
                         const BlockGraph& blocks);

struct ComponentMatch {
    bool matched = false;
    std::uint32_t occurrences = 0;
    std::vector<BlockId> starts;  // one entry per successful start block
};

/// Runs the prefilter, then counts start blocks from which traversal
/// succeeds; matched iff the count reaches the component's min_repeats.
ComponentMatch check_signature(const ComponentSignature& component,
                               const BlockGraph& blocks);

enum class ScanMode {
    AllMatches,  // report every matching family
    BestMatch,   // report only the highest-specificity family
};

struct Detection {
    std::string family;
    std::uint32_t matched_components = 0;
    std::uint32_t total_components = 0;
    std::vector<BlockId> start_block_ids;  // per counted occurrence, all components
    double specificity = 0;
};

struct ScanStats {
    std::size_t nodes = 0;
    std::size_t blocks = 0;
    double ms = 0;  // wall clock; the one non-deterministic report field
};

struct ScanReport {
    std::string origin;
    std::vector<Detection> detections;  // descending specificity, then name
    std::vector<std::string> warnings;
    ScanStats stats;
};

struct ScanOptions {
    ScanMode mode = ScanMode::AllMatches;
    /// Rewrite rules applied before blocking; empty disables canonicalization.
    std::vector<RewriteRule> rules;
    ConstantOps constant_ops = default_constant_ops();
};

/// Full pipeline over one graph: canonicalize, extract blocks, evaluate every
/// family (all components must match). Per-family failures become warnings.
ScanReport scan(const AgnosticGraph& graph, const std::vector<FamilySignature>& db,
                const ScanOptions& options = {});

/// The report as a single JSON document:
/// {"origin":...,"detections":[{"family","specificity","components",
/// "occurrences"}],"warnings":[...],"stats":{"nodes","blocks","ms"}}
std::string report_to_json(const ScanReport& report);

/// Blocks touched by any successful occurrence of the family's components;
/// used to color DOT output for signature authoring.
std::vector<BlockId> matched_blocks(const FamilySignature& family,
                                    const BlockGraph& blocks);

}  // namespace genescan
