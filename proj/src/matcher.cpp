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

#include "genescan/matcher.hpp"

#include <algorithm>
#include <chrono>

#include <nlohmann/json.hpp>

#include "genescan/error.hpp"

namespace genescan {

namespace {

bool op_matches(const OpPattern& p, const std::string& op) {
    switch (p.kind) {
        case OpPattern::Kind::Literal: return p.op == op;
        case OpPattern::Kind::AnyOne: return true;
        case OpPattern::Kind::Alternation:
            return std::find(p.options.begin(), p.options.end(), op) !=
                   p.options.end();
        case OpPattern::Kind::AnyMany: return true;
    }
    return false;
}

// NFA subset simulation over the element sequence; state i means "the first
// i elements are satisfied". "*" elements add an epsilon step (skip) and a
// self step (consume anything).
bool nfa_match(const std::vector<const OpPattern*>& elems,
               const std::vector<const std::string*>& seq) {
    const std::size_t m = elems.size();
    std::vector<char> active(m + 1, 0);
    active[0] = 1;
    auto close = [&] {
        for (std::size_t i = 0; i < m; ++i) {
            if (active[i] && elems[i]->kind == OpPattern::Kind::AnyMany) {
                active[i + 1] = 1;
            }
        }
    };
    close();
    for (const std::string* op : seq) {
        std::vector<char> next(m + 1, 0);
        for (std::size_t i = 0; i < m; ++i) {
            if (!active[i]) continue;
            if (elems[i]->kind == OpPattern::Kind::AnyMany) {
                next[i] = 1;
            } else if (op_matches(*elems[i], *op)) {
                next[i + 1] = 1;
            }
        }
        active = std::move(next);
        close();
        if (std::find(active.begin(), active.end(), 1) == active.end()) {
            return false;
        }
    }
    return active[m];
}

// Memoized satisfaction of (block, pattern): the block matches the pattern
// and every outgoing edge pattern is realized. Pure, so results are shared
// across start attempts.
struct MatchState {
    const ComponentSignature& comp;
    const BlockGraph& bg;
    std::vector<std::int8_t> memo;  // blocks x patterns; -1 unknown

    MatchState(const ComponentSignature& c, const BlockGraph& b)
        : comp(c), bg(b), memo(b.blocks.size() * c.blocks.size(), -1) {}

    std::int8_t& slot(BlockId block, std::uint32_t pattern) {
        return memo[std::size_t{block} * comp.blocks.size() + pattern];
    }

    bool satisfies(BlockId block, std::uint32_t pattern, VisitedEdgeCounts& visited,
                   std::uint32_t depth) {
        std::int8_t& m = slot(block, pattern);
        if (m >= 0) return m != 0;
        if (depth > comp.blocks.size()) {
            raise(ErrorKind::Internal, "signature traversal exceeded pattern depth");
        }
        bool ok = match_block_pattern(comp.blocks[pattern], bg.blocks[block]) &&
                  walk(block, pattern, visited, depth);
        m = ok ? 1 : 0;
        return ok;
    }

    // The Traverse step proper: assumes `block` matches `pattern`.
    bool walk(BlockId block, std::uint32_t pattern, VisitedEdgeCounts& visited,
              std::uint32_t depth) {
        if (pattern == comp.end_id) return true;
        bool all_ok = true;
        for (std::uint32_t ei : comp.out_edges[pattern]) {
            const EdgePattern& edge = comp.edges[ei];
            std::uint32_t realized = 0;
            for (std::uint32_t bei : bg.out_edges[block]) {
                const BlockEdge& be = bg.edges[bei];
                if (satisfies(be.dst, edge.dst, visited, depth + 1)) {
                    realized += be.count;
                }
            }
            visited[{edge.src, edge.dst}] += realized;
            if (realized < edge.min_repeats) all_ok = false;
        }
        return all_ok;
    }
};

}  // namespace

bool match_block_pattern(const BlockPattern& pattern, const Block& block) {
    std::vector<const std::string*> seq;
    seq.reserve(block.op_types.size());
    for (const std::string& op : block.op_types) {
        if (!pattern.ignored_ops.count(op)) seq.push_back(&op);
    }

    std::size_t min_per_copy = 0;
    bool has_any_many = false;
    for (const OpPattern& p : pattern.ops) {
        if (p.kind == OpPattern::Kind::AnyMany) {
            has_any_many = true;
        } else {
            ++min_per_copy;
        }
    }

    std::vector<const OpPattern*> elems;
    for (std::uint32_t r = pattern.repeats_min; r <= pattern.repeats_max; ++r) {
        if (min_per_copy * r > seq.size()) break;
        if (!has_any_many && pattern.ops.size() * r != seq.size()) continue;
        elems.clear();
        elems.reserve(pattern.ops.size() * r);
        for (std::uint32_t copy = 0; copy < r; ++copy) {
            for (const OpPattern& p : pattern.ops) elems.push_back(&p);
        }
        if (nfa_match(elems, seq)) return true;
    }
    return false;
}

bool check_all_blocks(const ComponentSignature& component, const BlockGraph& blocks) {
    for (const BlockPattern& pattern : component.blocks) {
        bool found = false;
        for (const Block& block : blocks.blocks) {
            if (match_block_pattern(pattern, block)) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

std::vector<BlockId> get_start_nodes(const ComponentSignature& component,
                                     const BlockGraph& blocks) {
    std::vector<BlockId> out;
    const BlockPattern& start = component.blocks[component.start_id];
    for (const Block& block : blocks.blocks) {
        if (match_block_pattern(start, block)) out.push_back(block.id);
    }
    return out;
}

bool traverse_from_start(const ComponentSignature& component, BlockId current,
                         std::uint32_t pattern_id, VisitedEdgeCounts& visited,
                         const BlockGraph& blocks) {
    MatchState state(component, blocks);
    return state.walk(current, pattern_id, visited, 0);
}

ComponentMatch check_signature(const ComponentSignature& component,
                               const BlockGraph& blocks) {
    ComponentMatch result;
    if (!check_all_blocks(component, blocks)) return result;

    MatchState state(component, blocks);
    for (BlockId start : get_start_nodes(component, blocks)) {
        VisitedEdgeCounts visited;
        if (state.satisfies(start, component.start_id, visited, 0)) {
            ++result.occurrences;
            result.starts.push_back(start);
        }
    }
    result.matched = result.occurrences >= component.min_repeats;
    return result;
}

ScanReport scan(const AgnosticGraph& graph, const std::vector<FamilySignature>& db,
                const ScanOptions& options) {
    auto begin = std::chrono::steady_clock::now();
    ScanReport report;

    const AgnosticGraph* scanned = &graph;
    AgnosticGraph rewritten;
    if (!options.rules.empty()) {
        rewritten = apply_rules(graph, options.rules, &report.warnings);
        scanned = &rewritten;
    }
    BlockGraph blocks = extract_blocks(*scanned, options.constant_ops);

    for (const FamilySignature& family : db) {
        try {
            Detection det;
            det.family = family.name;
            det.total_components = static_cast<std::uint32_t>(family.components.size());
            det.specificity = specificity(family);
            for (const ComponentSignature& comp : family.components) {
                ComponentMatch match = check_signature(comp, blocks);
                if (!match.matched) break;
                ++det.matched_components;
                det.start_block_ids.insert(det.start_block_ids.end(),
                                           match.starts.begin(), match.starts.end());
            }
            if (det.matched_components == det.total_components) {
                report.detections.push_back(std::move(det));
            }
        } catch (const Error& e) {
            report.warnings.push_back("family '" + family.name +
                                      "' skipped: " + e.what());
        }
    }

    std::sort(report.detections.begin(), report.detections.end(),
              [](const Detection& a, const Detection& b) {
                  if (a.specificity != b.specificity) {
                      return a.specificity > b.specificity;
                  }
                  return a.family < b.family;
              });
    if (options.mode == ScanMode::BestMatch && report.detections.size() > 1) {
        report.detections.resize(1);
    }

    report.stats.nodes = scanned->nodes.size();
    report.stats.blocks = blocks.blocks.size();
    report.stats.ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - begin)
                          .count();
    return report;
}

std::string report_to_json(const ScanReport& report) {
    nlohmann::ordered_json doc;
    doc["origin"] = report.origin;
    auto& detections = doc["detections"] = nlohmann::ordered_json::array();
    for (const Detection& d : report.detections) {
        detections.push_back({{"family", d.family},
                              {"specificity", d.specificity},
                              {"components", d.total_components},
                              {"occurrences", d.start_block_ids}});
    }
    doc["warnings"] = report.warnings;
    doc["stats"] = {{"nodes", report.stats.nodes},
                    {"blocks", report.stats.blocks},
                    {"ms", report.stats.ms}};
    return doc.dump();
}

std::vector<BlockId> matched_blocks(const FamilySignature& family,
                                    const BlockGraph& blocks) {
    std::vector<char> marked(blocks.blocks.size(), 0);
    for (const ComponentSignature& comp : family.components) {
        ComponentMatch match = check_signature(comp, blocks);
        if (!match.matched) return {};  // all components or nothing

        MatchState state(comp, blocks);
        VisitedEdgeCounts visited;
        // Forward walk over satisfying (block, pattern) pairs from each
        // successful start.
        std::vector<std::pair<BlockId, std::uint32_t>> stack;
        std::vector<char> seen(blocks.blocks.size() * comp.blocks.size(), 0);
        for (BlockId start : match.starts) {
            stack.push_back({start, comp.start_id});
        }
        while (!stack.empty()) {
            auto [block, pattern] = stack.back();
            stack.pop_back();
            char& s = seen[std::size_t{block} * comp.blocks.size() + pattern];
            if (s) continue;
            s = 1;
            marked[block] = 1;
            for (std::uint32_t ei : comp.out_edges[pattern]) {
                const EdgePattern& edge = comp.edges[ei];
                for (std::uint32_t bei : blocks.out_edges[block]) {
                    const BlockEdge& be = blocks.edges[bei];
                    if (state.satisfies(be.dst, edge.dst, visited, 0)) {
                        stack.push_back({be.dst, edge.dst});
                    }
                }
            }
        }
    }
    std::vector<BlockId> out;
    for (BlockId b = 0; b < marked.size(); ++b) {
        if (marked[b]) out.push_back(b);
    }
    return out;
}

}  // namespace genescan
