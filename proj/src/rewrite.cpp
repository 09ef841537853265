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

#include "genescan/rewrite.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "genescan/error.hpp"

namespace genescan {

namespace {

using nlohmann::json;

bool node_op_matches(const OpPattern& p, const std::string& op) {
    switch (p.kind) {
        case OpPattern::Kind::Literal: return p.op == op;
        case OpPattern::Kind::AnyOne: return true;
        case OpPattern::Kind::Alternation:
            return std::find(p.options.begin(), p.options.end(), op) !=
                   p.options.end();
        case OpPattern::Kind::AnyMany: return false;  // rejected at parse
    }
    return false;
}

void check_rule_pattern(const ComponentSignature& comp, const std::string& where) {
    for (const BlockPattern& block : comp.blocks) {
        if (block.repeats_min != 1 || block.repeats_max != 1) {
            raise(ErrorKind::Validation,
                  where + ": rule block patterns must have repeats [1,1]");
        }
        for (const OpPattern& op : block.ops) {
            if (op.kind == OpPattern::Kind::AnyMany) {
                raise(ErrorKind::Validation,
                      where + ": '*' is not allowed in rule patterns");
            }
        }
    }
    for (const EdgePattern& edge : comp.edges) {
        if (edge.min_repeats != 1) {
            raise(ErrorKind::Validation,
                  where + ": rule edges must have min_repeats 1");
        }
    }
}

/// One accepted occurrence: the matched node set plus the node whose
/// downstream edges the replacement inherits.
struct Occurrence {
    std::vector<NodeId> nodes;  // every matched node
    NodeId sink_tail = 0;       // last node of the end block's chain
};

// Enumerates occurrences head-first in ascending node order, accepting the
// first complete assignment per start head and consuming its nodes, so
// overlapping candidates resolve first-match-wins.
class OccurrenceFinder {
public:
    OccurrenceFinder(const AgnosticGraph& graph, const ComponentSignature& comp)
        : graph_(graph), comp_(comp), used_(graph.nodes.size(), 0) {
        const std::size_t np = comp.blocks.size();
        chains_.resize(np);
        in_edges_.resize(np);
        for (const EdgePattern& e : comp_.edges) in_edges_[e.dst].push_back(e.src);

        // Topological order of pattern blocks, ascending id among ready ones.
        std::vector<std::uint32_t> pending(np, 0);
        for (const EdgePattern& e : comp_.edges) ++pending[e.dst];
        std::vector<char> placed(np, 0);
        while (order_.size() < np) {
            bool advanced = false;
            for (std::uint32_t p = 0; p < np; ++p) {
                if (placed[p] || pending[p] != 0) continue;
                placed[p] = 1;
                advanced = true;
                order_.push_back(p);
                for (std::uint32_t ei : comp_.out_edges[p]) {
                    --pending[comp_.edges[ei].dst];
                }
            }
            if (!advanced) raise(ErrorKind::Internal, "cyclic rule pattern");
        }
    }

    std::vector<Occurrence> run() {
        std::vector<Occurrence> accepted;
        const BlockPattern& source = comp_.blocks[comp_.start_id];
        for (NodeId head = 0; head < graph_.nodes.size(); ++head) {
            if (used_[head] ||
                !node_op_matches(source.ops.front(),
                                 graph_.nodes[head].operation_type)) {
                continue;
            }
            forced_head_ = head;
            if (assign(0)) {
                Occurrence occ;
                for (const auto& chain : chains_) {
                    occ.nodes.insert(occ.nodes.end(), chain.begin(), chain.end());
                }
                occ.sink_tail = chains_[comp_.end_id].back();
                for (NodeId n : occ.nodes) used_[n] = 1;
                std::sort(occ.nodes.begin(), occ.nodes.end());
                accepted.push_back(std::move(occ));
            }
            for (auto& chain : chains_) chain.clear();
        }
        return accepted;
    }

private:
    bool taken(NodeId n) const {
        if (used_[n]) return true;
        for (const auto& chain : chains_) {
            if (std::find(chain.begin(), chain.end(), n) != chain.end()) return true;
        }
        return false;
    }

    // Places the k-th pattern block (in topo order); on full assignment,
    // checks that nothing but the sink tail leaks out of the matched set.
    bool assign(std::size_t k) {
        if (k == order_.size()) return closure_holds();
        std::uint32_t p = order_[k];
        const BlockPattern& pattern = comp_.blocks[p];

        std::vector<NodeId> heads;
        if (in_edges_[p].empty()) {
            heads.push_back(forced_head_);
        } else {
            NodeId from = chains_[in_edges_[p].front()].back();
            for (NodeId cand : graph_.nodes[from].outputs) {
                if (taken(cand) ||
                    !node_op_matches(pattern.ops.front(),
                                     graph_.nodes[cand].operation_type)) {
                    continue;
                }
                bool fed_by_all = true;
                for (std::size_t i = 1; i < in_edges_[p].size(); ++i) {
                    NodeId tail = chains_[in_edges_[p][i]].back();
                    const auto& outs = graph_.nodes[tail].outputs;
                    if (std::find(outs.begin(), outs.end(), cand) == outs.end()) {
                        fed_by_all = false;
                        break;
                    }
                }
                if (fed_by_all) heads.push_back(cand);
            }
        }

        for (NodeId head : heads) {
            chains_[p].push_back(head);
            if (extend(p, 1, k)) return true;
            chains_[p].clear();
        }
        return false;
    }

    bool extend(std::uint32_t p, std::size_t element, std::size_t k) {
        const BlockPattern& pattern = comp_.blocks[p];
        if (element == pattern.ops.size()) return assign(k + 1);
        NodeId cur = chains_[p].back();
        for (NodeId next : graph_.nodes[cur].outputs) {
            if (taken(next) ||
                !node_op_matches(pattern.ops[element],
                                 graph_.nodes[next].operation_type)) {
                continue;
            }
            chains_[p].push_back(next);
            if (extend(p, element + 1, k)) return true;
            chains_[p].pop_back();
        }
        return false;
    }

    bool in_current(NodeId n) const {
        for (const auto& chain : chains_) {
            if (std::find(chain.begin(), chain.end(), n) != chain.end()) return true;
        }
        return false;
    }

    // Every matched node except the sink tail must feed only the matched set;
    // anything else would lose a dataflow edge in the fusion.
    bool closure_holds() const {
        NodeId sink_tail = chains_[comp_.end_id].back();
        for (const auto& chain : chains_) {
            for (NodeId n : chain) {
                if (n == sink_tail) continue;
                for (NodeId out : graph_.nodes[n].outputs) {
                    if (!in_current(out)) return false;
                }
            }
        }
        return true;
    }

    const AgnosticGraph& graph_;
    const ComponentSignature& comp_;
    std::vector<char> used_;
    std::vector<std::vector<NodeId>> chains_;  // per pattern block
    std::vector<std::vector<std::uint32_t>> in_edges_;
    std::vector<std::uint32_t> order_;
    NodeId forced_head_ = 0;
};

bool is_acyclic(const std::vector<Node>& nodes) {
    std::vector<std::uint32_t> pending(nodes.size());
    std::vector<NodeId> ready;
    for (const Node& n : nodes) {
        pending[n.id] = static_cast<std::uint32_t>(n.inputs.size());
        if (n.inputs.empty()) ready.push_back(n.id);
    }
    std::size_t processed = 0;
    while (!ready.empty()) {
        NodeId id = ready.back();
        ready.pop_back();
        ++processed;
        for (NodeId out : nodes[id].outputs) {
            if (--pending[out] == 0) ready.push_back(out);
        }
    }
    return processed == nodes.size();
}

AgnosticGraph fuse(const AgnosticGraph& graph, const std::vector<Occurrence>& occs,
                   const std::string& replacement_op, std::uint32_t& fuse_counter) {
    constexpr NodeId kNone = static_cast<NodeId>(-1);
    std::vector<NodeId> occ_of(graph.nodes.size(), kNone);
    for (std::size_t i = 0; i < occs.size(); ++i) {
        for (NodeId n : occs[i].nodes) occ_of[n] = static_cast<NodeId>(i);
    }

    AgnosticGraph out;
    std::unordered_set<std::string> names;
    std::vector<NodeId> remap(graph.nodes.size(), kNone);
    for (const Node& n : graph.nodes) {
        if (occ_of[n.id] != kNone) continue;
        NodeId id = static_cast<NodeId>(out.nodes.size());
        remap[n.id] = id;
        names.insert(n.name);
        out.nodes.push_back(Node{id, n.name, n.operation_type, {}, {}, n.origin});
    }
    std::vector<NodeId> synth_id(occs.size());
    for (std::size_t i = 0; i < occs.size(); ++i) {
        std::string name =
            replacement_op + "#fused" + std::to_string(fuse_counter++);
        while (!names.insert(name).second) name += "~";
        synth_id[i] = static_cast<NodeId>(out.nodes.size());
        out.nodes.push_back(Node{synth_id[i], std::move(name), replacement_op,
                                 {}, {}, NodeOrigin::Fused});
    }
    for (std::size_t i = 0; i < occs.size(); ++i) {
        for (NodeId n : occs[i].nodes) remap[n] = synth_id[i];
    }

    std::unordered_set<std::uint64_t> seen;
    for (const Edge& e : graph.edges) {
        NodeId src = remap[e.source];
        NodeId dst = remap[e.destination];
        if (src == dst) continue;  // edge absorbed into one fused node
        // Only the sink tail's downstream edges survive out of an occurrence.
        if (occ_of[e.source] != kNone &&
            e.source != occs[occ_of[e.source]].sink_tail) {
            continue;
        }
        if (!seen.insert((std::uint64_t{src} << 32) | dst).second) continue;
        out.edges.push_back(Edge{src, dst});
        out.nodes[src].outputs.push_back(dst);
        out.nodes[dst].inputs.push_back(src);
    }

    for (NodeId id : graph.graph_inputs) {
        if (occ_of[id] == kNone) out.graph_inputs.push_back(remap[id]);
    }
    for (NodeId id : graph.graph_outputs) {
        if (occ_of[id] == kNone) out.graph_outputs.push_back(remap[id]);
    }
    return out;
}

}  // namespace

std::vector<RewriteRule> parse_rules(std::span<const std::uint8_t> payload) {
    json doc = json::parse(payload.begin(), payload.end(), nullptr, false);
    if (doc.is_discarded()) {
        raise(ErrorKind::Validation, "$: not valid JSON");
    }
    if (!doc.is_object()) {
        raise(ErrorKind::Validation, "$: expected object keyed by rule name");
    }

    std::vector<RewriteRule> rules;
    for (const auto& [name, value] : doc.items()) {
        if (!value.is_object()) {
            raise(ErrorKind::Validation, name + ": expected object");
        }
        RewriteRule rule;
        rule.name = name;
        auto rep = value.find("replacement_op");
        if (rep == value.end() || !rep->is_string() ||
            rep->get<std::string>().empty()) {
            raise(ErrorKind::Validation,
                  name + ".replacement_op: expected non-empty string");
        }
        rule.replacement_op = rep->get<std::string>();
        if (auto it = value.find("anchor"); it != value.end() && it->is_string()) {
            rule.anchor = it->get<std::string>();
        }

        // The pattern body shares the signature schema; reuse its parser.
        json component = value;
        component.erase("replacement_op");
        component.erase("anchor");
        json wrapped;
        wrapped[name] = std::move(component);
        std::string text = wrapped.dump();
        std::vector<FamilySignature> parsed = parse_signatures(text);
        rule.pattern = std::move(parsed.front().components.front());
        check_rule_pattern(rule.pattern, name);
        rules.push_back(std::move(rule));
    }
    return rules;
}

std::vector<RewriteRule> parse_rules(const std::string& text) {
    return parse_rules(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

const std::string& default_rules_json() {
    static const std::string rules = R"({
  "LayerNormalizationFusion": {
    "replacement_op": "LayerNormalization",
    "anchor": "the final scale-shift Add keeps the downstream edges",
    "blocks": [
      {"id": 0, "ops": ["ReduceMean"], "repeats": [1, 1]},
      {"id": 1, "ops": ["Sub"], "repeats": [1, 1]},
      {"id": 2, "ops": ["Pow", "ReduceMean", "Add", "Sqrt"], "repeats": [1, 1]},
      {"id": 3, "ops": ["Div", "Mul", "Add"], "repeats": [1, 1]}
    ],
    "edges": [
      {"src": 0, "dst": 1, "min_repeats": 1},
      {"src": 1, "dst": 2, "min_repeats": 1},
      {"src": 1, "dst": 3, "min_repeats": 1},
      {"src": 2, "dst": 3, "min_repeats": 1}
    ],
    "min_repeats": 1
  }
}
)";
    return rules;
}

const std::vector<RewriteRule>& default_rules() {
    static const std::vector<RewriteRule> rules = parse_rules(default_rules_json());
    return rules;
}

AgnosticGraph apply_rules(const AgnosticGraph& graph,
                          const std::vector<RewriteRule>& rules,
                          std::vector<std::string>* warnings) {
    AgnosticGraph current = graph;
    std::uint32_t fuse_counter = 0;
    for (const RewriteRule& rule : rules) {
        std::vector<Occurrence> occs =
            OccurrenceFinder(current, rule.pattern).run();
        if (occs.empty()) continue;
        AgnosticGraph fused = fuse(current, occs, rule.replacement_op, fuse_counter);
        if (!is_acyclic(fused.nodes)) {
            // Unreachable with the single-escape closure, kept as a guard.
            if (warnings) {
                warnings->push_back("rule '" + rule.name +
                                    "' skipped: fusion would create a cycle");
            }
            continue;
        }
        current = std::move(fused);
    }
    return current;
}

}  // namespace genescan
