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

#include "genescan/signature.hpp"

#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

#include "genescan/error.hpp"

namespace genescan {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& path, const std::string& what) {
    raise(ErrorKind::Validation, path + ": " + what);
}

const json& member(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) bad(path + "." + key, "missing");
    return *it;
}

std::uint32_t positive_int(const json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
        bad(path, "expected integer >= 1");
    }
    return static_cast<std::uint32_t>(v.get<std::int64_t>());
}

std::uint32_t nonneg_int(const json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        bad(path, "expected non-negative integer");
    }
    return static_cast<std::uint32_t>(v.get<std::int64_t>());
}

BlockPattern parse_block(const json& v, const std::string& path) {
    if (!v.is_object()) bad(path, "expected object");
    BlockPattern block;
    block.id = nonneg_int(member(v, path, "id"), path + ".id");

    const json& ops = member(v, path, "ops");
    if (!ops.is_array() || ops.empty()) bad(path + ".ops", "expected non-empty array");
    for (std::size_t i = 0; i < ops.size(); ++i) {
        const std::string op_path = path + ".ops[" + std::to_string(i) + "]";
        if (!ops[i].is_string()) bad(op_path, "expected string");
        block.ops.push_back(parse_op_pattern(ops[i].get<std::string>(), op_path));
    }

    // Appendix-style listings write "ignored_ops": [null] for "none".
    if (auto it = v.find("ignored_ops"); it != v.end() && !it->is_null()) {
        if (!it->is_array()) bad(path + ".ignored_ops", "expected array or null");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const json& entry = (*it)[i];
            if (entry.is_null()) continue;
            if (!entry.is_string()) {
                bad(path + ".ignored_ops[" + std::to_string(i) + "]",
                    "expected string or null");
            }
            block.ignored_ops.insert(entry.get<std::string>());
        }
    }

    const json& repeats = member(v, path, "repeats");
    if (!repeats.is_array() || repeats.size() != 2) {
        bad(path + ".repeats", "expected [min, max]");
    }
    block.repeats_min = positive_int(repeats[0], path + ".repeats[0]");
    block.repeats_max = positive_int(repeats[1], path + ".repeats[1]");
    if (block.repeats_max < block.repeats_min) {
        bad(path + ".repeats", "min exceeds max");
    }
    return block;
}

ComponentSignature parse_component(const json& v, const std::string& path) {
    if (!v.is_object()) bad(path, "expected object");
    ComponentSignature comp;

    const json& blocks = member(v, path, "blocks");
    if (!blocks.is_array() || blocks.empty()) {
        bad(path + ".blocks", "expected non-empty array");
    }
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        comp.blocks.push_back(
            parse_block(blocks[i], path + ".blocks[" + std::to_string(i) + "]"));
    }

    const json& edges = member(v, path, "edges");
    if (!edges.is_array()) bad(path + ".edges", "expected array");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string edge_path = path + ".edges[" + std::to_string(i) + "]";
        const json& e = edges[i];
        if (!e.is_object()) bad(edge_path, "expected object");
        EdgePattern edge;
        edge.src = nonneg_int(member(e, edge_path, "src"), edge_path + ".src");
        edge.dst = nonneg_int(member(e, edge_path, "dst"), edge_path + ".dst");
        edge.min_repeats =
            positive_int(member(e, edge_path, "min_repeats"), edge_path + ".min_repeats");
        comp.edges.push_back(edge);
    }

    comp.min_repeats =
        positive_int(member(v, path, "min_repeats"), path + ".min_repeats");
    validate_component(comp, path);
    return comp;
}

std::string metadata_text(const json& v, const std::string& path) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_object()) return v.dump();
    bad(path, "expected string or object");
}

json metadata_json(const std::string& text) {
    json parsed = json::parse(text, nullptr, false);
    if (!parsed.is_discarded() && parsed.is_object()) return parsed;
    return json(text);
}

}  // namespace

std::string OpPattern::text() const {
    switch (kind) {
        case Kind::AnyOne: return "?";
        case Kind::AnyMany: return "*";
        case Kind::Literal: return op;
        case Kind::Alternation: {
            std::string out = options.front();
            for (std::size_t i = 1; i < options.size(); ++i) out += "||" + options[i];
            return out;
        }
    }
    return op;
}

OpPattern parse_op_pattern(const std::string& text, const std::string& where) {
    OpPattern pattern;
    if (text == "?") {
        pattern.kind = OpPattern::Kind::AnyOne;
        return pattern;
    }
    if (text == "*") {
        pattern.kind = OpPattern::Kind::AnyMany;
        return pattern;
    }
    if (text.find("||") != std::string::npos) {
        pattern.kind = OpPattern::Kind::Alternation;
        std::size_t start = 0;
        for (;;) {
            std::size_t sep = text.find("||", start);
            std::string part = text.substr(start, sep == std::string::npos
                                                      ? std::string::npos
                                                      : sep - start);
            if (part.empty()) bad(where, "empty alternation option");
            if (part == "?" || part == "*") {
                bad(where, "wildcards are not allowed inside an alternation");
            }
            pattern.options.push_back(std::move(part));
            if (sep == std::string::npos) break;
            start = sep + 2;
        }
        if (pattern.options.size() < 2) bad(where, "alternation needs two options");
        return pattern;
    }
    if (text.empty()) bad(where, "empty op pattern");
    pattern.kind = OpPattern::Kind::Literal;
    pattern.op = text;
    return pattern;
}

void validate_component(ComponentSignature& comp, const std::string& where) {
    const std::size_t n = comp.blocks.size();

    std::sort(comp.blocks.begin(), comp.blocks.end(),
              [](const BlockPattern& a, const BlockPattern& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < n; ++i) {
        if (comp.blocks[i].id != i) {
            bad(where + ".blocks",
                "block ids must be exactly 0.." + std::to_string(n - 1));
        }
    }

    std::vector<std::uint32_t> in_degree(n, 0), out_degree(n, 0);
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen_edges;
    comp.out_edges.assign(n, {});
    for (std::size_t i = 0; i < comp.edges.size(); ++i) {
        const EdgePattern& e = comp.edges[i];
        const std::string edge_path = where + ".edges[" + std::to_string(i) + "]";
        if (e.src >= n) bad(edge_path + ".src", "references unknown block id");
        if (e.dst >= n) bad(edge_path + ".dst", "references unknown block id");
        if (e.src == e.dst) bad(edge_path, "self edge");
        if (!seen_edges.insert({e.src, e.dst}).second) {
            bad(edge_path, "duplicate edge");
        }
        ++out_degree[e.src];
        ++in_degree[e.dst];
        comp.out_edges[e.src].push_back(static_cast<std::uint32_t>(i));
    }

    // Weak connectivity over the undirected view.
    if (n > 1) {
        std::vector<std::vector<std::uint32_t>> undirected(n);
        for (const EdgePattern& e : comp.edges) {
            undirected[e.src].push_back(e.dst);
            undirected[e.dst].push_back(e.src);
        }
        std::vector<char> visited(n, 0);
        std::vector<std::uint32_t> stack{0};
        visited[0] = 1;
        while (!stack.empty()) {
            std::uint32_t at = stack.back();
            stack.pop_back();
            for (std::uint32_t next : undirected[at]) {
                if (!visited[next]) {
                    visited[next] = 1;
                    stack.push_back(next);
                }
            }
        }
        if (std::count(visited.begin(), visited.end(), 1) !=
            static_cast<std::ptrdiff_t>(n)) {
            bad(where, "block graph is not connected");
        }
    }

    std::uint32_t sources = 0, sinks = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (in_degree[i] == 0) {
            comp.start_id = static_cast<std::uint32_t>(i);
            ++sources;
        }
        if (out_degree[i] == 0) {
            comp.end_id = static_cast<std::uint32_t>(i);
            ++sinks;
        }
    }
    if (sources != 1) bad(where, "block graph must have exactly one source");
    if (sinks != 1) bad(where, "block graph must have exactly one sink");

    // Acyclicity (Kahn over the pattern edges).
    std::vector<std::uint32_t> pending = in_degree;
    std::vector<std::uint32_t> ready;
    for (std::size_t i = 0; i < n; ++i) {
        if (pending[i] == 0) ready.push_back(static_cast<std::uint32_t>(i));
    }
    std::size_t processed = 0;
    while (!ready.empty()) {
        std::uint32_t at = ready.back();
        ready.pop_back();
        ++processed;
        for (std::uint32_t ei : comp.out_edges[at]) {
            if (--pending[comp.edges[ei].dst] == 0) {
                ready.push_back(comp.edges[ei].dst);
            }
        }
    }
    if (processed != n) bad(where, "block graph contains a cycle");
}

std::vector<FamilySignature> parse_signatures(std::span<const std::uint8_t> payload) {
    json doc = json::parse(payload.begin(), payload.end(), nullptr, false);
    if (doc.is_discarded()) raise(ErrorKind::Validation, "$: not valid JSON");
    if (!doc.is_object()) bad("$", "expected object keyed by detection name");

    std::vector<FamilySignature> db;
    for (const auto& [name, value] : doc.items()) {
        FamilySignature family;
        family.name = name;
        if (!value.is_object()) bad(name, "expected object");
        if (auto it = value.find("components"); it != value.end()) {
            if (!it->is_array() || it->empty()) {
                bad(name + ".components", "expected non-empty array");
            }
            for (std::size_t i = 0; i < it->size(); ++i) {
                family.components.push_back(parse_component(
                    (*it)[i], name + ".components[" + std::to_string(i) + "]"));
            }
        } else {
            family.components.push_back(parse_component(value, name));
        }
        if (auto it = value.find("metadata"); it != value.end() && !it->is_null()) {
            family.metadata = metadata_text(*it, name + ".metadata");
        }
        db.push_back(std::move(family));
    }
    return db;
}

std::vector<FamilySignature> parse_signatures(const std::string& text) {
    return parse_signatures(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string serialize_signatures(const std::vector<FamilySignature>& db) {
    std::vector<const FamilySignature*> sorted;
    for (const FamilySignature& f : db) sorted.push_back(&f);
    std::sort(sorted.begin(), sorted.end(),
              [](const FamilySignature* a, const FamilySignature* b) {
                  return a->name < b->name;
              });

    auto component_json = [](const ComponentSignature& comp) {
        nlohmann::ordered_json out;
        out["blocks"] = nlohmann::ordered_json::array();
        for (const BlockPattern& b : comp.blocks) {
            nlohmann::ordered_json block;
            block["id"] = b.id;
            auto& ops = block["ops"] = nlohmann::ordered_json::array();
            for (const OpPattern& p : b.ops) ops.push_back(p.text());
            if (!b.ignored_ops.empty()) {
                block["ignored_ops"] = b.ignored_ops;
            }
            block["repeats"] = {b.repeats_min, b.repeats_max};
            out["blocks"].push_back(std::move(block));
        }
        out["edges"] = nlohmann::ordered_json::array();
        for (const EdgePattern& e : comp.edges) {
            out["edges"].push_back(
                {{"src", e.src}, {"dst", e.dst}, {"min_repeats", e.min_repeats}});
        }
        out["min_repeats"] = comp.min_repeats;
        return out;
    };

    nlohmann::ordered_json doc;
    for (const FamilySignature* family : sorted) {
        nlohmann::ordered_json entry;
        if (family->components.size() == 1) {
            entry = component_json(family->components.front());
        } else {
            entry["components"] = nlohmann::ordered_json::array();
            for (const ComponentSignature& c : family->components) {
                entry["components"].push_back(component_json(c));
            }
        }
        if (!family->metadata.empty()) {
            entry["metadata"] = metadata_json(family->metadata);
        }
        doc[family->name] = std::move(entry);
    }
    return doc.dump(2) + "\n";
}

std::vector<LintFinding> lint_signatures(const std::vector<FamilySignature>& db) {
    std::vector<LintFinding> findings;

    std::map<std::string, std::uint32_t> name_counts;
    for (const FamilySignature& f : db) ++name_counts[f.name];
    for (const auto& [name, count] : name_counts) {
        if (count > 1) {
            findings.push_back({LintKind::DuplicateFamilyName, name,
                                "family '" + name + "' declared " +
                                    std::to_string(count) + " times"});
        }
    }

    // Identical components across families make derivative detections
    // ambiguous: both families trigger on the same structure.
    for (std::size_t i = 0; i < db.size(); ++i) {
        for (std::size_t j = i + 1; j < db.size(); ++j) {
            if (db[i].name == db[j].name) continue;
            bool shared = false;
            for (const ComponentSignature& a : db[i].components) {
                for (const ComponentSignature& b : db[j].components) {
                    if (a == b) shared = true;
                }
            }
            if (shared) {
                findings.push_back(
                    {LintKind::AmbiguousComponents, db[i].name,
                     "families '" + db[i].name + "' and '" + db[j].name +
                         "' share an identical component"});
            }
        }
    }

    for (const FamilySignature& f : db) {
        for (std::size_t c = 0; c < f.components.size(); ++c) {
            const ComponentSignature& comp = f.components[c];
            for (const BlockPattern& block : comp.blocks) {
                bool all_any_many = std::all_of(
                    block.ops.begin(), block.ops.end(), [](const OpPattern& p) {
                        return p.kind == OpPattern::Kind::AnyMany;
                    });
                if (all_any_many) {
                    findings.push_back(
                        {LintKind::OverlyBroadBlock, f.name,
                         "family '" + f.name + "' component " + std::to_string(c) +
                             " block " + std::to_string(block.id) +
                             " matches any op sequence"});
                }
            }
            // Validation guarantees reachability for parsed signatures; this
            // covers databases assembled in code.
            std::vector<char> reachable(comp.blocks.size(), 0);
            std::vector<std::uint32_t> stack{comp.start_id};
            reachable[comp.start_id] = 1;
            while (!stack.empty()) {
                std::uint32_t at = stack.back();
                stack.pop_back();
                for (std::uint32_t ei : comp.out_edges[at]) {
                    std::uint32_t dst = comp.edges[ei].dst;
                    if (!reachable[dst]) {
                        reachable[dst] = 1;
                        stack.push_back(dst);
                    }
                }
            }
            for (std::size_t b = 0; b < reachable.size(); ++b) {
                if (!reachable[b]) {
                    findings.push_back(
                        {LintKind::UnreachableBlock, f.name,
                         "family '" + f.name + "' component " + std::to_string(c) +
                             " block " + std::to_string(b) +
                             " is unreachable from the start block"});
                }
            }
        }
    }
    return findings;
}

double specificity(const FamilySignature& sig) {
    double score = 0;
    for (const ComponentSignature& comp : sig.components) {
        for (const BlockPattern& block : comp.blocks) {
            for (const OpPattern& p : block.ops) {
                if (p.kind == OpPattern::Kind::Literal ||
                    p.kind == OpPattern::Kind::Alternation) {
                    score += 1;
                }
            }
        }
        score += static_cast<double>(comp.edges.size());
    }
    return score;
}

}  // namespace genescan
