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

#include "genescan/blocking.hpp"

#include <map>

#include <nlohmann/json.hpp>

#include "genescan/error.hpp"

namespace genescan {

void BlockGraph::reindex() {
    node_to_block.clear();
    for (const Block& b : blocks) {
        for (NodeId n : b.node_ids) node_to_block[n] = b.id;
    }
    out_edges.assign(blocks.size(), {});
    for (std::uint32_t i = 0; i < edges.size(); ++i) {
        out_edges[edges[i].src].push_back(i);
    }
}

std::uint32_t number_of_inputs(const Node& node, const AgnosticGraph& graph,
                               const ConstantOps& constant_ops) {
    std::uint32_t n = 0;
    for (NodeId in : node.inputs) {
        if (!is_constant(graph.node(in), constant_ops)) ++n;
    }
    return n;
}

bool contains_block(SeenBlocks& seen, const Block& block) {
    if (block.node_ids.empty()) return true;
    std::string key;
    key.reserve(block.node_ids.size() * sizeof(NodeId));
    for (NodeId n : block.node_ids) {
        key.append(reinterpret_cast<const char*>(&n), sizeof(NodeId));
    }
    return !seen.insert(std::move(key)).second;
}

BlockGraph extract_blocks(const AgnosticGraph& graph,
                          const ConstantOps& constant_ops) {
    const std::size_t n = graph.nodes.size();
    BlockGraph bg;

    std::vector<char> constant(n, 0);
    std::vector<char> skip(n, 0);  // constant or isolated
    std::vector<std::uint32_t> nc_inputs(n, 0);
    std::vector<std::uint32_t> nc_outputs(n, 0);
    // The unique non-constant predecessor, meaningful when nc_inputs == 1.
    std::vector<NodeId> sole_pred(n, 0);

    for (const Node& node : graph.nodes) {
        constant[node.id] = is_constant(node, constant_ops) ? 1 : 0;
    }
    for (const Node& node : graph.nodes) {
        if (constant[node.id]) {
            skip[node.id] = 1;
            continue;
        }
        if (node.inputs.empty() && node.outputs.empty()) {
            skip[node.id] = 1;
            bg.isolated_nodes.push_back(node.id);
            continue;
        }
        for (NodeId in : node.inputs) {
            if (!constant[in]) {
                sole_pred[node.id] = in;
                ++nc_inputs[node.id];
            }
        }
        for (NodeId out : node.outputs) {
            if (!constant[out]) ++nc_outputs[node.id];
        }
    }

    // A node leads a block when the flow breaks in front of it: it starts a
    // branch (0 non-constant inputs), receives a converging flow (>= 2), or
    // follows a diverging node.
    auto leads = [&](NodeId id) {
        if (nc_inputs[id] != 1) return true;
        return nc_outputs[sole_pred[id]] >= 2;
    };

    auto sole_successor = [&](NodeId id) -> NodeId {
        for (NodeId out : graph.nodes[id].outputs) {
            if (!constant[out]) return out;
        }
        raise(ErrorKind::Internal, "no non-constant successor");
    };

    SeenBlocks seen;
    for (NodeId id = 0; id < n; ++id) {
        if (skip[id] || !leads(id)) continue;
        Block block;
        block.id = static_cast<BlockId>(bg.blocks.size());
        NodeId cur = id;
        for (;;) {
            block.node_ids.push_back(cur);
            block.op_types.push_back(graph.nodes[cur].operation_type);
            if (nc_outputs[cur] != 1) break;
            NodeId next = sole_successor(cur);
            if (leads(next)) break;
            cur = next;
        }
        if (!contains_block(seen, block)) bg.blocks.push_back(std::move(block));
    }

    // Block edges join a block's last node to another block's first node;
    // chain construction guarantees no other inter-block edges exist.
    std::map<std::pair<BlockId, BlockId>, std::uint32_t> counts;
    bg.reindex();
    for (const Block& block : bg.blocks) {
        for (NodeId out : graph.nodes[block.last()].outputs) {
            if (constant[out]) continue;
            BlockId dst = bg.node_to_block.at(out);
            if (bg.blocks[dst].first() != out) {
                raise(ErrorKind::Internal, "edge into the middle of a block");
            }
            ++counts[{block.id, dst}];
        }
    }
    for (const auto& [key, count] : counts) {
        bg.edges.push_back(BlockEdge{key.first, key.second, count});
    }
    bg.reindex();
    return bg;
}

std::string block_graph_to_json(const BlockGraph& bg) {
    nlohmann::ordered_json doc;
    doc["blocks"] = nlohmann::ordered_json::array();
    for (const Block& b : bg.blocks) {
        doc["blocks"].push_back({{"id", b.id}, {"nodes", b.node_ids}, {"ops", b.op_types}});
    }
    doc["edges"] = nlohmann::ordered_json::array();
    for (const BlockEdge& e : bg.edges) {
        doc["edges"].push_back({{"src", e.src}, {"dst", e.dst}, {"count", e.count}});
    }
    doc["isolated"] = bg.isolated_nodes;
    return doc.dump(2) + "\n";
}

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\' || c == '{' || c == '}' || c == '|' ||
            c == '<' || c == '>') {
            out += '\\';
        }
        out += c;
    }
    return out;
}

}  // namespace

std::string block_graph_to_dot(const BlockGraph& bg,
                               const std::unordered_map<BlockId, std::string>& fill) {
    std::string dot = "digraph blocks {\n  rankdir=TB;\n  node [shape=record];\n";
    for (const Block& b : bg.blocks) {
        dot += "  b" + std::to_string(b.id) + " [label=\"{block " +
               std::to_string(b.id) + "|";
        for (const std::string& op : b.op_types) {
            dot += dot_escape(op) + "\\l";
        }
        dot += "}\"";
        auto it = fill.find(b.id);
        if (it != fill.end()) {
            dot += ", style=filled, fillcolor=\"" + it->second + "\"";
        }
        dot += "];\n";
    }
    for (const BlockEdge& e : bg.edges) {
        dot += "  b" + std::to_string(e.src) + " -> b" + std::to_string(e.dst) +
               " [label=\"x" + std::to_string(e.count) + "\"];\n";
    }
    dot += "}\n";
    return dot;
}

}  // namespace genescan
