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

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "genescan/blocking.hpp"
#include "genescan/graph.hpp"
#include "genescan/ingest.hpp"

namespace genescan::test {

inline std::string source_path(const std::string& relative) {
    return std::string(GENESCAN_SOURCE_DIR) + "/" + relative;
}

inline RawOperation op(std::string name, std::string type,
                       std::vector<std::string> inputs,
                       std::vector<std::string> outputs) {
    return RawOperation{std::move(name), std::move(type), std::move(inputs),
                        std::move(outputs)};
}

inline ParsedModel model_of(std::vector<RawOperation> ops,
                            std::vector<std::string> inputs = {},
                            std::vector<std::string> outputs = {},
                            std::set<std::string> initializers = {}) {
    ParsedModel m;
    m.operations = std::move(ops);
    m.input_names = std::move(inputs);
    m.output_names = std::move(outputs);
    m.initializer_names = std::move(initializers);
    return m;
}

/// The nine-node diamond: 1->2->3, 3->{4,5}, 4->6, 5->7, {6,7}->8, 8->9.
/// Node k gets id k-1.
inline AgnosticGraph diamond_graph() {
    std::vector<RawOperation> ops;
    auto chain = [&](const char* name, const char* type,
                     std::vector<std::string> ins, const char* out) {
        ops.push_back(op(name, type, std::move(ins), {out}));
    };
    chain("n1", "A", {}, "t1");
    chain("n2", "B", {"t1"}, "t2");
    chain("n3", "C", {"t2"}, "t3");
    chain("n4", "D", {"t3"}, "t4");
    chain("n5", "E", {"t3"}, "t5");
    chain("n6", "F", {"t4"}, "t6");
    chain("n7", "G", {"t5"}, "t7");
    ops.push_back(op("n8", "H", {"t6", "t7"}, {"t8"}));
    chain("n9", "I", {"t8"}, "t9");
    return construct_agnostic_graph(model_of(std::move(ops)));
}

/// Name-keyed shape for isomorphism checks: name -> (op, producers, consumers).
using GraphShape =
    std::map<std::string, std::tuple<std::string, std::set<std::string>,
                                     std::set<std::string>>>;

inline GraphShape shape_of(const AgnosticGraph& g) {
    GraphShape shape;
    for (const Node& n : g.nodes) {
        std::set<std::string> ins, outs;
        for (NodeId i : n.inputs) ins.insert(g.nodes[i].name);
        for (NodeId o : n.outputs) outs.insert(g.nodes[o].name);
        shape[n.name] = {n.operation_type, std::move(ins), std::move(outs)};
    }
    return shape;
}

/// Assembles a block graph directly for matcher tests. Node ids are faked
/// but unique, which is all the matcher looks at.
inline BlockGraph make_block_graph(
    std::vector<std::vector<std::string>> block_ops,
    std::vector<std::tuple<BlockId, BlockId, std::uint32_t>> edges = {}) {
    BlockGraph bg;
    NodeId next = 0;
    for (std::size_t i = 0; i < block_ops.size(); ++i) {
        Block b;
        b.id = static_cast<BlockId>(i);
        b.op_types = std::move(block_ops[i]);
        for (std::size_t k = 0; k < b.op_types.size(); ++k) {
            b.node_ids.push_back(next++);
        }
        bg.blocks.push_back(std::move(b));
    }
    for (auto [src, dst, count] : edges) {
        bg.edges.push_back(BlockEdge{src, dst, count});
    }
    bg.reindex();
    return bg;
}

inline std::vector<std::set<NodeId>> block_node_sets(const BlockGraph& bg) {
    std::vector<std::set<NodeId>> sets;
    for (const Block& b : bg.blocks) {
        sets.emplace_back(b.node_ids.begin(), b.node_ids.end());
    }
    return sets;
}

}  // namespace genescan::test
