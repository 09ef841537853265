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
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "genescan/graph.hpp"

namespace genescan {

using BlockId = std::uint32_t;

/// A maximal run of nodes with linear execution flow: no internal convergence
/// (>= 2 non-constant inputs) and no internal divergence (>= 2 outputs).
struct Block {
    BlockId id = 0;
    std::vector<NodeId> node_ids;       // execution order
    std::vector<std::string> op_types;  // cached from the nodes

    NodeId first() const { return node_ids.front(); }
    NodeId last() const { return node_ids.back(); }
};

/// Connection between two blocks: a graph edge from src's last node to dst's
/// first node. `count` is the number of underlying graph edges between those
/// boundary nodes; the matcher weighs width-wise edge repeats by it.
struct BlockEdge {
    BlockId src = 0;
    BlockId dst = 0;
    std::uint32_t count = 1;
};

struct BlockGraph {
    std::vector<Block> blocks;
    std::vector<BlockEdge> edges;
    std::unordered_map<NodeId, BlockId> node_to_block;
    std::vector<NodeId> isolated_nodes;  // no inputs and no outputs; in no block

    /// Indices into `edges`, grouped by source block.
    std::vector<std::vector<std::uint32_t>> out_edges;

    /// Recomputes node_to_block and out_edges from blocks/edges. Used by
    /// extraction and by tests that assemble block graphs directly.
    void reindex();
};

/// Count of the node's input nodes whose operation type is not constant.
std::uint32_t number_of_inputs(const Node& node, const AgnosticGraph& graph,
                               const ConstantOps& constant_ops);

/// Order-sensitive dedup over node-id sequences. Empty blocks are always
/// "seen"; the first sighting of a sequence records it and reports false.
using SeenBlocks = std::unordered_set<std::string>;
bool contains_block(SeenBlocks& seen, const Block& block);

/// Partitions the graph into maximal linear blocks and derives block edges.
/// Constant nodes are ignored entirely; isolated nodes are recorded but form
/// no block. Blocks are emitted in ascending order of their first node id,
/// so ids are a pure function of the graph.
BlockGraph extract_blocks(const AgnosticGraph& graph,
                          const ConstantOps& constant_ops = default_constant_ops());

/// Block decomposition as a JSON document (for the `blocks` CLI command).
std::string block_graph_to_json(const BlockGraph& bg);

/// Graphviz DOT rendering; one record node per block, edges labeled with
/// their multiplicity. `fill` optionally maps block ids to fill colors.
std::string block_graph_to_dot(const BlockGraph& bg,
                               const std::unordered_map<BlockId, std::string>& fill = {});

}  // namespace genescan
