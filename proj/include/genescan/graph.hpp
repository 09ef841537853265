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
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace genescan {

/// Dense node index, 0..N-1 within one graph, assigned in presentation order.
using NodeId = std::uint32_t;

/// Where a node came from. Real operations are read from the model file;
/// the rest are synthesized so signatures can reference graph boundaries.
enum class NodeOrigin : std::uint8_t {
    Operation,
    GraphInput,
    GraphOutput,
    Initializer,
    Fused,  // produced by a rewrite rule
};

struct Node {
    NodeId id = 0;
    std::string name;            // unique within a graph (SSA)
    std::string operation_type;  // e.g. "Conv", "MatMul", "Input"
    std::vector<NodeId> inputs;  // producer nodes, deduplicated, stored order
    std::vector<NodeId> outputs; // consumer nodes, deduplicated, stored order
    NodeOrigin origin = NodeOrigin::Operation;
};

struct Edge {
    NodeId source = 0;
    NodeId destination = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// One operation as presented by a reader: names only, no tensors or attributes.
struct RawOperation {
    std::string name;
    std::string operation_type;
    std::vector<std::string> input_names;   // value names consumed
    std::vector<std::string> output_names;  // value names produced (SSA-unique)
};

/// Reader output: the operation list plus the graph-boundary declarations.
struct ParsedModel {
    std::vector<RawOperation> operations;
    std::vector<std::string> input_names;
    std::vector<std::string> output_names;
    std::set<std::string> initializer_names;
    std::optional<std::int64_t> opset_version;
    std::vector<std::string> warnings;  // e.g. ignored control-flow subgraphs
};

/// Format-independent computational graph. Immutable once constructed;
/// concurrent read access is safe.
struct AgnosticGraph {
    std::vector<Node> nodes;  // index == NodeId
    std::vector<Edge> edges;  // deduplicated, creation order
    std::vector<NodeId> graph_inputs;
    std::vector<NodeId> graph_outputs;

    const Node& node(NodeId id) const;
    bool has_node(NodeId id) const { return id < nodes.size(); }
    std::size_t size() const { return nodes.size(); }
};

struct ConstructOptions {
    /// Strict mode errors on input names with no producer and no declaration.
    /// Lenient mode (default) synthesizes an "Initializer" node per such name.
    bool strict = false;
};

/// Operation types treated as constants: excluded from blocks and from
/// non-constant input counts.
using ConstantOps = std::set<std::string>;

/// {"Constant", "Initializer"} — the built-in constant op plus the type used
/// for synthesized constant-source nodes.
const ConstantOps& default_constant_ops();

/// Builds the agnostic graph from a parsed model. Two passes: first a
/// producer map (output value name -> node), then edge resolution, so node
/// wiring works on value names the way real serializations store them.
/// Synthesizes one node per graph input ("Input"), per graph output
/// ("Output"), and per referenced initializer ("Initializer").
///
/// Throws Error(Graph) on duplicate operation names, duplicate output value
/// names, dangling inputs in strict mode, or cycles (one cycle is listed).
AgnosticGraph construct_agnostic_graph(const ParsedModel& model,
                                       const ConstructOptions& options = {});

/// The node's producer ids in stored order. Throws Error(Lookup) on unknown id.
const std::vector<NodeId>& predecessors(const AgnosticGraph& graph, NodeId id);

/// The node's consumer ids in stored order. Throws Error(Lookup) on unknown id.
const std::vector<NodeId>& successors(const AgnosticGraph& graph, NodeId id);

bool is_constant(const Node& node, const ConstantOps& constant_ops);

}  // namespace genescan
