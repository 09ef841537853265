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

#include "genescan/graph.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "genescan/error.hpp"

namespace genescan {

namespace {

// Appends a deduplicated edge and keeps both adjacency lists in sync.
class EdgeSink {
public:
    explicit EdgeSink(std::vector<Node>& nodes) : nodes_(nodes) {}

    void add(NodeId src, NodeId dst, std::vector<Edge>& edges) {
        if (src == dst) {
            raise(ErrorKind::Graph,
                  "self-loop on node '" + nodes_[src].name + "'");
        }
        if (!seen_.insert((std::uint64_t{src} << 32) | dst).second) return;
        edges.push_back(Edge{src, dst});
        nodes_[src].outputs.push_back(dst);
        nodes_[dst].inputs.push_back(src);
    }

private:
    std::vector<Node>& nodes_;
    std::unordered_set<std::uint64_t> seen_;
};

// Kahn's algorithm; on a cycle, walks back through unprocessed nodes to
// report one concrete loop.
void reject_cycles(const std::vector<Node>& nodes) {
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
    if (processed == nodes.size()) return;

    // Every remaining node sits on or behind a cycle; follow unprocessed
    // predecessors until one repeats.
    NodeId cur = 0;
    for (const Node& n : nodes) {
        if (pending[n.id] > 0) {
            cur = n.id;
            break;
        }
    }
    std::vector<NodeId> trail;
    std::unordered_map<NodeId, std::size_t> at;
    while (!at.count(cur)) {
        at[cur] = trail.size();
        trail.push_back(cur);
        for (NodeId in : nodes[cur].inputs) {
            if (pending[in] > 0) {
                cur = in;
                break;
            }
        }
    }
    std::string msg = "cycle detected:";
    for (std::size_t i = trail.size(); i-- > at[cur];) {
        msg += " '" + nodes[trail[i]].name + "' ->";
    }
    msg += " '" + nodes[cur].name + "'";
    raise(ErrorKind::Graph, msg);
}

}  // namespace

const ConstantOps& default_constant_ops() {
    static const ConstantOps ops{"Constant", "Initializer"};
    return ops;
}

const Node& AgnosticGraph::node(NodeId id) const {
    if (id >= nodes.size()) {
        raise(ErrorKind::Lookup, "unknown node id " + std::to_string(id));
    }
    return nodes[id];
}

AgnosticGraph construct_agnostic_graph(const ParsedModel& model,
                                       const ConstructOptions& options) {
    AgnosticGraph graph;
    graph.nodes.reserve(model.operations.size() + model.input_names.size() +
                        model.output_names.size());

    std::unordered_set<std::string> node_names;
    auto unique_name = [&](std::string base, const char* suffix) {
        while (!node_names.insert(base).second) base += suffix;
        return base;
    };
    auto add_node = [&](std::string name, std::string op, NodeOrigin origin) {
        NodeId id = static_cast<NodeId>(graph.nodes.size());
        graph.nodes.push_back(Node{id, std::move(name), std::move(op), {}, {}, origin});
        return id;
    };

    // Pass one: one node per operation, plus the producer map.
    std::unordered_map<std::string, NodeId> producer;
    for (const RawOperation& op : model.operations) {
        if (!node_names.insert(op.name).second) {
            raise(ErrorKind::Graph,
                  "duplicate operation name '" + op.name + "'");
        }
        NodeId id = add_node(op.name, op.operation_type, NodeOrigin::Operation);
        for (const std::string& out : op.output_names) {
            if (model.initializer_names.count(out)) {
                raise(ErrorKind::Graph, "operation '" + op.name +
                                            "' produces initializer name '" +
                                            out + "'");
            }
            if (!producer.emplace(out, id).second) {
                raise(ErrorKind::Graph,
                      "value '" + out + "' produced more than once");
            }
        }
    }

    for (const std::string& in : model.input_names) {
        if (model.initializer_names.count(in)) {
            raise(ErrorKind::Graph,
                  "name '" + in + "' declared both graph input and initializer");
        }
        NodeId id = add_node(unique_name(in, "~in"), "Input", NodeOrigin::GraphInput);
        graph.graph_inputs.push_back(id);
        if (!producer.emplace(in, id).second) {
            raise(ErrorKind::Graph,
                  "graph input '" + in + "' shadows a produced value");
        }
    }

    // Pass two: resolve consumer names to producers. Unknown names become
    // Initializer nodes (declared ones always; undeclared only in lenient mode).
    EdgeSink sink(graph.nodes);
    auto resolve = [&](const std::string& name, const std::string& consumer) {
        auto it = producer.find(name);
        if (it != producer.end()) return it->second;
        if (options.strict && !model.initializer_names.count(name)) {
            raise(ErrorKind::Graph, "dangling input '" + name +
                                        "' consumed by " + consumer);
        }
        NodeId id = add_node(unique_name(name, "~init"), "Initializer",
                             NodeOrigin::Initializer);
        producer.emplace(name, id);
        return id;
    };

    const std::size_t op_count = model.operations.size();
    for (std::size_t i = 0; i < op_count; ++i) {
        for (const std::string& in : model.operations[i].input_names) {
            sink.add(resolve(in, model.operations[i].name),
                     static_cast<NodeId>(i), graph.edges);
        }
    }
    for (const std::string& out : model.output_names) {
        NodeId src = resolve(out, "graph output");
        NodeId id = add_node(unique_name(out, "~out"), "Output", NodeOrigin::GraphOutput);
        graph.graph_outputs.push_back(id);
        sink.add(src, id, graph.edges);
    }

    reject_cycles(graph.nodes);
    return graph;
}

const std::vector<NodeId>& predecessors(const AgnosticGraph& graph, NodeId id) {
    return graph.node(id).inputs;
}

const std::vector<NodeId>& successors(const AgnosticGraph& graph, NodeId id) {
    return graph.node(id).outputs;
}

bool is_constant(const Node& node, const ConstantOps& constant_ops) {
    return constant_ops.count(node.operation_type) > 0;
}

}  // namespace genescan
