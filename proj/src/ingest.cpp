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

#include "genescan/ingest.hpp"

#include <fstream>

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

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) bad(path, "expected string");
    return v.get<std::string>();
}

std::vector<std::string> string_array(const json& v, const std::string& path) {
    if (!v.is_array()) bad(path, "expected array of strings");
    std::vector<std::string> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(as_string(v[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

ParsedModel read_json_graph(ByteView payload) {
    json doc = json::parse(payload.begin(), payload.end(), nullptr, false);
    if (doc.is_discarded()) {
        raise(ErrorKind::Validation, "$: not valid JSON");
    }
    if (!doc.is_object()) bad("$", "expected object");

    ParsedModel model;
    const json& nodes = member(doc, "$", "nodes");
    if (!nodes.is_array()) bad("$.nodes", "expected array");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string path = "nodes[" + std::to_string(i) + "]";
        const json& n = nodes[i];
        if (!n.is_object()) bad(path, "expected object");
        RawOperation op;
        op.name = as_string(member(n, path, "name"), path + ".name");
        op.operation_type = as_string(member(n, path, "op"), path + ".op");
        op.input_names = string_array(member(n, path, "inputs"), path + ".inputs");
        op.output_names = string_array(member(n, path, "outputs"), path + ".outputs");
        model.operations.push_back(std::move(op));
    }
    model.input_names = string_array(member(doc, "$", "inputs"), "inputs");
    model.output_names = string_array(member(doc, "$", "outputs"), "outputs");
    for (std::string& name :
         string_array(member(doc, "$", "initializers"), "initializers")) {
        model.initializer_names.insert(std::move(name));
    }
    if (auto it = doc.find("opset"); it != doc.end() && !it->is_null()) {
        if (!it->is_number_integer()) bad("opset", "expected integer");
        model.opset_version = it->get<std::int64_t>();
    }
    return model;
}

ModelFormat detect_format(ByteView payload, const std::string& origin) {
    if (ends_with(origin, ".onnx")) return ModelFormat::Onnx;
    if (ends_with(origin, ".json")) return ModelFormat::JsonGraph;
    for (std::uint8_t b : payload) {
        if (b == ' ' || b == '\t' || b == '\n' || b == '\r') continue;
        if (b == '{') return ModelFormat::JsonGraph;
        break;
    }
    try {
        read_onnx(payload);
        return ModelFormat::Onnx;
    } catch (const Error& e) {
        raise(ErrorKind::Validation,
              std::string("unrecognized model format (not JSON; ONNX decode said: ") +
                  e.what() + ")");
    }
}

AgnosticGraph load_model(const ModelSource& source,
                         std::vector<std::string>* warnings) {
    try {
        ParsedModel parsed = source.format == ModelFormat::Onnx
                                 ? read_onnx(source.payload)
                                 : read_json_graph(source.payload);
        if (warnings) {
            warnings->insert(warnings->end(), parsed.warnings.begin(),
                             parsed.warnings.end());
        }
        return construct_agnostic_graph(parsed);
    } catch (const Error& e) {
        throw Error(e.kind(), source.origin + ": " + e.what());
    }
}

ModelSource load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(ErrorKind::Io, "cannot open '" + path + "'");
    }
    ModelSource source;
    source.origin = path;
    source.payload.assign(std::istreambuf_iterator<char>(in),
                          std::istreambuf_iterator<char>());
    if (in.bad()) {
        raise(ErrorKind::Io, "read error on '" + path + "'");
    }
    source.format = detect_format(source.payload, path);
    return source;
}

std::string export_json_graph(const AgnosticGraph& graph) {
    nlohmann::ordered_json doc;
    auto& nodes = doc["nodes"] = nlohmann::ordered_json::array();

    // A produced value is named after its node, except that values consumed
    // by graph outputs keep the output node's name so re-ingestion restores
    // the same boundary names.
    auto value_names = [&](const Node& n) {
        std::vector<std::string> names;
        for (NodeId out : n.outputs) {
            if (graph.nodes[out].origin == NodeOrigin::GraphOutput) {
                names.push_back(graph.nodes[out].name);
            }
        }
        if (names.empty()) names.push_back(n.name);
        return names;
    };
    auto primary_name = [&](const Node& n) {
        if (n.origin == NodeOrigin::GraphInput ||
            n.origin == NodeOrigin::Initializer) {
            return n.name;
        }
        return value_names(n).front();
    };

    for (const Node& n : graph.nodes) {
        if (n.origin != NodeOrigin::Operation && n.origin != NodeOrigin::Fused) {
            continue;
        }
        std::vector<std::string> inputs;
        for (NodeId in : n.inputs) inputs.push_back(primary_name(graph.nodes[in]));
        nodes.push_back({{"name", n.name},
                         {"op", n.operation_type},
                         {"inputs", inputs},
                         {"outputs", value_names(n)}});
    }
    auto names_of = [&](const std::vector<NodeId>& ids) {
        std::vector<std::string> out;
        for (NodeId id : ids) out.push_back(graph.nodes[id].name);
        return out;
    };
    doc["inputs"] = names_of(graph.graph_inputs);
    doc["outputs"] = names_of(graph.graph_outputs);
    std::vector<std::string> initializers;
    for (const Node& n : graph.nodes) {
        if (n.origin == NodeOrigin::Initializer) initializers.push_back(n.name);
    }
    doc["initializers"] = initializers;
    return doc.dump(2) + "\n";
}

}  // namespace genescan
