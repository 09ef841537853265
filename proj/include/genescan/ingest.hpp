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
#include <span>
#include <string>
#include <vector>

#include "genescan/graph.hpp"

namespace genescan {

enum class ModelFormat {
    Onnx,
    JsonGraph,
};

struct ModelSource {
    ModelFormat format = ModelFormat::JsonGraph;
    std::vector<std::uint8_t> payload;
    std::string origin;  // path or URI, used in reports and error messages
};

using ByteView = std::span<const std::uint8_t>;

/// Decides the format from the origin's extension (.onnx / .json) or, failing
/// that, from the payload (leading '{' means JSON, otherwise the bytes must
/// decode as an ONNX model). Throws Error(Validation) when neither applies.
ModelFormat detect_format(ByteView payload, const std::string& origin);

/// Decodes the needed subset of a serialized ONNX ModelProto: node names,
/// op types and value names, graph inputs/outputs, initializer names, and the
/// default-domain opset version. Attributes and tensor payloads are skipped
/// without buffering; control-flow subgraphs are ignored with a warning.
/// Throws Error(Parse) with a byte offset on malformed input.
ParsedModel read_onnx(ByteView payload);

/// Reads the JSON graph interchange format:
///   {"nodes":[{"name":str,"op":str,"inputs":[str],"outputs":[str]}],
///    "inputs":[str],"outputs":[str],"initializers":[str],"opset":int?}
/// Throws Error(Validation) naming the JSON path of the first violation.
ParsedModel read_json_graph(ByteView payload);

/// Reads a model source into an agnostic graph. Reader or construction errors
/// are re-raised tagged with the source origin; reader warnings, if any, are
/// appended to `warnings`.
AgnosticGraph load_model(const ModelSource& source,
                         std::vector<std::string>* warnings = nullptr);

ModelSource load_file(const std::string& path);

/// Serializes a graph to the interchange format. Synthetic Input/Output/
/// Initializer nodes become the corresponding declarations; re-ingesting the
/// result yields an isomorphic graph (same names, op types, adjacency).
std::string export_json_graph(const AgnosticGraph& graph);

}  // namespace genescan
