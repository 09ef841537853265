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

// Hand-rolled decoder for the subset of the ONNX ModelProto wire format the
// engine needs: graph topology names, boundary declarations, and the opset.
// Tensor payloads and attributes are skipped in place, never buffered.

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_set>

#include "genescan/error.hpp"
#include "genescan/ingest.hpp"

namespace genescan {

namespace {

constexpr std::uint32_t kVarint = 0;
constexpr std::uint32_t kFixed64 = 1;
constexpr std::uint32_t kLengthDelimited = 2;
constexpr std::uint32_t kFixed32 = 5;

[[noreturn]] void fail(std::size_t offset, const std::string& what) {
    raise(ErrorKind::Parse,
          what + " at offset " + std::to_string(offset));
}

class Cursor {
public:
    Cursor(ByteView buf, std::size_t begin, std::size_t end)
        : buf_(buf), pos_(begin), end_(end) {}

    bool done() const { return pos_ >= end_; }
    std::size_t pos() const { return pos_; }

    std::uint64_t varint() {
        std::uint64_t value = 0;
        for (int shift = 0; shift < 64; shift += 7) {
            if (pos_ >= end_) fail(pos_, "truncated varint");
            std::uint8_t byte = buf_[pos_++];
            value |= std::uint64_t{byte & 0x7Fu} << shift;
            if ((byte & 0x80u) == 0) return value;
        }
        fail(pos_, "varint longer than ten bytes");
    }

    // Returns the absolute [begin, end) range of a length-delimited field.
    std::pair<std::size_t, std::size_t> bytes() {
        std::size_t at = pos_;
        std::uint64_t len = varint();
        if (len > end_ - pos_) fail(at, "length-delimited field overruns buffer");
        std::size_t begin = pos_;
        pos_ += static_cast<std::size_t>(len);
        return {begin, pos_};
    }

    std::string str() {
        auto [begin, end] = bytes();
        return std::string(reinterpret_cast<const char*>(buf_.data()) + begin,
                           end - begin);
    }

    void skip(std::uint32_t wire_type) {
        switch (wire_type) {
            case kVarint: varint(); break;
            case kFixed64:
                if (end_ - pos_ < 8) fail(pos_, "truncated fixed64");
                pos_ += 8;
                break;
            case kLengthDelimited: bytes(); break;
            case kFixed32:
                if (end_ - pos_ < 4) fail(pos_, "truncated fixed32");
                pos_ += 4;
                break;
            default: fail(pos_, "unsupported wire type " + std::to_string(wire_type));
        }
    }

    // Walks every field of a message, handing each to `on_field`. A handler
    // returning false leaves the field to be skipped here.
    void fields(const std::function<bool(std::uint32_t, std::uint32_t)>& on_field) {
        while (!done()) {
            std::size_t at = pos_;
            std::uint64_t tag = varint();
            auto field = static_cast<std::uint32_t>(tag >> 3);
            auto wire = static_cast<std::uint32_t>(tag & 7);
            if (field == 0) fail(at, "invalid field number 0");
            if (!on_field(field, wire)) skip(wire);
        }
    }

private:
    ByteView buf_;
    std::size_t pos_;
    std::size_t end_;
};

void expect_wire(std::uint32_t got, std::uint32_t want, std::size_t offset,
                 const char* field) {
    if (got != want) {
        fail(offset, std::string("unexpected wire type for ") + field);
    }
}

struct OnnxDecoder {
    ByteView buf;
    ParsedModel model;
    bool saw_graph = false;
    bool saw_subgraph = false;
    std::unordered_set<std::string> used_names;

    // ValueInfoProto: name = 1
    std::string value_info_name(std::size_t begin, std::size_t end) {
        std::string name;
        Cursor c(buf, begin, end);
        c.fields([&](std::uint32_t field, std::uint32_t wire) {
            if (field == 1 && wire == kLengthDelimited) {
                name = c.str();
                return true;
            }
            return false;
        });
        return name;
    }

    // TensorProto: name = 8; data fields are skipped unread.
    std::string tensor_name(std::size_t begin, std::size_t end) {
        std::string name;
        Cursor c(buf, begin, end);
        c.fields([&](std::uint32_t field, std::uint32_t wire) {
            if (field == 8 && wire == kLengthDelimited) {
                name = c.str();
                return true;
            }
            return false;
        });
        return name;
    }

    // AttributeProto: g = 6, graphs = 11 mark control-flow subgraphs.
    void scan_attribute(std::size_t begin, std::size_t end) {
        Cursor c(buf, begin, end);
        c.fields([&](std::uint32_t field, std::uint32_t wire) {
            if ((field == 6 || field == 11) && wire == kLengthDelimited) {
                saw_subgraph = true;
            }
            return false;
        });
    }

    // NodeProto: input = 1, output = 2, name = 3, op_type = 4, attribute = 5
    void parse_node(std::size_t begin, std::size_t end, std::size_t index) {
        RawOperation op;
        Cursor c(buf, begin, end);
        c.fields([&](std::uint32_t field, std::uint32_t wire) {
            switch (field) {
                case 1:
                    expect_wire(wire, kLengthDelimited, c.pos(), "node input");
                    op.input_names.push_back(c.str());
                    return true;
                case 2:
                    expect_wire(wire, kLengthDelimited, c.pos(), "node output");
                    op.output_names.push_back(c.str());
                    return true;
                case 3:
                    expect_wire(wire, kLengthDelimited, c.pos(), "node name");
                    op.name = c.str();
                    return true;
                case 4:
                    expect_wire(wire, kLengthDelimited, c.pos(), "node op_type");
                    op.operation_type = c.str();
                    return true;
                case 5: {
                    expect_wire(wire, kLengthDelimited, c.pos(), "node attribute");
                    auto [b, e] = c.bytes();
                    scan_attribute(b, e);
                    return true;
                }
                default:
                    return false;
            }
        });
        if (op.name.empty()) {
            // Anonymous nodes are legal in ONNX; give them a stable name.
            op.name = op.operation_type + "_" + std::to_string(index);
        }
        while (!used_names.insert(op.name).second) op.name += "~";
        model.operations.push_back(std::move(op));
    }

    // GraphProto: node = 1, initializer = 5, input = 11, output = 12,
    // sparse_initializer = 15 (skipped).
    void parse_graph(std::size_t begin, std::size_t end) {
        if (saw_graph) {
            // Repeated singular message fields merge in protobuf; for a whole
            // graph the practical reading is last-one-wins.
            model.operations.clear();
            model.input_names.clear();
            model.output_names.clear();
            model.initializer_names.clear();
            used_names.clear();
        }
        saw_graph = true;
        Cursor c(buf, begin, end);
        c.fields([&](std::uint32_t field, std::uint32_t wire) {
            switch (field) {
                case 1: {
                    expect_wire(wire, kLengthDelimited, c.pos(), "graph node");
                    auto [b, e] = c.bytes();
                    parse_node(b, e, model.operations.size());
                    return true;
                }
                case 5: {
                    expect_wire(wire, kLengthDelimited, c.pos(), "initializer");
                    auto [b, e] = c.bytes();
                    std::string name = tensor_name(b, e);
                    if (!name.empty()) model.initializer_names.insert(name);
                    return true;
                }
                case 11: {
                    expect_wire(wire, kLengthDelimited, c.pos(), "graph input");
                    auto [b, e] = c.bytes();
                    model.input_names.push_back(value_info_name(b, e));
                    return true;
                }
                case 12: {
                    expect_wire(wire, kLengthDelimited, c.pos(), "graph output");
                    auto [b, e] = c.bytes();
                    model.output_names.push_back(value_info_name(b, e));
                    return true;
                }
                default:
                    return false;
            }
        });
    }

    // OperatorSetIdProto: domain = 1, version = 2
    void parse_opset(std::size_t begin, std::size_t end) {
        std::string domain;
        std::optional<std::int64_t> version;
        Cursor c(buf, begin, end);
        c.fields([&](std::uint32_t field, std::uint32_t wire) {
            if (field == 1 && wire == kLengthDelimited) {
                domain = c.str();
                return true;
            }
            if (field == 2 && wire == kVarint) {
                version = static_cast<std::int64_t>(c.varint());
                return true;
            }
            return false;
        });
        if (version && (domain.empty() || domain == "ai.onnx")) {
            model.opset_version = version;
        }
    }

    // ModelProto: graph = 7, opset_import = 8
    ParsedModel run() {
        if (buf.empty()) fail(0, "empty payload");
        Cursor c(buf, 0, buf.size());
        c.fields([&](std::uint32_t field, std::uint32_t wire) {
            if (field == 7) {
                expect_wire(wire, kLengthDelimited, c.pos(), "model graph");
                auto [b, e] = c.bytes();
                parse_graph(b, e);
                return true;
            }
            if (field == 8) {
                expect_wire(wire, kLengthDelimited, c.pos(), "opset_import");
                auto [b, e] = c.bytes();
                parse_opset(b, e);
                return true;
            }
            return false;
        });
        if (!saw_graph) {
            raise(ErrorKind::Parse, "model has no graph");
        }
        // Inputs that are just default values for initializers are boundary
        // declarations, not dataflow sources.
        std::erase_if(model.input_names, [&](const std::string& n) {
            return model.initializer_names.count(n) > 0;
        });
        if (saw_subgraph) {
            model.warnings.push_back(
                "control-flow subgraph attributes present; inner graphs ignored");
        }
        return std::move(model);
    }
};

}  // namespace

ParsedModel read_onnx(ByteView payload) {
    OnnxDecoder decoder{payload, {}, false, false, {}};
    return decoder.run();
}

}  // namespace genescan
