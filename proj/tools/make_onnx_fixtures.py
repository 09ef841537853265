#!/usr/bin/env python3
# Copyright (C) 2026 The genescan authors. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the checked-in ONNX binary fixtures.

Encodes the protobuf wire format by hand so the fixtures are produced by a
codepath with nothing in common with the C++ reader they exercise.
"""

import pathlib

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def varint(n: int) -> bytes:
    out = bytearray()
    while True:
        byte = n & 0x7F
        n >>= 7
        if n:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return bytes(out)


def tag(field: int, wire: int) -> bytes:
    return varint((field << 3) | wire)


def ld(field: int, payload: bytes) -> bytes:
    return tag(field, 2) + varint(len(payload)) + payload


def st(field: int, text: str) -> bytes:
    return ld(field, text.encode())


def vi(field: int, value: int) -> bytes:
    return tag(field, 0) + varint(value)


def node(name: str, op_type: str, inputs, outputs, attrs: bytes = b"") -> bytes:
    body = b"".join(st(1, i) for i in inputs)
    body += b"".join(st(2, o) for o in outputs)
    body += st(3, name) + st(4, op_type)
    body += attrs
    return body


def graph_attr(attr_name: str, subgraph: bytes) -> bytes:
    # AttributeProto: name = 1, g = 6, type = 20 (GRAPH = 5)
    return ld(5, st(1, attr_name) + ld(6, subgraph) + vi(20, 5))


def model(nodes, inputs, outputs, initializers, opset: int) -> bytes:
    graph = b"".join(ld(1, n) for n in nodes)
    # Initializers carry real tensor data in field 9; the reader only needs
    # the name, but include a little payload so skipping is exercised.
    for name in initializers:
        graph += ld(5, vi(2, 1) + st(8, name) + ld(9, b"\x00\x00\x80\x3f"))
    graph += b"".join(ld(11, st(1, i)) for i in inputs)
    graph += b"".join(ld(12, st(1, o)) for o in outputs)
    opset_id = vi(2, opset)  # default domain, omitted
    return vi(1, 8) + ld(7, graph) + ld(8, opset_id)


def write(name: str, payload: bytes) -> None:
    path = FIXTURES / name
    path.write_bytes(payload)
    print(f"wrote {path} ({len(payload)} bytes)")


def main() -> None:
    FIXTURES.mkdir(exist_ok=True)

    write(
        "conv_relu_opset17.onnx",
        model(
            nodes=[
                node("conv", "Conv", ["x", "w"], ["c0"]),
                node("relu", "Relu", ["c0"], ["y"]),
            ],
            inputs=["x", "w"],  # w doubles as an initializer default
            outputs=["y"],
            initializers=["w"],
            opset=17,
        ),
    )

    write(
        "matmul_opset13.onnx",
        model(
            nodes=[node("mm", "MatMul", ["a", "b"], ["y"])],
            inputs=["a"],
            outputs=["y"],
            initializers=["b"],
            opset=13,
        ),
    )

    inner = ld(1, node("inner", "Identity", ["ci"], ["co"]))
    write(
        "if_subgraph_opset17.onnx",
        model(
            nodes=[
                node("cond", "Greater", ["x", "x"], ["c"]),
                node(
                    "branch",
                    "If",
                    ["c"],
                    ["y"],
                    attrs=graph_attr("then_branch", inner)
                    + graph_attr("else_branch", inner),
                ),
            ],
            inputs=["x"],
            outputs=["y"],
            initializers=[],
            opset=17,
        ),
    )


if __name__ == "__main__":
    main()
