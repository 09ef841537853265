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
#include <set>
#include <span>
#include <string>
#include <vector>

namespace genescan {

/// One entry of a block's op sequence. Parsed from strings: "?" matches any
/// single op, "*" matches zero or more ops, "A||B" matches one op equal to
/// any option, anything else is a literal.
struct OpPattern {
    enum class Kind { Literal, AnyOne, AnyMany, Alternation };

    Kind kind = Kind::Literal;
    std::string op;                    // Literal
    std::vector<std::string> options;  // Alternation, >= 2 entries

    /// The source string form ("?", "*", "A||B", literal).
    std::string text() const;

    friend bool operator==(const OpPattern&, const OpPattern&) = default;
};

OpPattern parse_op_pattern(const std::string& text, const std::string& where);

struct BlockPattern {
    std::uint32_t id = 0;
    std::vector<OpPattern> ops;
    std::set<std::string> ignored_ops;  // removed from a block before matching
    std::uint32_t repeats_min = 1;      // depth-wise repetition of `ops`
    std::uint32_t repeats_max = 1;

    friend bool operator==(const BlockPattern&, const BlockPattern&) = default;
};

struct EdgePattern {
    std::uint32_t src = 0;
    std::uint32_t dst = 0;
    std::uint32_t min_repeats = 1;  // width-wise: edge must exist this often

    friend bool operator==(const EdgePattern&, const EdgePattern&) = default;
};

/// One connected subgraph pattern: block ids 0..n-1 whose edges form a weakly
/// connected DAG with a unique source and a unique sink.
struct ComponentSignature {
    std::vector<BlockPattern> blocks;
    std::vector<EdgePattern> edges;
    std::uint32_t min_repeats = 1;  // occurrences required for a match

    // Derived during validation.
    std::uint32_t start_id = 0;
    std::uint32_t end_id = 0;
    std::vector<std::vector<std::uint32_t>> out_edges;  // edge indices by src

    friend bool operator==(const ComponentSignature& a, const ComponentSignature& b) {
        return a.blocks == b.blocks && a.edges == b.edges &&
               a.min_repeats == b.min_repeats;
    }
};

/// A named detection. The model matches the family only when every component
/// matches (the conjunction used for Combo signatures).
struct FamilySignature {
    std::string name;
    std::vector<ComponentSignature> components;
    std::string metadata;  // optional free text (architecture, modality)

    friend bool operator==(const FamilySignature&, const FamilySignature&) = default;
};

/// Validates edge references, id density, repeat bounds, and the connected
/// single-source/single-sink shape; fills the derived fields.
/// `where` prefixes error messages (usually the family name).
void validate_component(ComponentSignature& component, const std::string& where);

/// Parses a signature database: a JSON object keyed by detection name whose
/// values are either a bare component or {"components":[...]}. Throws
/// Error(Validation) naming the JSON path of the first violation.
std::vector<FamilySignature> parse_signatures(std::span<const std::uint8_t> payload);
std::vector<FamilySignature> parse_signatures(const std::string& text);

/// Canonical JSON form: families sorted by name, single-component families
/// in the bare shape, ignored_ops omitted when empty.
std::string serialize_signatures(const std::vector<FamilySignature>& db);

enum class LintKind {
    DuplicateFamilyName,
    AmbiguousComponents,  // identical component in two families
    OverlyBroadBlock,     // every op pattern is "*"
    UnreachableBlock,
};

struct LintFinding {
    LintKind kind;
    std::string family;
    std::string message;
};

/// Advisory checks; never fails.
std::vector<LintFinding> lint_signatures(const std::vector<FamilySignature>& db);

/// How much concrete structure a family pins down: literal and alternation
/// op patterns plus edges, summed over components. Used to rank detections
/// and to pick the best match.
double specificity(const FamilySignature& sig);

}  // namespace genescan
