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

#include <span>
#include <string>
#include <vector>

#include "genescan/graph.hpp"
#include "genescan/signature.hpp"

namespace genescan {

/// Operator-fusion rule: occurrences of `pattern` in a graph collapse into a
/// single node of type `replacement_op`, so one signature covers both the
/// fused and the decomposed serialization dialect of an operator.
///
/// Rule patterns are a restricted signature component: literal, "?", and "||"
/// op entries only (no "*"), repeats fixed at [1,1], edge min_repeats 1 —
/// every pattern op pins exactly one node, which is what makes the fused
/// node span well defined.
struct RewriteRule {
    std::string name;
    ComponentSignature pattern;
    std::string replacement_op;
    std::string anchor;  // free-text role note for signature authors
};

/// Rules file: same JSON shape as a signature database plus "replacement_op"
/// and optional "anchor" per entry. Throws Error(Validation) on violations of
/// the rule-pattern restrictions above.
std::vector<RewriteRule> parse_rules(std::span<const std::uint8_t> payload);
std::vector<RewriteRule> parse_rules(const std::string& text);

/// The compiled-in default rule set (the pre-opset-17 LayerNormalization
/// decomposition). rules/layernorm_fusion.json carries the same content.
const std::string& default_rules_json();
const std::vector<RewriteRule>& default_rules();

/// Applies each rule over the graph: non-overlapping occurrences are located
/// in ascending node order (first match wins) and each is replaced by one
/// synthetic node named "{replacement_op}#fused{n}" that inherits every edge
/// crossing the occurrence boundary. Occurrences whose fusion would create a
/// cycle are skipped with a warning. The result is a valid acyclic graph.
AgnosticGraph apply_rules(const AgnosticGraph& graph,
                          const std::vector<RewriteRule>& rules,
                          std::vector<std::string>* warnings = nullptr);

}  // namespace genescan
