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

// Deliberately naive re-statement of the matching semantics. Anything clever
// belongs in matcher.cpp; this file trades speed for obviousness.

#include "genescan/oracle.hpp"

#include <algorithm>

#include "genescan/error.hpp"

namespace genescan {

namespace {

constexpr std::size_t kMaxBlocks = 20;

// Backtracking matcher: can elements[ei..] generate exactly seq[si..]?
bool elems_match(const std::vector<OpPattern>& elems, std::size_t ei,
                 const std::vector<std::string>& seq, std::size_t si) {
    if (ei == elems.size()) return si == seq.size();
    const OpPattern& e = elems[ei];
    switch (e.kind) {
        case OpPattern::Kind::Literal:
            return si < seq.size() && seq[si] == e.op &&
                   elems_match(elems, ei + 1, seq, si + 1);
        case OpPattern::Kind::AnyOne:
            return si < seq.size() && elems_match(elems, ei + 1, seq, si + 1);
        case OpPattern::Kind::Alternation:
            return si < seq.size() &&
                   std::find(e.options.begin(), e.options.end(), seq[si]) !=
                       e.options.end() &&
                   elems_match(elems, ei + 1, seq, si + 1);
        case OpPattern::Kind::AnyMany:
            for (std::size_t take = 0; si + take <= seq.size(); ++take) {
                if (elems_match(elems, ei + 1, seq, si + take)) return true;
            }
            return false;
    }
    return false;
}

bool naive_block_match(const BlockPattern& pattern, const Block& block) {
    std::vector<std::string> seq;
    for (const std::string& op : block.op_types) {
        if (!pattern.ignored_ops.count(op)) seq.push_back(op);
    }
    for (std::uint32_t r = pattern.repeats_min; r <= pattern.repeats_max; ++r) {
        std::vector<OpPattern> elems;
        for (std::uint32_t copy = 0; copy < r; ++copy) {
            elems.insert(elems.end(), pattern.ops.begin(), pattern.ops.end());
        }
        if (elems_match(elems, 0, seq, 0)) return true;
        // Each extra copy needs at least its non-"*" elements.
        std::size_t needed = 0;
        for (const OpPattern& p : pattern.ops) {
            if (p.kind != OpPattern::Kind::AnyMany) ++needed;
        }
        if (needed * (r + 1) > seq.size()) break;
    }
    return false;
}

// Satisfaction table, filled for patterns in reverse topological order so
// every edge target is final before its sources are evaluated.
std::vector<char> satisfaction_table(const ComponentSignature& comp,
                                     const BlockGraph& bg) {
    if (bg.blocks.size() > kMaxBlocks) {
        raise(ErrorKind::Domain,
              "reference matcher refuses graphs above " +
                  std::to_string(kMaxBlocks) + " blocks");
    }
    const std::size_t nb = bg.blocks.size();
    const std::size_t np = comp.blocks.size();

    // Reverse topological order via repeated sink removal.
    std::vector<std::uint32_t> order;
    std::vector<std::uint32_t> out_left(np, 0);
    for (const EdgePattern& e : comp.edges) ++out_left[e.src];
    std::vector<char> placed(np, 0);
    while (order.size() < np) {
        std::size_t before = order.size();
        for (std::uint32_t p = 0; p < np; ++p) {
            if (!placed[p] && out_left[p] == 0) {
                placed[p] = 1;
                order.push_back(p);
                for (const EdgePattern& e : comp.edges) {
                    if (e.dst == p) --out_left[e.src];
                }
            }
        }
        if (order.size() == before) {
            raise(ErrorKind::Internal, "pattern graph is cyclic");
        }
    }

    std::vector<char> sat(nb * np, 0);
    for (std::uint32_t p : order) {
        for (std::uint32_t b = 0; b < nb; ++b) {
            if (!naive_block_match(comp.blocks[p], bg.blocks[b])) continue;
            bool ok = true;
            for (const EdgePattern& e : comp.edges) {
                if (e.src != p) continue;
                std::uint32_t realized = 0;
                for (const BlockEdge& be : bg.edges) {
                    if (be.src == b && sat[std::size_t{be.dst} * np + e.dst]) {
                        realized += be.count;
                    }
                }
                if (realized < e.min_repeats) ok = false;
            }
            if (ok) sat[std::size_t{b} * np + p] = 1;
        }
    }
    return sat;
}

}  // namespace

std::uint32_t brute_force_occurrences(const ComponentSignature& comp,
                                      const BlockGraph& blocks) {
    std::vector<char> sat = satisfaction_table(comp, blocks);
    std::uint32_t count = 0;
    for (std::uint32_t b = 0; b < blocks.blocks.size(); ++b) {
        if (sat[std::size_t{b} * comp.blocks.size() + comp.start_id]) ++count;
    }
    return count;
}

bool brute_force_match(const ComponentSignature& comp, const BlockGraph& blocks) {
    return brute_force_occurrences(comp, blocks) >= comp.min_repeats;
}

}  // namespace genescan
