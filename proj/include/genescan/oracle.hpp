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

#include "genescan/blocking.hpp"
#include "genescan/signature.hpp"

namespace genescan {

/// Reference matcher for small block graphs: enumerates every
/// (block, pattern) satisfaction bottom-up over the pattern DAG, with its
/// own backtracking op-sequence matcher. Shares no code with the scanning
/// path; exists to cross-check it.
///
/// Domain guard: graphs above 20 blocks are refused with Error(Domain).
bool brute_force_match(const ComponentSignature& component,
                       const BlockGraph& blocks);

/// Occurrence count under the same reference semantics.
std::uint32_t brute_force_occurrences(const ComponentSignature& component,
                                      const BlockGraph& blocks);

}  // namespace genescan
