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

#include <stdexcept>
#include <string>

namespace genescan {

/// What went wrong, at the granularity the CLI needs for exit codes.
enum class ErrorKind {
    Parse,       // malformed input bytes (protobuf, JSON)
    Validation,  // well-formed input violating a schema rule
    Graph,       // structural graph violation (duplicate name, cycle, ...)
    Lookup,      // unknown id or name
    Io,          // missing or unreadable file
    Domain,      // input outside an operation's supported domain
    Internal,    // invariant breach inside the engine
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace genescan
