// Copyright 2026 The Triplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRIPLAN_ERRORS_HPP_
#define TRIPLAN_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace triplan {

/// Invalid user-supplied input (bad maps, crossing constraints, states in
/// obstacles, malformed arguments).
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Structural misuse of an API (non-adjacent sequences and the like).
class StructuralError : public std::logic_error {
 public:
  explicit StructuralError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace triplan

#endif  // TRIPLAN_ERRORS_HPP_
