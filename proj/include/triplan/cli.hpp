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

#ifndef TRIPLAN_CLI_HPP_
#define TRIPLAN_CLI_HPP_

#include <string>
#include <vector>

namespace triplan {

/// Command-line front end. Returns 0 on success, 2 when no path exists,
/// and 1 on input errors.
int run_cli(const std::vector<std::string>& args);

}  // namespace triplan

#endif  // TRIPLAN_CLI_HPP_
