// Copyright 2026 The osinv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "json_io.hpp"

namespace osinv::cli {

enum ExitCode : int { kOk = 0, kInvalid = 2, kUnknown = 3, kCapacity = 4 };

// Parses argv-style arguments (without the program name), writes the report
// or error object to 'out' and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Recomputes the result of a stored report from its embedded inputs.
Json compute(const std::string& command, const Json& args, const Json& inputs, int jobs,
             int& exit_code);

// Replays a stored report and re-checks every certificate in it.
Json verify_report(const Json& report, int jobs, bool& ok);

}  // namespace osinv::cli
