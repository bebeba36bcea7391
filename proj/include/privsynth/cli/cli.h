// Copyright 2026 The Privsynth Authors
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

#ifndef PRIVSYNTH_CLI_CLI_H_
#define PRIVSYNTH_CLI_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace privsynth::cli {

// Runs the privsynth command line. `args` excludes the program name.
// Failures print one JSON error line on `err` and return nonzero.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace privsynth::cli

#endif  // PRIVSYNTH_CLI_CLI_H_
