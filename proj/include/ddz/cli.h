// Copyright 2026 The ddz Authors
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

#ifndef DDZ_CLI_H_
#define DDZ_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace ddz {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInvalidFlags = 2;
inline constexpr int kExitBadRecord = 3;

// The `ddz` command line. `args` excludes the program name. Reports go to
// `out` (or --out), progress and errors to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ddz

#endif  // DDZ_CLI_H_
