/*
 * Copyright 2026 The sisa_rl Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SISA_RL_TOOLS_CLI_H_
#define SISA_RL_TOOLS_CLI_H_

#include <iosfwd>

namespace sisa_rl::cli {

// Entry point for the sisa_rl tool. Subcommands: run, synth, train, unlearn,
// report. Returns the process exit status.
int Main(int argc, const char* const* argv, std::ostream& out,
         std::ostream& err);

}  // namespace sisa_rl::cli

#endif  // SISA_RL_TOOLS_CLI_H_
