//
// Copyright 2026 The phrase-attack Authors
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
//

// Command-line front end: attack, score, report and mock-serve.

#pragma once

#include <atomic>
#include <ostream>

#include "phrase_attack/cli/campaign.hpp"

namespace phrase_attack::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitError = 2;
inline constexpr int kExitInterrupted = 130;

// Loads the dataset, runs the campaign, writes results.jsonl and report.json
// to config.output_dir and prints the report table to `out`.
int RunAttackCommand(RunConfig config, std::ostream& out, std::ostream& err,
                     const std::atomic<bool>* stop = nullptr);

// Parses argv and dispatches to a subcommand.
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace phrase_attack::cli
