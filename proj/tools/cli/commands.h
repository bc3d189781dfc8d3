/*
 * Copyright 2026 The ctxkgc Authors.
 *
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

#ifndef CTXKGC_TOOLS_CLI_COMMANDS_H_
#define CTXKGC_TOOLS_CLI_COMMANDS_H_

#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "ctxkgc/knowledge_graph.h"
#include "ctxkgc/model.h"
#include "run_config.h"

namespace ctxkgc::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitData = 3,
  kExitBackend = 4,
};

// Builds the backend named by the config. Mock backends borrow `kg`.
std::unique_ptr<SequenceModel> MakeModel(const BackendConfig& backend,
                                         const VerbalizerConfig& verbalizer,
                                         const KnowledgeGraph& kg);

// Entry point shared by the binary and the tests. args[0] is the program
// name. Returns one of ExitCode.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace ctxkgc::cli

#endif  // CTXKGC_TOOLS_CLI_COMMANDS_H_
