// Copyright 2026 The memeanno Authors
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

// Standalone scripted agent endpoint for trying the CLI without a real
// provider. Prints the endpoint URL, then serves until SIGINT or SIGTERM.

#include <csignal>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "mock/mock_agent.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Scripted mock agent endpoint (generic provider format)"};
  std::string script_path;
  app.add_option("script", script_path, "Behavior script JSON")->required()->check(CLI::ExistingFile);
  CLI11_PARSE(app, argc, argv);

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  memeanno::mock::MockAgentServer server;
  try {
    std::ifstream in(script_path);
    for (auto& [model, behavior] : memeanno::mock::parse_script(nlohmann::json::parse(in))) {
      server.set_model(model, std::move(behavior));
    }
    server.start();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cout << server.endpoint() << std::endl;
  int sig = 0;
  sigwait(&signals, &sig);
  server.stop();
  std::cerr << "served " << server.requests() << " requests\n";
  return 0;
}
