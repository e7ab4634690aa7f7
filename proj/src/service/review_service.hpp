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

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "common/jsonl.hpp"
#include "dataset/manifest.hpp"
#include "pipeline/run.hpp"
#include "service/label_journal.hpp"

namespace httplib {
class Server;
}

namespace memeanno::service {

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 0;  // 0 picks a free port
  std::string cors_origin = "*";
  // Used when a request carries no X-Annotator-Id header.
  std::string default_annotator = "annotator";
  std::size_t max_page_size = 1000;
};

// JSON-over-HTTP backend for the human labeling UI.
//
//   GET  /api/memes?split=&status=&page=&page_size=
//   GET  /api/memes/{id}[?reveal=1]     agent labels only with reveal
//   GET  /api/memes/{id}/image
//   POST /api/memes/{id}/label          {"coarse","fine"?,"elapsed_s"?}
//   GET  /api/disagreements[?reveal=1]
//   GET  /api/progress
//   GET  /api/reports/agreement[?level=]
//   GET  /api/export/human[?annotator=]
//   GET  /api/guidelines
//
// The annotator is taken from the X-Annotator-Id header. Memes are listed in
// id order; pages are 1-based.
class ReviewService {
 public:
  // `run_dir` is optional; without it agent labels, disagreements and the
  // agreement report are empty. Human labels go to `labels_path`, which
  // defaults to the run's human label journal.
  ReviewService(dataset::Manifest manifest, std::optional<std::filesystem::path> run_dir,
                std::optional<std::filesystem::path> labels_path, ServiceOptions options = {});
  ~ReviewService();

  ReviewService(const ReviewService&) = delete;
  ReviewService& operator=(const ReviewService&) = delete;

  // Binds and starts serving on a background thread; returns the bound port.
  // Io error when the address cannot be bound.
  int start();
  void stop();
  // Blocks until stop() is called from another thread.
  void wait();
  int port() const noexcept { return port_; }

  const LabelJournal& journal() const noexcept { return *journal_; }

 private:
  void install_routes();

  dataset::Manifest manifest_;
  std::optional<pipeline::RunStore> run_;
  std::unique_ptr<LabelJournal> journal_;
  ServiceOptions options_;
  std::vector<std::size_t> by_id_;  // manifest indexes sorted by meme id
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace memeanno::service
