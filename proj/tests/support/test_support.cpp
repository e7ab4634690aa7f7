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

#include "test_support.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "common/jsonl.hpp"

namespace memeanno::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  std::random_device rd;
  for (;;) {
    auto candidate = fs::temp_directory_path() / ("memeanno-test-" + std::to_string(rd()));
    if (fs::create_directory(candidate)) {
      path_ = candidate;
      return;
    }
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string& tiny_png() {
  static const std::string png = [] {
    const unsigned char bytes[] = {
        0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48,
        0x44, 0x52, 0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00, 0x01, 0x08, 0x06, 0x00, 0x00,
        0x00, 0x1f, 0x15, 0xc4, 0x89, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x44, 0x41, 0x54, 0x78,
        0x9c, 0x63, 0x60, 0x00, 0x02, 0x00, 0x00, 0x05, 0x00, 0x01, 0x7a, 0x5e, 0xab, 0x3f,
        0x00, 0x00, 0x00, 0x00, 0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82};
    return std::string(reinterpret_cast<const char*>(bytes), sizeof bytes);
  }();
  return png;
}

std::string meme_id(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "m%02zu", index + 1);
  return buf;
}

fs::path write_synthetic_manifest(const fs::path& dir, std::size_t n, std::optional<dataset::Split> split) {
  std::string lines;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string id = meme_id(i);
    write_file(dir / "images" / (id + ".png"), tiny_png());
    OrderedJson j{{"id", id},
                  {"image_path", "images/" + id + ".png"},
                  {"text", "caption for " + id},
                  {"propaganda", i % 4 == 0 ? "propagandistic" : "not_propagandistic"}};
    if (split) j["split"] = dataset::token(*split);
    lines += j.dump() + "\n";
  }
  const auto path = dir / "manifest.jsonl";
  write_file(path, lines);
  return path;
}

agents::AgentConfig mock_agent(const std::string& name, const std::string& endpoint, agents::Role role) {
  agents::AgentConfig a;
  a.name = name;
  a.endpoint_url = endpoint;
  a.model_id = name + "-model";
  a.role = role;
  a.prompt_template_id = role == agents::Role::Annotator ? "annotation.v1" : "consolidation.v1";
  a.request_timeout_s = 5;
  a.max_retries = 2;
  a.rate_limit = 100000;
  a.max_parallel = 4;
  a.backoff_initial_ms = 1;
  return a;
}

std::string agents_config_json(const std::vector<agents::AgentConfig>& agents) {
  OrderedJson list = OrderedJson::array();
  for (const auto& a : agents) {
    OrderedJson j{{"name", a.name},
                  {"provider", agents::token(a.provider)},
                  {"endpoint_url", a.endpoint_url},
                  {"model_id", a.model_id},
                  {"role", agents::token(a.role)},
                  {"prompt_template_id", a.prompt_template_id},
                  {"request_timeout", a.request_timeout_s},
                  {"max_retries", a.max_retries},
                  {"rate_limit", a.rate_limit},
                  {"max_parallel", a.max_parallel},
                  {"backoff_initial_ms", a.backoff_initial_ms}};
    if (!a.api_key_env.empty()) j["api_key_env"] = a.api_key_env;
    list.push_back(j);
  }
  return OrderedJson{{"agents", list}}.dump(2);
}

std::string answer(const std::string& coarse, const std::string& fine) {
  OrderedJson j{{"coarse", coarse}};
  if (!fine.empty()) j["fine"] = fine;
  return j.dump();
}

agents::Clock FakeClock::clock() {
  agents::Clock c;
  c.now = [this] { return now; };
  c.sleep_for = [this](std::chrono::nanoseconds d) {
    sleeps.push_back(d);
    now += d;
  };
  return c;
}

MockRoster::MockRoster(std::size_t n_, std::vector<std::size_t> disagreeing_)
    : n(n_), disagreeing(std::move(disagreeing_)) {}

std::vector<std::string> MockRoster::disagreement_ids() const {
  std::vector<std::string> out;
  for (auto i : disagreeing) out.push_back(meme_id(i));
  return out;
}

void MockRoster::install(mock::MockAgentServer& server) const {
  mock::MockModel a, b, c, cons;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string id = meme_id(i);
    const std::string unanimous = i % 3 == 0 ? answer("hateful", "mocking") : answer("not_hateful", "humor");
    a.replies[id] = "Label: " + unanimous;
    b.replies[id] = unanimous;
    c.replies[id] = "```json\n" + unanimous + "\n```";
  }
  for (auto i : disagreeing) {
    const std::string id = meme_id(i);
    a.replies[id] = answer("hateful", "mocking");
    b.replies[id] = answer("hateful", "slurs");
    c.replies[id] = answer("not_hateful", "sarcasm");
  }
  cons.fallback = answer("hateful", "contempt");
  server.set_model("alpha-model", a);
  server.set_model("beta-model", b);
  server.set_model("gamma-model", c);
  server.set_model("judge-model", cons);
}

const std::vector<std::size_t> kDisagreeing = {2, 5, 9, 13, 17, 21, 26, 30, 34, 38, 43, 47};

PipelineHarness::PipelineHarness(std::size_t n, std::optional<dataset::Split> split) : roster_(n, kDisagreeing) {
  manifest_path_ = write_synthetic_manifest(dir_.path(), n, split);
  manifest_ = dataset::load_manifest(manifest_path_);
  roster_.install(server_);
  server_.start();
  for (const char* name : {"alpha", "beta", "gamma"}) configs_.push_back(mock_agent(name, server_.endpoint()));
  judge_config_ = mock_agent("judge", server_.endpoint(), agents::Role::Consolidator);
  templates_ = agents::canonical_templates();
}

pipeline::RunStore PipelineHarness::open(pipeline::OpenMode mode) {
  pipeline::RunMetadata meta;
  meta.manifest_path = manifest_path_.string();
  for (const auto& c : configs_) meta.annotators.push_back({c.name, c.model_id});
  return pipeline::RunStore::open(run_dir(), manifest_, meta, mode);
}

pipeline::AnnotateSummary PipelineHarness::annotate(pipeline::RunStore& run,
                                                    const pipeline::AnnotateOptions& options) {
  reset_clients();
  std::vector<pipeline::AnnotatorBinding> bindings;
  for (auto& c : clients_) bindings.push_back({c.get(), &templates_[0]});
  return pipeline::annotate_all(run, manifest_, bindings, options);
}

pipeline::ConsolidateSummary PipelineHarness::consolidate(pipeline::RunStore& run, bool with_judge,
                                                          const pipeline::ConsolidateOptions& options) {
  reset_clients();
  judge_ = std::make_unique<agents::AgentClient>(judge_config_, cache(), nullptr, agents::Clock::system(), 1);
  return pipeline::consolidate_all(run, manifest_, {with_judge ? judge_.get() : nullptr, &templates_[1]},
                                   options);
}

void PipelineHarness::complete_run() {
  auto run = open(pipeline::OpenMode::Create);
  annotate(run);
  consolidate(run);
}

std::shared_ptr<agents::ResponseCache> PipelineHarness::cache() {
  return std::make_shared<agents::ResponseCache>(run_dir() / pipeline::kCacheFile);
}

void PipelineHarness::reset_clients() {
  clients_.clear();
  auto shared = cache();
  for (const auto& c : configs_) {
    clients_.push_back(std::make_unique<agents::AgentClient>(c, shared, nullptr, agents::Clock::system(), 1));
  }
}

}  // namespace memeanno::testing
