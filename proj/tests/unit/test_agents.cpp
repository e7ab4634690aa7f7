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

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>

#include "agents/cache.hpp"
#include "agents/config.hpp"
#include "agents/prompt.hpp"
#include "agents/rate_limiter.hpp"
#include "agents/response.hpp"
#include "agents/transport.hpp"
#include "common/error.hpp"
#include "test_support.hpp"

namespace memeanno::agents {
namespace {

using dataset::CoarseLabel;
using dataset::FineLabel;
using dataset::HateLabel;
using testing::TempDir;

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::Internal;
}

dataset::MemeRecord meme(const std::string& text = "some text") {
  dataset::MemeRecord m;
  m.id = "m01";
  m.image_path = "images/m01.png";
  m.text = text;
  return m;
}

// ---- prompts

TEST(Prompt, AnnotationTemplateCarriesTextGuidelinesAndNoCandidates) {
  const auto tmpl = canonical_templates()[0];
  const auto p = render_prompt(tmpl, meme("ضحك"), {});
  EXPECT_NE(p.text.find("ضحك"), std::string::npos);
  EXPECT_NE(p.text.find(guidelines_text()), std::string::npos);
  EXPECT_NE(p.text.find("(no image available)"), std::string::npos);
  EXPECT_EQ(p.text.find("{{"), std::string::npos);
  EXPECT_EQ(p.image_digest, "none");
  EXPECT_EQ(p.prompt_hash.size(), 64u);
}

TEST(Prompt, GuidelinesNameEveryFineCategory) {
  const auto g = guidelines_text();
  for (auto f : dataset::kFineLabels) {
    std::string name(dataset::token(f));
    if (name.rfind("other_", 0) == 0) name = "other";
    EXPECT_NE(g.find("(\"" + name + "\")"), std::string::npos) << name;
  }
}

TEST(Prompt, ConsolidationListsCandidates) {
  const auto tmpl = canonical_templates()[1];
  const std::vector<HateLabel> c = {HateLabel(CoarseLabel::Hateful, FineLabel::Mocking),
                                    HateLabel(CoarseLabel::NotHateful)};
  const auto p = render_prompt(tmpl, meme(), {}, &c);
  EXPECT_NE(p.text.find("mocking"), std::string::npos);
  EXPECT_NE(p.text.find("none"), std::string::npos);
  EXPECT_EQ(kind_of([&] { render_prompt(tmpl, meme(), {}); }), ErrorKind::Argument);
  EXPECT_EQ(kind_of([&] { render_prompt(canonical_templates()[0], meme(), {}, &c); }), ErrorKind::Argument);
}

TEST(Prompt, MemeTextIsNotReExpanded) {
  const auto p = render_prompt(canonical_templates()[0], meme("{{guidelines}}"), {});
  EXPECT_NE(p.text.find("{{guidelines}}"), std::string::npos);
}

TEST(Prompt, HashCoversTextAndImage) {
  TempDir dir;
  testing::write_file(dir / "a.png", testing::tiny_png());
  testing::write_file(dir / "b.png", testing::tiny_png() + "x");
  const auto tmpl = canonical_templates()[0];
  const auto none = render_prompt(tmpl, meme(), {});
  const auto a = render_prompt(tmpl, meme(), dir / "a.png");
  const auto b = render_prompt(tmpl, meme(), dir / "b.png");
  EXPECT_EQ(a.image_media_type, "image/png");
  EXPECT_NE(none.prompt_hash, a.prompt_hash);
  EXPECT_NE(a.prompt_hash, b.prompt_hash);
  EXPECT_EQ(a.prompt_hash, render_prompt(tmpl, meme(), dir / "a.png").prompt_hash);
  EXPECT_NE(a.prompt_hash, render_prompt(tmpl, meme("other"), dir / "a.png").prompt_hash);
}

TEST(Prompt, TemplateValidation) {
  EXPECT_EQ(kind_of([] { validate_template({"x", Phase::Annotation, "{{candidate_labels}}"}); }),
            ErrorKind::Template);
  EXPECT_EQ(kind_of([] { validate_template({"x", Phase::Consolidation, "{{meme_text}}"}); }),
            ErrorKind::Template);
  EXPECT_EQ(kind_of([] { template_placeholders("{{oops"); }), ErrorKind::Template);
  EXPECT_EQ(template_placeholders("a {{x}} b {{ y }}"), (std::set<std::string>{"x", "y"}));
  EXPECT_EQ(kind_of([] { render_prompt({"x", Phase::Annotation, "{{nope}}"}, meme(), {}); }),
            ErrorKind::Template);
}

// ---- response parsing

TEST(ResponseParser, PlainAndWrappedObjects) {
  EXPECT_EQ(parse_response(R"({"coarse":"hateful","fine":"mocking"})", Phase::Annotation),
            HateLabel(CoarseLabel::Hateful, FineLabel::Mocking));
  EXPECT_EQ(parse_response("Sure! ```json\n{\"coarse\": \"Not-Hateful\", \"fine\": \"Sarcasm\"}\n```",
                           Phase::Annotation),
            HateLabel(CoarseLabel::NotHateful, FineLabel::Sarcasm));
  EXPECT_EQ(parse_response(R"(note {"x": {"y": "}"}} then {"coarse":"hateful"})", Phase::Annotation),
            HateLabel(CoarseLabel::Hateful));
}

TEST(ResponseParser, BareOtherResolvesThroughCoarse) {
  EXPECT_EQ(parse_response(R"({"coarse":"hateful","fine":"other"})", Phase::Annotation),
            HateLabel(CoarseLabel::Hateful, FineLabel::OtherHateful));
  EXPECT_EQ(parse_response(R"({"coarse":"not hateful","fine":"other"})", Phase::Annotation),
            HateLabel(CoarseLabel::NotHateful, FineLabel::OtherNotHateful));
  EXPECT_EQ(parse_response(R"({"coarse":"hateful","fine":"none"})", Phase::Annotation),
            HateLabel(CoarseLabel::Hateful));
}

TEST(ResponseParser, Failures) {
  for (const char* raw : {"", "no json here", R"({"label":"hateful"})", R"({"coarse":"maybe"})",
                          R"({"coarse":"hateful","fine":"humor"})", R"({"coarse":"hateful","fine":"weird"})",
                          R"({"coarse": 3})"}) {
    EXPECT_EQ(kind_of([&] { parse_response(raw, Phase::Consolidation); }), ErrorKind::Parse) << raw;
  }
}

TEST(ResponseParser, SerializedAnswerParsesBack) {
  for (auto f : dataset::kFineLabels) {
    const HateLabel l(dataset::family(f), f);
    EXPECT_EQ(parse_response(serialize_answer(l), Phase::Annotation), l);
  }
}

TEST(AgentResponse, JsonRoundTrip) {
  AgentResponse r{"m01", "alpha", "{...}", HateLabel(CoarseLabel::Hateful, FineLabel::Slurs), 12, 2,
                  ResponseStatus::Ok, ""};
  EXPECT_EQ(response_from_json(Json::parse(to_json(r).dump())), r);
  AgentResponse f{"m02", "beta", "HTTP 500 body", std::nullopt, 40, 3, ResponseStatus::TransportFailed,
                  "HTTP 500"};
  EXPECT_EQ(response_from_json(Json::parse(to_json(f).dump())), f);
  auto bad = Json::parse(to_json(f).dump());
  bad["status"] = "ok";
  EXPECT_EQ(kind_of([&] { response_from_json(bad); }), ErrorKind::Schema);
}

// ---- cache

AgentResponse ok_response(const std::string& meme_id, FineLabel f) {
  return {meme_id, "alpha", "raw", HateLabel(dataset::family(f), f), 5, 1, ResponseStatus::Ok, ""};
}

TEST(ResponseCache, PersistsAndLastWriteWins) {
  TempDir dir;
  const CacheKey k1{"alpha", "m", "h1", "m01"}, k2{"alpha", "m", "h2", "m01"};
  {
    ResponseCache cache(dir / "cache.jsonl");
    cache.store(k1, ok_response("m01", FineLabel::Humor));
    cache.store(k2, ok_response("m01", FineLabel::Slurs));
    cache.store(k1, ok_response("m01", FineLabel::Sarcasm));
    EXPECT_EQ(cache.size(), 2u);
  }
  ResponseCache cache(dir / "cache.jsonl");
  EXPECT_EQ(cache.size(), 2u);
  EXPECT_EQ(cache.journal_lines(), 3u);
  EXPECT_EQ(cache.lookup(k1)->parsed->fine(), FineLabel::Sarcasm);
  EXPECT_EQ(cache.lookup(k2)->parsed->fine(), FineLabel::Slurs);
  EXPECT_FALSE(cache.lookup({"alpha", "m", "h3", "m01"}));
  EXPECT_FALSE(cache.lookup({"beta", "m", "h1", "m01"}));
}

TEST(ResponseCache, KeyFieldsAreUnambiguous) {
  EXPECT_NE((CacheKey{"ab", "c", "h", "m"}.digest()), (CacheKey{"a", "bc", "h", "m"}.digest()));
}

TEST(ResponseCache, TornTailIsIgnored) {
  TempDir dir;
  const CacheKey k{"alpha", "m", "h1", "m01"};
  {
    ResponseCache cache(dir / "cache.jsonl");
    cache.store(k, ok_response("m01", FineLabel::Humor));
  }
  {
    std::ofstream out(dir / "cache.jsonl", std::ios::app);
    out << R"({"key":"abc","agent_name":"al)";
  }
  ResponseCache cache(dir / "cache.jsonl");
  EXPECT_EQ(cache.size(), 1u);
  cache.store({"alpha", "m", "h2", "m01"}, ok_response("m01", FineLabel::Slurs));
  ResponseCache reopened(dir / "cache.jsonl");
  EXPECT_EQ(reopened.size(), 2u);
}

TEST(ResponseCache, CorruptMiddleLineIsASchemaError) {
  TempDir dir;
  testing::write_file(dir / "cache.jsonl", "{broken\n{\"also\":1}\n");
  EXPECT_NE(kind_of([&] { ResponseCache cache(dir / "cache.jsonl"); }), ErrorKind::Internal);
}

TEST(ResponseCache, CompactionKeepsOneLinePerKey) {
  TempDir dir;
  const CacheKey k{"alpha", "m", "h1", "m01"};
  ResponseCache cache(dir / "cache.jsonl");
  for (int i = 0; i < 10; ++i) cache.store(k, ok_response("m01", FineLabel::Humor));
  cache.compact();
  EXPECT_EQ(cache.journal_lines(), 1u);
  cache.store({"alpha", "m", "h2", "m01"}, ok_response("m01", FineLabel::Slurs));
  ResponseCache reopened(dir / "cache.jsonl");
  EXPECT_EQ(reopened.journal_lines(), 2u);
  EXPECT_EQ(reopened.size(), 2u);
}

// ---- rate limiter

TEST(RateLimiter, WindowAndCapacity) {
  testing::FakeClock fake;
  EXPECT_EQ(RateLimiter(90.7, fake.clock()).capacity(), 90u);
  EXPECT_EQ(RateLimiter(90.7, fake.clock()).window(), std::chrono::minutes(1));
  EXPECT_EQ(RateLimiter(0.5, fake.clock()).capacity(), 1u);
  EXPECT_EQ(RateLimiter(0.5, fake.clock()).window(), std::chrono::minutes(2));
  EXPECT_EQ(kind_of([&] { RateLimiter(0, fake.clock()); }), ErrorKind::Config);
}

TEST(RateLimiter, NeverExceedsCapacityInAnyWindow) {
  testing::FakeClock fake;
  RateLimiter limiter(5, fake.clock());
  std::vector<std::chrono::steady_clock::time_point> issued;
  for (int i = 0; i < 23; ++i) {
    limiter.acquire();
    issued.push_back(fake.now);
    fake.now += std::chrono::seconds(1);
  }
  for (std::size_t i = 0; i + 5 < issued.size(); ++i) {
    EXPECT_GE(issued[i + 5] - issued[i], std::chrono::minutes(1)) << i;
  }
  EXPECT_FALSE(fake.sleeps.empty());
}

// ---- transport shapes

AgentConfig provider_agent(Provider p) {
  AgentConfig a;
  a.name = "a";
  a.provider = p;
  a.endpoint_url = "https://api.example.com:8443/v1/x?y=1";
  a.model_id = "model-1";
  return a;
}

RenderedPrompt prompt_with_image(const TempDir& dir) {
  testing::write_file(dir / "img.png", testing::tiny_png());
  auto p = render_prompt(canonical_templates()[0], meme(), dir / "img.png");
  return p;
}

TEST(Transport, SplitUrl) {
  const auto u = split_url("https://api.example.com:8443/v1/x?y=1");
  EXPECT_EQ(u.scheme_host_port, "https://api.example.com:8443");
  EXPECT_EQ(u.path, "/v1/x?y=1");
  EXPECT_EQ(split_url("http://h").path, "/");
}

TEST(Transport, RequestShapesPerProvider) {
  TempDir dir;
  const auto prompt = prompt_with_image(dir);
  auto header = [](const HttpRequest& r, const std::string& name) {
    for (const auto& [k, v] : r.headers)
      if (k == name) return v;
    return std::string();
  };
  {
    const auto r = build_request(provider_agent(Provider::Generic), prompt, "m01", "");
    const auto b = Json::parse(r.body);
    EXPECT_EQ(b["model"], "model-1");
    EXPECT_EQ(b["metadata"]["meme_id"], "m01");
    EXPECT_EQ(b["image"]["media_type"], "image/png");
    EXPECT_TRUE(header(r, "Authorization").empty());
  }
  {
    const auto r = build_request(provider_agent(Provider::OpenAI), prompt, "m01", "sk");
    EXPECT_EQ(header(r, "Authorization"), "Bearer sk");
    const auto b = Json::parse(r.body);
    EXPECT_EQ(b["messages"][0]["content"][1]["type"], "image_url");
  }
  {
    const auto r = build_request(provider_agent(Provider::Anthropic), prompt, "m01", "sk");
    EXPECT_EQ(header(r, "x-api-key"), "sk");
    EXPECT_EQ(Json::parse(r.body)["messages"][0]["content"][0]["type"], "image");
  }
  {
    const auto r = build_request(provider_agent(Provider::Gemini), prompt, "m01", "sk");
    EXPECT_EQ(header(r, "x-goog-api-key"), "sk");
    EXPECT_TRUE(Json::parse(r.body)["contents"][0]["parts"][1].contains("inline_data"));
  }
}

TEST(Transport, ExtractText) {
  EXPECT_EQ(extract_text(Provider::Generic, R"({"text":"hi"})"), "hi");
  EXPECT_EQ(extract_text(Provider::OpenAI, R"({"choices":[{"message":{"content":"hi"}}]})"), "hi");
  EXPECT_EQ(extract_text(Provider::Anthropic, R"({"content":[{"type":"text","text":"h"},{"type":"text","text":"i"}]})"),
            "hi");
  EXPECT_EQ(extract_text(Provider::Gemini, R"({"candidates":[{"content":{"parts":[{"text":"hi"}]}}]})"), "hi");
  EXPECT_FALSE(extract_text(Provider::OpenAI, R"({"text":"hi"})"));
  EXPECT_FALSE(extract_text(Provider::Generic, "not json"));
}

// ---- config

Json base_config() {
  return Json::parse(R"({"agents":[
    {"name":"alpha","endpoint_url":"http://127.0.0.1:1/v1","model_id":"m","role":"annotator"},
    {"name":"judge","endpoint_url":"http://127.0.0.1:1/v1","model_id":"m","role":"consolidator",
     "api_key_env":"MEMEANNO_TEST_KEY"}]})");
}

TEST(Config, DefaultsAndTemplates) {
  const auto c = parse_agents_config(base_config());
  EXPECT_EQ(c.agents().size(), 2u);
  EXPECT_EQ(c.agent("alpha").prompt_template_id, "annotation.v1");
  EXPECT_EQ(c.agent("judge").prompt_template_id, "consolidation.v1");
  EXPECT_EQ(c.with_role(Role::Consolidator).size(), 1u);
  EXPECT_EQ(kind_of([&] { c.agent("nobody"); }), ErrorKind::Argument);
}

TEST(Config, CredentialsInTheDocumentAreRejected) {
  for (const char* key : {"api_key", "token", "secret"}) {
    auto doc = base_config();
    doc["agents"][0][key] = "sk-123";
    EXPECT_EQ(kind_of([&] { parse_agents_config(doc); }), ErrorKind::Config) << key;
  }
}

TEST(Config, CredentialsResolveFromTheEnvironment) {
  const auto c = parse_agents_config(base_config());
  ::unsetenv("MEMEANNO_TEST_KEY");
  EXPECT_EQ(kind_of([&] { resolve_credential(c.agent("judge")); }), ErrorKind::Config);
  ::setenv("MEMEANNO_TEST_KEY", "secret-value", 1);
  EXPECT_EQ(resolve_credential(c.agent("judge")), "secret-value");
  EXPECT_EQ(resolve_credential(c.agent("alpha")), "");
  ::unsetenv("MEMEANNO_TEST_KEY");
}

TEST(Config, ShippedExampleLoads) {
  const auto c = load_agents_config(MEMEANNO_EXAMPLE_CONFIG);
  EXPECT_EQ(c.with_role(Role::Annotator).size(), 3u);
  EXPECT_EQ(c.with_role(Role::Consolidator).size(), 1u);
  for (const auto& a : c.agents()) EXPECT_FALSE(a.api_key_env.empty()) << a.name;
}

TEST(Config, InvalidDocuments) {
  auto with = [](const std::function<void(Json&)>& edit) {
    auto doc = base_config();
    edit(doc);
    return kind_of([&] { parse_agents_config(doc); });
  };
  EXPECT_EQ(with([](Json& d) { d["agents"][1]["name"] = "alpha"; }), ErrorKind::Config);
  EXPECT_EQ(with([](Json& d) { d["agents"][0]["name"] = "consolidated"; }), ErrorKind::Config);
  EXPECT_EQ(with([](Json& d) { d["agents"][0]["name"] = "human:ann1"; }), ErrorKind::Config);
  EXPECT_EQ(with([](Json& d) { d["agents"][0]["role"] = "boss"; }), ErrorKind::Config);
  EXPECT_EQ(with([](Json& d) { d["agents"][0]["provider"] = "acme"; }), ErrorKind::Config);
  EXPECT_EQ(with([](Json& d) { d["agents"][0]["max_parallel"] = 0; }), ErrorKind::Config);
  EXPECT_EQ(with([](Json& d) { d["agents"][0]["rate_limit"] = -1; }), ErrorKind::Config);
  EXPECT_EQ(with([](Json& d) { d["agents"][0]["endpoint_url"] = "ftp://x"; }), ErrorKind::Config);
  EXPECT_EQ(with([](Json& d) { d["agents"][0]["max_retries"] = "three"; }), ErrorKind::Config);
  EXPECT_EQ(with([](Json& d) { d["agents"][0]["prompt_template_id"] = "consolidation.v1"; }),
            ErrorKind::Config);
  EXPECT_EQ(with([](Json& d) { d["agents"][0]["prompt_template_id"] = "missing"; }), ErrorKind::Config);
  EXPECT_EQ(with([](Json& d) {
              d["templates"] = Json::parse(R"([{"id":"t","phase":"annotation","body":"{{candidate_labels}}"}])");
            }),
            ErrorKind::Template);
}

TEST(Config, CustomTemplateBodyAsLines) {
  auto doc = base_config();
  doc["templates"] = Json::parse(R"([{"id":"short","phase":"annotation","body":["Text: {{meme_text}}","{{image}}"]}])");
  doc["agents"][0]["prompt_template_id"] = "short";
  const auto c = parse_agents_config(doc);
  EXPECT_EQ(c.prompt_template("short").body, "Text: {{meme_text}}\n{{image}}\n");
}

}  // namespace
}  // namespace memeanno::agents
