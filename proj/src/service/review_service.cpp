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

#include "service/review_service.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include <httplib.h>

#include "agents/prompt.hpp"
#include "common/digest.hpp"
#include "common/error.hpp"
#include "metrics/agreement.hpp"
#include "metrics/reports.hpp"
#include "pipeline/export.hpp"

namespace memeanno::service {

namespace fs = std::filesystem;
using dataset::HateLabel;

namespace {

constexpr const char* kJson = "application/json";

void send_json(httplib::Response& res, int status, const OrderedJson& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, const std::string& message,
                const OrderedJson& detail = nullptr) {
  OrderedJson body{{"error", message}};
  if (!detail.is_null()) body["detail"] = detail;
  send_json(res, status, body);
}

std::optional<std::size_t> parse_positive(const std::string& raw) {
  std::size_t v = 0;
  const auto* end = raw.data() + raw.size();
  const auto [p, ec] = std::from_chars(raw.data(), end, v);
  if (ec != std::errc() || p != end || v == 0) return std::nullopt;
  return v;
}

std::string param(const httplib::Request& req, const char* name) {
  return req.has_param(name) ? req.get_param_value(name) : std::string();
}

bool flag(const httplib::Request& req, const char* name) {
  const auto v = param(req, name);
  return v == "1" || v == "true" || v == "yes";
}

OrderedJson fine_guideline(dataset::FineLabel f) {
  return OrderedJson{{"token", dataset::token(f)},
                     {"display_name", dataset::display_name(f)},
                     {"definition", dataset::definition(f)}};
}

OrderedJson guidelines_json() {
  OrderedJson coarse = OrderedJson::array();
  for (auto c : dataset::kCoarseLabels) {
    coarse.push_back({{"token", dataset::token(c)},
                      {"display_name", dataset::display_name(c)},
                      {"definition", dataset::definition(c)}});
  }
  OrderedJson hateful = OrderedJson::array();
  for (auto f : dataset::kHatefulFamily) hateful.push_back(fine_guideline(f));
  OrderedJson not_hateful = OrderedJson::array();
  for (auto f : dataset::kNotHatefulFamily) not_hateful.push_back(fine_guideline(f));
  return OrderedJson{{"coarse", coarse},
                     {"fine", {{"hateful", hateful}, {"not_hateful", not_hateful}}}};
}

OrderedJson split_json(const std::optional<dataset::Split>& s) {
  return s ? OrderedJson(dataset::token(*s)) : OrderedJson(nullptr);
}

std::string image_url(const std::string& id) {
  return "/api/memes/" + httplib::detail::encode_url(id) + "/image";
}

// Distinct coarse values or distinct present fine values among the
// successful annotator responses.
bool disagrees(const pipeline::MemeState& m) {
  std::set<dataset::CoarseLabel> coarse;
  std::set<dataset::FineLabel> fine;
  for (const auto& l : m.successful_labels()) {
    coarse.insert(l.coarse());
    if (l.fine()) fine.insert(*l.fine());
  }
  return coarse.size() >= 2 || fine.size() >= 2;
}

OrderedJson agent_labels_json(const pipeline::RunStore& run, const pipeline::MemeState& m) {
  OrderedJson out = OrderedJson::array();
  const auto& roster = run.metadata().annotators;
  for (std::size_t a = 0; a < roster.size(); ++a) {
    OrderedJson e{{"agent", roster[a].name}};
    const auto& r = m.annotations[a];
    e["status"] = r ? OrderedJson(agents::token(r->status)) : OrderedJson("pending");
    e["label"] = r && r->ok() ? dataset::to_json(*r->parsed) : OrderedJson(nullptr);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

ReviewService::ReviewService(dataset::Manifest manifest, std::optional<fs::path> run_dir,
                             std::optional<fs::path> labels_path, ServiceOptions options)
    : manifest_(std::move(manifest)), options_(std::move(options)) {
  if (run_dir) run_.emplace(pipeline::RunStore::load(*run_dir, manifest_));
  if (!labels_path) {
    if (!run_dir) fail(ErrorKind::Argument, "a run directory or a human label journal is required");
    labels_path = *run_dir / pipeline::kHumanLabelsFile;
  }
  journal_ = std::make_unique<LabelJournal>(*labels_path);
  by_id_.resize(manifest_.size());
  for (std::size_t i = 0; i < by_id_.size(); ++i) by_id_[i] = i;
  const auto& recs = manifest_.records();
  std::sort(by_id_.begin(), by_id_.end(),
            [&](std::size_t a, std::size_t b) { return recs[a].id < recs[b].id; });
  server_ = std::make_unique<httplib::Server>();
  install_routes();
}

ReviewService::~ReviewService() { stop(); }

int ReviewService::start() {
  if (thread_.joinable()) return port_;
  if (options_.port == 0) {
    port_ = server_->bind_to_any_port(options_.host);
  } else {
    port_ = server_->bind_to_port(options_.host, options_.port) ? options_.port : -1;
  }
  if (port_ <= 0) {
    fail(ErrorKind::Io, "cannot bind " + options_.host + ":" + std::to_string(options_.port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void ReviewService::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

void ReviewService::wait() {
  if (thread_.joinable()) thread_.join();
}

void ReviewService::install_routes() {
  auto& svr = *server_;
  const std::string origin = options_.cors_origin;

  svr.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", origin);
  });
  svr.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, X-Annotator-Id");
    res.set_header("Access-Control-Max-Age", "600");
  });
  svr.set_exception_handler(
      [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        try {
          std::rethrow_exception(ep);
        } catch (const Error& e) {
          send_error(res, e.kind() == ErrorKind::Argument ? 400 : 500, e.what());
        } catch (const std::exception& e) {
          send_error(res, 500, e.what());
        }
      });

  const auto annotator_of = [this](const httplib::Request& req) {
    const auto h = req.get_header_value("X-Annotator-Id");
    return h.empty() ? options_.default_annotator : h;
  };

  // A meme counts as labeled when `annotator` (or, if empty, anyone) has
  // labeled it.
  const auto labeled = [this](const std::string& id, const std::string& annotator) {
    if (!annotator.empty()) return journal_->latest_for(id, annotator).has_value();
    return !journal_->for_meme(id).empty();
  };

  svr.Get("/api/guidelines", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, guidelines_json());
  });

  svr.Get("/api/memes", [this, annotator_of, labeled](const httplib::Request& req,
                                                      httplib::Response& res) {
    std::optional<dataset::Split> split;
    if (const auto raw = param(req, "split"); !raw.empty()) {
      split = dataset::parse_split(raw);
      if (!split) return send_error(res, 400, "unknown split \"" + raw + "\"");
    }
    const auto status = param(req, "status");
    if (!status.empty() && status != "labeled" && status != "unlabeled") {
      return send_error(res, 400, "status must be \"labeled\" or \"unlabeled\"");
    }
    std::size_t page = 1, page_size = 50;
    if (const auto raw = param(req, "page"); !raw.empty()) {
      const auto v = parse_positive(raw);
      if (!v) return send_error(res, 400, "page must be a positive integer");
      page = *v;
    }
    if (const auto raw = param(req, "page_size"); !raw.empty()) {
      const auto v = parse_positive(raw);
      if (!v || *v > options_.max_page_size) {
        return send_error(res, 400, "page_size must be between 1 and " +
                                        std::to_string(options_.max_page_size));
      }
      page_size = *v;
    }
    const auto annotator = req.has_header("X-Annotator-Id") ? annotator_of(req) : std::string();
    OrderedJson items = OrderedJson::array();
    std::size_t total = 0;
    const std::size_t first = (page - 1) * page_size;
    for (const auto i : by_id_) {
      const auto& r = manifest_.records()[i];
      if (split && r.split != split) continue;
      const bool is_labeled = labeled(r.id, annotator);
      if (status == "labeled" && !is_labeled) continue;
      if (status == "unlabeled" && is_labeled) continue;
      if (total >= first && total < first + page_size) {
        items.push_back({{"id", r.id},
                         {"split", split_json(r.split)},
                         {"image_url", image_url(r.id)},
                         {"status", is_labeled ? "labeled" : "unlabeled"}});
      }
      ++total;
    }
    send_json(res, 200,
              {{"items", items}, {"page", page}, {"page_size", page_size}, {"total", total}});
  });

  svr.Get(R"(/api/memes/([^/]+)/image)", [this](const httplib::Request& req,
                                               httplib::Response& res) {
    const auto* r = manifest_.find(req.matches[1]);
    if (!r) return send_error(res, 404, "unknown meme \"" + std::string(req.matches[1]) + "\"");
    const auto path = manifest_.resolve_image(*r);
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) return send_error(res, 404, "image not available");
    const auto bytes = read_file_bytes(path);
    res.status = 200;
    res.set_content(reinterpret_cast<const char*>(bytes.data()), bytes.size(),
                    agents::media_type_for(path));
  });

  svr.Get(R"(/api/memes/([^/]+))", [this, annotator_of](const httplib::Request& req,
                                                       httplib::Response& res) {
    const std::string id = req.matches[1];
    const auto* r = manifest_.find(id);
    if (!r) return send_error(res, 404, "unknown meme \"" + id + "\"");
    const auto annotator = annotator_of(req);
    OrderedJson body{{"id", r->id},
                     {"text", r->text},
                     {"split", split_json(r->split)},
                     {"propaganda", dataset::token(r->propaganda)},
                     {"image_url", image_url(r->id)},
                     {"annotator", annotator}};
    const auto own = journal_->latest_for(id, annotator);
    body["human_label"] = own ? dataset::to_json(own->label) : OrderedJson(nullptr);
    body["guidelines"] = guidelines_json();
    if (flag(req, "reveal") && run_) {
      if (const auto* m = run_->find(id)) {
        body["agent_labels"] = agent_labels_json(*run_, *m);
        body["consolidated"] = m->consolidated ? dataset::to_json(*m->consolidated) : OrderedJson(nullptr);
        body["method"] = m->method ? OrderedJson(pipeline::token(*m->method)) : OrderedJson(nullptr);
      }
    }
    send_json(res, 200, body);
  });

  svr.Post(R"(/api/memes/([^/]+)/label)", [this, annotator_of](const httplib::Request& req,
                                                              httplib::Response& res) {
    const std::string id = req.matches[1];
    if (!manifest_.find(id)) return send_error(res, 404, "unknown meme \"" + id + "\"");
    Json body;
    try {
      body = Json::parse(req.body);
    } catch (const Json::exception&) {
      return send_error(res, 400, "request body is not valid JSON");
    }
    if (!body.is_object() || !body.contains("coarse") || !body["coarse"].is_string()) {
      return send_error(res, 422, "label needs a \"coarse\" string");
    }
    const auto coarse = dataset::parse_coarse(body["coarse"].get<std::string>());
    if (!coarse) {
      return send_error(res, 422, "unknown coarse label",
                        {{"coarse", body["coarse"]}});
    }
    std::optional<dataset::FineLabel> fine;
    if (const auto it = body.find("fine"); it != body.end() && !it->is_null()) {
      if (!it->is_string()) return send_error(res, 422, "\"fine\" must be a string");
      fine = dataset::parse_fine(it->get<std::string>(), *coarse);
      if (!fine) return send_error(res, 422, "unknown fine label", {{"fine", *it}});
    }
    const auto label = HateLabel::try_make(*coarse, fine);
    if (!label) {
      return send_error(res, 422, "fine label does not belong to the coarse label's family",
                        {{"coarse", dataset::token(*coarse)},
                         {"fine", dataset::token(*fine)},
                         {"fine_family", dataset::token(dataset::family(*fine))}});
    }
    std::optional<double> elapsed;
    if (const auto it = body.find("elapsed_s"); it != body.end() && !it->is_null()) {
      if (!it->is_number() || it->get<double>() < 0) {
        return send_error(res, 422, "\"elapsed_s\" must be a non-negative number");
      }
      elapsed = it->get<double>();
    }
    const auto stored = journal_->append(id, annotator_of(req), *label, elapsed);
    send_json(res, 200, {{"stored", to_json(stored)}});
  });

  svr.Get("/api/disagreements", [this](const httplib::Request& req, httplib::Response& res) {
    OrderedJson items = OrderedJson::array();
    if (run_) {
      const bool reveal = flag(req, "reveal");
      for (const auto i : by_id_) {
        const auto* m = run_->find(manifest_.records()[i].id);
        if (!m || !disagrees(*m)) continue;
        OrderedJson e{{"id", m->meme_id}, {"split", split_json(manifest_.records()[i].split)}};
        if (reveal) e["agent_labels"] = agent_labels_json(*run_, *m);
        items.push_back(std::move(e));
      }
    }
    send_json(res, 200, {{"items", items}, {"total", items.size()}});
  });

  svr.Get("/api/progress", [this, annotator_of, labeled](const httplib::Request& req,
                                                         httplib::Response& res) {
    const auto annotator = req.has_header("X-Annotator-Id") ? annotator_of(req) : std::string();
    std::map<std::string, std::pair<std::size_t, std::size_t>> counts;  // split -> (total, labeled)
    for (const auto& r : manifest_.records()) {
      auto& c = counts[r.split ? std::string(dataset::token(*r.split)) : "unassigned"];
      ++c.first;
      if (labeled(r.id, annotator)) ++c.second;
    }
    OrderedJson splits = OrderedJson::object();
    std::size_t total = 0, done = 0;
    for (const char* name : {"train", "dev", "test", "unassigned"}) {
      const auto it = counts.find(name);
      if (it == counts.end()) continue;
      const auto [t, l] = it->second;
      splits[name] = {{"total", t}, {"labeled", l}, {"unlabeled", t - l}};
      total += t;
      done += l;
    }
    send_json(res, 200,
              {{"annotator", annotator.empty() ? OrderedJson(nullptr) : OrderedJson(annotator)},
               {"splits", splits},
               {"total", {{"total", total}, {"labeled", done}, {"unlabeled", total - done}}}});
  });

  svr.Get("/api/reports/agreement", [this](const httplib::Request& req, httplib::Response& res) {
    const auto raw_level = param(req, "level");
    const auto level = metrics::parse_level(raw_level.empty() ? "coarse" : raw_level);
    if (!level) return send_error(res, 400, "unknown level \"" + raw_level + "\"");

    const auto humans = journal_->latest();
    std::vector<pipeline::NamedLabels> sources;
    if (run_) {
      sources = pipeline::run_label_sources(*run_, humans);
    } else {
      std::vector<std::string> scope;
      for (const auto i : by_id_) scope.push_back(manifest_.records()[i].id);
      std::set<std::string> names;
      for (const auto& h : humans) names.insert(h.annotator);
      for (const auto& n : names) {
        sources.push_back({names.size() == 1 ? "human" : "human:" + n,
                           pipeline::collect_human_labels(scope, humans, "human:" + n).entries});
      }
    }
    std::vector<std::string> human_raters;
    for (const auto& src : sources) {
      if (src.name.rfind("human", 0) == 0) human_raters.push_back(src.name);
    }

    std::vector<metrics::NamedVector> vectors;
    for (const auto& src : sources) {
      vectors.push_back({src.name, metrics::to_label_vector(src.entries, *level).labels});
    }
    metrics::AgreementOptions opts;
    opts.level = std::string(metrics::token(*level));
    opts.human_raters = human_raters;
    send_json(res, 200, metrics::to_json(metrics::agreement_matrix(vectors, opts)));
  });

  svr.Get("/api/export/human", [this](const httplib::Request& req, httplib::Response& res) {
    std::vector<std::string> scope;
    if (run_) {
      for (const auto& m : run_->memes()) scope.push_back(m.meme_id);
    } else {
      for (const auto& r : manifest_.records()) scope.push_back(r.id);
    }
    const auto who = param(req, "annotator");
    const auto exported = pipeline::collect_human_labels(scope, journal_->latest(),
                                                         who.empty() ? "human" : "human:" + who);
    for (const auto& w : exported.warnings) res.set_header("X-Warning", w);
    res.status = 200;
    res.set_content(dataset::serialize_label_file(exported.entries), "application/x-ndjson");
  });
}

}  // namespace memeanno::service
