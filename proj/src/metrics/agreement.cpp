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

#include "metrics/agreement.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "common/error.hpp"
#include "common/text_table.hpp"

namespace memeanno::metrics {

using i128 = __int128;

LabelVector::LabelVector(std::vector<std::string> alphabet,
                         std::vector<std::pair<std::string, std::string>> items)
    : alphabet_(std::move(alphabet)), items_(std::move(items)) {
  by_id_.reserve(items_.size());
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const auto& [id, cls] = items_[i];
    if (!by_id_.emplace(id, i).second) fail(ErrorKind::Schema, "duplicate item id \"" + id + "\"");
    if (!in_alphabet(cls))
      fail(ErrorKind::Schema, "class \"" + cls + "\" for item \"" + id + "\" is not in the alphabet");
  }
}

const std::string* LabelVector::find(const std::string& id) const {
  const auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &items_[it->second].second;
}

bool LabelVector::in_alphabet(const std::string& token) const {
  return std::find(alphabet_.begin(), alphabet_.end(), token) != alphabet_.end();
}

namespace {

// (A / B) with both exact integers; one rounding.
double ratio(i128 num, i128 den) {
  return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

}  // namespace

KappaResult cohen_kappa_detail(const LabelVector& a, const LabelVector& b) {
  std::unordered_map<std::string, std::size_t> cls;
  auto class_of = [&](const std::string& t) {
    return cls.emplace(t, cls.size()).first->second;
  };

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(std::min(a.size(), b.size()));
  for (const auto& [id, ta] : a.items()) {
    if (const std::string* tb = b.find(id)) pairs.emplace_back(class_of(ta), class_of(*tb));
  }
  KappaResult r;
  r.n_items = pairs.size();
  r.dropped_a = a.size() - pairs.size();
  r.dropped_b = b.size() - pairs.size();
  if (pairs.empty()) fail(ErrorKind::Argument, "raters share no items");

  const std::size_t k = cls.size();
  std::vector<std::int64_t> row(k, 0), col(k, 0);
  std::int64_t agree = 0;
  for (const auto& [x, y] : pairs) {
    ++row[x];
    ++col[y];
    if (x == y) ++agree;
  }
  const i128 n = static_cast<i128>(pairs.size());
  i128 chance = 0;  // sum_c row_c * col_c == p_e * n^2
  for (std::size_t c = 0; c < k; ++c) chance += static_cast<i128>(row[c]) * col[c];

  if (chance == n * n) {
    if (agree == n) {
      r.kappa = 1.0;
      return r;
    }
    fail(ErrorKind::Degenerate, "chance agreement is 1 with imperfect observed agreement");
  }
  // (p_o - p_e) / (1 - p_e) scaled by n^2.
  r.kappa = ratio(static_cast<i128>(agree) * n - chance, n * n - chance);
  return r;
}

double fleiss_kappa(const std::vector<std::vector<std::int64_t>>& ratings, std::int64_t raters) {
  if (raters < 2) fail(ErrorKind::Argument, "Fleiss' kappa needs at least two raters");
  if (ratings.empty()) fail(ErrorKind::Argument, "Fleiss' kappa needs at least one item");
  const std::size_t k = ratings.front().size();
  std::vector<i128> totals(k, 0);
  i128 squares = 0;
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    if (ratings[i].size() != k) fail(ErrorKind::Argument, "ragged rating matrix");
    std::int64_t sum = 0;
    for (std::size_t c = 0; c < k; ++c) {
      const auto v = ratings[i][c];
      if (v < 0) fail(ErrorKind::Argument, "negative rating count");
      sum += v;
      squares += static_cast<i128>(v) * v;
      totals[c] += v;
    }
    if (sum != raters) {
      fail(ErrorKind::Argument, "item " + std::to_string(i) + " has " + std::to_string(sum) +
                                    " ratings, expected " + std::to_string(raters));
    }
  }
  const i128 n = static_cast<i128>(ratings.size());
  const i128 r = raters;
  // P_bar = (S - N r) / (N r (r-1)),  P_e = B / (N r)^2
  const i128 obs_num = squares - n * r;
  const i128 obs_den = n * r * (r - 1);
  i128 chance_num = 0;
  for (const auto t : totals) chance_num += t * t;
  const i128 chance_den = (n * r) * (n * r);

  if (chance_num == chance_den) {
    if (obs_num == obs_den) return 1.0;
    fail(ErrorKind::Degenerate, "chance agreement is 1 with imperfect observed agreement");
  }
  return ratio(obs_num * chance_den - chance_num * obs_den, obs_den * (chance_den - chance_num));
}

bool AgreementReport::degenerate() const {
  for (const auto& p : pairs) {
    if (!p.kappa) return true;
  }
  return multi_rater && !multi_rater->kappa;
}

AgreementReport agreement_matrix(const std::vector<NamedVector>& vectors,
                                 const AgreementOptions& options) {
  if (vectors.size() < 2) fail(ErrorKind::Argument, "agreement needs at least two raters");
  AgreementReport report;
  report.level = options.level;
  report.human_raters = options.human_raters;
  report.consolidator_raters = options.consolidator_raters;

  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = i + 1; j < vectors.size(); ++j) {
      PairAgreement p;
      p.rater_a = vectors[i].name;
      p.rater_b = vectors[j].name;
      try {
        const auto r = cohen_kappa_detail(vectors[i].labels, vectors[j].labels);
        p.kappa = r.kappa;
        p.n_items = r.n_items;
        p.dropped_a = r.dropped_a;
        p.dropped_b = r.dropped_b;
      } catch (const Error& e) {
        p.error = e.what();
      }
      report.pairs.push_back(std::move(p));
    }
  }

  if (vectors.size() >= 3) {
    std::set<std::string> ids;
    for (const auto& [id, cls] : vectors.front().labels.items()) ids.insert(id);
    bool identical = true;
    for (const auto& v : vectors) {
      if (v.labels.size() != ids.size()) identical = false;
      for (const auto& [id, cls] : v.labels.items()) identical = identical && ids.count(id);
    }
    if (!identical) {
      report.notes.push_back("multi-rater kappa omitted: raters do not share an identical item set");
    } else {
      MultiRaterAgreement m;
      for (const auto& v : vectors) m.raters.push_back(v.name);
      std::unordered_map<std::string, std::size_t> cls;
      std::vector<std::vector<std::int64_t>> ratings;
      for (const auto& v : vectors) {
        for (const auto& t : v.labels.alphabet()) cls.emplace(t, cls.size());
      }
      for (const auto& [id, first] : vectors.front().labels.items()) {
        std::vector<std::int64_t> row(cls.size(), 0);
        for (const auto& v : vectors) ++row[cls.at(*v.labels.find(id))];
        ratings.push_back(std::move(row));
      }
      m.n_items = ratings.size();
      try {
        m.kappa = fleiss_kappa(ratings, static_cast<std::int64_t>(vectors.size()));
      } catch (const Error& e) {
        m.error = e.what();
      }
      report.multi_rater = std::move(m);
    }
  }
  return report;
}

OrderedJson to_json(const AgreementReport& report) {
  OrderedJson j;
  j["kind"] = "agreement";
  j["level"] = report.level;
  j["human_raters"] = report.human_raters;
  j["consolidator_raters"] = report.consolidator_raters;
  OrderedJson pairs = OrderedJson::array();
  for (const auto& p : report.pairs) {
    OrderedJson e;
    e["rater_a"] = p.rater_a;
    e["rater_b"] = p.rater_b;
    e["kappa"] = p.kappa ? OrderedJson(*p.kappa) : OrderedJson(nullptr);
    e["n_items"] = p.n_items;
    e["dropped_a"] = p.dropped_a;
    e["dropped_b"] = p.dropped_b;
    if (!p.error.empty()) e["error"] = p.error;
    pairs.push_back(std::move(e));
  }
  j["pairs"] = pairs;
  if (report.multi_rater) {
    const auto& m = *report.multi_rater;
    OrderedJson e;
    e["statistic"] = "fleiss_kappa";
    e["raters"] = m.raters;
    e["kappa"] = m.kappa ? OrderedJson(*m.kappa) : OrderedJson(nullptr);
    e["n_items"] = m.n_items;
    if (!m.error.empty()) e["error"] = m.error;
    j["multi_rater"] = e;
  } else {
    j["multi_rater"] = nullptr;
  }
  j["notes"] = report.notes;
  return j;
}

namespace {

bool listed(const Json& names, const std::string& rater) {
  for (const auto& n : names) {
    if (n.get<std::string>() == rater) return true;
  }
  return false;
}

std::string kappa_text(const Json& k) {
  return k.is_number() ? format_fixed(k.get<double>(), 3) : std::string("undefined");
}

}  // namespace

std::string render_agreement(const Json& report) {
  const auto& humans = report.at("human_raters");
  const auto& consolidators = report.at("consolidator_raters");

  struct Line {
    std::string pair;
    std::string detail;
  };
  std::vector<Line> vs_consolidator, vs_human, pairwise;
  for (const auto& p : report.at("pairs")) {
    std::string a = p.at("rater_a").get<std::string>();
    std::string b = p.at("rater_b").get<std::string>();
    std::vector<Line>* group = &pairwise;
    if (listed(humans, a) || listed(humans, b)) {
      if (listed(humans, a)) std::swap(a, b);
      group = &vs_human;
    } else if (listed(consolidators, a) || listed(consolidators, b)) {
      if (listed(consolidators, a)) std::swap(a, b);
      group = &vs_consolidator;
    }
    std::string detail = "κ=" + kappa_text(p.at("kappa")) +
                         "  (n=" + std::to_string(p.at("n_items").get<std::size_t>());
    const auto da = p.at("dropped_a").get<std::size_t>();
    const auto db = p.at("dropped_b").get<std::size_t>();
    if (da || db) detail += ", dropped " + std::to_string(da) + "/" + std::to_string(db);
    detail += ")";
    if (p.contains("error")) detail += "  " + p.at("error").get<std::string>();
    group->push_back({a + " vs " + b, std::move(detail)});
  }

  std::size_t width = 0;
  for (const auto* g : {&vs_consolidator, &vs_human, &pairwise}) {
    for (const auto& l : *g) width = std::max(width, display_width(l.pair));
  }
  std::string out = "Annotation agreement (" + report.at("level").get<std::string>() +
                    " labels, Cohen's kappa)\n";
  auto section = [&](const char* title, const std::vector<Line>& lines) {
    if (lines.empty()) return;
    out += std::string("Agreement: ") + title + "\n";
    for (const auto& l : lines) {
      out += "  " + l.pair + ":" + std::string(width - display_width(l.pair) + 1, ' ') + l.detail + "\n";
    }
  };
  section("LLMs vs. LLM as a Consolidator", vs_consolidator);
  section("LLMs vs Human", vs_human);
  section("LLMs (Pairwise)", pairwise);

  if (const auto& m = report.at("multi_rater"); !m.is_null()) {
    std::string raters;
    for (const auto& r : m.at("raters")) raters += (raters.empty() ? "" : ", ") + r.get<std::string>();
    out += "Multi-rater (Fleiss' kappa, " + raters + "): κ=" + kappa_text(m.at("kappa")) +
           "  (n=" + std::to_string(m.at("n_items").get<std::size_t>()) + ")";
    if (m.contains("error")) out += "  " + m.at("error").get<std::string>();
    out += "\n";
  }
  for (const auto& n : report.at("notes")) out += "note: " + n.get<std::string>() + "\n";
  return out;
}

}  // namespace memeanno::metrics
