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

#include "metrics/evaluation.hpp"

#include <algorithm>
#include <unordered_map>

#include "common/error.hpp"
#include "common/text_table.hpp"

namespace memeanno::metrics {

namespace {

double safe_div(std::int64_t num, std::int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

EvalReport evaluate(const LabelVector& gold, const LabelVector& pred) {
  if (gold.size() == 0) fail(ErrorKind::Argument, "gold labels are empty");

  std::vector<std::string> missing;
  for (const auto& [id, g] : gold.items()) {
    const std::string* p = pred.find(id);
    if (!p) {
      missing.push_back(id);
      continue;
    }
    if (!gold.in_alphabet(*p))
      fail(ErrorKind::Schema, "predicted class \"" + *p + "\" for \"" + id + "\" is not in the alphabet");
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) list += (i ? ", " : "") + missing[i];
    if (missing.size() > 20) list += ", ... (" + std::to_string(missing.size() - 20) + " more)";
    fail(ErrorKind::Argument,
         std::to_string(missing.size()) + " gold items have no prediction: " + list);
  }

  std::vector<bool> present(gold.alphabet().size(), false);
  std::unordered_map<std::string, std::size_t> alpha;
  for (std::size_t i = 0; i < gold.alphabet().size(); ++i) alpha.emplace(gold.alphabet()[i], i);
  for (const auto& [id, g] : gold.items()) {
    present[alpha.at(g)] = true;
    present[alpha.at(*pred.find(id))] = true;
  }

  EvalReport r;
  std::vector<std::size_t> slot(gold.alphabet().size(), 0);
  for (std::size_t i = 0; i < present.size(); ++i) {
    if (!present[i]) continue;
    slot[i] = r.classes.size();
    r.classes.push_back(gold.alphabet()[i]);
  }
  const std::size_t k = r.classes.size();
  r.confusion.assign(k, std::vector<std::int64_t>(k, 0));
  std::int64_t correct = 0;
  for (const auto& [id, g] : gold.items()) {
    const std::size_t gi = slot[alpha.at(g)];
    const std::size_t pi = slot[alpha.at(*pred.find(id))];
    ++r.confusion[gi][pi];
    if (gi == pi) ++correct;
  }
  r.n = gold.size();
  r.ignored_predictions = pred.size() - gold.size();
  r.accuracy = static_cast<double>(correct) / static_cast<double>(r.n);

  double f1_sum = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    std::int64_t tp = r.confusion[c][c], support = 0, predicted = 0;
    for (std::size_t o = 0; o < k; ++o) {
      support += r.confusion[c][o];
      predicted += r.confusion[o][c];
    }
    ClassScore s;
    s.label = r.classes[c];
    s.support = support;
    s.predicted = predicted;
    s.precision = safe_div(tp, predicted);
    s.recall = safe_div(tp, support);
    // 2PR/(P+R) written over counts: 2TP / (2TP + FP + FN).
    s.f1 = safe_div(2 * tp, support + predicted);
    f1_sum += s.f1;
    r.per_class.push_back(std::move(s));
  }
  r.macro_f1 = f1_sum / static_cast<double>(k);
  return r;
}

OrderedJson to_json(const EvalReport& r, const std::string& level) {
  OrderedJson j;
  j["kind"] = "evaluation";
  j["level"] = level;
  j["n"] = r.n;
  j["accuracy"] = r.accuracy;
  j["macro_f1"] = r.macro_f1;
  j["classes"] = r.classes;
  j["confusion"] = r.confusion;
  OrderedJson per = OrderedJson::array();
  for (const auto& s : r.per_class) {
    per.push_back({{"label", s.label},
                   {"precision", s.precision},
                   {"recall", s.recall},
                   {"f1", s.f1},
                   {"support", s.support},
                   {"predicted", s.predicted}});
  }
  j["per_class"] = per;
  j["ignored_predictions"] = r.ignored_predictions;
  return j;
}

std::string render_evaluation(const Json& report) {
  std::string out = "Classification results (" + report.at("level").get<std::string>() +
                    ", n=" + std::to_string(report.at("n").get<std::size_t>()) + ")\n";
  TextTable headline({"Acc", "M-F1"}, {Align::Right, Align::Right});
  headline.add_row({format_fixed(report.at("accuracy").get<double>(), 3),
                    format_fixed(report.at("macro_f1").get<double>(), 3)});
  out += headline.render() + "\n";

  TextTable per({"Class", "P", "R", "F1", "Support", "Predicted"},
                {Align::Left, Align::Right, Align::Right, Align::Right, Align::Right, Align::Right});
  for (const auto& s : report.at("per_class")) {
    per.add_row({s.at("label").get<std::string>(), format_fixed(s.at("precision").get<double>(), 3),
                 format_fixed(s.at("recall").get<double>(), 3),
                 format_fixed(s.at("f1").get<double>(), 3),
                 format_count(s.at("support").get<std::int64_t>()),
                 format_count(s.at("predicted").get<std::int64_t>())});
  }
  out += per.render() + "\n";

  const auto classes = report.at("classes").get<std::vector<std::string>>();
  std::vector<std::string> header = {"gold \\ pred"};
  header.insert(header.end(), classes.begin(), classes.end());
  std::vector<Align> align(header.size(), Align::Right);
  align[0] = Align::Left;
  TextTable confusion(header, align);
  const auto& m = report.at("confusion");
  for (std::size_t i = 0; i < classes.size(); ++i) {
    std::vector<std::string> row = {classes[i]};
    for (std::size_t j = 0; j < classes.size(); ++j)
      row.push_back(format_count(m.at(i).at(j).get<std::int64_t>()));
    confusion.add_row(std::move(row));
  }
  out += confusion.render();
  if (const auto ignored = report.at("ignored_predictions").get<std::size_t>(); ignored > 0)
    out += std::to_string(ignored) + " predictions for items outside the gold set were ignored\n";
  return out;
}

}  // namespace memeanno::metrics
