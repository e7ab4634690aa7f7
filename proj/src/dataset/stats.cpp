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

#include "dataset/stats.hpp"

#include <cctype>
#include <set>
#include <unordered_set>

#include "common/error.hpp"
#include "common/text_table.hpp"

namespace memeanno::dataset {

namespace {

constexpr std::string_view kUnassigned = "unassigned";

std::size_t idx(CoarseLabel c) { return static_cast<std::size_t>(c); }
std::size_t idx(FineLabel f) { return static_cast<std::size_t>(f); }

std::string bucket_of(const MemeRecord& r) {
  return r.split ? std::string(token(*r.split)) : std::string(kUnassigned);
}

// Row order used by the distribution table.
constexpr std::array<FineLabel, 8> kHatefulRows = {
    FineLabel::Contempt,  FineLabel::Dehumanizing,     FineLabel::Mocking, FineLabel::Inferiority,
    FineLabel::Exclusion, FineLabel::IncitingViolence, FineLabel::Slurs,   FineLabel::OtherHateful,
};
constexpr std::array<FineLabel, 3> kNotHatefulRows = {FineLabel::Sarcasm, FineLabel::Humor,
                                                      FineLabel::OtherNotHateful};

}  // namespace

LabelIndex index_labels(const std::vector<LabelEntry>& entries) {
  LabelIndex out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    if (!out.emplace(e.id, e.label).second)
      fail(ErrorKind::Schema, "duplicate label for id \"" + e.id + "\"");
  }
  return out;
}

std::int64_t SplitCounts::fine_family_total(CoarseLabel fam) const {
  std::int64_t total = 0;
  for (FineLabel f : kFineLabels) {
    if (family(f) == fam) total += fine[idx(f)];
  }
  return total;
}

DistributionReport distribution(const Manifest& manifest, const std::vector<LabelEntry>& coarse_layer,
                                const std::vector<LabelEntry>* fine_layer) {
  DistributionReport report;
  const LabelIndex coarse = index_labels(coarse_layer);

  std::set<std::string> present;
  for (const auto& r : manifest.records()) present.insert(bucket_of(r));
  for (Split s : kSplits) {
    if (present.count(std::string(token(s)))) report.buckets.emplace_back(token(s));
  }
  if (present.count(std::string(kUnassigned))) report.buckets.emplace_back(kUnassigned);
  for (const auto& b : report.buckets) report.per_split[b];

  for (const auto& r : manifest.records()) {
    auto& counts = report.per_split[bucket_of(r)];
    ++counts.records;
    const auto it = coarse.find(r.id);
    if (it == coarse.end()) {
      ++counts.unlabeled;
      continue;
    }
    ++counts.coarse[idx(it->second.coarse())];
    if (!fine_layer && it->second.fine()) {
      ++counts.fine[idx(*it->second.fine())];
      ++counts.fine_entries;
    }
  }

  std::size_t orphans = 0;
  for (const auto& e : coarse_layer) {
    if (!manifest.find(e.id)) ++orphans;
  }

  std::map<std::string, std::int64_t> contradictions;
  std::map<std::string, std::int64_t> repeated;
  if (fine_layer) {
    std::unordered_map<std::string, int> seen;
    for (const auto& e : *fine_layer) {
      const MemeRecord* r = manifest.find(e.id);
      if (!r) {
        ++orphans;
        continue;
      }
      if (!e.label.fine()) continue;
      const std::string b = bucket_of(*r);
      auto& counts = report.per_split[b];
      ++counts.fine[idx(*e.label.fine())];
      ++counts.fine_entries;
      if (++seen[e.id] == 2) ++repeated[b];
      const auto c = coarse.find(e.id);
      if (c != coarse.end() && c->second.coarse() != family(*e.label.fine())) ++contradictions[b];
    }
  }

  for (const auto& b : report.buckets) {
    const auto& counts = report.per_split.at(b);
    if (counts.unlabeled > 0) {
      report.warnings.push_back(b + ": " + std::to_string(counts.unlabeled) +
                                " records have no coarse label");
    }
    for (CoarseLabel c : kCoarseLabels) {
      const auto fine_total = counts.fine_family_total(c);
      if (fine_total != counts.coarse[idx(c)]) {
        report.warnings.push_back(b + ": fine-grained " + std::string(token(c)) + " total " +
                                  std::to_string(fine_total) + " differs from coarse " +
                                  std::string(token(c)) + " count " +
                                  std::to_string(counts.coarse[idx(c)]));
      }
    }
    if (const auto it = contradictions.find(b); it != contradictions.end()) {
      report.warnings.push_back(b + ": " + std::to_string(it->second) +
                                " fine-grained entries belong to a different family than the "
                                "record's coarse label");
    }
    if (const auto it = repeated.find(b); it != repeated.end()) {
      report.warnings.push_back(b + ": " + std::to_string(it->second) +
                                " records carry more than one fine-grained label");
    }
  }
  if (orphans > 0) {
    report.warnings.push_back(std::to_string(orphans) +
                              " label entries reference ids not in the manifest");
  }
  return report;
}

std::int64_t CrossTab::row_total(Propaganda p) const {
  const auto& row = counts[static_cast<std::size_t>(p)];
  return row[0] + row[1];
}

std::int64_t CrossTab::column_total(CoarseLabel c) const {
  return counts[0][idx(c)] + counts[1][idx(c)];
}

std::int64_t CrossTab::total() const {
  return row_total(Propaganda::Propagandistic) + row_total(Propaganda::NotPropagandistic);
}

std::optional<double> CrossTab::hateful_share() const {
  const auto prop = row_total(Propaganda::Propagandistic);
  if (prop == 0) return std::nullopt;
  return static_cast<double>(counts[0][idx(CoarseLabel::Hateful)]) / static_cast<double>(prop);
}

CrossTab crosstab(const Manifest& manifest, const LabelIndex& labels, std::optional<Split> split) {
  CrossTab t;
  t.scope = split ? std::string(token(*split)) : "all";
  for (const auto& r : manifest.records()) {
    if (split && r.split != split) continue;
    const auto it = labels.find(r.id);
    if (it == labels.end()) {
      ++t.excluded_unlabeled;
      continue;
    }
    ++t.counts[static_cast<std::size_t>(r.propaganda)][idx(it->second.coarse())];
  }
  return t;
}

std::map<std::string, double> class_weights(const std::map<std::string, std::int64_t>& counts) {
  if (counts.empty()) fail(ErrorKind::Argument, "class weights need at least one class");
  std::int64_t total = 0;
  for (const auto& [name, n] : counts) {
    if (n <= 0) fail(ErrorKind::Argument, "class '" + name + "' has zero count");
    total += n;
  }
  const double k = static_cast<double>(counts.size());
  std::map<std::string, double> out;
  for (const auto& [name, n] : counts) {
    out[name] = static_cast<double>(total) / (k * static_cast<double>(n));
  }
  return out;
}

OrderedJson to_json(const DistributionReport& report) {
  OrderedJson j;
  j["splits"] = report.buckets;
  OrderedJson per = OrderedJson::object();
  for (const auto& b : report.buckets) {
    const auto& c = report.per_split.at(b);
    OrderedJson s;
    s["records"] = c.records;
    s["unlabeled"] = c.unlabeled;
    s["coarse"] = {{"hateful", c.coarse[0]}, {"not_hateful", c.coarse[1]}};
    OrderedJson fine = OrderedJson::object();
    for (FineLabel f : kFineLabels) fine[std::string(token(f))] = c.fine[idx(f)];
    s["fine"] = fine;
    s["fine_entries"] = c.fine_entries;
    per[b] = s;
  }
  j["per_split"] = per;
  j["warnings"] = report.warnings;
  return j;
}

OrderedJson to_json(const CrossTab& t) {
  OrderedJson j;
  j["scope"] = t.scope;
  OrderedJson counts;
  for (Propaganda p : {Propaganda::Propagandistic, Propaganda::NotPropagandistic}) {
    const auto& row = t.counts[static_cast<std::size_t>(p)];
    counts[std::string(token(p))] = {{"hateful", row[0]}, {"not_hateful", row[1]}};
  }
  j["counts"] = counts;
  j["excluded_unlabeled"] = t.excluded_unlabeled;
  if (const auto share = t.hateful_share()) {
    j["hateful_share_of_propagandistic"] = *share;
  } else {
    j["hateful_share_of_propagandistic"] = "undefined";
  }
  return j;
}

OrderedJson stats_report(const Manifest& manifest, const std::vector<LabelEntry>& coarse_layer,
                         const std::vector<LabelEntry>* fine_layer,
                         std::optional<Split> crosstab_split) {
  OrderedJson j;
  j["kind"] = "stats";
  const auto dist = distribution(manifest, coarse_layer, fine_layer);
  j["distribution"] = to_json(dist);
  j["crosstab"] = to_json(crosstab(manifest, index_labels(coarse_layer), crosstab_split));

  // Weights from the training split when it exists, otherwise from every
  // labeled record.
  const bool has_train = dist.per_split.count("train") > 0;
  std::map<std::string, std::int64_t> counts;
  for (const auto& [bucket, c] : dist.per_split) {
    if (has_train && bucket != "train") continue;
    counts["hateful"] += c.coarse[0];
    counts["not_hateful"] += c.coarse[1];
  }
  OrderedJson weights;
  weights["scope"] = has_train ? "train" : "all";
  weights["formula"] = "N/(K*N_c)";
  weights["counts"] = counts;
  try {
    weights["weights"] = class_weights(counts);
  } catch (const Error& e) {
    weights["weights"] = nullptr;
    weights["error"] = e.what();
  }
  j["class_weights"] = weights;
  return j;
}

namespace {

std::string render_distribution(const Json& d) {
  std::vector<std::string> header = {"Label"};
  std::vector<std::string> buckets = d.at("splits").get<std::vector<std::string>>();
  for (const auto& b : buckets) {
    std::string name = b;
    name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    header.push_back(name);
  }
  std::vector<Align> align(header.size(), Align::Right);
  align[0] = Align::Left;
  TextTable table(header, align);
  auto count = [&](const std::string& b, const char* group, std::string_view key) {
    return d.at("per_split").at(b).at(group).at(std::string(key)).get<std::int64_t>();
  };
  auto row = [&](std::string label, auto value_of) {
    std::vector<std::string> cells = {std::move(label)};
    for (const auto& b : buckets) cells.push_back(format_count(value_of(b)));
    table.add_row(std::move(cells));
  };

  table.add_section("Hate/Not-hate");
  for (CoarseLabel c : kCoarseLabels) {
    row(std::string(display_name(c)), [&](const std::string& b) { return count(b, "coarse", token(c)); });
  }
  row("Total", [&](const std::string& b) {
    return count(b, "coarse", "hateful") + count(b, "coarse", "not_hateful");
  });
  table.add_rule();
  table.add_section("Hate: Fine-grained categories");
  for (FineLabel f : kHatefulRows) {
    row(std::string(display_name(f)), [&](const std::string& b) { return count(b, "fine", token(f)); });
  }
  row("Total", [&](const std::string& b) {
    std::int64_t s = 0;
    for (FineLabel f : kHatefulRows) s += count(b, "fine", token(f));
    return s;
  });
  table.add_rule();
  table.add_section("Non-Hate: Fine-grained categories");
  for (FineLabel f : kNotHatefulRows) {
    row(std::string(display_name(f)), [&](const std::string& b) { return count(b, "fine", token(f)); });
  }
  row("Total", [&](const std::string& b) {
    std::int64_t s = 0;
    for (FineLabel f : kNotHatefulRows) s += count(b, "fine", token(f));
    return s;
  });
  bool any_unlabeled = false;
  for (const auto& b : buckets)
    any_unlabeled |= d.at("per_split").at(b).at("unlabeled").get<std::int64_t>() > 0;
  if (any_unlabeled) {
    table.add_rule();
    row("Unlabeled", [&](const std::string& b) {
      return d.at("per_split").at(b).at("unlabeled").get<std::int64_t>();
    });
  }

  std::string out = "Distribution of annotated data\n" + table.render();
  for (const auto& w : d.at("warnings")) out += "warning: " + w.get<std::string>() + "\n";
  return out;
}

std::string render_crosstab(const Json& c) {
  TextTable t({"Propaganda", "Hateful", "Not-Hateful", "Total"},
              {Align::Left, Align::Right, Align::Right, Align::Right});
  std::int64_t col_h = 0, col_n = 0;
  for (const char* key : {"propagandistic", "not_propagandistic"}) {
    const auto& row = c.at("counts").at(key);
    const auto h = row.at("hateful").get<std::int64_t>();
    const auto n = row.at("not_hateful").get<std::int64_t>();
    col_h += h;
    col_n += n;
    t.add_row({std::string(key) == "propagandistic" ? "Propagandistic" : "Not propagandistic",
               format_count(h), format_count(n), format_count(h + n)});
  }
  t.add_rule();
  t.add_row({"Total", format_count(col_h), format_count(col_n), format_count(col_h + col_n)});

  std::string out = "Propaganda x hate (" + c.at("scope").get<std::string>() + ")\n" + t.render();
  const auto& prop = c.at("counts").at("propagandistic");
  const auto ph = prop.at("hateful").get<std::int64_t>();
  const auto pt = ph + prop.at("not_hateful").get<std::int64_t>();
  const auto& share = c.at("hateful_share_of_propagandistic");
  out += "Hateful share of propagandistic: ";
  if (share.is_number()) {
    out += std::to_string(ph) + "/" + std::to_string(pt) + " = " + format_fixed(share.get<double>(), 3);
  } else {
    out += "undefined (no propagandistic records)";
  }
  out += "\n";
  if (const auto ex = c.at("excluded_unlabeled").get<std::int64_t>(); ex > 0)
    out += "(" + std::to_string(ex) + " unlabeled records excluded)\n";
  return out;
}

std::string render_weights(const Json& w) {
  std::string out = "Class weights (" + w.at("scope").get<std::string>() + ", " +
                    w.at("formula").get<std::string>() + ")\n";
  if (w.at("weights").is_null()) {
    return out + "unavailable: " + w.at("error").get<std::string>() + "\n";
  }
  TextTable t({"Class", "Count", "Weight"}, {Align::Left, Align::Right, Align::Right});
  for (const auto& [name, weight] : w.at("weights").items()) {
    t.add_row({name, format_count(w.at("counts").at(name).get<std::int64_t>()),
               format_fixed(weight.get<double>(), 4)});
  }
  return out + t.render();
}

}  // namespace

std::string render_stats(const Json& report) {
  return render_distribution(report.at("distribution")) + "\n" +
         render_crosstab(report.at("crosstab")) + "\n" + render_weights(report.at("class_weights"));
}

OrderedJson ingest_report(const Manifest& manifest, bool images_checked) {
  OrderedJson j;
  j["kind"] = "ingest";
  j["records"] = manifest.size();
  j["digest"] = manifest.digest();
  j["images_checked"] = images_checked;
  std::map<std::string, std::array<std::int64_t, 2>> per;
  std::int64_t empty_text = 0;
  for (const auto& r : manifest.records()) {
    ++per[bucket_of(r)][static_cast<std::size_t>(r.propaganda)];
    if (r.text.empty()) ++empty_text;
  }
  OrderedJson splits = OrderedJson::object();
  for (const auto& [b, c] : per) {
    splits[b] = {{"propagandistic", c[0]}, {"not_propagandistic", c[1]}};
  }
  j["per_split"] = splits;
  j["empty_text"] = empty_text;
  return j;
}

std::string render_ingest(const Json& report) {
  TextTable t({"Split", "Propagandistic", "Not propagandistic", "Total"},
              {Align::Left, Align::Right, Align::Right, Align::Right});
  for (const auto& [b, c] : report.at("per_split").items()) {
    const auto p = c.at("propagandistic").get<std::int64_t>();
    const auto n = c.at("not_propagandistic").get<std::int64_t>();
    t.add_row({b, format_count(p), format_count(n), format_count(p + n)});
  }
  std::string out = "Manifest OK: " + format_count(report.at("records").get<std::int64_t>()) +
                    " records" + (report.at("images_checked").get<bool>() ? "" : " (image check skipped)") +
                    "\n" + t.render();
  if (const auto e = report.at("empty_text").get<std::int64_t>(); e > 0)
    out += std::to_string(e) + " records have empty text\n";
  return out;
}

}  // namespace memeanno::dataset
