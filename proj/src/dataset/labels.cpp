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

#include "dataset/labels.hpp"

#include <algorithm>
#include <cctype>

#include "common/error.hpp"

namespace memeanno::dataset {

std::string_view token(CoarseLabel label) noexcept {
  return label == CoarseLabel::Hateful ? "hateful" : "not_hateful";
}

std::string_view token(FineLabel label) noexcept {
  switch (label) {
    case FineLabel::Dehumanizing: return "dehumanizing";
    case FineLabel::Inferiority: return "inferiority";
    case FineLabel::IncitingViolence: return "inciting_violence";
    case FineLabel::Mocking: return "mocking";
    case FineLabel::Contempt: return "contempt";
    case FineLabel::Slurs: return "slurs";
    case FineLabel::Exclusion: return "exclusion";
    case FineLabel::OtherHateful: return "other_hateful";
    case FineLabel::Humor: return "humor";
    case FineLabel::Sarcasm: return "sarcasm";
    case FineLabel::OtherNotHateful: return "other_not_hateful";
  }
  return "";
}

std::string_view display_name(CoarseLabel label) noexcept {
  return label == CoarseLabel::Hateful ? "Hateful" : "Not-Hateful";
}

std::string_view display_name(FineLabel label) noexcept {
  switch (label) {
    case FineLabel::Dehumanizing: return "Dehumanizing";
    case FineLabel::Inferiority: return "Inferiority";
    case FineLabel::IncitingViolence: return "Inciting violence";
    case FineLabel::Mocking: return "Mocking";
    case FineLabel::Contempt: return "Contempt";
    case FineLabel::Slurs: return "Slurs";
    case FineLabel::Exclusion: return "Exclusion";
    case FineLabel::OtherHateful: return "Other";
    case FineLabel::Humor: return "Humor";
    case FineLabel::Sarcasm: return "Sarcasm";
    case FineLabel::OtherNotHateful: return "Other";
  }
  return "";
}

std::string_view definition(CoarseLabel label) noexcept {
  if (label == CoarseLabel::Hateful) {
    return "A direct or indirect attack on people based on characteristics, including "
           "ethnicity, race, nationality, immigration status, religion, caste, sex, gender "
           "identity, sexual orientation, and disability or disease. We define attack as "
           "violent or dehumanizing (comparing people to non-human things, e.g., animals) "
           "speech, statements of inferiority, and calls for exclusion or segregation. "
           "Mocking hate crime is also considered hate speech. Attacking groups "
           "perpetuating hate (e.g. terrorist groups) is not considered hate.";
  }
  return "The content is humorous, neutral, or positive, without targeting or harming "
         "specific individuals or groups. It is light-hearted and intended for "
         "entertainment without being offensive. Additionally, the content does not "
         "promote or incite violence, hatred, or discrimination.";
}

std::string_view definition(FineLabel label) noexcept {
  switch (label) {
    case FineLabel::Dehumanizing:
      return "Explicitly or implicitly describing or presenting a group as subhuman.";
    case FineLabel::Inferiority:
      return "Claiming that a group is inferior, less worthy or less important than "
             "either society in general or another group";
    case FineLabel::IncitingViolence:
      return "Explicitly or implicitly calling for harm to be inflicted on a group, "
             "including physical attacks";
    case FineLabel::Mocking:
      return "Making jokes about, undermining, belittling, or disparaging a group";
    case FineLabel::Contempt:
      return "Expressing intensely negative feelings or emotions about a group";
    case FineLabel::Slurs:
      return "Using prejudicial terms to refer to, describe or characterize a group";
    case FineLabel::Exclusion:
      return "Advocating, planning or justifying the exclusion or segregation of a group "
             "from all of society or certain parts";
    case FineLabel::OtherHateful:
    case FineLabel::OtherNotHateful:
      return "None of the above";
    case FineLabel::Humor:
      return "The purpose of humor is to entertain, amuse, or bring joy to the audience. "
             "Often characterized by jokes, puns, or playful language. Humor can vary "
             "widely in style, including wit, slapstick, parody, and satire.";
    case FineLabel::Sarcasm:
      return "Typically involves saying the opposite of what one means. Sarcasm is a form "
             "of irony that always occurs with a deliberate mismatch between what is said "
             "and what is meant, intentionally to ridicule or mock a specific target.";
  }
  return "";
}

std::string normalize_token(std::string_view raw) {
  const auto first = raw.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = raw.find_last_not_of(" \t\r\n");
  raw = raw.substr(first, last - first + 1);
  std::string out;
  out.reserve(raw.size());
  for (char ch : raw) {
    const auto c = static_cast<unsigned char>(ch);
    if (c == '-' || c == ' ') {
      out.push_back('_');
    } else {
      out.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  return out;
}

std::optional<CoarseLabel> parse_coarse(std::string_view raw) {
  const std::string t = normalize_token(raw);
  if (t == "hateful" || t == "hate") return CoarseLabel::Hateful;
  if (t == "not_hateful" || t == "nothateful" || t == "non_hateful" || t == "not_hate")
    return CoarseLabel::NotHateful;
  return std::nullopt;
}

std::optional<FineLabel> parse_fine(std::string_view raw, CoarseLabel family_hint) {
  const std::string t = normalize_token(raw);
  if (t == "other" || t == "none_of_the_above") {
    return family_hint == CoarseLabel::Hateful ? FineLabel::OtherHateful
                                               : FineLabel::OtherNotHateful;
  }
  if (t == "humour") return FineLabel::Humor;
  if (t == "slur") return FineLabel::Slurs;
  for (FineLabel f : kFineLabels) {
    if (t == token(f)) return f;
  }
  return std::nullopt;
}

HateLabel::HateLabel(CoarseLabel coarse, std::optional<FineLabel> fine)
    : coarse_(coarse), fine_(fine) {
  if (fine && family(*fine) != coarse) {
    fail(ErrorKind::Schema, "fine label '" + std::string(token(*fine)) +
                                "' does not belong to coarse label '" +
                                std::string(token(coarse)) + "'");
  }
}

std::optional<HateLabel> HateLabel::try_make(CoarseLabel coarse, std::optional<FineLabel> fine) {
  if (fine && family(*fine) != coarse) return std::nullopt;
  return HateLabel(coarse, fine);
}

std::string describe(const HateLabel& label) {
  std::string out(token(label.coarse()));
  if (label.fine()) {
    out += '/';
    out += token(*label.fine());
  }
  return out;
}

HateLabel label_from_tokens(std::string_view coarse, std::optional<std::string_view> fine) {
  const auto c = parse_coarse(coarse);
  if (!c) fail(ErrorKind::Schema, "unknown coarse label '" + std::string(coarse) + "'");
  std::optional<FineLabel> f;
  if (fine && !normalize_token(*fine).empty()) {
    f = parse_fine(*fine, *c);
    if (!f) fail(ErrorKind::Schema, "unknown fine label '" + std::string(*fine) + "'");
  }
  return HateLabel(*c, f);
}

OrderedJson to_json(const HateLabel& label) {
  OrderedJson j;
  j["coarse"] = token(label.coarse());
  if (label.fine()) j["fine"] = token(*label.fine());
  return j;
}

HateLabel label_from_json(const Json& object) {
  if (!object.is_object()) fail(ErrorKind::Schema, "label must be a JSON object");
  const auto c = object.find("coarse");
  if (c == object.end() || !c->is_string())
    fail(ErrorKind::Schema, "label is missing string field 'coarse'");
  std::optional<std::string> fine;
  if (const auto f = object.find("fine"); f != object.end() && !f->is_null()) {
    if (!f->is_string()) fail(ErrorKind::Schema, "label field 'fine' must be a string");
    fine = f->get<std::string>();
  }
  return label_from_tokens(c->get<std::string>(),
                           fine ? std::optional<std::string_view>(*fine) : std::nullopt);
}

std::string_view token(Propaganda value) noexcept {
  return value == Propaganda::Propagandistic ? "propagandistic" : "not_propagandistic";
}

std::string_view token(Split value) noexcept {
  switch (value) {
    case Split::Train: return "train";
    case Split::Dev: return "dev";
    case Split::Test: return "test";
  }
  return "";
}

std::optional<Propaganda> parse_propaganda(std::string_view raw) {
  if (raw == "propagandistic") return Propaganda::Propagandistic;
  if (raw == "not_propagandistic") return Propaganda::NotPropagandistic;
  return std::nullopt;
}

std::optional<Split> parse_split(std::string_view raw) {
  for (Split s : kSplits) {
    if (raw == token(s)) return s;
  }
  return std::nullopt;
}

}  // namespace memeanno::dataset
