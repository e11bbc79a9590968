#include "va/oracle/prompt.hpp"

#include <cctype>
#include <fstream>
#include <nlohmann/json.hpp>

namespace va::oracle {

namespace {

constexpr std::string_view kIidTemplate =
    "I want to sort several strings. Given two strings X and Y, my comparison criteria is as "
    "follows: '{criteria}'. Assign a score to X below so that for any pair of strings X and Y, if "
    "the answer to the comparison criteria above is yes, the score of X is greater than the score "
    "of Y. Each score must be between 1 and 5 with one decimal place, where the score 5 means that "
    "X will most certainly satisfy the comparison against other strings, and the score 1 means the "
    "opposite. For example, if we compare the height of mountains, score 5 will be assigned to "
    "very tall mountains, and if we compare the quality of restaurants, score 1 implies that the "
    "food or the service is very bad. \nX: {item}";

constexpr std::string_view kArTemplate =
    "I want to sort several strings listed below. Given two strings X and Y, my comparison "
    "criteria is as follows: '{criteria}'. Assign a score to each string so that for any pair of "
    "strings X and Y, if the answer to the comparison criteria above is yes, the score of X is "
    "greater than the score of Y. Return the scores as a space-separated list. Each score must be "
    "between 1 and 5 with one decimal place, where the score 5 means that X will most certainly "
    "satisfy the comparison against other strings, and the score 1 means the opposite. For "
    "example, if we compare the height of mountains, score 5 will be assigned to very tall "
    "mountains, and if we compare the quality of restaurants, score 1 implies that the food or the "
    "service is very bad. \nstrings:{items}";

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string render_comparison_prompt(const ComparisonQuery& q) {
  std::string out = q.criteria().text();
  out += " Answer with a single word, yes or no. X: '";
  out += q.x().text;
  out += "' Y: '";
  out += q.y().text;
  out += "'";
  return out;
}

std::string render_triplet_prompt(const TripletQuery& q) {
  std::string out = q.criteria().text();
  out += " \nX: ";
  out += q.cand_y().text;
  out += "\nY: ";
  out += q.cand_z().text;
  out += "\nZ: ";
  out += q.anchor().text;
  out += "\n Answer either 'X' or 'Y'.";
  return out;
}

std::string render_prompt(const Query& q) {
  if (const auto* c = std::get_if<ComparisonQuery>(&q)) return render_comparison_prompt(*c);
  return render_triplet_prompt(std::get<TripletQuery>(q));
}

Vocabulary vocabulary_for(QueryKind kind) noexcept {
  return kind == QueryKind::comparison ? Vocabulary::yes_no : Vocabulary::x_y;
}

std::string strip_thinking(std::string_view raw) {
  static constexpr std::string_view open = "<think>";
  static constexpr std::string_view close = "</think>";

  std::string_view rest = raw;
  // Some servers drop the opening tag and only emit the closing one.
  if (auto c = rest.find(close); c != std::string_view::npos) {
    auto o = rest.find(open);
    if (o == std::string_view::npos || o > c) rest.remove_prefix(c + close.size());
  }

  std::string out;
  while (!rest.empty()) {
    auto o = rest.find(open);
    if (o == std::string_view::npos) {
      out.append(rest);
      break;
    }
    out.append(rest.substr(0, o));
    auto c = rest.find(close, o + open.size());
    if (c == std::string_view::npos) break;
    rest.remove_prefix(c + close.size());
  }
  return out;
}

std::optional<bool> parse_binary_answer(std::string_view raw, Vocabulary vocabulary) {
  const std::string text = strip_thinking(raw);
  std::size_t i = 0;
  while (i < text.size() && !is_alpha(text[i])) ++i;
  std::size_t j = i;
  while (j < text.size() && is_alpha(text[j])) ++j;
  std::string token;
  token.reserve(j - i);
  for (std::size_t k = i; k < j; ++k) token.push_back(lower(text[k]));

  if (vocabulary == Vocabulary::yes_no) {
    if (token == "yes") return true;
    if (token == "no") return false;
  } else {
    if (token == "x") return true;
    if (token == "y") return false;
  }
  return std::nullopt;
}

PromptRegistry::PromptRegistry() {
  templates_.emplace(std::string(kIidScoring), std::string(kIidTemplate));
  templates_.emplace(std::string(kArScoring), std::string(kArTemplate));
}

PromptRegistry PromptRegistry::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open prompt registry " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("prompt registry " + path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("prompt registry " + path.string() + " must be a JSON object");
  PromptRegistry reg;
  for (const auto& [name, value] : j.items()) {
    if (!value.is_string())
      throw std::runtime_error("prompt registry entry '" + name + "' must be a string");
    reg.set(name, value.get<std::string>());
  }
  return reg;
}

const std::string& PromptRegistry::get(std::string_view name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) throw std::out_of_range("unknown prompt template '" + std::string(name) + "'");
  return it->second;
}

void PromptRegistry::set(std::string name, std::string text) {
  templates_.insert_or_assign(std::move(name), std::move(text));
}

std::string fill_template(std::string_view tmpl,
                          const std::map<std::string, std::string, std::less<>>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      auto close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        auto it = values.find(tmpl.substr(i + 1, close - i - 1));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(tmpl[i++]);
  }
  return out;
}

}  // namespace va::oracle
