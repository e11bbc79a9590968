#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "va/oracle/query.hpp"

namespace va::oracle {

/// `{criteria} Answer with a single word, yes or no. X: '{x}' Y: '{y}'`
std::string render_comparison_prompt(const ComparisonQuery& q);

/// Triplet prompt. The anchor is shown as Z and the candidates as X and Y,
/// so an answer of "X" means the anchor is closer to cand_y.
std::string render_triplet_prompt(const TripletQuery& q);

std::string render_prompt(const Query& q);

enum class Vocabulary { yes_no, x_y };

Vocabulary vocabulary_for(QueryKind kind) noexcept;

/// Removes `<think>...</think>` segments. An unterminated `<think>` swallows
/// the rest of the text; a stray `</think>` drops everything before it.
std::string strip_thinking(std::string_view raw);

/// First-token parse of a completion: "yes"/"x" -> true, "no"/"y" -> false,
/// anything else -> nullopt. Case-insensitive.
std::optional<bool> parse_binary_answer(std::string_view raw, Vocabulary vocabulary);

/// Named prompt templates for the scoring baselines. Placeholders:
/// `{criteria}` everywhere, `{item}` in the i.i.d. template, `{items}` in the
/// autoregressive one (replaced by a markdown list of the strings).
class PromptRegistry {
 public:
  static constexpr std::string_view kIidScoring = "iid_scoring";
  static constexpr std::string_view kArScoring = "ar_scoring";

  /// Registry holding the built-in templates.
  PromptRegistry();

  /// Built-ins overridden/extended by a JSON object of name -> template.
  static PromptRegistry load(const std::filesystem::path& path);

  const std::string& get(std::string_view name) const;
  void set(std::string name, std::string text);
  const std::map<std::string, std::string, std::less<>>& all() const noexcept { return templates_; }

 private:
  std::map<std::string, std::string, std::less<>> templates_;
};

/// Replaces every `{key}` with its value; unknown placeholders are left as-is.
std::string fill_template(std::string_view tmpl,
                          const std::map<std::string, std::string, std::less<>>& values);

}  // namespace va::oracle
