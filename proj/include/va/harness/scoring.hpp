#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "va/core.hpp"
#include "va/oracle/backend.hpp"
#include "va/oracle/prompt.hpp"

namespace va::harness {

inline constexpr double kMinScore = 1.0;
inline constexpr double kMaxScore = 5.0;

/// First decimal number (digits with at most one decimal point) in the text,
/// after dropping thinking segments, clamped to [1, 5].
std::optional<double> parse_score(std::string_view text);

/// Every whitespace/comma separated token that is a decimal number, clamped.
std::vector<double> parse_score_list(std::string_view text);

/// `- text` list entry; continuation lines are indented.
std::string markdown_list_entry(std::string_view text);

std::string render_iid_prompt(const oracle::PromptRegistry& registry, const Criteria& criteria, const Item& item);
std::string render_ar_prompt(const oracle::PromptRegistry& registry, const Criteria& criteria,
                             std::span<const Item> items);

struct ScoringOutcome {
  std::vector<std::string> order;  // ascending by score, ties in input order
  std::vector<double> scores;      // aligned with the input items
  std::size_t flagged = 0;         // items that fell back to a default score
  std::size_t requests = 0;        // prompts sent
  std::size_t calls = 0;           // generate() invocations
  double wall_time = 0.0;
};

/// Scores each item independently; unparseable replies are retried up to
/// `retry_limit` times and then scored 1.0 and flagged.
ScoringOutcome iid_scoring(std::span<const Item> items, const Criteria& criteria, oracle::TextGenerator& generator,
                           const oracle::PromptRegistry& registry = {}, std::uint32_t retry_limit = 3);

/// Scores all items with one prompt. Missing scores are padded with 1.0 and
/// extras dropped; each padded or dropped position counts as flagged.
ScoringOutcome ar_scoring(std::span<const Item> items, const Criteria& criteria, oracle::TextGenerator& generator,
                          const oracle::PromptRegistry& registry = {});

/// Stand-in model for the scoring prompts: finds the known item texts in a
/// prompt and replies with their ground-truth ratings plus Gaussian noise,
/// one decimal place. Noise depends only on (seed, item text).
class SimulatedScorer final : public oracle::TextGenerator {
 public:
  struct Entry {
    std::string text;
    double rating;
  };

  SimulatedScorer(std::vector<Entry> entries, double noise_stddev, std::uint64_t seed, double call_latency = 1.0);

  std::vector<std::string> generate(std::span<const std::string> prompts) override;

  /// Modeled seconds spent so far (one call per generate()).
  double modeled_seconds() const noexcept { return modeled_seconds_; }

 private:
  double noisy_rating(const Entry& e) const;
  std::string reply(const std::string& prompt) const;

  std::vector<Entry> entries_;
  double noise_;
  std::uint64_t seed_;
  double call_latency_;
  double modeled_seconds_ = 0.0;
};

}  // namespace va::harness
