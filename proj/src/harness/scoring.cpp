#include "va/harness/scoring.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

namespace va::harness {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

double clamp_score(double v) { return std::clamp(v, kMinScore, kMaxScore); }

/// Parses digits[.digits] starting at `pos`; returns chars consumed (0 if none).
std::size_t scan_number(std::string_view s, std::size_t pos, double& value) {
  std::size_t i = pos;
  while (i < s.size() && is_digit(s[i])) ++i;
  if (i == pos) return 0;
  std::size_t end = i;
  if (i + 1 < s.size() && s[i] == '.' && is_digit(s[i + 1])) {
    end = i + 1;
    while (end < s.size() && is_digit(s[end])) ++end;
  }
  value = std::stod(std::string(s.substr(pos, end - pos)));
  return end - pos;
}

template <typename Clock = std::chrono::steady_clock>
double seconds_since(typename Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<std::string> stable_order(std::span<const Item> items, const std::vector<double>& scores) {
  std::vector<std::size_t> idx(items.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::vector<std::string> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(items[i].id);
  return out;
}

}  // namespace

std::optional<double> parse_score(std::string_view text) {
  const std::string body = oracle::strip_thinking(text);
  for (std::size_t i = 0; i < body.size(); ++i) {
    double v = 0.0;
    if (scan_number(body, i, v) > 0) return clamp_score(v);
  }
  return std::nullopt;
}

std::vector<double> parse_score_list(std::string_view text) {
  const std::string body = oracle::strip_thinking(text);
  std::vector<double> out;
  std::size_t i = 0;
  auto separator = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == ','; };
  while (i < body.size()) {
    while (i < body.size() && separator(body[i])) ++i;
    std::size_t j = i;
    while (j < body.size() && !separator(body[j])) ++j;
    std::string_view token(body.data() + i, j - i);
    // Tolerate a trailing sentence punctuation mark.
    while (!token.empty() && (token.back() == '.' || token.back() == ';')) token.remove_suffix(1);
    double v = 0.0;
    if (!token.empty() && scan_number(token, 0, v) == token.size()) out.push_back(clamp_score(v));
    i = j;
  }
  return out;
}

std::string markdown_list_entry(std::string_view text) {
  std::string out = "\n- ";
  for (char c : text) {
    out.push_back(c);
    if (c == '\n') out += "  ";
  }
  return out;
}

std::string render_iid_prompt(const oracle::PromptRegistry& registry, const Criteria& criteria, const Item& item) {
  return oracle::fill_template(registry.get(oracle::PromptRegistry::kIidScoring),
                               {{"criteria", criteria.text()}, {"item", item.text}});
}

std::string render_ar_prompt(const oracle::PromptRegistry& registry, const Criteria& criteria,
                             std::span<const Item> items) {
  std::string list;
  for (const auto& it : items) list += markdown_list_entry(it.text);
  return oracle::fill_template(registry.get(oracle::PromptRegistry::kArScoring),
                               {{"criteria", criteria.text()}, {"items", list}});
}

ScoringOutcome iid_scoring(std::span<const Item> items, const Criteria& criteria, oracle::TextGenerator& generator,
                           const oracle::PromptRegistry& registry, std::uint32_t retry_limit) {
  const auto start = std::chrono::steady_clock::now();
  ScoringOutcome out;
  out.scores.assign(items.size(), kMinScore);

  std::vector<std::size_t> open(items.size());
  std::iota(open.begin(), open.end(), std::size_t{0});
  for (std::uint32_t round = 0; !open.empty() && round <= retry_limit; ++round) {
    std::vector<std::string> prompts;
    prompts.reserve(open.size());
    for (auto i : open) prompts.push_back(render_iid_prompt(registry, criteria, items[i]));
    const auto replies = generator.generate(prompts);
    out.requests += prompts.size();
    ++out.calls;
    std::vector<std::size_t> failed;
    for (std::size_t k = 0; k < open.size(); ++k) {
      if (auto s = parse_score(replies.at(k))) {
        out.scores[open[k]] = *s;
      } else {
        failed.push_back(open[k]);
      }
    }
    open = std::move(failed);
  }
  out.flagged = open.size();
  out.order = stable_order(items, out.scores);
  out.wall_time = seconds_since(start);
  return out;
}

ScoringOutcome ar_scoring(std::span<const Item> items, const Criteria& criteria, oracle::TextGenerator& generator,
                          const oracle::PromptRegistry& registry) {
  const auto start = std::chrono::steady_clock::now();
  ScoringOutcome out;
  const std::string prompts[] = {render_ar_prompt(registry, criteria, items)};
  const auto replies = generator.generate(prompts);
  out.requests = 1;
  out.calls = 1;
  std::vector<double> parsed = parse_score_list(replies.at(0));
  const std::size_t n = items.size();
  out.flagged = parsed.size() > n ? parsed.size() - n : n - parsed.size();
  parsed.resize(n, kMinScore);
  out.scores = std::move(parsed);
  out.order = stable_order(items, out.scores);
  out.wall_time = seconds_since(start);
  return out;
}

SimulatedScorer::SimulatedScorer(std::vector<Entry> entries, double noise_stddev, std::uint64_t seed,
                                 double call_latency)
    : entries_(std::move(entries)), noise_(noise_stddev), seed_(seed), call_latency_(call_latency) {
  if (noise_ < 0.0) throw DomainError("score noise must be non-negative");
  // Longer texts first, so an item whose text contains another's wins the match.
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const Entry& a, const Entry& b) { return a.text.size() > b.text.size(); });
}

double SimulatedScorer::noisy_rating(const Entry& e) const {
  double value = e.rating;
  if (noise_ > 0.0) {
    std::mt19937_64 rng(hash_combine(seed_, fnv1a(e.text)));
    std::normal_distribution<double> gauss(0.0, noise_);
    value += gauss(rng);
  }
  return std::round(clamp_score(value) * 10.0) / 10.0;
}

std::string SimulatedScorer::reply(const std::string& prompt) const {
  // (position in prompt, entry); occupied ranges keep shorter texts from
  // matching inside longer ones.
  std::vector<std::pair<std::size_t, const Entry*>> found;
  std::vector<std::pair<std::size_t, std::size_t>> taken;
  for (const auto& e : entries_) {
    for (const std::string& needle : {e.text, markdown_list_entry(e.text).substr(3)}) {
      std::size_t pos = prompt.find(needle);
      bool hit = false;
      while (pos != std::string::npos) {
        const std::size_t end = pos + needle.size();
        const bool overlaps = std::any_of(taken.begin(), taken.end(),
                                          [&](const auto& r) { return pos < r.second && r.first < end; });
        if (!overlaps) {
          found.emplace_back(pos, &e);
          taken.emplace_back(pos, end);
          hit = true;
          break;
        }
        pos = prompt.find(needle, pos + 1);
      }
      if (hit) break;
    }
  }
  std::sort(found.begin(), found.end());
  std::string out;
  char buf[16];
  for (const auto& [pos, e] : found) {
    std::snprintf(buf, sizeof buf, "%.1f", noisy_rating(*e));
    if (!out.empty()) out += ' ';
    out += buf;
  }
  return out.empty() ? "I cannot tell." : out;
}

std::vector<std::string> SimulatedScorer::generate(std::span<const std::string> prompts) {
  std::vector<std::string> out;
  out.reserve(prompts.size());
  for (const auto& p : prompts) out.push_back(reply(p));
  if (!prompts.empty()) modeled_seconds_ += call_latency_;
  return out;
}

}  // namespace va::harness
