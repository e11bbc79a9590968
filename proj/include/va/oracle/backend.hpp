#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "va/oracle/query.hpp"

namespace va::oracle {

/// One draw of one query. Distinct sample indices are independent draws.
struct SampleRequest {
  Query query;
  std::uint32_t sample = 0;
};

struct RawAnswer {
  std::string text;             // completion text of the accepted (or last) attempt
  bool value = false;           // parsed answer, or the fallback when parsing failed
  std::uint32_t parse_failures = 0;
};

struct BatchResult {
  std::vector<RawAnswer> answers;  // positionally aligned with the requests
  /// Set by backends that model latency instead of measuring it.
  std::optional<double> modeled_seconds;
};

/// Raised when the backend cannot produce an answer (endpoint unreachable,
/// timeout after retries, ...). Carries the failing query.
class BackendError : public std::runtime_error {
 public:
  BackendError(const std::string& message, QueryKey failing)
      : std::runtime_error(message + " [query " + failing.describe() + "]"),
        message_(message),
        failing_(std::move(failing)) {}

  const QueryKey& failing_query() const noexcept { return failing_; }

  /// Same error with `context: ` prepended to the message.
  BackendError with_context(const std::string& context) const {
    return BackendError(context + ": " + message_, failing_);
  }

 private:
  std::string message_;
  QueryKey failing_;
};

/// Answers binary and triplet queries. Implementations must be safe for
/// concurrent calls to resolve().
class Backend {
 public:
  virtual ~Backend() = default;

  virtual BatchResult resolve(std::span<const SampleRequest> requests) = 0;

  /// Whether distinct sample indices give independent draws (false for an
  /// LLM at temperature 0, which makes K-voting pointless).
  virtual bool independent_samples() const noexcept = 0;
};

/// Free-form completion, used by the scoring baselines.
class TextGenerator {
 public:
  virtual ~TextGenerator() = default;

  /// One completion per prompt, positionally aligned.
  virtual std::vector<std::string> generate(std::span<const std::string> prompts) = 0;
};

}  // namespace va::oracle
