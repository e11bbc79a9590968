#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "va/oracle/backend.hpp"

namespace va::oracle {

struct LlmConfig {
  /// Base URL such as `http://localhost:8000/v1`, or the full
  /// `.../chat/completions` URL.
  std::string endpoint_url = "http://localhost:8000/v1";
  std::string model_name;
  double temperature = 0.6;
  std::uint32_t max_output_tokens = 4096;
  std::chrono::milliseconds timeout{std::chrono::minutes(5)};
  std::uint32_t retry_limit = 3;
  /// Environment variable holding the bearer token; unset means no auth header.
  std::string api_key_env = "OPENAI_API_KEY";
  std::size_t max_concurrency = 16;
};

struct ParsedEndpoint {
  std::string scheme_host_port;  // "http://host:port"
  std::string path;              // "/v1/chat/completions"
};

ParsedEndpoint parse_endpoint(const std::string& url);

/// Request body for one prompt with `n` sampled choices.
std::string chat_request_body(const LlmConfig& config, const std::string& prompt, std::uint32_t n);

/// Extracts `choices[*].message.content` from a chat-completions response.
std::vector<std::string> parse_chat_response(const std::string& body);

/// Oracle backend over an OpenAI-compatible `/chat/completions` endpoint.
///
/// All samples of one query travel in a single request (`n` = sample count).
/// Distinct queries in a batch are sent concurrently, bounded by
/// max_concurrency. Unparseable choices are re-requested up to retry_limit
/// times and then resolved to false.
class LlmBackend final : public Backend, public TextGenerator {
 public:
  explicit LlmBackend(LlmConfig config);
  ~LlmBackend() override;

  BatchResult resolve(std::span<const SampleRequest> requests) override;
  bool independent_samples() const noexcept override { return config_.temperature > 0.0; }

  std::vector<std::string> generate(std::span<const std::string> prompts) override;

  /// One HTTP round trip with transport retries; returns `n` completions.
  std::vector<std::string> complete(const std::string& prompt, std::uint32_t n);

  const LlmConfig& config() const noexcept { return config_; }

 private:
  LlmConfig config_;
  ParsedEndpoint endpoint_;
  std::string api_key_;
};

}  // namespace va::oracle
