#include "va/oracle/llm.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <thread>

#include "httplib.h"
#include "va/oracle/prompt.hpp"

namespace va::oracle {

namespace {

struct TransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Runs job(i) for i in [0, count) on up to `workers` threads; rethrows the
/// first exception after all threads have joined.
template <typename Job>
void parallel_for(std::size_t count, std::size_t workers, Job&& job) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

ParsedEndpoint parse_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("endpoint URL needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  ParsedEndpoint out;
  out.scheme_host_port = url.substr(0, path_start);
  std::string path = path_start == std::string::npos ? std::string{} : url.substr(path_start);
  while (!path.empty() && path.back() == '/') path.pop_back();
  static constexpr std::string_view suffix = "/chat/completions";
  if (path.size() < suffix.size() || path.compare(path.size() - suffix.size(), suffix.size(), suffix) != 0)
    path += suffix;
  out.path = path;
  return out;
}

std::string chat_request_body(const LlmConfig& config, const std::string& prompt, std::uint32_t n) {
  nlohmann::json body = {
      {"model", config.model_name},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", config.temperature},
      {"max_tokens", config.max_output_tokens},
      {"n", n},
  };
  return body.dump();
}

std::vector<std::string> parse_chat_response(const std::string& body) {
  const auto j = nlohmann::json::parse(body);
  std::vector<std::string> out;
  for (const auto& choice : j.at("choices")) {
    const auto& content = choice.at("message").at("content");
    out.push_back(content.is_null() ? std::string{} : content.get<std::string>());
  }
  return out;
}

LlmBackend::LlmBackend(LlmConfig config) : config_(std::move(config)), endpoint_(parse_endpoint(config_.endpoint_url)) {
  if (config_.temperature < 0.0) throw DomainError("temperature must be non-negative");
  if (config_.max_output_tokens == 0) throw DomainError("max_output_tokens must be positive");
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
  }
}

LlmBackend::~LlmBackend() = default;

std::vector<std::string> LlmBackend::complete(const std::string& prompt, std::uint32_t n) {
  const std::string body = chat_request_body(config_, prompt, n);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  std::string last_error;
  for (std::uint32_t attempt = 0; attempt <= config_.retry_limit; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(100) * (1u << std::min(attempt, 6u)));
    httplib::Client client(endpoint_.scheme_host_port);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    auto res = client.Post(endpoint_.path, headers, body, "application/json");
    if (!res) {
      last_error = "request failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200);
      continue;
    }
    try {
      auto choices = parse_chat_response(res->body);
      if (choices.size() < n) {
        last_error = "expected " + std::to_string(n) + " choices, got " + std::to_string(choices.size());
        continue;
      }
      choices.resize(n);
      return choices;
    } catch (const std::exception& e) {
      last_error = std::string("malformed response: ") + e.what();
    }
  }
  throw TransportError(endpoint_.scheme_host_port + endpoint_.path + ": " + last_error);
}

BatchResult LlmBackend::resolve(std::span<const SampleRequest> requests) {
  // Samples of the same query share one request with n = sample count.
  std::map<std::string, std::vector<std::size_t>> groups;
  std::vector<std::string> prompts(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i) {
    prompts[i] = render_prompt(requests[i].query);
    groups[prompts[i]].push_back(i);
  }
  std::vector<const std::pair<const std::string, std::vector<std::size_t>>*> order;
  for (const auto& g : groups) order.push_back(&g);

  BatchResult out;
  out.answers.resize(requests.size());
  parallel_for(order.size(), config_.max_concurrency, [&](std::size_t gi) {
    const auto& [prompt, members] = *order[gi];
    const Vocabulary vocab = vocabulary_for(kind_of(requests[members.front()].query));
    std::vector<std::size_t> open = members;
    for (std::uint32_t round = 0; !open.empty(); ++round) {
      std::vector<std::string> texts;
      try {
        texts = complete(prompt, static_cast<std::uint32_t>(open.size()));
      } catch (const TransportError& e) {
        throw BackendError(e.what(), make_key(requests[open.front()].query, requests[open.front()].sample));
      }
      std::vector<std::size_t> failed;
      for (std::size_t m = 0; m < open.size(); ++m) {
        RawAnswer& a = out.answers[open[m]];
        a.text = texts[m];
        if (auto v = parse_binary_answer(texts[m], vocab)) {
          a.value = *v;
        } else {
          ++a.parse_failures;
          a.value = false;
          failed.push_back(open[m]);
        }
      }
      if (round >= config_.retry_limit) break;
      open = std::move(failed);
    }
  });
  return out;
}

std::vector<std::string> LlmBackend::generate(std::span<const std::string> prompts) {
  std::vector<std::string> out(prompts.size());
  parallel_for(prompts.size(), config_.max_concurrency,
               [&](std::size_t i) { out[i] = complete(prompts[i], 1).front(); });
  return out;
}

}  // namespace va::oracle
