#include "va/oracle/cache.hpp"

#include <chrono>
#include <ctime>
#include <nlohmann/json.hpp>

namespace va::oracle {

namespace {

std::string utc_timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

QueryKind parse_kind(const std::string& s) {
  if (s == "comparison") return QueryKind::comparison;
  if (s == "triplet") return QueryKind::triplet;
  throw std::runtime_error("unknown query kind '" + s + "'");
}

}  // namespace

AnswerCache::AnswerCache(const std::filesystem::path& jsonl) {
  if (std::filesystem::exists(jsonl)) replay(jsonl);
  sink_.emplace(jsonl, std::ios::app);
  if (!*sink_) throw std::runtime_error("cannot open cache file " + jsonl.string() + " for append");
}

void AnswerCache::replay(const std::filesystem::path& jsonl) {
  std::ifstream in(jsonl);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      QueryKey k;
      k.kind = parse_kind(j.at("kind").get<std::string>());
      k.criteria_digest = std::stoull(j.at("criteria").get<std::string>(), nullptr, 16);
      k.first = j.at("first").get<std::string>();
      k.second = j.at("second").get<std::string>();
      k.third = j.value("third", std::string{});
      k.sample = j.at("sample").get<std::uint32_t>();
      entries_.try_emplace(std::move(k), j.at("answer").get<bool>());
    } catch (const std::exception& e) {
      throw std::runtime_error(jsonl.string() + ":" + std::to_string(lineno) + ": bad cache record: " + e.what());
    }
  }
}

std::optional<bool> AnswerCache::lookup(const QueryKey& key) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

bool AnswerCache::insert(const QueryKey& key, const std::string& raw, bool answer) {
  std::lock_guard lock(mutex_);
  auto [it, inserted] = entries_.try_emplace(key, answer);
  if (inserted && sink_) {
    nlohmann::json j = {
        {"kind", key.kind == QueryKind::comparison ? "comparison" : "triplet"},
        {"criteria", to_hex(key.criteria_digest)},
        {"first", key.first},
        {"second", key.second},
        {"third", key.third},
        {"sample", key.sample},
        {"raw", raw},
        {"answer", answer},
        {"timestamp", utc_timestamp()},
    };
    *sink_ << j.dump() << '\n';
    sink_->flush();
  }
  return it->second;
}

std::size_t AnswerCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

}  // namespace va::oracle
