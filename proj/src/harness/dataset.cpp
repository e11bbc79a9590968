#include "va/harness/dataset.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <unordered_set>

namespace va::harness {

namespace {

std::string id_string(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  throw std::invalid_argument("ids must be strings or integers");
}

}  // namespace

DatasetRecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("record must be a JSON object");
  DatasetRecord r;
  r.id = id_string(j.at("id"));
  r.text = j.at("text").get<std::string>();
  if (r.id.empty()) throw std::invalid_argument("empty id");
  if (r.text.empty()) throw std::invalid_argument("record '" + r.id + "' has empty text");
  if (auto it = j.find("ordinal"); it != j.end() && !it->is_null()) r.ordinal = it->get<double>();
  if (auto it = j.find("cluster"); it != j.end() && !it->is_null())
    r.cluster = it->is_string() ? it->get<std::string>() : it->dump();
  if (auto it = j.find("duplicate_of"); it != j.end() && !it->is_null()) {
    std::vector<std::string> links;
    for (const auto& v : *it) links.push_back(id_string(v));
    r.duplicate_of = std::move(links);
  }
  if (auto it = j.find("coordinates"); it != j.end() && !it->is_null())
    r.coordinates = it->get<std::vector<double>>();
  return r;
}

nlohmann::json record_to_json(const DatasetRecord& r) {
  nlohmann::json j = {{"id", r.id}, {"text", r.text}};
  if (r.ordinal) j["ordinal"] = *r.ordinal;
  if (r.cluster) j["cluster"] = *r.cluster;
  if (r.duplicate_of) j["duplicate_of"] = *r.duplicate_of;
  if (r.coordinates) j["coordinates"] = *r.coordinates;
  return j;
}

std::vector<DatasetRecord> parse_dataset(std::istream& in) {
  std::vector<DatasetRecord> out;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    DatasetRecord r;
    try {
      r = record_from_json(nlohmann::json::parse(line));
    } catch (const std::exception& e) {
      throw DatasetError(std::string("malformed record: ") + e.what(), lineno);
    }
    if (!ids.insert(r.id).second) throw DatasetError("duplicate id '" + r.id + "'", lineno);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open dataset " + path.string(), 0);
  return parse_dataset(in);
}

std::uint64_t dataset_digest(std::span<const DatasetRecord> records) {
  // Sum of per-record hashes: insensitive to record order.
  std::uint64_t acc = 0;
  for (const auto& r : records) acc += hash_combine(fnv1a(r.id), fnv1a(r.text));
  return splitmix64(acc ^ records.size());
}

std::vector<Item> to_items(std::span<const DatasetRecord> records) {
  std::vector<Item> items;
  items.reserve(records.size());
  for (const auto& r : records) items.push_back(r.item());
  return items;
}

}  // namespace va::harness
