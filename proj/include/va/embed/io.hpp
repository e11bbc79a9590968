#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "va/embed/mds.hpp"

namespace va::embed {

/// `{"ids": [...], "D": d, "coordinates": [row-major values]}`
nlohmann::json embedding_to_json(const EmbeddingMatrix& emb, std::span<const std::string> ids);

struct LabeledEmbedding {
  std::vector<std::string> ids;
  EmbeddingMatrix coordinates;
};

LabeledEmbedding embedding_from_json(const nlohmann::json& j);

}  // namespace va::embed
