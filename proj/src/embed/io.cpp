#include "va/embed/io.hpp"

#include <nlohmann/json.hpp>

namespace va::embed {

nlohmann::json embedding_to_json(const EmbeddingMatrix& emb, std::span<const std::string> ids) {
  if (static_cast<std::size_t>(emb.rows()) != ids.size()) throw DomainError("embedding rows and ids differ in count");
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(emb.size()));
  for (Eigen::Index i = 0; i < emb.rows(); ++i)
    for (Eigen::Index d = 0; d < emb.cols(); ++d) flat.push_back(emb(i, d));
  return {{"ids", std::vector<std::string>(ids.begin(), ids.end())}, {"D", emb.cols()}, {"coordinates", flat}};
}

LabeledEmbedding embedding_from_json(const nlohmann::json& j) {
  LabeledEmbedding out;
  j.at("ids").get_to(out.ids);
  const auto dims = j.at("D").get<Eigen::Index>();
  const auto flat = j.at("coordinates").get<std::vector<double>>();
  const auto rows = static_cast<Eigen::Index>(out.ids.size());
  if (dims < 1 || static_cast<Eigen::Index>(flat.size()) != rows * dims)
    throw DomainError("embedding JSON has inconsistent shape");
  out.coordinates.resize(rows, dims);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index d = 0; d < dims; ++d) out.coordinates(i, d) = flat[static_cast<std::size_t>(i * dims + d)];
  return out;
}

}  // namespace va::embed
