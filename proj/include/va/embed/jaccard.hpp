#pragma once

#include <set>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace va::embed {

using TokenSet = std::set<std::string, std::less<>>;

/// Lowercases and splits on every non-alphanumeric byte; empty pieces dropped.
TokenSet tokenize(std::string_view text);

/// 1 - |a & b| / |a | b|. Two empty sets are at distance 0.
double jaccard_distance(const TokenSet& a, const TokenSet& b);

/// Symmetric |S| x |S| Jaccard distance matrix over tokenized texts.
Eigen::MatrixXd jaccard_distance_matrix(std::span<const std::string> texts);

}  // namespace va::embed
