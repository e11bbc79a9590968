#include "va/embed/jaccard.hpp"

#include <algorithm>
#include <cctype>
#include <iterator>
#include <vector>

namespace va::embed {

TokenSet tokenize(std::string_view text) {
  TokenSet out;
  std::string token;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      token.push_back(static_cast<char>(std::tolower(c)));
    } else if (!token.empty()) {
      out.insert(std::move(token));
      token.clear();
    }
  }
  if (!token.empty()) out.insert(std::move(token));
  return out;
}

double jaccard_distance(const TokenSet& a, const TokenSet& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  const std::size_t united = a.size() + b.size() - common;
  return 1.0 - static_cast<double>(common) / static_cast<double>(united);
}

Eigen::MatrixXd jaccard_distance_matrix(std::span<const std::string> texts) {
  std::vector<TokenSet> tokens;
  tokens.reserve(texts.size());
  std::transform(texts.begin(), texts.end(), std::back_inserter(tokens), [](const auto& t) { return tokenize(t); });

  const auto n = static_cast<Eigen::Index>(texts.size());
  Eigen::MatrixXd dm = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) dm(i, j) = dm(j, i) = jaccard_distance(tokens[i], tokens[j]);
  return dm;
}

}  // namespace va::embed
