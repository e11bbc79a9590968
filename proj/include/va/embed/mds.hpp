#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "va/core.hpp"

namespace va::embed {

template <typename Scalar>
using Embedding = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using EmbeddingMatrix = Embedding<double>;

struct PowerIterationOptions {
  double tolerance = 1e-9;   // max-norm change of the unit iterate
  int max_iterations = 10000;
};

namespace detail {

/// Deterministic start vector with no structure shared with the data.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> start_vector(Eigen::Index n, std::uint64_t salt) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::uint64_t h = splitmix64(salt * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(i));
    v(i) = static_cast<Scalar>(static_cast<double>(h >> 11) * 0x1.0p-53 - 0.5);
  }
  return v.normalized();
}

template <typename Scalar>
void orthogonalize(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v,
                   const std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& basis) {
  for (const auto& b : basis) v -= b.dot(v) * b;
}

/// Dominant eigenpair of a symmetric matrix restricted to the complement of
/// `basis`. Returns the Rayleigh quotient; `v` receives the unit eigenvector.
/// When the restricted operator vanishes, `v` is the orthogonalized start
/// vector, which is then a null vector. `v` is zero only if the basis
/// already spans the space.
template <typename Derived>
typename Derived::Scalar power_iterate(const Eigen::MatrixBase<Derived>& c,
                                       const std::vector<Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>>& basis,
                                       Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>& v,
                                       const PowerIterationOptions& opts, std::uint64_t salt) {
  using Scalar = typename Derived::Scalar;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = c.rows();
  v = start_vector<Scalar>(n, salt);
  orthogonalize(v, basis);
  if (v.norm() <= Scalar(1e-12)) {
    v.setZero();
    return Scalar(0);
  }
  v.normalize();

  const Scalar scale = c.cwiseAbs().maxCoeff();
  for (int it = 0; it < opts.max_iterations; ++it) {
    Vec w = c * v;
    orthogonalize(w, basis);
    const Scalar norm = w.norm();
    if (norm <= scale * Scalar(1e-14) || norm == Scalar(0)) return Scalar(0);
    w /= norm;
    // A negative dominant eigenvalue flips the sign every step.
    const Scalar change = std::min((w - v).cwiseAbs().maxCoeff(), (w + v).cwiseAbs().maxCoeff());
    v = w;
    if (change < Scalar(opts.tolerance)) break;
  }
  return v.dot(c * v);
}

}  // namespace detail

/// Classical (Torgerson) MDS: double-centres -1/2 * J * dm^2 * J and takes
/// the top-D eigenpairs by power iteration with deflation. Negative
/// eigenvalues are clamped to zero; row i of the result embeds item i.
///
/// Non-Euclidean inputs can have negative eigenvalues that dominate in
/// magnitude; the operator is shifted by the most negative eigenvalue first
/// so the iteration always targets the largest algebraic eigenvalues.
template <typename Derived>
Embedding<typename Derived::Scalar> classical_mds(const Eigen::MatrixBase<Derived>& dm, Eigen::Index dims,
                                                  const PowerIterationOptions& opts = {}) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  const Eigen::Index n = dm.rows();
  if (dm.cols() != n) throw DomainError("distance matrix must be square");
  if (dims < 1) throw DomainError("MDS dimension must be positive");
  if (dims >= n)
    throw DomainError("MDS dimension " + std::to_string(dims) + " must be below the point count " + std::to_string(n));
  if (!dm.allFinite()) throw DomainError("distance matrix has non-finite entries");

  const Mat sq = dm.cwiseProduct(dm);
  const Vec row_mean = sq.rowwise().mean();
  const Vec col_mean = sq.colwise().mean().transpose();
  const Scalar grand = sq.mean();
  Mat b = sq;
  b.colwise() -= row_mean;
  b.rowwise() -= col_mean.transpose();
  b.array() += grand;
  b *= Scalar(-0.5);
  b = (b + b.transpose()) / Scalar(2);

  std::vector<Vec> none;
  Vec v;
  const Scalar dominant = detail::power_iterate(b, none, v, opts, 1);
  Scalar shift = 0;
  if (dominant < 0) {
    shift = -dominant;
  } else {
    const Mat lowered = b - dominant * Mat::Identity(n, n);
    const Scalar lowest = detail::power_iterate(lowered, none, v, opts, 2) + dominant;
    shift = std::max(Scalar(0), -lowest);
  }
  const Mat shifted = b + shift * Mat::Identity(n, n);

  Embedding<Scalar> coords = Embedding<Scalar>::Zero(n, dims);
  std::vector<Vec> basis;
  for (Eigen::Index d = 0; d < dims; ++d) {
    const Scalar rho = detail::power_iterate(shifted, basis, v, opts, 3 + static_cast<std::uint64_t>(d));
    if (v.norm() == Scalar(0)) break;
    const Scalar lambda = std::max(Scalar(0), rho - shift);
    coords.col(d) = v * std::sqrt(lambda);
    basis.push_back(v);
  }
  return coords;
}

}  // namespace va::embed
