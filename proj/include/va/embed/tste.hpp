#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>

#include <Eigen/Core>

#include "va/embed/mds.hpp"
#include "va/embed/triplets.hpp"

namespace va::embed {

struct TsteConfig {
  Eigen::Index dims = 8;
  /// Degrees of freedom of the Student-t kernel; defaults to dims - 1.
  std::optional<double> alpha;
  double learning_rate = 1.0;
  int max_iters = 2000;
  double tolerance = 1e-7;  // relative objective change on an accepted step
  std::uint64_t seed = 0;

  double resolved_alpha() const { return alpha.value_or(static_cast<double>(dims) - 1.0); }
  void validate() const;
};

struct TsteFit {
  EmbeddingMatrix embedding;
  double objective = 0.0;
  double violation_fraction = 0.0;
  int iterations = 0;
};

namespace detail {

/// log of the unnormalized kernel (1 + d2/alpha)^(-(alpha+1)/2).
template <typename Scalar>
Scalar log_kernel(Scalar d2, Scalar alpha) {
  using std::log1p;
  return -(alpha + Scalar(1)) / Scalar(2) * log1p(d2 / alpha);
}

/// log(1 + exp(z)) without overflow.
template <typename Scalar>
Scalar softplus(Scalar z) {
  using std::exp;
  using std::log1p;
  return z > Scalar(0) ? z + log1p(exp(-z)) : log1p(exp(z));
}

template <typename Scalar>
Scalar logistic(Scalar z) {
  using std::exp;
  return z >= Scalar(0) ? Scalar(1) / (Scalar(1) + exp(-z)) : exp(z) / (Scalar(1) + exp(z));
}

}  // namespace detail

/// Probability that i sits closer to j than to l under the heavy-tailed kernel.
template <typename A, typename B, typename C>
typename A::Scalar tste_probability(const Eigen::MatrixBase<A>& xi, const Eigen::MatrixBase<B>& xj,
                                    const Eigen::MatrixBase<C>& xl, typename A::Scalar alpha) {
  using Scalar = typename A::Scalar;
  if (!(alpha > Scalar(0))) throw DomainError("t-STE alpha must be positive");
  const Scalar la = detail::log_kernel((xi - xj).squaredNorm(), alpha);
  const Scalar lb = detail::log_kernel((xi - xl).squaredNorm(), alpha);
  return detail::logistic(la - lb);
}

/// Sum of log p over the triplets (to be maximized). Triplets must be
/// canonical: the anchor is claimed closer to `near`.
template <typename Derived>
typename Derived::Scalar tste_objective(const Eigen::MatrixBase<Derived>& x, std::span<const Triplet> triplets,
                                        typename Derived::Scalar alpha) {
  using Scalar = typename Derived::Scalar;
  Scalar total = 0;
  for (const auto& t : triplets) {
    const Scalar la = detail::log_kernel((x.row(t.anchor) - x.row(t.near)).squaredNorm(), alpha);
    const Scalar lb = detail::log_kernel((x.row(t.anchor) - x.row(t.far)).squaredNorm(), alpha);
    total -= detail::softplus(lb - la);
  }
  return total;
}

/// Analytic gradient of tste_objective with respect to every coordinate.
///
/// With d_ij = |x_i - x_j|^2 and c = (alpha + 1) / alpha * (1 - p):
///   d/dx_i += -c (x_i - x_j) / (1 + d_ij/alpha) + c (x_i - x_l) / (1 + d_il/alpha)
/// and x_j, x_l receive the opposite of their respective terms.
template <typename Derived>
Embedding<typename Derived::Scalar> tste_gradient(const Eigen::MatrixBase<Derived>& x,
                                                  std::span<const Triplet> triplets,
                                                  typename Derived::Scalar alpha) {
  using Scalar = typename Derived::Scalar;
  using Row = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
  Embedding<Scalar> grad = Embedding<Scalar>::Zero(x.rows(), x.cols());
  for (const auto& t : triplets) {
    const Row dij = x.row(t.anchor) - x.row(t.near);
    const Row dil = x.row(t.anchor) - x.row(t.far);
    const Scalar qij = Scalar(1) + dij.squaredNorm() / alpha;
    const Scalar qil = Scalar(1) + dil.squaredNorm() / alpha;
    const Scalar la = detail::log_kernel(dij.squaredNorm(), alpha);
    const Scalar lb = detail::log_kernel(dil.squaredNorm(), alpha);
    const Scalar one_minus_p = detail::logistic(lb - la);
    const Scalar c = (alpha + Scalar(1)) / alpha * one_minus_p;
    const Row gj = (c / qij) * dij;
    const Row gl = (c / qil) * dil;
    grad.row(t.anchor) += gl - gj;
    grad.row(t.near) += gj;
    grad.row(t.far) -= gl;
  }
  return grad;
}

/// Fraction of canonical triplets with p < 0.5.
template <typename Derived>
double violation_fraction(const Eigen::MatrixBase<Derived>& x, std::span<const Triplet> triplets) {
  if (triplets.empty()) return 0.0;
  std::size_t bad = 0;
  for (const auto& t : triplets)
    if ((x.row(t.anchor) - x.row(t.near)).squaredNorm() > (x.row(t.anchor) - x.row(t.far)).squaredNorm()) ++bad;
  return static_cast<double>(bad) / static_cast<double>(triplets.size());
}

/// Fits an embedding to the answers by full-batch gradient ascent on the
/// triplet log-likelihood with backtracking. Starts from N(0, 0.01) i.i.d.
/// coordinates drawn from config.seed.
TsteFit fit_tste(TripletAnswerSet tas, std::size_t n, const TsteConfig& config);

}  // namespace va::embed
