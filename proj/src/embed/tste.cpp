#include "va/embed/tste.hpp"

#include <random>
#include <string>

namespace va::embed {

void TsteConfig::validate() const {
  if (dims < 2) throw DomainError("t-STE needs D >= 2");
  if (!(resolved_alpha() > 0.0)) throw DomainError("t-STE alpha must be positive");
  if (!(learning_rate > 0.0)) throw DomainError("t-STE learning rate must be positive");
  if (max_iters < 1) throw DomainError("t-STE max_iters must be positive");
  if (!(tolerance > 0.0)) throw DomainError("t-STE tolerance must be positive");
}

TsteFit fit_tste(TripletAnswerSet tas, std::size_t n, const TsteConfig& config) {
  config.validate();
  if (tas.triplets.empty()) throw DomainError("t-STE needs a non-empty answer set");
  if (tas.triplets.size() != tas.answers.size()) throw DomainError("triplet and answer counts differ");
  const auto rows = static_cast<Eigen::Index>(n);
  for (const auto& t : tas.triplets)
    if (t.anchor < 0 || t.near < 0 || t.far < 0 || t.anchor >= rows || t.near >= rows || t.far >= rows)
      throw DomainError("triplet index out of range for n = " + std::to_string(n));
  tas.canonicalize();
  const std::span<const Triplet> triplets(tas.triplets);
  const double alpha = config.resolved_alpha();

  constexpr double kMinStep = 1e-8;
  constexpr double kGrow = 1.1;

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> init(0.0, 0.1);  // variance 0.01
  EmbeddingMatrix x(rows, config.dims);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index d = 0; d < config.dims; ++d) x(i, d) = init(rng);

  double objective = tste_objective(x, triplets, alpha);
  double step = config.learning_rate;
  int it = 0;
  while (it < config.max_iters) {
    ++it;
    const EmbeddingMatrix grad = tste_gradient(x, triplets, alpha);
    bool accepted = false;
    double change = 0.0;
    while (step >= kMinStep) {
      EmbeddingMatrix candidate = x + step * grad;
      const double value = tste_objective(candidate, triplets, alpha);
      if (value >= objective) {
        change = (value - objective) / std::max(std::abs(objective), 1e-300);
        x = std::move(candidate);
        objective = value;
        step *= kGrow;
        accepted = true;
        break;
      }
      step /= 2.0;
    }
    if (!accepted || change < config.tolerance) break;
  }

  TsteFit fit;
  fit.violation_fraction = violation_fraction(x, triplets);
  fit.objective = objective;
  fit.iterations = it;
  fit.embedding = std::move(x);
  return fit;
}

}  // namespace va::embed
