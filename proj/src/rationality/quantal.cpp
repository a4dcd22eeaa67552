#include "affectgate/rationality/quantal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace affectgate::rationality {

double log_sum_exp(double scale, std::span<const double> values) {
  double m = scale * values[0];
  for (double v : values) m = std::max(m, scale * v);
  double total = 0.0;
  for (double v : values) total += std::exp(scale * v - m);
  return m + std::log(total);
}

std::vector<double> quantal_probs(double lambda, std::span<const double> utilities) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("lambda must be a finite value >= 0");
  if (utilities.empty()) throw std::invalid_argument("quantal_probs needs at least one utility");
  for (double u : utilities)
    if (!std::isfinite(u)) throw std::invalid_argument("utilities must be finite");

  double m = lambda * utilities[0];
  for (double u : utilities) m = std::max(m, lambda * u);
  std::vector<double> q(utilities.size());
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    q[i] = std::exp(lambda * utilities[i] - m);
    total += q[i];
  }
  for (double& x : q) x /= total;
  return q;
}

}  // namespace affectgate::rationality
