#include "affectgate/rationality/lambda_fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "affectgate/rationality/quantal.hpp"

namespace affectgate::rationality {

double log_likelihood(double lambda, const ChoiceDataset& data) {
  double total = 0.0;
  for (std::size_t r = 0; r < data.size(); ++r) {
    const auto g = data.utilities(r);
    total += lambda * g[data.chosen(r)] - log_sum_exp(lambda, g);
  }
  return total;
}

double log_likelihood_slope(double lambda, const ChoiceDataset& data) {
  double total = 0.0;
  for (std::size_t r = 0; r < data.size(); ++r) {
    const auto g = data.utilities(r);
    const auto q = quantal_probs(lambda, g);
    double mean = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) mean += q[j] * g[j];
    total += g[data.chosen(r)] - mean;
  }
  return total;
}

namespace {

void check_search(const LambdaSearch& search) {
  if (!(search.lambda_max > 0.0) || !(search.tolerance > 0.0))
    throw std::invalid_argument("lambda search needs lambda_max > 0 and tolerance > 0");
}

}  // namespace

RationalityFit estimate_lambda(const ChoiceDataset& data, const LambdaSearch& search) {
  check_search(search);

  auto finish = [&](double lambda, bool at_bound) {
    return RationalityFit{lambda, log_likelihood(lambda, data), at_bound, data.size()};
  };

  if (log_likelihood_slope(0.0, data) <= 0.0) return finish(0.0, false);

  double lo = 0.0;
  double hi = std::min(1.0, search.lambda_max);
  while (log_likelihood_slope(hi, data) > 0.0) {
    if (hi >= search.lambda_max) return finish(search.lambda_max, true);
    lo = hi;
    hi = std::min(2.0 * hi, search.lambda_max);
  }

  while (hi - lo > search.tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (log_likelihood_slope(mid, data) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return finish(0.5 * (lo + hi), false);
}

std::vector<CumulativePoint> cumulative_lambda(const ChoiceDataset& data,
                                               const LambdaSearch& search, unsigned threads) {
  check_search(search);
  std::vector<CumulativePoint> series(data.size());
  auto fit_range = [&](std::size_t begin, std::size_t step) {
    for (std::size_t r = begin; r < data.size(); r += step)
      series[r] = {data.event(r).round_index, estimate_lambda(data.head(r + 1), search).lambda_hat};
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(data.size())));
  if (threads == 1) {
    fit_range(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(fit_range, t, threads);
  }
  return series;
}

}  // namespace affectgate::rationality
