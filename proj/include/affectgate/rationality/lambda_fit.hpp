#pragma once

#include <cstdint>
#include <vector>

#include "affectgate/rationality/dataset.hpp"

namespace affectgate::rationality {

struct LambdaSearch {
  double lambda_max = 25.0;
  double tolerance = 1e-6;
};

struct RationalityFit {
  double lambda_hat = 0.0;
  double log_likelihood = 0.0;
  // The likelihood was still increasing at lambda_max (e.g. every choice
  // was the argmax gate); lambda_hat is clamped there.
  bool at_upper_bound = false;
  std::size_t rounds_used = 0;
};

// sum_r [ lambda G_{r,chosen} - log sum_j exp(lambda G_rj) ]
double log_likelihood(double lambda, const ChoiceDataset& data);

// d/dlambda of log_likelihood: sum_r [ G_{r,chosen} - E_q[G_r] ]. Nonincreasing
// in lambda because the objective is concave.
double log_likelihood_slope(double lambda, const ChoiceDataset& data);

// Maximizes log_likelihood over [0, lambda_max]. The slope is bracketed by
// doubling from 1 and the root is bisected to `tolerance`.
RationalityFit estimate_lambda(const ChoiceDataset& data, const LambdaSearch& search = {});

struct CumulativePoint {
  std::uint64_t round_index = 0;
  double lambda_hat = 0.0;

  friend bool operator==(const CumulativePoint&, const CumulativePoint&) = default;
};

// Entry r is estimate_lambda over events [0, r]. With threads > 1 the prefix
// fits run concurrently; the result is identical to the sequential one.
std::vector<CumulativePoint> cumulative_lambda(const ChoiceDataset& data,
                                               const LambdaSearch& search = {},
                                               unsigned threads = 1);

}  // namespace affectgate::rationality
