#pragma once

#include <span>
#include <vector>

namespace affectgate::rationality {

// log(sum_j exp(scale * values[j])), stabilized by max subtraction.
double log_sum_exp(double scale, std::span<const double> values);

// Quantal (logit) response: q_i = exp(lambda U_i) / sum_j exp(lambda U_j).
// Throws std::invalid_argument for lambda < 0, empty or non-finite input.
std::vector<double> quantal_probs(double lambda, std::span<const double> utilities);

}  // namespace affectgate::rationality
