#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "affectgate/core/error.hpp"
#include "affectgate/game/gate.hpp"
#include "affectgate/rationality/dataset.hpp"

namespace affectgate::rationality {

// Per-gate feature layouts for emotion-parameterized quantal response.
// E is the opponent affect indicator (0 negative, 1 positive).
enum class FeatureVariant {
  reward_penalty_emotion,  // [R, P, E]
  two_indicator,           // [R, P, 1-E, E]
  utility_only,            // [G]
  interaction,             // [R, P, E*R, E*P]
};

std::string_view to_string(FeatureVariant v) noexcept;
// Accepts the to_string names plus "base". Throws DataError.
FeatureVariant parse_feature_variant(std::string_view name);
std::size_t feature_dimension(FeatureVariant v) noexcept;
std::vector<std::string> feature_names(FeatureVariant v);

// Row j holds x_rj. `affect` may be nullopt only for utility_only.
std::vector<std::vector<double>> epqr_features(const game::RoundSpec& round,
                                               std::optional<int> affect, FeatureVariant variant);

// Feature tensor for a whole dataset, laid out per round as N_r x d.
class EpqrDesign {
 public:
  EpqrDesign(const ChoiceDataset& data, FeatureVariant variant);

  FeatureVariant variant() const noexcept { return variant_; }
  std::size_t dimension() const noexcept { return dim_; }
  std::size_t rounds() const noexcept { return chosen_.size(); }
  std::size_t gates(std::size_t r) const { return (offsets_[r + 1] - offsets_[r]) / dim_; }
  std::size_t chosen(std::size_t r) const { return chosen_[r]; }
  // x_rj as a d-vector.
  std::span<const double> features(std::size_t r, std::size_t j) const {
    return {values_.data() + offsets_[r] + j * dim_, dim_};
  }

  // Feature indices whose value is identical across the gates of every
  // round. Their likelihood gradient is identically zero.
  std::vector<std::size_t> constant_within_round_dims() const;

 private:
  FeatureVariant variant_;
  std::size_t dim_;
  std::vector<double> values_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> chosen_;
};

// sum_r [ w.x_{r,chosen} - log sum_j exp(w.x_rj) ]
double epqr_log_likelihood(std::span<const double> w, const EpqrDesign& design);
// sum_r [ x_{r,chosen} - sum_j eq_rj x_rj ]
std::vector<double> epqr_gradient(std::span<const double> w, const EpqrDesign& design);
// Observed per-round covariance sum, i.e. the negated Hessian of the
// log-likelihood, row-major d x d.
std::vector<double> epqr_negative_hessian(std::span<const double> w, const EpqrDesign& design);

double epqr_log_likelihood(std::span<const double> w, const ChoiceDataset& data,
                           FeatureVariant variant);
std::vector<double> epqr_gradient(std::span<const double> w, const ChoiceDataset& data,
                                  FeatureVariant variant);

enum class EpqrMethod {
  // Ascent along (-H + mu I)^{-1} g with backtracking.
  newton,
  // Ascent along the raw gradient with backtracking.
  gradient,
};

struct EpqrOptions {
  double gradient_tolerance = 1e-6;
  std::size_t max_iterations = 10000;
  // Rescale each feature to unit standard deviation while optimizing.
  bool standardize = false;
  EpqrMethod method = EpqrMethod::newton;
};

struct EpqrFit {
  std::vector<double> weights;
  double log_likelihood = 0.0;
  double gradient_norm = 0.0;
  std::vector<std::size_t> unidentifiable_dims;
  std::size_t iterations = 0;
};

class EpqrConvergenceError : public DataError {
 public:
  EpqrConvergenceError(const std::string& what, EpqrFit best)
      : DataError(what), best_(std::move(best)) {}
  const EpqrFit& best() const noexcept { return best_; }

 private:
  EpqrFit best_;
};

// Concave maximization from w = 0. Unidentifiable dimensions are held at 0.
// Throws EpqrConvergenceError (carrying the best iterate) if the gradient
// norm does not reach the tolerance within the iteration cap.
EpqrFit estimate_epqr(const ChoiceDataset& data, FeatureVariant variant,
                      const EpqrOptions& options = {});

}  // namespace affectgate::rationality
