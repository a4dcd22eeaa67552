#include "affectgate/rationality/epqr.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "affectgate/rationality/quantal.hpp"

namespace affectgate::rationality {

std::string_view to_string(FeatureVariant v) noexcept {
  switch (v) {
    case FeatureVariant::reward_penalty_emotion: return "reward_penalty_emotion";
    case FeatureVariant::two_indicator: return "two_indicator";
    case FeatureVariant::utility_only: return "utility_only";
    case FeatureVariant::interaction: return "interaction";
  }
  return "unknown";
}

FeatureVariant parse_feature_variant(std::string_view name) {
  if (name == "reward_penalty_emotion" || name == "base") return FeatureVariant::reward_penalty_emotion;
  if (name == "two_indicator") return FeatureVariant::two_indicator;
  if (name == "utility_only") return FeatureVariant::utility_only;
  if (name == "interaction") return FeatureVariant::interaction;
  throw DataError("unknown feature variant '" + std::string(name) + "'");
}

std::size_t feature_dimension(FeatureVariant v) noexcept {
  switch (v) {
    case FeatureVariant::reward_penalty_emotion: return 3;
    case FeatureVariant::two_indicator: return 4;
    case FeatureVariant::utility_only: return 1;
    case FeatureVariant::interaction: return 4;
  }
  return 0;
}

std::vector<std::string> feature_names(FeatureVariant v) {
  switch (v) {
    case FeatureVariant::reward_penalty_emotion: return {"R", "P", "E"};
    case FeatureVariant::two_indicator: return {"R", "P", "E_negative", "E_positive"};
    case FeatureVariant::utility_only: return {"G"};
    case FeatureVariant::interaction: return {"R", "P", "E*R", "E*P"};
  }
  return {};
}

std::vector<std::vector<double>> epqr_features(const game::RoundSpec& round,
                                               std::optional<int> affect, FeatureVariant variant) {
  if (variant != FeatureVariant::utility_only) {
    if (!affect) throw DataError(std::string(to_string(variant)) + " features need a known affect condition");
    if (*affect != 0 && *affect != 1) throw std::invalid_argument("affect indicator must be 0 or 1");
  }
  std::vector<std::vector<double>> rows;
  rows.reserve(round.size());
  for (const auto& g : round.gates()) {
    const double r = g.reward();
    const double p = g.penalty();
    switch (variant) {
      case FeatureVariant::reward_penalty_emotion:
        rows.push_back({r, p, static_cast<double>(*affect)});
        break;
      case FeatureVariant::two_indicator:
        rows.push_back({r, p, static_cast<double>(1 - *affect), static_cast<double>(*affect)});
        break;
      case FeatureVariant::utility_only:
        rows.push_back({game::expected_utility(g)});
        break;
      case FeatureVariant::interaction:
        rows.push_back({r, p, *affect * r, *affect * p});
        break;
    }
  }
  return rows;
}

EpqrDesign::EpqrDesign(const ChoiceDataset& data, FeatureVariant variant)
    : variant_(variant), dim_(feature_dimension(variant)) {
  offsets_.reserve(data.size() + 1);
  offsets_.push_back(0);
  chosen_.reserve(data.size());
  for (const auto& e : data.events()) {
    for (const auto& row : epqr_features(e.round, game::affect_indicator(e.affect), variant))
      values_.insert(values_.end(), row.begin(), row.end());
    offsets_.push_back(values_.size());
    chosen_.push_back(e.chosen_gate);
  }
}

std::vector<std::size_t> EpqrDesign::constant_within_round_dims() const {
  std::vector<std::size_t> dims;
  for (std::size_t k = 0; k < dim_; ++k) {
    bool constant = true;
    for (std::size_t r = 0; r < rounds() && constant; ++r) {
      const double first = features(r, 0)[k];
      for (std::size_t j = 1; j < gates(r); ++j)
        if (features(r, j)[k] != first) {
          constant = false;
          break;
        }
    }
    if (constant) dims.push_back(k);
  }
  return dims;
}

namespace {

void check_dimension(std::span<const double> w, const EpqrDesign& design) {
  if (w.size() != design.dimension())
    throw std::invalid_argument("weight vector has dimension " + std::to_string(w.size()) +
                                ", features have " + std::to_string(design.dimension()));
}

// Utilities w.x_rj for one round.
std::vector<double> round_scores(std::span<const double> w, const EpqrDesign& design,
                                 std::size_t r) {
  std::vector<double> s(design.gates(r));
  for (std::size_t j = 0; j < s.size(); ++j) {
    const auto x = design.features(r, j);
    s[j] = std::inner_product(x.begin(), x.end(), w.begin(), 0.0);
  }
  return s;
}

}  // namespace

double epqr_log_likelihood(std::span<const double> w, const EpqrDesign& design) {
  check_dimension(w, design);
  double total = 0.0;
  for (std::size_t r = 0; r < design.rounds(); ++r) {
    const auto s = round_scores(w, design, r);
    total += s[design.chosen(r)] - log_sum_exp(1.0, s);
  }
  return total;
}

std::vector<double> epqr_gradient(std::span<const double> w, const EpqrDesign& design) {
  check_dimension(w, design);
  const std::size_t d = design.dimension();
  std::vector<double> grad(d, 0.0);
  for (std::size_t r = 0; r < design.rounds(); ++r) {
    const auto q = quantal_probs(1.0, round_scores(w, design, r));
    const auto xc = design.features(r, design.chosen(r));
    for (std::size_t k = 0; k < d; ++k) {
      double expected = 0.0;
      for (std::size_t j = 0; j < q.size(); ++j) expected += q[j] * design.features(r, j)[k];
      grad[k] += xc[k] - expected;
    }
  }
  return grad;
}

std::vector<double> epqr_negative_hessian(std::span<const double> w, const EpqrDesign& design) {
  check_dimension(w, design);
  const std::size_t d = design.dimension();
  std::vector<double> h(d * d, 0.0);
  std::vector<double> mean(d);
  for (std::size_t r = 0; r < design.rounds(); ++r) {
    const auto q = quantal_probs(1.0, round_scores(w, design, r));
    std::fill(mean.begin(), mean.end(), 0.0);
    for (std::size_t j = 0; j < q.size(); ++j) {
      const auto x = design.features(r, j);
      for (std::size_t k = 0; k < d; ++k) mean[k] += q[j] * x[k];
    }
    for (std::size_t j = 0; j < q.size(); ++j) {
      const auto x = design.features(r, j);
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b)
          h[a * d + b] += q[j] * (x[a] - mean[a]) * (x[b] - mean[b]);
    }
  }
  return h;
}

double epqr_log_likelihood(std::span<const double> w, const ChoiceDataset& data,
                           FeatureVariant variant) {
  return epqr_log_likelihood(w, EpqrDesign(data, variant));
}

std::vector<double> epqr_gradient(std::span<const double> w, const ChoiceDataset& data,
                                  FeatureVariant variant) {
  return epqr_gradient(w, EpqrDesign(data, variant));
}

namespace {

double norm2(std::span<const double> v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

// Solves (A + mu I) x = b for symmetric positive semidefinite A (n x n,
// row-major), raising mu until the Cholesky factorization succeeds.
std::vector<double> solve_regularized(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += a[i * n + i];
  const double base = std::max(trace / static_cast<double>(n), 1.0) * 1e-12;
  for (double mu = 0.0;; mu = (mu == 0.0 ? base : mu * 10.0)) {
    std::vector<double> l(n * n, 0.0);
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double s = a[i * n + j] + (i == j ? mu : 0.0);
        for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
        if (i == j) {
          if (!(s > 1e-14 * std::max(trace, 1.0))) {
            ok = false;
            break;
          }
          l[i * n + i] = std::sqrt(s);
        } else {
          l[i * n + j] = s / l[j * n + j];
        }
      }
    }
    if (!ok) continue;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = b[i];
      for (std::size_t k = 0; k < i; ++k) s -= l[i * n + k] * y[k];
      y[i] = s / l[i * n + i];
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
      double s = y[i];
      for (std::size_t k = i + 1; k < n; ++k) s -= l[k * n + i] * x[k];
      x[i] = s / l[i * n + i];
    }
    return x;
  }
}

}  // namespace

EpqrFit estimate_epqr(const ChoiceDataset& data, FeatureVariant variant,
                      const EpqrOptions& options) {
  const EpqrDesign design(data, variant);
  const std::size_t d = design.dimension();

  EpqrFit fit;
  fit.unidentifiable_dims = design.constant_within_round_dims();
  std::vector<std::size_t> active;
  for (std::size_t k = 0; k < d; ++k)
    if (!std::binary_search(fit.unidentifiable_dims.begin(), fit.unidentifiable_dims.end(), k))
      active.push_back(k);

  // Optimization runs over v with w_k = v_k / scale_k.
  std::vector<double> scale(d, 1.0);
  if (options.standardize) {
    for (std::size_t k : active) {
      double sum = 0.0, sum_sq = 0.0, count = 0.0;
      for (std::size_t r = 0; r < design.rounds(); ++r)
        for (std::size_t j = 0; j < design.gates(r); ++j) {
          const double x = design.features(r, j)[k];
          sum += x;
          sum_sq += x * x;
          count += 1.0;
        }
      const double var = sum_sq / count - (sum / count) * (sum / count);
      if (var > 0.0) scale[k] = std::sqrt(var);
    }
  }

  std::vector<double> w(d, 0.0);
  double f = epqr_log_likelihood(w, design);
  std::vector<double> g = epqr_gradient(w, design);
  double step = 0.0;

  for (fit.iterations = 0;; ++fit.iterations) {
    fit.gradient_norm = norm2(g);
    if (fit.gradient_norm <= options.gradient_tolerance) break;
    if (fit.iterations >= options.max_iterations) {
      fit.weights = w;
      fit.log_likelihood = f;
      throw EpqrConvergenceError("EPQR fit did not converge within " +
                                     std::to_string(options.max_iterations) + " iterations",
                                 fit);
    }

    const std::size_t n = active.size();
    std::vector<double> gv(n);
    for (std::size_t a = 0; a < n; ++a) gv[a] = g[active[a]] / scale[active[a]];

    std::vector<double> dir;
    if (options.method == EpqrMethod::newton) {
      const auto h = epqr_negative_hessian(w, design);
      std::vector<double> hv(n * n);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          hv[a * n + b] = h[active[a] * d + active[b]] / (scale[active[a]] * scale[active[b]]);
      dir = solve_regularized(std::move(hv), gv);
      step = 1.0;
    } else {
      dir = gv;
      step = step == 0.0 ? 1.0 / norm2(gv) : step * 2.0;
    }
    const double slope = std::inner_product(gv.begin(), gv.end(), dir.begin(), 0.0);

    std::vector<double> candidate(d);
    double f_new = f;
    bool accepted = false;
    for (; step > 1e-30; step *= 0.5) {
      candidate = w;
      for (std::size_t a = 0; a < n; ++a) candidate[active[a]] += step * dir[a] / scale[active[a]];
      f_new = epqr_log_likelihood(candidate, design);
      // Armijo with a rounding allowance so the final steps near the
      // optimum are not rejected for sub-ulp changes in the objective.
      if (f_new >= f + 1e-4 * step * slope - 8 * DBL_EPSILON * std::abs(f)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      fit.weights = w;
      fit.log_likelihood = f;
      throw EpqrConvergenceError("EPQR line search stalled at gradient norm " +
                                     std::to_string(fit.gradient_norm),
                                 fit);
    }
    w = std::move(candidate);
    f = f_new;
    g = epqr_gradient(w, design);
  }

  fit.weights = w;
  fit.log_likelihood = f;
  return fit;
}

}  // namespace affectgate::rationality
