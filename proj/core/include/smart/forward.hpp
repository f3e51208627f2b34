#pragma once

#include <cstddef>

#include "smart/basis.hpp"
#include "smart/dataset.hpp"

namespace smart {

struct ForwardConfig {
  std::size_t max_terms = 100;     // budget on 1 + M coefficients
  std::size_t max_degree = 2;      // max factors per term
  double min_rss_decrease = 1e-4;  // relative stop threshold
  double gcv_penalty = -1.0;       // cost per knot; < 0 means auto

  /// Auto penalty: 3 when interactions are allowed, else 2.
  double resolved_gcv_penalty() const {
    if (gcv_penalty >= 0.0) return gcv_penalty;
    return max_degree > 1 ? 3.0 : 2.0;
  }
};

/// Generalized cross-validation score: rss / (1 - effective_params/n)^2.
/// Returns +infinity when effective_params >= n (model too complex for node).
double gcv(double rss, std::size_t n, double effective_params);

/// Effective parameter count: coefficients plus gcv_penalty per distinct knot.
double effective_params(const NodeModel& model, double gcv_penalty);

/// Recomputes coefficients by least squares on `data`; basis unchanged.
NodeModel refit(const NodeModel& model, const Dataset& data);

/// Greedy term addition: reflected hinge pairs, first-order terms, and
/// interaction terms, until the RSS improvement stalls or the budget is hit.
NodeModel forward_pass(const Dataset& data, const ForwardConfig& config);

}  // namespace smart
