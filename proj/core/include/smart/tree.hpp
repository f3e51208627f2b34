#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "smart/basis.hpp"
#include "smart/dataset.hpp"
#include "smart/forward.hpp"

namespace smart {

struct TreeConfig {
  double cv_improvement_threshold = 0.01;
  std::size_t cv_folds = 5;
  double fit_fraction = 0.7;
  std::size_t small_node_factor = 10;
  std::uint64_t rng_seed = 0;
};

struct SplitCandidate {
  std::size_t variable = 0;
  double value = 0.0;
  double validation_rss = 0.0;
  bool categorical = false;  // routing: left iff x == value, else left iff x <= value
};

/// Routing rule shared by the scan, growth, and prediction.
inline bool routes_left(const SplitCandidate& split, double x) {
  return split.categorical ? x == split.value : x <= split.value;
}

struct TreeNode {
  std::optional<SplitCandidate> split;
  std::unique_ptr<TreeNode> left, right;
  NodeModel leaf_model;                    // leaves only
  std::vector<std::size_t> training_rows;  // leaves only

  bool is_leaf() const { return !split.has_value(); }
};

/// Scans every (variable, value) candidate with the dual incremental-QR
/// sweep (continuous) or one-vs-rest batch OLS (categorical) and returns
/// the candidate with the lowest validation RSS, or nullopt if none is
/// evaluable. The 70/30 fitting/validation draw comes from `seed`; small
/// nodes (n < small_node_factor * coefficients) fit and validate on all rows.
std::optional<SplitCandidate> best_split(const Dataset& node_data,
                                         const NodeModel& model,
                                         const TreeConfig& config,
                                         std::uint64_t seed);

/// 5-fold CV gate: true iff the relative CV-RSS improvement of the split
/// meets cv_improvement_threshold.
bool confirm_split(const Dataset& node_data, const NodeModel& model,
                   const SplitCandidate& candidate, const TreeConfig& config,
                   std::uint64_t seed);

/// Recursive growth: terminal guards, best_split, CV gate, recurse.
std::unique_ptr<TreeNode> grow(const Dataset& data, const NodeModel& model,
                               const TreeConfig& config);

double predict_tree(const TreeNode& root, std::span<const double> row);

/// All splits of the grown tree, preorder.
std::vector<SplitCandidate> collect_splits(const TreeNode& root);

std::size_t count_leaves(const TreeNode& root);

namespace detail {

/// Per-candidate results of the dual scan along one continuous variable:
/// ascending-scan left solutions, descending-scan right solutions, and the
/// total validation RSS. Exposed for verification against batch refits.
struct CandidateScan {
  std::vector<double> values;  // ascending distinct fitting values, max excluded
  std::vector<std::vector<double>> beta_left, beta_right;
  std::vector<double> validation_rss;
  std::vector<char> usable;  // 0 when a side has fewer fitting rows than coefficients
};

CandidateScan scan_continuous_variable(const NodeModel& model,
                                       const Dataset& fit, const Dataset& val,
                                       std::size_t variable);

}  // namespace detail

}  // namespace smart
