#include "smart/pruning.hpp"

#include <algorithm>
#include <limits>

#include "smart/qr.hpp"

namespace smart {

NodeModel prune_leaf(const NodeModel& model, const Dataset& leaf_data,
                     const ForwardConfig& config) {
  if (leaf_data.n == 0) throw StructuralError("prune_leaf: empty leaf data");
  if (model.terms.empty()) return model;

  std::size_t p = model.num_coefficients();
  double penalty = config.resolved_gcv_penalty();
  auto D = design_matrix(model, leaf_data);
  TriangularFactor factor(p);
  for (std::size_t i = 0; i < leaf_data.n; ++i)
    factor.update({D.data() + i * p, p}, leaf_data.Y[i]);

  // Walk the deletion sequence, tracking each visited sub-model's GCV.
  // Column 0 (intercept) is never deleted.
  std::vector<std::size_t> active(model.terms.size());
  for (std::size_t t = 0; t < active.size(); ++t) active[t] = t;

  auto state_gcv = [&](const std::vector<std::size_t>& terms, double rss) {
    NodeModel sub;
    for (std::size_t t : terms) sub.terms.push_back(model.terms[t]);
    sub.coefficients.assign(terms.size(), 0.0);
    return gcv(rss, leaf_data.n, effective_params(sub, penalty));
  };

  // States are scored by the RSS the solver actually achieves, not the ideal
  // least-squares RSS: collinear bases (common inside a leaf's restricted
  // domain) make the two differ, and the returned model is a solver refit.
  std::vector<std::size_t> best_terms = active;
  double best_gcv = state_gcv(active, factor.solved_rss());

  while (!active.empty()) {
    double best_rss = std::numeric_limits<double>::infinity();
    std::size_t best_pos = 0;
    for (std::size_t pos = 0; pos < active.size(); ++pos) {
      TriangularFactor trial = factor;
      trial.drop_column(pos + 1);  // +1 skips the intercept
      double trial_rss = trial.solved_rss();
      if (trial_rss < best_rss) {  // ties keep the earliest-added term's removal
        best_rss = trial_rss;
        best_pos = pos;
      }
    }
    factor.drop_column(best_pos + 1);
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_pos));
    double g = state_gcv(active, factor.solved_rss());
    if (g <= best_gcv) {
      best_gcv = g;
      best_terms = active;
    }
  }

  NodeModel pruned;
  for (std::size_t t : best_terms) pruned.terms.push_back(model.terms[t]);
  pruned.coefficients.assign(pruned.terms.size(), 0.0);
  return refit(pruned, leaf_data);
}

namespace {

void prune_node(TreeNode& node, const Dataset& data,
                const ForwardConfig& config) {
  if (node.is_leaf()) {
    Dataset leaf_data = subset(data, node.training_rows);
    node.leaf_model = prune_leaf(node.leaf_model, leaf_data, config);
    return;
  }
  prune_node(*node.left, data, config);
  prune_node(*node.right, data, config);
}

}  // namespace

std::unique_ptr<TreeNode> prune_tree(std::unique_ptr<TreeNode> root,
                                     const Dataset& data,
                                     const ForwardConfig& config) {
  if (!root) throw StructuralError("prune_tree: null tree");
  prune_node(*root, data, config);
  return root;
}

}  // namespace smart
