#pragma once

#include "smart/forward.hpp"
#include "smart/tree.hpp"

namespace smart {

/// MARS backward pass on one leaf: greedily deletes the term whose removal
/// yields the lowest RSS, walks the whole deletion sequence down to the
/// intercept-only model, and returns the GCV-minimizing sub-model refit on
/// the leaf data.
NodeModel prune_leaf(const NodeModel& model, const Dataset& leaf_data,
                     const ForwardConfig& config);

/// Applies prune_leaf to every leaf over that leaf's training rows; the tree
/// structure is unchanged.
std::unique_ptr<TreeNode> prune_tree(std::unique_ptr<TreeNode> root,
                                     const Dataset& data,
                                     const ForwardConfig& config);

}  // namespace smart
