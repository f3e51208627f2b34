#pragma once

#include <cstdint>

#include "smart/dataset.hpp"

namespace smart {

/// Single-feature benchmark with a sine branch, a steep linear branch and an
/// exponential branch: two jump discontinuities at x = 2 and x = 4.
Dataset gen_visual(std::size_t n, std::uint64_t seed);

/// Friedman 1: interaction + quadratic + linear terms over d >= 5 uniform
/// features, columns 6..d pure noise.
Dataset gen_friedman1(std::size_t n, std::size_t d, double sigma,
                      std::uint64_t seed);

Dataset gen_friedman2(std::size_t n, double sigma, std::uint64_t seed);
Dataset gen_friedman3(std::size_t n, double sigma, std::uint64_t seed);

/// The five pinned piecewise-polynomial equations (k in 1..5), each with one
/// switch variable/threshold and re-randomized coefficients on the minor side.
Dataset gen_synthetic(int k, std::size_t n, std::uint64_t seed);

struct SyntheticTruth {
  std::size_t switch_variable;  // 0-based
  double switch_threshold;
};
SyntheticTruth synthetic_truth(int k);

/// Randomly sampled piecewise recipe in the same family (for property tests):
/// three to five power terms, one or two hinge pairs, one log term, one
/// interaction, 90/10 switch with re-randomized coefficients.
Dataset gen_synthetic_recipe(std::size_t n, std::uint64_t seed);

/// Four uniform features routed through a depth-2 decision tree with a
/// one-variable linear response in each of the four leaves.
Dataset gen_tree_dataset(std::size_t n, std::uint64_t seed);

}  // namespace smart
