#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace smart {

enum class ColumnKind { Continuous, Categorical };

/// Column-typed feature matrix plus response, with the seed that produced it.
/// X is row-major (n x m). `truth` optionally holds the noiseless response.
struct Dataset {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> X;  // row-major, n * m
  std::vector<double> Y;
  std::vector<ColumnKind> column_kinds;
  std::vector<double> truth;  // empty or length n
  std::vector<std::string> column_names;  // empty or length m
  std::uint64_t seed = 0;

  double x(std::size_t i, std::size_t j) const { return X[i * m + j]; }
  std::span<const double> row(std::size_t i) const {
    return {X.data() + i * m, m};
  }
  bool has_truth() const { return truth.size() == n; }
  bool is_categorical(std::size_t j) const {
    return j < column_kinds.size() && column_kinds[j] == ColumnKind::Categorical;
  }
};

/// Materializes the subset of rows given by `rows` (order preserved).
Dataset subset(const Dataset& data, std::span<const std::size_t> rows);

}  // namespace smart
