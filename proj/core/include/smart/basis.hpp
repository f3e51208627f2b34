#pragma once

#include <span>
#include <vector>

#include "smart/dataset.hpp"
#include "smart/errors.hpp"

namespace smart {

enum class FactorKind { Linear, HingePos, HingeNeg };

/// One multiplicative factor of a basis term: x_j, (x_j - t)_+ or (t - x_j)_+.
struct Factor {
  FactorKind kind = FactorKind::Linear;
  std::size_t feature = 0;
  double knot = 0.0;  // unused for Linear

  friend bool operator==(const Factor&, const Factor&) = default;
  friend auto operator<=>(const Factor&, const Factor&) = default;
};

/// A product of one or more factors (one h_m term of the model).
struct BasisTerm {
  std::vector<Factor> factors;

  std::size_t degree() const { return factors.size(); }
  /// Sorts factors by (feature, kind, knot) so equal terms compare equal.
  void canonicalize();
  /// True if some factor equals `f` exactly.
  bool contains(const Factor& f) const;
  /// True if some factor has this feature (any kind/knot).
  bool uses_feature(std::size_t j) const;

  friend bool operator==(const BasisTerm&, const BasisTerm&) = default;
};

/// Intercept + weighted basis terms: one node's regression equation.
struct NodeModel {
  double intercept = 0.0;
  std::vector<BasisTerm> terms;
  std::vector<double> coefficients;  // same length as terms

  std::size_t num_coefficients() const { return 1 + terms.size(); }
  /// Number of distinct (feature, knot) pairs among hinge factors.
  std::size_t knot_count() const;
};

double eval_factor(const Factor& factor, std::span<const double> row);
double eval_term(const BasisTerm& term, std::span<const double> row);
double predict(const NodeModel& model, std::span<const double> row);

/// Fills `out` (length 1 + terms) with the design row: 1, h_1(x), ..., h_M(x).
void design_row(const NodeModel& model, std::span<const double> row,
                std::span<double> out);

/// n x (1 + M) design matrix, row-major; column 0 is the intercept.
std::vector<double> design_matrix(const NodeModel& model, const Dataset& data);

}  // namespace smart
