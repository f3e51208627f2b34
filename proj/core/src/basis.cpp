#include "smart/basis.hpp"

#include <algorithm>
#include <set>

namespace smart {

void BasisTerm::canonicalize() {
  std::sort(factors.begin(), factors.end());
}

bool BasisTerm::contains(const Factor& f) const {
  return std::find(factors.begin(), factors.end(), f) != factors.end();
}

bool BasisTerm::uses_feature(std::size_t j) const {
  return std::any_of(factors.begin(), factors.end(),
                     [j](const Factor& f) { return f.feature == j; });
}

std::size_t NodeModel::knot_count() const {
  std::set<std::pair<std::size_t, double>> knots;
  for (const auto& term : terms)
    for (const auto& f : term.factors)
      if (f.kind != FactorKind::Linear) knots.emplace(f.feature, f.knot);
  return knots.size();
}

double eval_factor(const Factor& factor, std::span<const double> row) {
  if (factor.feature >= row.size())
    throw StructuralError("factor feature index out of range");
  double x = row[factor.feature];
  switch (factor.kind) {
    case FactorKind::Linear:
      return x;
    case FactorKind::HingePos:
      return x > factor.knot ? x - factor.knot : 0.0;
    case FactorKind::HingeNeg:
      return x < factor.knot ? factor.knot - x : 0.0;
  }
  return 0.0;
}

double eval_term(const BasisTerm& term, std::span<const double> row) {
  double v = 1.0;
  for (const auto& f : term.factors) v *= eval_factor(f, row);
  return v;
}

double predict(const NodeModel& model, std::span<const double> row) {
  double v = model.intercept;
  for (std::size_t m = 0; m < model.terms.size(); ++m)
    v += model.coefficients[m] * eval_term(model.terms[m], row);
  return v;
}

void design_row(const NodeModel& model, std::span<const double> row,
                std::span<double> out) {
  out[0] = 1.0;
  for (std::size_t m = 0; m < model.terms.size(); ++m)
    out[m + 1] = eval_term(model.terms[m], row);
}

std::vector<double> design_matrix(const NodeModel& model, const Dataset& data) {
  std::size_t p = model.num_coefficients();
  std::vector<double> D(data.n * p);
  for (std::size_t i = 0; i < data.n; ++i)
    design_row(model, data.row(i), {D.data() + i * p, p});
  return D;
}

}  // namespace smart
