#include "smart/dataset.hpp"

namespace smart {

Dataset subset(const Dataset& data, std::span<const std::size_t> rows) {
  Dataset out;
  out.n = rows.size();
  out.m = data.m;
  out.column_kinds = data.column_kinds;
  out.column_names = data.column_names;
  out.seed = data.seed;
  out.X.reserve(out.n * out.m);
  out.Y.reserve(out.n);
  bool truth = data.has_truth();
  if (truth) out.truth.reserve(out.n);
  for (std::size_t i : rows) {
    auto r = data.row(i);
    out.X.insert(out.X.end(), r.begin(), r.end());
    out.Y.push_back(data.Y[i]);
    if (truth) out.truth.push_back(data.truth[i]);
  }
  return out;
}

}  // namespace smart
