#include "smart/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "smart/parallel.hpp"
#include "smart/qr.hpp"
#include "smart/rng.hpp"

namespace smart {

namespace detail {

CandidateScan scan_continuous_variable(const NodeModel& model,
                                       const Dataset& fit, const Dataset& val,
                                       std::size_t variable) {
  CandidateScan scan;
  std::size_t p = model.num_coefficients();
  std::size_t nF = fit.n, nV = val.n;
  if (nF < 2) return scan;

  auto DF = design_matrix(model, fit);
  auto DV = design_matrix(model, val);

  // Group fitting rows by ascending distinct value of the column.
  std::vector<std::size_t> order(nF);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return fit.x(a, variable) < fit.x(b, variable);
  });
  std::vector<double> values;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i : order) {
    double v = fit.x(i, variable);
    if (values.empty() || v != values.back()) {
      values.push_back(v);
      groups.emplace_back();
    }
    groups.back().push_back(i);
  }
  std::size_t num_values = values.size();
  if (num_values < 2) return scan;
  std::size_t K = num_values - 1;  // largest value yields an empty right side

  scan.values.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(K));
  scan.beta_left.resize(K);
  scan.beta_right.resize(K);
  scan.validation_rss.assign(K, 0.0);
  scan.usable.assign(K, 1);

  // A side with fewer fitting rows than coefficients is under-determined;
  // such candidates are skipped rather than scored on a rank-deficient fit.
  {
    std::size_t left_rows = 0;
    for (std::size_t k = 0; k < K; ++k) {
      left_rows += groups[k].size();
      if (left_rows < p || nF - left_rows < p) scan.usable[k] = 0;
    }
  }

  // Ascending scan: left factor accumulates rows with x <= s.
  {
    TriangularFactor left(p);
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t i : groups[k])
        left.update({DF.data() + i * p, p}, fit.Y[i]);
      scan.beta_left[k] = left.solve();
    }
  }
  // Descending scan: right factor accumulates rows with x > s, update-only.
  {
    TriangularFactor right(p);
    for (std::size_t k = K; k-- > 0;) {
      for (std::size_t i : groups[k + 1])
        right.update({DF.data() + i * p, p}, fit.Y[i]);
      scan.beta_right[k] = right.solve();
    }
  }

  // Validation rows sorted by the column; prefix quadratic-form accumulators
  // give each candidate's RSS in O(p^2) independent of n_V.
  std::vector<std::size_t> vorder(nV);
  std::iota(vorder.begin(), vorder.end(), 0);
  std::stable_sort(vorder.begin(), vorder.end(), [&](std::size_t a, std::size_t b) {
    return val.x(a, variable) < val.x(b, variable);
  });

  std::vector<double> Sxx(p * p, 0.0), Sxy(p, 0.0);
  double Syy = 0.0;
  std::vector<double> Txx(p * p, 0.0), Txy(p, 0.0);
  double Tyy = 0.0;
  for (std::size_t i = 0; i < nV; ++i) {
    const double* xi = DV.data() + i * p;
    double y = val.Y[i];
    for (std::size_t a = 0; a < p; ++a) {
      for (std::size_t b = a; b < p; ++b) Txx[a * p + b] += xi[a] * xi[b];
      Txy[a] += xi[a] * y;
    }
    Tyy += y * y;
  }

  auto quad_rss = [p](double syy, const std::vector<double>& sxy,
                      const std::vector<double>& sxx,
                      const std::vector<double>& beta) {
    double acc = syy;
    for (std::size_t a = 0; a < p; ++a) {
      acc -= 2.0 * beta[a] * sxy[a];
      acc += beta[a] * beta[a] * sxx[a * p + a];
      for (std::size_t b = a + 1; b < p; ++b)
        acc += 2.0 * beta[a] * beta[b] * sxx[a * p + b];
    }
    return std::max(acc, 0.0);
  };

  std::vector<double> Rxy(p), Rxx(p * p);
  std::size_t vpos = 0;
  for (std::size_t k = 0; k < K; ++k) {
    double s = values[k];
    while (vpos < nV && val.x(vorder[vpos], variable) <= s) {
      std::size_t i = vorder[vpos];
      const double* xi = DV.data() + i * p;
      double y = val.Y[i];
      for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = a; b < p; ++b) Sxx[a * p + b] += xi[a] * xi[b];
        Sxy[a] += xi[a] * y;
      }
      Syy += y * y;
      ++vpos;
    }
    double rss_l = quad_rss(Syy, Sxy, Sxx, scan.beta_left[k]);
    for (std::size_t a = 0; a < p; ++a) {
      Rxy[a] = Txy[a] - Sxy[a];
      for (std::size_t b = a; b < p; ++b)
        Rxx[a * p + b] = Txx[a * p + b] - Sxx[a * p + b];
    }
    double rss_r = quad_rss(Tyy - Syy, Rxy, Rxx, scan.beta_right[k]);
    scan.validation_rss[k] = rss_l + rss_r;
  }
  return scan;
}

}  // namespace detail

namespace {

double direct_validation_rss(const NodeModel& model, const Dataset& val,
                             const SplitCandidate& cand,
                             const std::vector<double>& beta_l,
                             const std::vector<double>& beta_r) {
  std::size_t p = model.num_coefficients();
  std::vector<double> xrow(p);
  double rss = 0.0;
  for (std::size_t i = 0; i < val.n; ++i) {
    design_row(model, val.row(i), xrow);
    const auto& beta = routes_left(cand, val.x(i, cand.variable)) ? beta_l : beta_r;
    double pred = 0.0;
    for (std::size_t j = 0; j < p; ++j) pred += xrow[j] * beta[j];
    double r = val.Y[i] - pred;
    rss += r * r;
  }
  return rss;
}

struct VariableBest {
  std::optional<SplitCandidate> cand;
  std::vector<double> beta_l, beta_r;
};

// One-vs-rest candidates for a categorical column, scored by batch OLS.
void scan_categorical_variable(const NodeModel& model, const Dataset& fit,
                               const Dataset& val, std::size_t variable,
                               std::optional<SplitCandidate>& best,
                               std::vector<double>& best_beta_l,
                               std::vector<double>& best_beta_r) {
  std::size_t p = model.num_coefficients();
  std::vector<double> levels;
  for (std::size_t i = 0; i < fit.n; ++i) levels.push_back(fit.x(i, variable));
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  if (levels.size() < 2) return;

  auto DF = design_matrix(model, fit);
  for (double level : levels) {
    SplitCandidate cand{variable, level, 0.0, true};
    TriangularFactor fl(p), fr(p);
    for (std::size_t i = 0; i < fit.n; ++i) {
      if (routes_left(cand, fit.x(i, variable)))
        fl.update({DF.data() + i * p, p}, fit.Y[i]);
      else
        fr.update({DF.data() + i * p, p}, fit.Y[i]);
    }
    if (fl.rows_seen() < p || fr.rows_seen() < p) continue;
    auto beta_l = fl.solve();
    auto beta_r = fr.solve();
    cand.validation_rss = direct_validation_rss(model, val, cand, beta_l, beta_r);
    bool better =
        !best || cand.validation_rss < best->validation_rss ||
        (cand.validation_rss == best->validation_rss &&
         (cand.variable < best->variable ||
          (cand.variable == best->variable && cand.value < best->value)));
    if (better) {
      best = cand;
      best_beta_l = std::move(beta_l);
      best_beta_r = std::move(beta_r);
    }
  }
}

}  // namespace

std::optional<SplitCandidate> best_split(const Dataset& node_data,
                                         const NodeModel& model,
                                         const TreeConfig& config,
                                         std::uint64_t seed) {
  std::size_t n = node_data.n;
  std::size_t p = model.num_coefficients();
  if (n < 2) return std::nullopt;

  // Small nodes fit and validate on the full node data; otherwise draw the
  // seeded fitting/validation partition.
  Dataset fit, val;
  const Dataset* fit_ptr = &node_data;
  const Dataset* val_ptr = &node_data;
  bool small = n < config.small_node_factor * p;
  if (!small) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (std::size_t i = n; i-- > 1;) {
      std::size_t j = rng.next_below(i + 1);
      std::swap(order[i], order[j]);
    }
    auto n_fit = static_cast<std::size_t>(
        std::lround(config.fit_fraction * static_cast<double>(n)));
    n_fit = std::clamp<std::size_t>(n_fit, 1, n - 1);
    fit = subset(node_data, {order.data(), n_fit});
    val = subset(node_data, {order.data() + n_fit, n - n_fit});
    fit_ptr = &fit;
    val_ptr = &val;
  }

  // Per-variable scans are independent; results reduce in variable order so
  // the outcome is identical serial or parallel.
  std::vector<VariableBest> per_variable(node_data.m);
  parallel_for(node_data.m, [&](std::size_t d) {
    VariableBest& slot = per_variable[d];
    if (node_data.is_categorical(d)) {
      scan_categorical_variable(model, *fit_ptr, *val_ptr, d, slot.cand,
                                slot.beta_l, slot.beta_r);
      return;
    }
    auto scan = detail::scan_continuous_variable(model, *fit_ptr, *val_ptr, d);
    for (std::size_t k = 0; k < scan.values.size(); ++k) {
      if (!scan.usable[k]) continue;
      SplitCandidate cand{d, scan.values[k], scan.validation_rss[k], false};
      bool better = !slot.cand ||
                    cand.validation_rss < slot.cand->validation_rss ||
                    (cand.validation_rss == slot.cand->validation_rss &&
                     cand.value < slot.cand->value);
      if (better) {
        slot.cand = cand;
        slot.beta_l = scan.beta_left[k];
        slot.beta_r = scan.beta_right[k];
      }
    }
  });

  std::optional<SplitCandidate> best;
  std::vector<double> best_beta_l, best_beta_r;
  for (auto& slot : per_variable) {
    if (!slot.cand) continue;
    // Tie-break: lowest RSS, then lowest variable index, then lowest value.
    if (!best || slot.cand->validation_rss < best->validation_rss) {
      best = slot.cand;
      best_beta_l = std::move(slot.beta_l);
      best_beta_r = std::move(slot.beta_r);
    }
  }

  if (best && !best->categorical) {
    // Report the winner's validation RSS from the exact evaluation path.
    best->validation_rss =
        direct_validation_rss(model, *val_ptr, *best, best_beta_l, best_beta_r);
  }
  return best;
}

namespace {

double fold_rss(const NodeModel& model, const std::vector<double>& beta,
                const Dataset& data, const std::vector<std::size_t>& rows) {
  std::size_t p = model.num_coefficients();
  std::vector<double> xrow(p);
  double rss = 0.0;
  for (std::size_t i : rows) {
    design_row(model, data.row(i), xrow);
    double pred = 0.0;
    for (std::size_t j = 0; j < p; ++j) pred += xrow[j] * beta[j];
    double r = data.Y[i] - pred;
    rss += r * r;
  }
  return rss;
}

std::vector<double> fit_rows(const NodeModel& model, const Dataset& data,
                             const std::vector<std::size_t>& rows) {
  std::size_t p = model.num_coefficients();
  TriangularFactor f(p);
  std::vector<double> xrow(p);
  for (std::size_t i : rows) {
    design_row(model, data.row(i), xrow);
    f.update(xrow, data.Y[i]);
  }
  return f.solve();
}

}  // namespace

bool confirm_split(const Dataset& node_data, const NodeModel& model,
                   const SplitCandidate& candidate, const TreeConfig& config,
                   std::uint64_t seed) {
  std::size_t n = node_data.n;
  std::size_t folds = std::min(config.cv_folds, n);
  if (folds < 2) return false;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n; i-- > 1;) {
    std::size_t j = rng.next_below(i + 1);
    std::swap(order[i], order[j]);
  }
  std::vector<std::vector<std::size_t>> fold_rows(folds);
  for (std::size_t i = 0; i < n; ++i) fold_rows[i % folds].push_back(order[i]);

  double cv_unsplit = 0.0, cv_split = 0.0;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> train;
    for (std::size_t g = 0; g < folds; ++g)
      if (g != f) train.insert(train.end(), fold_rows[g].begin(), fold_rows[g].end());
    const auto& held = fold_rows[f];
    if (train.empty() || held.empty()) continue;

    auto beta_un = fit_rows(model, node_data, train);
    cv_unsplit += fold_rss(model, beta_un, node_data, held);

    std::vector<std::size_t> train_l, train_r, held_l, held_r;
    for (std::size_t i : train)
      (routes_left(candidate, node_data.x(i, candidate.variable)) ? train_l
                                                                  : train_r)
          .push_back(i);
    for (std::size_t i : held)
      (routes_left(candidate, node_data.x(i, candidate.variable)) ? held_l
                                                                  : held_r)
          .push_back(i);
    // Degenerate fold-side: fall back to the unsplit fit for those rows.
    auto beta_l = train_l.empty() ? beta_un : fit_rows(model, node_data, train_l);
    auto beta_r = train_r.empty() ? beta_un : fit_rows(model, node_data, train_r);
    cv_split += fold_rss(model, beta_l, node_data, held_l);
    cv_split += fold_rss(model, beta_r, node_data, held_r);
  }

  if (cv_unsplit <= 0.0) return false;
  double improvement = (cv_unsplit - cv_split) / cv_unsplit;
  return improvement >= config.cv_improvement_threshold;
}

namespace {

std::unique_ptr<TreeNode> grow_node(const Dataset& data,
                                    std::vector<std::size_t> rows,
                                    const NodeModel& parent_model,
                                    const TreeConfig& config,
                                    std::uint64_t path) {
  auto node = std::make_unique<TreeNode>();
  Dataset node_data = subset(data, rows);
  NodeModel model = refit(parent_model, node_data);
  std::size_t p = model.num_coefficients();

  bool terminal = node_data.n < p ||
                  config.cv_improvement_threshold ==
                      std::numeric_limits<double>::infinity();
  if (!terminal) {
    std::uint64_t node_seed = Rng::mix(config.rng_seed, path);
    auto cand = best_split(node_data, model, config, node_seed);
    if (cand &&
        confirm_split(node_data, model, *cand, config, Rng::mix(node_seed, 1))) {
      std::vector<std::size_t> rows_l, rows_r;
      for (std::size_t i : rows)
        (routes_left(*cand, data.x(i, cand->variable)) ? rows_l : rows_r)
            .push_back(i);
      if (!rows_l.empty() && !rows_r.empty()) {
        node->split = *cand;
        node->left = grow_node(data, std::move(rows_l), model, config, path * 2);
        node->right =
            grow_node(data, std::move(rows_r), model, config, path * 2 + 1);
        return node;
      }
    }
  }
  node->leaf_model = std::move(model);
  node->training_rows = std::move(rows);
  return node;
}

}  // namespace

std::unique_ptr<TreeNode> grow(const Dataset& data, const NodeModel& model,
                               const TreeConfig& config) {
  std::vector<std::size_t> rows(data.n);
  std::iota(rows.begin(), rows.end(), 0);
  return grow_node(data, std::move(rows), model, config, 1);
}

double predict_tree(const TreeNode& root, std::span<const double> row) {
  const TreeNode* node = &root;
  while (!node->is_leaf()) {
    node = routes_left(*node->split, row[node->split->variable])
               ? node->left.get()
               : node->right.get();
  }
  return predict(node->leaf_model, row);
}

std::vector<SplitCandidate> collect_splits(const TreeNode& root) {
  std::vector<SplitCandidate> out;
  const auto walk = [&out](const TreeNode& node, const auto& self) -> void {
    if (node.is_leaf()) return;
    out.push_back(*node.split);
    self(*node.left, self);
    self(*node.right, self);
  };
  walk(root, walk);
  return out;
}

std::size_t count_leaves(const TreeNode& root) {
  if (root.is_leaf()) return 1;
  return count_leaves(*root.left) + count_leaves(*root.right);
}

}  // namespace smart
