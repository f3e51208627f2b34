#include "smart/qr.hpp"

#include <algorithm>
#include <cmath>

namespace smart {

std::pair<double, double> givens(double a, double b) {
  if (b == 0.0) return {1.0, 0.0};
  if (std::abs(b) >= std::abs(a)) {
    double t = -a / b;
    double s = 1.0 / std::sqrt(1.0 + t * t);
    return {s * t, s};
  }
  double t = -b / a;
  double c = 1.0 / std::sqrt(1.0 + t * t);
  return {c, c * t};
}

TriangularFactor::TriangularFactor(std::size_t cols)
    : cols_(cols), col_sq_(cols, 0.0) {}

void TriangularFactor::update(std::span<const double> new_row, double new_y) {
  if (new_row.size() != cols_)
    throw NumericError("update: row width mismatch");
  for (double v : new_row)
    if (!std::isfinite(v)) throw NumericError("update: non-finite row entry");
  if (!std::isfinite(new_y)) throw NumericError("update: non-finite response");

  std::vector<double> x(new_row.begin(), new_row.end());
  double y = new_y;
  for (std::size_t j = 0; j < cols_; ++j) col_sq_[j] += x[j] * x[j];
  for (std::size_t j = 0; j < nrows_; ++j) {
    double* rj = R_.data() + j * cols_;
    auto [c, s] = givens(rj[j], x[j]);
    double rjj = rj[j];
    rj[j] = c * rjj - s * x[j];
    x[j] = 0.0;
    for (std::size_t k = j + 1; k < cols_; ++k) {
      double t1 = rj[k], t2 = x[k];
      rj[k] = c * t1 - s * t2;
      x[k] = s * t1 + c * t2;
    }
    double t1 = W_[j], t2 = y;
    W_[j] = c * t1 - s * t2;
    y = s * t1 + c * t2;
  }
  if (nrows_ < cols_) {
    R_.insert(R_.end(), x.begin(), x.end());
    W_.push_back(y);
    ++nrows_;
  } else {
    residual_sq_ += y * y;
  }
  ++rows_seen_;
}

std::vector<double> TriangularFactor::solve(bool* rank_deficient) const {
  std::vector<double> coef(cols_, 0.0);
  bool deficient = nrows_ < cols_;
  double max_diag = 0.0;
  for (std::size_t j = 0; j < nrows_; ++j)
    max_diag = std::max(max_diag, std::abs(entry(j, j)));
  double tol = kRankTolerance * max_diag;
  for (std::size_t jj = nrows_; jj-- > 0;) {
    double diag = entry(jj, jj);
    if (max_diag == 0.0 || std::abs(diag) < tol ||
        std::abs(diag) < kCollinearTolerance * std::sqrt(col_sq_[jj])) {
      coef[jj] = 0.0;
      deficient = true;
      continue;
    }
    double acc = W_[jj];
    const double* rj = R_.data() + jj * cols_;
    for (std::size_t k = jj + 1; k < cols_; ++k) acc -= rj[k] * coef[k];
    coef[jj] = acc / diag;
  }
  if (rank_deficient) *rank_deficient = deficient;
  return coef;
}

double TriangularFactor::solved_rss() const {
  std::vector<double> coef = solve();
  double acc = residual_sq_;
  for (std::size_t i = 0; i < nrows_; ++i) {
    double r = W_[i];
    const double* ri = R_.data() + i * cols_;
    for (std::size_t k = i; k < cols_; ++k) r -= ri[k] * coef[k];
    acc += r * r;
  }
  return acc;
}

double TriangularFactor::drop_column(std::size_t k) {
  // Delete column k, then chase the created subdiagonal with row rotations.
  std::size_t new_cols = cols_ - 1;
  std::vector<double> R2(nrows_ * new_cols);
  for (std::size_t i = 0; i < nrows_; ++i)
    for (std::size_t j = 0; j < new_cols; ++j)
      R2[i * new_cols + j] = entry(i, j < k ? j : j + 1);
  R_ = std::move(R2);
  cols_ = new_cols;
  col_sq_.erase(col_sq_.begin() + static_cast<std::ptrdiff_t>(k));

  for (std::size_t i = k + 1; i < nrows_; ++i) {
    std::size_t col = i - 1;
    if (col >= cols_) break;
    double* ra = R_.data() + (i - 1) * cols_;
    double* rb = R_.data() + i * cols_;
    auto [c, s] = givens(ra[col], rb[col]);
    for (std::size_t j = col; j < cols_; ++j) {
      double t1 = ra[j], t2 = rb[j];
      ra[j] = c * t1 - s * t2;
      rb[j] = s * t1 + c * t2;
    }
    double t1 = W_[i - 1], t2 = W_[i];
    W_[i - 1] = c * t1 - s * t2;
    W_[i] = s * t1 + c * t2;
  }

  double extra = 0.0;
  if (nrows_ > cols_ && nrows_ > 0) {
    // Last row is now entirely zero; its W entry is leftover residual.
    extra = W_.back() * W_.back();
    residual_sq_ += extra;
    W_.pop_back();
    --nrows_;
    R_.resize(nrows_ * cols_);
  }
  return extra;
}

FitStats solve_and_rss(const TriangularFactor& factor,
                       std::span<const double> validation_X,
                       std::span<const double> validation_Y) {
  FitStats stats;
  stats.coefficients = factor.solve(&stats.rank_deficient);
  std::size_t p = factor.cols();
  double rss = 0.0;
  for (std::size_t i = 0; i < validation_Y.size(); ++i) {
    const double* xi = validation_X.data() + i * p;
    double pred = 0.0;
    for (std::size_t j = 0; j < p; ++j) pred += xi[j] * stats.coefficients[j];
    double r = validation_Y[i] - pred;
    rss += r * r;
  }
  stats.rss_fit = rss;
  return stats;
}

FitStats batch_ols(std::span<const double> X, std::span<const double> Y,
                   std::size_t n, std::size_t p) {
  if (n == 0 || p == 0) throw StructuralError("batch_ols: empty system");
  TriangularFactor factor(p);
  for (std::size_t i = 0; i < n; ++i)
    factor.update({X.data() + i * p, p}, Y[i]);
  return solve_and_rss(factor, X, Y);
}

}  // namespace smart
