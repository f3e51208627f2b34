#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "smart/errors.hpp"

namespace smart {

struct FitStats {
  std::vector<double> coefficients;
  double rss_fit = 0.0;
  bool rank_deficient = false;
};

/// Givens rotation (c, s) with c^2 + s^2 = 1 and s*a + c*b = 0, so applying
///   a' = c*a - s*b,  b' = s*a + c*b
/// annihilates b.
std::pair<double, double> givens(double a, double b);

/// Maintained triangular factor of a growing least-squares system.
///
/// Holds R (upper triangular, or upper trapezoidal while rows_seen < cols)
/// and W = Q^T y. Rows are appended one at a time via Givens rotations; rows
/// are never removed. Once rows_seen >= cols, each further update rotates the
/// new row into R and the leftover response component accumulates into the
/// fitting RSS.
class TriangularFactor {
 public:
  explicit TriangularFactor(std::size_t cols);

  std::size_t cols() const { return cols_; }
  std::size_t rows() const { return nrows_; }  // rows of R, = min(rows_seen, cols)
  std::size_t rows_seen() const { return rows_seen_; }

  double entry(std::size_t i, std::size_t j) const { return R_[i * cols_ + j]; }
  const std::vector<double>& w() const { return W_; }

  /// RSS of the exact least-squares fit over all rows seen so far
  /// (sum of squared response components rotated out of the column space).
  double fit_rss() const { return residual_sq_; }

  void update(std::span<const double> new_row, double new_y);

  /// Back substitution R x = W. Under-determined or near-zero diagonals give
  /// zero coefficients and set the rank_deficient flag.
  std::vector<double> solve(bool* rank_deficient = nullptr) const;

  /// RSS actually achieved by solve()'s coefficients. Equals fit_rss() for
  /// full-rank systems; larger when zeroed pivots leave rows unmatched.
  double solved_rss() const;

  /// Removes column k (and its coefficient) from the fitted system,
  /// re-triangularizing in place. Returns the resulting increase in fit RSS.
  double drop_column(std::size_t k);

 private:
  std::size_t cols_;
  std::size_t nrows_ = 0;
  std::size_t rows_seen_ = 0;
  double residual_sq_ = 0.0;
  std::vector<double> R_;  // row-major, nrows_ x cols_
  std::vector<double> W_;
  std::vector<double> col_sq_;  // per-column sum of squared fed entries
};

/// Relative diagonal threshold below which a pivot is treated as zero.
inline constexpr double kRankTolerance = 1e-10;

/// A pivot this small relative to its own column's norm marks the column as
/// (numerically) inside the span of the preceding ones; its coefficient is
/// zeroed rather than amplified into an unstable direction.
inline constexpr double kCollinearTolerance = 1e-3;

/// Solves the factor by back substitution and scores the coefficients on the
/// supplied validation design matrix (row-major n x cols) and responses.
FitStats solve_and_rss(const TriangularFactor& factor,
                       std::span<const double> validation_X,
                       std::span<const double> validation_Y);

/// Least squares via a fresh factorization of the full matrix
/// (row-major n x p). rss_fit is the residual on the fitting data itself.
FitStats batch_ols(std::span<const double> X, std::span<const double> Y,
                   std::size_t n, std::size_t p);

}  // namespace smart
