#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "liftmix/error.hpp"

namespace liftmix::lp {

/// Dense tableau simplex for
///
///     maximize c'x  subject to  A x <= b,  x >= 0,   with b >= 0,
///
/// so the all-slack basis is feasible and no phase 1 is needed. Entering
/// variable by most negative reduced cost; after a run of degenerate pivots
/// it switches to Bland's rule, which cannot cycle.
class DenseSimplex {
 public:
  enum class Status { Optimal, Unbounded, IterationLimit };

  struct Result {
    Status status = Status::Optimal;
    double value = 0.0;
    std::vector<double> x;
    std::size_t pivots = 0;
  };

  DenseSimplex(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
               const std::vector<double>& c)
      : m_(b.size()), n_(c.size()), basis_(m_), nonbasis_(n_), D_(m_ + 1, std::vector<double>(n_ + 1, 0.0)) {
    if (A.size() != m_) throw Error(ErrorCode::DimensionMismatch, "lp: A rows differ from b");
    for (std::size_t i = 0; i < m_; ++i) {
      if (A[i].size() != n_) throw Error(ErrorCode::DimensionMismatch, "lp: A row width differs from c");
      if (b[i] < 0.0) throw Error(ErrorCode::InfeasibleLP, "lp: right-hand side must be nonnegative");
      for (std::size_t j = 0; j < n_; ++j) D_[i][j] = A[i][j];
      D_[i][n_] = b[i];
      basis_[i] = n_ + i;
    }
    for (std::size_t j = 0; j < n_; ++j) {
      nonbasis_[j] = j;
      D_[m_][j] = -c[j];
    }
  }

  Result solve(std::size_t max_pivots = 200000) {
    Result r;
    std::size_t degenerate_run = 0;
    for (;;) {
      const bool bland = degenerate_run > 50;
      std::size_t s = kNone;
      for (std::size_t j = 0; j < n_; ++j) {
        if (D_[m_][j] >= -kEps) continue;
        if (s == kNone) {
          s = j;
        } else if (bland ? nonbasis_[j] < nonbasis_[s]
                         : (D_[m_][j] < D_[m_][s] ||
                            (D_[m_][j] == D_[m_][s] && nonbasis_[j] < nonbasis_[s]))) {
          s = j;
        }
      }
      if (s == kNone) break;

      std::size_t row = kNone;
      double best = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (D_[i][s] <= kEps) continue;
        const double ratio = D_[i][n_] / D_[i][s];
        if (row == kNone || ratio < best - kEps || (ratio <= best + kEps && basis_[i] < basis_[row])) {
          row = i;
          best = ratio;
        }
      }
      if (row == kNone) {
        r.status = Status::Unbounded;
        return r;
      }
      degenerate_run = (best <= kEps) ? degenerate_run + 1 : 0;
      pivot(row, s);
      if (++r.pivots >= max_pivots) {
        r.status = Status::IterationLimit;
        return r;
      }
    }
    r.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) r.x[basis_[i]] = D_[i][n_];
    r.value = D_[m_][n_];
    return r;
  }

 private:
  static constexpr double kEps = 1e-11;
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  void pivot(std::size_t r, std::size_t s) {
    const double inv = 1.0 / D_[r][s];
    for (std::size_t j = 0; j <= n_; ++j)
      if (j != s) D_[r][j] *= inv;
    D_[r][s] = inv;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = D_[i][s];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j)
        if (j != s) D_[i][j] -= f * D_[r][j];
      D_[i][s] = -f * inv;
    }
    std::swap(basis_[r], nonbasis_[s]);
  }

  std::size_t m_, n_;
  std::vector<std::size_t> basis_, nonbasis_;
  std::vector<std::vector<double>> D_;
};

}  // namespace liftmix::lp
