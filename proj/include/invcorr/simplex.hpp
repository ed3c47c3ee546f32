#pragma once

#include <cstddef>
#include <vector>

#include "invcorr/error.hpp"

namespace invcorr {

enum class LpStatus { optimal, infeasible, unbounded, numerical_error };

const char* to_string(LpStatus status);

template <typename T>
struct LpResult {
  LpStatus status = LpStatus::numerical_error;
  T objective{};
  std::vector<T> solution;
  long iterations = 0;
};

// Dense two-phase primal simplex for  min c'x  s.t.  Ax = b, x >= 0.
//
// Bland's rule throughout (lowest eligible index enters, ties in the ratio
// test broken by lowest basis index), so runs are deterministic and cycling
// cannot occur. T is double or an exact rational type; `tol` is the pivot /
// reduced-cost tolerance and should be 0 for exact types.
template <typename T>
class DenseSimplex {
 public:
  DenseSimplex(std::vector<T> cost, std::vector<std::vector<T>> eq_lhs,
               std::vector<T> eq_rhs, T tol)
      : cost_(std::move(cost)),
        a_(std::move(eq_lhs)),
        b_(std::move(eq_rhs)),
        tol_(tol) {
    rows_ = b_.size();
    cols_ = cost_.size();
    if (a_.size() != rows_) {
      fail(ErrorCode::dimension, "lp_solve: lhs row count != rhs size");
    }
    for (const auto& row : a_) {
      if (row.size() != cols_) {
        fail(ErrorCode::dimension, "lp_solve: lhs column count != cost size");
      }
    }
  }

  LpResult<T> solve() {
    LpResult<T> result;
    build_phase1_tableau();
    run_simplex(/*phase1=*/true, result);
    if (result.status == LpStatus::unbounded) {
      // Phase-1 objective is bounded below by 0; hitting this means the
      // arithmetic went bad.
      result.status = LpStatus::numerical_error;
      return result;
    }
    if (result.status != LpStatus::optimal) return result;
    if (phase1_objective() > tol_) {
      result.status = LpStatus::infeasible;
      result.objective = phase1_objective();
      return result;
    }
    drive_out_artificials();
    to_phase2_costs();
    run_simplex(/*phase1=*/false, result);
    if (result.status != LpStatus::optimal) return result;
    extract_solution(result);
    return result;
  }

 private:
  std::size_t total_cols() const { return cols_ + rows_; }

  void build_phase1_tableau() {
    // Tableau rows: constraint rows then the objective row. Artificial
    // variables occupy columns cols_..cols_+rows_-1 and form the start basis.
    tableau_.assign(rows_ + 1, std::vector<T>(total_cols() + 1, T(0)));
    basis_.resize(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      const bool flip = b_[i] < T(0);
      for (std::size_t j = 0; j < cols_; ++j) {
        tableau_[i][j] = flip ? T(-a_[i][j]) : a_[i][j];
      }
      tableau_[i][cols_ + i] = T(1);
      tableau_[i][total_cols()] = flip ? T(-b_[i]) : b_[i];
      basis_[i] = cols_ + i;
    }
    // Phase-1 objective: sum of artificials, expressed in the start basis.
    auto& obj = tableau_[rows_];
    for (std::size_t j = 0; j < total_cols(); ++j) {
      T sum(0);
      for (std::size_t i = 0; i < rows_; ++i) sum += tableau_[i][j];
      obj[j] = (j >= cols_ ? T(1) : T(0)) - sum;
    }
    T rhs_sum(0);
    for (std::size_t i = 0; i < rows_; ++i) rhs_sum += tableau_[i][total_cols()];
    obj[total_cols()] = -rhs_sum;
  }

  T phase1_objective() const { return -tableau_[rows_][total_cols()]; }

  void drive_out_artificials() {
    for (std::size_t i = 0; i < rows_; ++i) {
      if (basis_[i] < cols_) continue;
      std::size_t pivot_col = total_cols();
      for (std::size_t j = 0; j < cols_; ++j) {
        T v = tableau_[i][j];
        if (v < T(0)) v = -v;
        if (v > tol_) {
          pivot_col = j;
          break;
        }
      }
      if (pivot_col == total_cols()) continue;  // redundant row; basis keeps artificial at 0
      pivot(i, pivot_col);
    }
  }

  void to_phase2_costs() {
    auto& obj = tableau_[rows_];
    for (std::size_t j = 0; j <= total_cols(); ++j) obj[j] = T(0);
    for (std::size_t j = 0; j < cols_; ++j) obj[j] = cost_[j];
    // Express the phase-2 objective in the current basis.
    for (std::size_t i = 0; i < rows_; ++i) {
      if (basis_[i] >= cols_) continue;
      T coeff = obj[basis_[i]];
      if (coeff == T(0)) continue;
      for (std::size_t j = 0; j <= total_cols(); ++j) {
        obj[j] -= coeff * tableau_[i][j];
      }
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    auto& pivot_row = tableau_[row];
    T inv = T(1) / pivot_row[col];
    for (auto& v : pivot_row) v *= inv;
    pivot_row[col] = T(1);
    for (std::size_t i = 0; i <= rows_; ++i) {
      if (i == row) continue;
      T factor = tableau_[i][col];
      if (factor == T(0)) continue;
      for (std::size_t j = 0; j <= total_cols(); ++j) {
        tableau_[i][j] -= factor * pivot_row[j];
      }
      tableau_[i][col] = T(0);
    }
    basis_[row] = col;
  }

  void run_simplex(bool phase1, LpResult<T>& result) {
    const std::size_t ncols = phase1 ? total_cols() : cols_;
    const auto& obj = tableau_[rows_];
    while (true) {
      // Bland: first column with a negative reduced cost enters.
      std::size_t entering = ncols;
      for (std::size_t j = 0; j < ncols; ++j) {
        if (obj[j] < -tol_) {
          entering = j;
          break;
        }
      }
      if (entering == ncols) {
        result.status = LpStatus::optimal;
        return;
      }
      std::size_t leaving = rows_;
      T best_ratio(0);
      for (std::size_t i = 0; i < rows_; ++i) {
        const T& a = tableau_[i][entering];
        if (a <= tol_) continue;
        T ratio = tableau_[i][total_cols()] / a;
        if (leaving == rows_ || ratio < best_ratio ||
            (ratio == best_ratio && basis_[i] < basis_[leaving])) {
          leaving = i;
          best_ratio = ratio;
        }
      }
      if (leaving == rows_) {
        result.status = LpStatus::unbounded;
        return;
      }
      pivot(leaving, entering);
      ++result.iterations;
      if (result.iterations > kIterationCap) {
        result.status = LpStatus::numerical_error;
        return;
      }
    }
  }

  void extract_solution(LpResult<T>& result) const {
    result.solution.assign(cols_, T(0));
    for (std::size_t i = 0; i < rows_; ++i) {
      if (basis_[i] < cols_) {
        result.solution[basis_[i]] = tableau_[i][total_cols()];
      }
    }
    result.objective = -tableau_[rows_][total_cols()];
  }

  static constexpr long kIterationCap = 2'000'000;

  std::vector<T> cost_;
  std::vector<std::vector<T>> a_;
  std::vector<T> b_;
  T tol_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::vector<T>> tableau_;
  std::vector<std::size_t> basis_;
};

// min cost'x  s.t.  eq_lhs x = eq_rhs, x >= 0.
template <typename T>
LpResult<T> lp_solve(std::vector<T> cost, std::vector<std::vector<T>> eq_lhs,
                     std::vector<T> eq_rhs, T tol = T(0)) {
  DenseSimplex<T> solver(std::move(cost), std::move(eq_lhs), std::move(eq_rhs),
                         tol);
  return solver.solve();
}

}  // namespace invcorr
