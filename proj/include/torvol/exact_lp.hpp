#ifndef TORVOL_EXACT_LP_HPP_
#define TORVOL_EXACT_LP_HPP_

// Two-phase revised simplex over Q.
//
//   minimize  c^T x   subject to  A x = b,  x >= 0
//
// The basis inverse is kept as a dense rational matrix and updated by
// elementary row operations. Pivot choices are deterministic functions of the
// input: Dantzig pricing, lexicographic ratio test, and Bland's rule as a
// backstop on very long degenerate stalls.
//
// IncrementalLp can grow after an optimal solve: new columns enter nonbasic at
// zero and new rows (right-hand side zero) enter with their artificial basic
// at zero, so the previous basis stays primal feasible and only phase 2 reruns.

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "torvol/rational.hpp"

namespace torvol {

struct SparseColumn {
  std::vector<std::pair<std::size_t, Rational>> entries;  // (row, value), rows distinct
};

struct LpProblem {
  std::size_t rows = 0;
  std::vector<SparseColumn> columns;
  std::vector<Rational> cost;  // one per column
  std::vector<Rational> rhs;   // one per row
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  Rational value;
  std::vector<Rational> x;  // primal, one per column
  // Optimal: y with y^T A_j <= c_j and y^T b = value.
  // Infeasible: Farkas ray with y^T A_j <= 0 and y^T b = value > 0.
  std::vector<Rational> dual;
  std::size_t pivots = 0;
};

class IncrementalLp {
 public:
  explicit IncrementalLp(LpProblem lp) : m_(lp.rows) {
    if (lp.cost.size() != lp.columns.size())
      throw std::invalid_argument("cost length != column count");
    if (lp.rhs.size() != m_) throw std::invalid_argument("rhs length != row count");
    rhs_ = std::move(lp.rhs);
    row_sign_.assign(m_, 1);
    for (std::size_t i = 0; i < m_; ++i) {
      if (rhs_[i] < 0) {
        row_sign_[i] = -1;
        rhs_[i] = -rhs_[i];
      }
    }
    basis_.resize(m_);
    binv_.assign(m_, std::vector<Rational>(m_));
    for (std::size_t i = 0; i < m_; ++i) {
      basis_[i] = artificial(i);
      binv_[i][i] = 1;
    }
    xb_ = rhs_;
    add_columns(std::move(lp.columns), std::move(lp.cost));
  }

  std::size_t rows() const { return m_; }
  std::size_t columns() const { return columns_.size(); }

  void add_columns(std::vector<SparseColumn> cols, std::vector<Rational> costs) {
    if (cols.size() != costs.size()) throw std::invalid_argument("cost length != column count");
    for (std::size_t j = 0; j < cols.size(); ++j) {
      for (const auto& [r, v] : cols[j].entries)
        if (r >= m_) throw std::invalid_argument("column entry outside row range");
      columns_.push_back(std::move(cols[j]));
      cost_struct_.push_back(std::move(costs[j]));
      is_basic_.push_back(false);
    }
  }

  // Appends rows with right-hand side zero. Existing columns have no entries
  // in them; add_columns may reference them afterwards.
  void add_rows(std::size_t count) {
    const std::size_t m = m_ + count;
    for (auto& row : binv_) row.resize(m);
    for (std::size_t i = m_; i < m; ++i) {
      binv_.emplace_back(m);
      binv_[i][i] = 1;
      basis_.push_back(artificial(i));
      xb_.emplace_back(0);
      rhs_.emplace_back(0);
      row_sign_.push_back(1);
    }
    m_ = m;
  }

  LpSolution solve() {
    LpSolution out;
    if (!phase1_done_) {
      phase_ = 1;
      set_costs();
      if (!iterate()) throw std::logic_error("phase 1 unbounded");
      Rational infeas = 0;
      for (std::size_t i = 0; i < m_; ++i)
        if (is_artificial(basis_[i])) infeas += xb_[i];
      if (infeas != 0) {
        out.status = LpStatus::kInfeasible;
        out.value = infeas;
        out.dual = export_dual();
        out.pivots = pivots_;
        return out;
      }
      phase1_done_ = true;
    }
    drive_out_artificials();
    phase_ = 2;
    set_costs();
    const bool bounded = iterate();
    out.pivots = pivots_;
    if (!bounded) {
      out.status = LpStatus::kUnbounded;
      return out;
    }
    out.status = LpStatus::kOptimal;
    out.x.assign(columns_.size(), Rational(0));
    for (std::size_t i = 0; i < m_; ++i)
      if (!is_artificial(basis_[i])) out.x[basis_[i]] = xb_[i];
    out.value = 0;
    for (std::size_t j = 0; j < columns_.size(); ++j)
      if (out.x[j] != 0) out.value += cost_struct_[j] * out.x[j];
    out.dual = export_dual();
    return out;
  }

 private:
  static constexpr std::size_t kArtificialBase = std::numeric_limits<std::size_t>::max() / 2;
  static std::size_t artificial(std::size_t row) { return kArtificialBase + row; }
  static bool is_artificial(std::size_t idx) { return idx >= kArtificialBase; }

  Rational cost_of(std::size_t idx) const {
    if (is_artificial(idx)) return Rational(phase_ == 1 ? 1 : 0);
    return phase_ == 1 ? Rational(0) : cost_struct_[idx];
  }

  std::vector<Rational> export_dual() const {
    std::vector<Rational> y(m_);
    for (std::size_t i = 0; i < m_; ++i) y[i] = row_sign_[i] > 0 ? y_[i] : Rational(-y_[i]);
    return y;
  }

  // Entry (row, value) pairs of structural column j after row-sign normalization.
  template <typename F>
  void for_column(std::size_t j, F&& f) const {
    for (const auto& [r, v] : columns_[j].entries) f(r, row_sign_[r] > 0 ? v : Rational(-v));
  }

  void set_costs() {
    y_.assign(m_, Rational(0));
    for (std::size_t i = 0; i < m_; ++i) {
      const Rational cb = cost_of(basis_[i]);
      if (cb == 0) continue;
      for (std::size_t k = 0; k < m_; ++k)
        if (binv_[i][k] != 0) y_[k] += cb * binv_[i][k];
    }
  }

  Rational reduced_cost(std::size_t j) const {
    Rational rc = cost_of(j);
    for_column(j, [&](std::size_t r, const Rational& v) {
      if (y_[r] != 0) rc -= y_[r] * v;
    });
    return rc;
  }

  std::vector<Rational> ftran(std::size_t j) const {
    std::vector<Rational> d(m_);
    for_column(j, [&](std::size_t r, const Rational& v) {
      for (std::size_t i = 0; i < m_; ++i)
        if (binv_[i][r] != 0) d[i] += binv_[i][r] * v;
    });
    return d;
  }

  void pivot(std::size_t row, std::size_t entering, const std::vector<Rational>& d,
             const Rational& rc) {
    const Rational piv = d[row];
    std::vector<std::size_t> nz;
    for (std::size_t k = 0; k < m_; ++k) {
      if (binv_[row][k] != 0) {
        binv_[row][k] /= piv;
        nz.push_back(k);
      }
    }
    xb_[row] /= piv;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == row || d[i] == 0) continue;
      const Rational& f = d[i];
      for (std::size_t k : nz) binv_[i][k] -= f * binv_[row][k];
      xb_[i] -= f * xb_[row];
    }
    if (rc != 0)
      for (std::size_t k : nz) y_[k] += rc * binv_[row][k];
    if (!is_artificial(basis_[row])) is_basic_[basis_[row]] = false;
    is_basic_[entering] = true;
    basis_[row] = entering;
    ++pivots_;
  }

  // Lexicographic comparison of rows i and k of [x_B | B^-1], each scaled by
  // 1/d. Distinct rows of B^-1 are independent, so ties cannot survive.
  bool lex_less(std::size_t i, std::size_t k, const std::vector<Rational>& d) const {
    for (std::size_t c = 0; c < m_; ++c) {
      const Rational a = binv_[i][c] / d[i];
      const Rational b = binv_[k][c] / d[k];
      if (a != b) return a < b;
    }
    return false;
  }

  // Returns false on unboundedness. Dantzig pricing (most negative reduced
  // cost, lowest index on ties) with a lexicographic ratio test. Should a
  // degenerate run exceed kStallLimit pivots, Bland's rule takes over until
  // the objective moves again; Bland's rule cannot cycle and every
  // non-degenerate pivot strictly improves the objective, so the loop
  // terminates. Artificials never re-enter; one still basic at zero leaves as
  // soon as the entering column touches its row.
  bool iterate() {
    const std::size_t stall_limit = 50 * (m_ + 10);
    const std::size_t n = columns_.size();
    std::size_t stalled = 0;
    for (;;) {
      const bool bland = stalled >= stall_limit;
      std::size_t entering = n;
      Rational rc;
      for (std::size_t j = 0; j < n; ++j) {
        if (is_basic_[j]) continue;
        Rational r = reduced_cost(j);
        if (r >= 0) continue;
        if (entering == n || r < rc) {
          entering = j;
          rc = std::move(r);
          if (bland) break;
        }
      }
      if (entering == n) return true;
      std::vector<Rational> d = ftran(entering);
      std::optional<std::size_t> leave;
      bool leave_artificial = false;
      Rational best;
      for (std::size_t i = 0; i < m_; ++i) {
        if (phase_ == 2 && is_artificial(basis_[i])) {
          if (d[i] != 0 && !leave_artificial) {
            leave = i;
            leave_artificial = true;
            best = 0;
          }
          continue;
        }
        if (leave_artificial || d[i] <= 0) continue;
        Rational ratio = xb_[i] / d[i];
        bool better = !leave || ratio < best;
        if (!better && ratio == best)
          better = bland ? basis_[i] < basis_[*leave] : lex_less(i, *leave, d);
        if (better) {
          leave = i;
          best = std::move(ratio);
        }
      }
      if (!leave) return false;
      stalled = (best == 0) ? stalled + 1 : 0;
      pivot(*leave, entering, d, rc);
    }
  }

  // Swaps zero-level artificials for structural columns where possible. Rows
  // where no structural column has a nonzero entry are redundant; their
  // artificial stays basic at zero.
  void drive_out_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[i])) continue;
      for (std::size_t j = 0; j < columns_.size(); ++j) {
        if (is_basic_[j]) continue;
        Rational di = 0;
        for_column(j, [&](std::size_t r, const Rational& v) {
          if (binv_[i][r] != 0) di += binv_[i][r] * v;
        });
        if (di == 0) continue;
        std::vector<Rational> d = ftran(j);
        pivot(i, j, d, Rational(0));
        break;
      }
    }
  }

  std::size_t m_;
  std::vector<SparseColumn> columns_;
  std::vector<Rational> cost_struct_;
  std::vector<int> row_sign_;
  std::vector<Rational> rhs_;
  std::vector<std::size_t> basis_;
  std::vector<std::vector<Rational>> binv_;
  std::vector<Rational> xb_;
  std::vector<bool> is_basic_;
  std::vector<Rational> y_;
  int phase_ = 1;
  bool phase1_done_ = false;
  std::size_t pivots_ = 0;
};

inline LpSolution solve_lp(const LpProblem& lp) { return IncrementalLp(lp).solve(); }

}  // namespace torvol

#endif  // TORVOL_EXACT_LP_HPP_
