#ifndef TORVOL_FILLING_HPP_
#define TORVOL_FILLING_HPP_

// Filling norms restricted to finite models.
//
// A model fixes a grid (1/q)Z^m and a box [0,D]^m. Its upper universe is every
// canonical straight (d+1)-simplex whose vertices lie on the grid inside the
// box; its lower universe is every grid d-simplex in the box together with all
// faces of the upper universe. Minimizing the l1 norm of x subject to
// boundary(x) = z over that universe gives an upper bound for the true filling
// norm, which is an infimum over all singular chains.

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "torvol/chain.hpp"
#include "torvol/chain_io.hpp"
#include "torvol/exact_lp.hpp"

namespace torvol {

struct ModelParams {
  std::size_t ambient_dim = 1;  // m
  std::size_t degree = 1;       // d, degree of the cycles being filled
  unsigned long q = 1;          // grid denominator
  unsigned long spread = 1;     // D
  std::size_t max_universe = 200000;

  std::string str() const {
    return "(m=" + std::to_string(ambient_dim) + ", d=" + std::to_string(degree) +
           ", q=" + std::to_string(q) + ", D=" + std::to_string(spread) + ")";
  }
};

class FillingError : public std::runtime_error {
 public:
  enum class Kind { kUniverseTooLarge, kNotRepresentable, kNotABoundary, kBudgetExhausted };
  FillingError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class FiniteModel {
 public:
  const ModelParams& params() const { return params_; }
  const std::vector<StraightSimplex>& lower() const { return lower_; }
  const std::vector<StraightSimplex>& upper() const { return upper_; }
  // Column j: coordinates of boundary(upper()[j]) in the lower universe.
  const std::vector<std::vector<std::pair<std::size_t, Integer>>>& columns() const {
    return columns_;
  }

  std::optional<std::size_t> lower_index(const StraightSimplex& s) const {
    auto it = lower_pos_.find(s);
    if (it == lower_pos_.end()) return std::nullopt;
    return it->second;
  }

  // Coordinates of z in the lower universe; throws kNotRepresentable.
  std::vector<Integer> coordinates(const Chain& z) const {
    check_chain(z.ambient_dim(), z.degree());
    std::vector<Integer> v(lower_.size());
    for (const auto& [s, k] : z.terms()) {
      auto idx = lower_index(s);
      if (!idx)
        throw FillingError(FillingError::Kind::kNotRepresentable,
                           "simplex " + s.str() + " is not in model " + params_.str());
      v[*idx] = k;
    }
    return v;
  }

  void check_chain(std::size_t m, std::size_t d) const {
    if (m != params_.ambient_dim || d != params_.degree)
      throw DimensionError("chain (m=" + std::to_string(m) + ", d=" + std::to_string(d) +
                           ") does not match model " + params_.str());
  }

  friend FiniteModel build_model(const ModelParams& params);

 private:
  ModelParams params_;
  std::vector<StraightSimplex> lower_;
  std::vector<StraightSimplex> upper_;
  std::map<StraightSimplex, std::size_t> lower_pos_;
  std::vector<std::vector<std::pair<std::size_t, Integer>>> columns_;
};

namespace detail {

// All grid points of (1/q)Z^m with coordinates in [0, hi], in lexicographic order.
inline std::vector<Point> grid_points(std::size_t m, unsigned long q, unsigned long steps) {
  std::vector<Point> out;
  std::vector<unsigned long> idx(m, 0);
  for (;;) {
    Point p;
    for (unsigned long i : idx) p.push_back(make_rational(Integer(i), Integer(q)));
    out.push_back(std::move(p));
    std::size_t k = m;
    while (k > 0) {
      --k;
      if (++idx[k] <= steps) break;
      idx[k] = 0;
      if (k == 0) return out;
    }
    if (m == 0) return out;
  }
}

inline void enumerate_simplices(const std::vector<Point>& firsts, const std::vector<Point>& rest,
                                std::size_t degree, std::vector<StraightSimplex>& out) {
  std::vector<std::size_t> idx(degree, 0);
  for (const Point& f : firsts) {
    std::fill(idx.begin(), idx.end(), 0);
    for (;;) {
      std::vector<Point> verts{f};
      for (std::size_t i : idx) verts.push_back(rest[i]);
      out.push_back(StraightSimplex::canonicalize(std::move(verts)));
      std::size_t k = degree;
      bool done = true;
      while (k > 0) {
        --k;
        if (++idx[k] < rest.size()) {
          done = false;
          break;
        }
        idx[k] = 0;
      }
      if (done) break;
    }
  }
}

inline double universe_size(std::size_t m, unsigned long q, unsigned long spread,
                            std::size_t degree) {
  double firsts = 1, pts = 1;
  for (std::size_t i = 0; i < m; ++i) {
    firsts *= static_cast<double>(q);
    pts *= static_cast<double>(q * spread + 1);
  }
  double total = firsts;
  for (std::size_t i = 0; i < degree; ++i) total *= pts;
  return total;
}

}  // namespace detail

inline FiniteModel build_model(const ModelParams& params) {
  if (params.q < 1 || params.spread < 1)
    throw std::invalid_argument("model needs q >= 1 and D >= 1");
  if (params.ambient_dim < 1) throw std::invalid_argument("model needs m >= 1");
  const double upper_count = detail::universe_size(params.ambient_dim, params.q,
                                                   params.spread, params.degree + 1);
  const double lower_count =
      detail::universe_size(params.ambient_dim, params.q, params.spread, params.degree);
  if (upper_count > static_cast<double>(params.max_universe))
    throw FillingError(FillingError::Kind::kUniverseTooLarge,
                       "model " + params.str() + " has " +
                           std::to_string(static_cast<long long>(upper_count)) +
                           " (d+1)-simplices, cap is " + std::to_string(params.max_universe));

  FiniteModel model;
  model.params_ = params;
  const auto firsts = detail::grid_points(params.ambient_dim, params.q, params.q - 1);
  const auto rest = detail::grid_points(params.ambient_dim, params.q, params.q * params.spread);
  detail::enumerate_simplices(firsts, rest, params.degree + 1, model.upper_);
  std::sort(model.upper_.begin(), model.upper_.end());

  std::vector<StraightSimplex> lower;
  lower.reserve(static_cast<std::size_t>(lower_count));
  detail::enumerate_simplices(firsts, rest, params.degree, lower);
  for (const auto& s : model.upper_)
    for (std::size_t i = 0; i <= s.degree(); ++i) lower.push_back(s.face(i));
  std::sort(lower.begin(), lower.end());
  lower.erase(std::unique(lower.begin(), lower.end()), lower.end());
  model.lower_ = std::move(lower);
  for (std::size_t i = 0; i < model.lower_.size(); ++i) model.lower_pos_.emplace(model.lower_[i], i);

  model.columns_.reserve(model.upper_.size());
  for (const auto& s : model.upper_) {
    std::map<std::size_t, Integer> col;
    for (std::size_t i = 0; i <= s.degree(); ++i) {
      auto& e = col[model.lower_pos_.at(s.face(i))];
      e += (i % 2 == 0) ? 1 : -1;
    }
    std::vector<std::pair<std::size_t, Integer>> entries;
    for (auto& [r, v] : col)
      if (v != 0) entries.emplace_back(r, v);
    model.columns_.push_back(std::move(entries));
  }
  return model;
}

enum class FillMode { kIntegral, kReal };

inline const char* to_string(FillMode mode) {
  return mode == FillMode::kIntegral ? "integral" : "real";
}

struct FillingCertificate {
  Rational value;
  RationalChain witness;
  // Dual vector over the lower universe: |y . column| <= 1 for every column and
  // y . z equals the LP optimum. In integral mode it certifies the LP lower
  // bound of the root relaxation.
  std::vector<Rational> dual;
  FillMode mode = FillMode::kReal;
  std::size_t nodes = 0;  // branch-and-bound nodes (1 for LP)
};

struct FillOptions {
  std::size_t node_cap = 10000;
};

namespace detail {

struct BranchBound {
  std::size_t var;  // model column
  bool upper;       // x_var <= value when true, x_var >= value otherwise
  Integer value;
};

// Exact LP for
//   min sum(x+ + x-)  s.t.  B(x+ - x-) = z  plus branching rows,
// squeezed from two sides.
//
// Upper side: delayed column generation. The LP over the active columns and
// the rows they touch is reoptimized in place; inactive columns are priced
// exactly against its dual extended by zero (|y . B_j| > 1 when optimal,
// y . B_j != 0 for a Farkas ray when infeasible).
//
// Lower side: a relaxation that keeps every column but only a subset of the
// rows. Its dual, extended by zero, satisfies |y . B_j| <= 1 for every column,
// so it is a valid certificate for the full problem. Rows its primal violates
// are added until the primal is feasible or the two values meet.
//
// Inactive columns never meet branching rows, so both sides stay exact at
// every branch-and-bound node. Active columns and relaxation rows only grow.
class ColumnGeneration {
 public:
  struct Result {
    LpStatus status = LpStatus::kInfeasible;
    Rational value;
    std::vector<Rational> x;     // net coefficient per model column
    std::vector<Rational> dual;  // per lower simplex
    std::size_t rounds = 0;
  };

  ColumnGeneration(const FiniteModel& model, std::vector<Integer> z)
      : model_(model),
        z_(std::move(z)),
        active_(model.upper().size(), false),
        touching_(model.lower().size()) {
    for (std::size_t j = 0; j < model.columns().size(); ++j)
      for (const auto& [r, v] : model.columns()[j]) touching_[r].push_back(j);
    for (std::size_t i = 0; i < z_.size(); ++i)
      if (z_[i] != 0) relaxed_rows_.insert(i);
    // Seed: columns spanned by the vertices of the target's own lifts.
    std::vector<Point> seen;
    for (std::size_t i = 0; i < z_.size(); ++i)
      if (z_[i] != 0)
        for (const Point& p : model.lower()[i].vertices()) seen.push_back(p);
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (std::size_t j = 0; j < active_.size(); ++j) {
      bool inside = !model.columns()[j].empty();
      for (const Point& p : model.upper()[j].vertices())
        inside = inside && std::binary_search(seen.begin(), seen.end(), p);
      if (inside) activate(j);
    }
  }

  Result solve(const std::vector<BranchBound>& bounds) {
    Upper upper(*this, bounds);
    Result out;
    for (;;) {
      ++out.rounds;
      Result low = relaxed(bounds);
      if (low.status != LpStatus::kOptimal) {
        low.rounds = out.rounds;
        return low;
      }
      std::vector<std::size_t> violated_rows = residual_rows(low.x);
      if (violated_rows.empty()) {
        low.rounds = out.rounds;
        return low;
      }
      const LpSolution sol = upper.lp.solve();
      if (sol.status == LpStatus::kUnbounded) throw std::logic_error("filling LP unbounded");
      std::vector<Rational> y = upper.full_dual(sol);
      std::vector<std::size_t> priced;
      if (sol.status == LpStatus::kOptimal && sol.value == low.value) {
        low.x = upper.net(sol);
        low.rounds = out.rounds;
        return low;
      }
      priced = price(y, sol.status == LpStatus::kOptimal, upper.pair_pos);
      if (priced.empty() && sol.status == LpStatus::kOptimal) {
        out.status = LpStatus::kOptimal;
        out.value = sol.value;
        out.x = upper.net(sol);
        out.dual = std::move(y);
        return out;
      }
      for (std::size_t r : violated_rows) relaxed_rows_.insert(r);
      upper.add(priced);
    }
  }

  std::size_t active_count() const { return list_.size(); }

 private:
  // The column-restricted LP, grown in place across rounds.
  struct Upper {
    static constexpr std::size_t kBranchRow = static_cast<std::size_t>(-1);
    ColumnGeneration& cg;
    std::size_t slack_count;
    std::unordered_map<std::size_t, std::size_t> local;  // lower simplex -> LP row
    std::vector<std::size_t> row_of;                      // LP row -> lower simplex
    std::vector<std::size_t> var_of;                      // LP column pair -> model column
    std::unordered_map<std::size_t, std::size_t> pair_pos;
    std::size_t initial_pairs = 0;
    IncrementalLp lp;

    Upper(ColumnGeneration& owner, const std::vector<BranchBound>& bounds)
        : cg(owner), slack_count(bounds.size()), lp(initial(bounds)) {}

    void touch_row(std::size_t r) {
      if (local.emplace(r, row_of.size()).second) row_of.push_back(r);
    }

    void push_pair(std::size_t j, std::vector<SparseColumn>& cols, std::vector<Rational>& cost) {
      SparseColumn plus, minus;
      for (const auto& [r, v] : cg.model_.columns()[j]) {
        plus.entries.emplace_back(local.at(r), Rational(v));
        minus.entries.emplace_back(local.at(r), Rational(-v));
      }
      cols.push_back(std::move(plus));
      cols.push_back(std::move(minus));
      cost.emplace_back(1);
      cost.emplace_back(1);
      pair_pos.emplace(j, var_of.size());
      var_of.push_back(j);
    }

    // Rows: z support, rows of active columns, then one row per bound.
    // Columns: initial pairs, then one slack per bound, then later pairs.
    LpProblem initial(const std::vector<BranchBound>& bounds) {
      for (std::size_t i = 0; i < cg.z_.size(); ++i)
        if (cg.z_[i] != 0) touch_row(i);
      for (std::size_t j : cg.list_)
        for (const auto& [r, v] : cg.model_.columns()[j]) touch_row(r);
      LpProblem lp0;
      const std::size_t base_rows = row_of.size();
      lp0.rows = base_rows + bounds.size();
      lp0.rhs.assign(lp0.rows, Rational(0));
      for (std::size_t i = 0; i < base_rows; ++i) lp0.rhs[i] = Rational(cg.z_[row_of[i]]);
      for (std::size_t j : cg.list_) push_pair(j, lp0.columns, lp0.cost);
      initial_pairs = var_of.size();
      for (std::size_t b = 0; b < bounds.size(); ++b) {
        const std::size_t row = base_rows + b;
        const std::size_t k = pair_pos.at(bounds[b].var);
        lp0.columns[2 * k].entries.emplace_back(row, Rational(1));
        lp0.columns[2 * k + 1].entries.emplace_back(row, Rational(-1));
        lp0.rhs[row] = Rational(bounds[b].value);
        row_of.push_back(kBranchRow);
      }
      for (std::size_t b = 0; b < bounds.size(); ++b) {
        SparseColumn slack;
        slack.entries.emplace_back(base_rows + b, Rational(bounds[b].upper ? 1 : -1));
        lp0.columns.push_back(std::move(slack));
        lp0.cost.emplace_back(0);
      }
      return lp0;
    }

    std::size_t column(std::size_t k, bool plus) const {
      return (k < initial_pairs ? 2 * k : 2 * k + slack_count) + (plus ? 0 : 1);
    }

    std::vector<Rational> net(const LpSolution& sol) const {
      std::vector<Rational> x(cg.active_.size());
      for (std::size_t k = 0; k < var_of.size(); ++k)
        x[var_of[k]] = sol.x[column(k, true)] - sol.x[column(k, false)];
      return x;
    }

    std::vector<Rational> full_dual(const LpSolution& sol) const {
      std::vector<Rational> y(cg.model_.lower().size());
      for (std::size_t i = 0; i < row_of.size(); ++i)
        if (row_of[i] != kBranchRow) y[row_of[i]] = sol.dual[i];
      return y;
    }

    void add(const std::vector<std::size_t>& priced) {
      const std::size_t old_rows = row_of.size();
      for (std::size_t j : priced)
        for (const auto& [r, v] : cg.model_.columns()[j]) touch_row(r);
      lp.add_rows(row_of.size() - old_rows);
      std::vector<SparseColumn> cols;
      std::vector<Rational> cost;
      for (std::size_t j : priced) {
        cg.activate(j);
        push_pair(j, cols, cost);
      }
      lp.add_columns(std::move(cols), std::move(cost));
    }
  };

  // Inactive columns whose reduced cost is negative under y, most violated
  // first, lowest index on ties.
  std::vector<std::size_t> price(const std::vector<Rational>& y, bool feasible,
                                 const std::unordered_map<std::size_t, std::size_t>& in_lp) const {
    std::vector<std::pair<Rational, std::size_t>> violated;
    for (std::size_t j = 0; j < active_.size(); ++j) {
      if (in_lp.count(j)) continue;
      Rational dot = 0;
      for (const auto& [r, v] : model_.columns()[j])
        if (y[r] != 0) dot += y[r] * Rational(v);
      const Rational excess = abs(dot) - Rational(feasible ? 1 : 0);
      if (excess > 0) violated.emplace_back(excess, j);
    }
    std::sort(violated.begin(), violated.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    const std::size_t take = std::min(violated.size(), std::max<std::size_t>(64, in_lp.size() / 4));
    std::vector<std::size_t> out;
    for (std::size_t t = 0; t < take; ++t) out.push_back(violated[t].second);
    return out;
  }

  // Rows (lower simplices) where B x != z.
  std::vector<std::size_t> residual_rows(const std::vector<Rational>& x) const {
    std::map<std::size_t, Rational> res;
    for (std::size_t i = 0; i < z_.size(); ++i)
      if (z_[i] != 0) res[i] = -Rational(z_[i]);
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j] == 0) continue;
      for (const auto& [r, v] : model_.columns()[j]) res[r] += x[j] * Rational(v);
    }
    std::vector<std::size_t> out;
    for (const auto& [r, v] : res)
      if (v != 0) out.push_back(r);
    return out;
  }

  // Every column meeting the relaxation rows or a bound, restricted to those rows.
  Result relaxed(const std::vector<BranchBound>& bounds) const {
    std::vector<std::size_t> rows(relaxed_rows_.begin(), relaxed_rows_.end());
    std::unordered_map<std::size_t, std::size_t> local;
    for (std::size_t i = 0; i < rows.size(); ++i) local.emplace(rows[i], i);
    std::set<std::size_t> cols;
    for (std::size_t r : rows) cols.insert(touching_[r].begin(), touching_[r].end());
    for (const auto& bd : bounds) cols.insert(bd.var);
    const std::vector<std::size_t> colv(cols.begin(), cols.end());
    std::unordered_map<std::size_t, std::size_t> pos;
    for (std::size_t k = 0; k < colv.size(); ++k) pos.emplace(colv[k], k);

    const std::size_t n = colv.size();
    LpProblem lp;
    lp.rows = rows.size() + bounds.size();
    lp.columns.resize(2 * n + bounds.size());
    lp.cost.assign(2 * n + bounds.size(), Rational(0));
    lp.rhs.assign(lp.rows, Rational(0));
    for (std::size_t i = 0; i < rows.size(); ++i) lp.rhs[i] = Rational(z_[rows[i]]);
    for (std::size_t k = 0; k < n; ++k) {
      for (const auto& [r, v] : model_.columns()[colv[k]]) {
        auto it = local.find(r);
        if (it == local.end()) continue;
        lp.columns[k].entries.emplace_back(it->second, Rational(v));
        lp.columns[n + k].entries.emplace_back(it->second, Rational(-v));
      }
      lp.cost[k] = 1;
      lp.cost[n + k] = 1;
    }
    for (std::size_t b = 0; b < bounds.size(); ++b) {
      const std::size_t row = rows.size() + b;
      const std::size_t k = pos.at(bounds[b].var);
      lp.columns[k].entries.emplace_back(row, Rational(1));
      lp.columns[n + k].entries.emplace_back(row, Rational(-1));
      lp.columns[2 * n + b].entries.emplace_back(row, Rational(bounds[b].upper ? 1 : -1));
      lp.rhs[row] = Rational(bounds[b].value);
    }
    const LpSolution sol = solve_lp(lp);
    if (sol.status == LpStatus::kUnbounded) throw std::logic_error("filling LP unbounded");
    Result out;
    out.status = sol.status;
    out.value = sol.value;
    out.dual.assign(model_.lower().size(), Rational(0));
    for (std::size_t i = 0; i < rows.size(); ++i) out.dual[rows[i]] = sol.dual[i];
    if (sol.status == LpStatus::kOptimal) {
      out.x.assign(active_.size(), Rational(0));
      for (std::size_t k = 0; k < n; ++k) out.x[colv[k]] = sol.x[k] - sol.x[n + k];
    }
    return out;
  }

  void activate(std::size_t j) {
    if (active_[j]) return;
    active_[j] = true;
    list_.insert(j);
  }

  const FiniteModel& model_;
  std::vector<Integer> z_;
  std::vector<bool> active_;
  std::vector<std::vector<std::size_t>> touching_;
  std::set<std::size_t> relaxed_rows_;
  std::set<std::size_t> list_;
};

inline RationalChain witness_chain(const FiniteModel& model, const std::vector<Rational>& x) {
  RationalChain w(model.params().ambient_dim, model.params().degree + 1);
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j] != 0) w.add_term(model.upper()[j], x[j]);
  return w;
}

}  // namespace detail

// Checks a certificate against z without trusting the model's matrix for the
// witness: boundary(witness) is recomputed through the chain calculus.
inline bool verify_certificate(const FiniteModel& model, const Chain& z,
                               const FillingCertificate& cert, std::string* why = nullptr) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (cert.witness.degree() != z.degree() + 1 || cert.witness.ambient_dim() != z.ambient_dim())
    return fail("witness has the wrong shape");
  if (cert.witness.is_zero()) {
    if (!z.is_zero()) return fail("empty witness for a nonzero target");
  } else if (boundary(cert.witness) != to_rational(z)) {
    return fail("boundary(witness) != z");
  }
  if (l1_norm(cert.witness) != cert.value) return fail("value != l1_norm(witness)");
  if (cert.mode == FillMode::kIntegral) {
    for (const auto& [s, k] : cert.witness.terms())
      if (!is_integer(k)) return fail("non-integral witness coefficient");
  }
  if (cert.dual.size() != model.lower().size()) return fail("dual has the wrong length");
  for (const auto& col : model.columns()) {
    Rational dot = 0;
    for (const auto& [r, v] : col) dot += cert.dual[r] * Rational(v);
    if (dot > 1 || dot < -1) return fail("dual violates |y . B_j| <= 1");
  }
  const auto zc = model.coordinates(z);
  Rational dz = 0;
  for (std::size_t i = 0; i < zc.size(); ++i)
    if (zc[i] != 0) dz += cert.dual[i] * Rational(zc[i]);
  if (cert.mode == FillMode::kReal && dz != cert.value) return fail("y . z != value");
  if (cert.mode == FillMode::kIntegral && dz > cert.value) return fail("y . z > value");
  return true;
}

inline FillingCertificate fill_real(const FiniteModel& model, const Chain& z) {
  detail::ColumnGeneration cg(model, model.coordinates(z));
  auto sol = cg.solve({});
  if (sol.status != LpStatus::kOptimal)
    throw FillingError(FillingError::Kind::kNotABoundary,
                       "target is not a boundary within model " + model.params().str());
  FillingCertificate cert{sol.value, detail::witness_chain(model, sol.x), std::move(sol.dual),
                          FillMode::kReal, 1};
  std::string why;
  if (!verify_certificate(model, z, cert, &why))
    throw std::logic_error("fill_real produced an invalid certificate: " + why);
  return cert;
}

// Best-first branch-and-bound on the LP relaxation. Branches on the most
// fractional net coefficient (ties to the lowest column); nodes with equal
// bound are expanded in creation order.
inline FillingCertificate fill_int(const FiniteModel& model, const Chain& z,
                                   const FillOptions& options = {}) {
  detail::ColumnGeneration cg(model, model.coordinates(z));
  using NodeLp = detail::ColumnGeneration::Result;
  struct Node {
    Rational bound;
    std::size_t seq;
    std::vector<detail::BranchBound> bounds;
    NodeLp sol;
  };
  auto worse = [](const Node& a, const Node& b) {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.seq > b.seq;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);

  NodeLp root = cg.solve({});
  if (root.status != LpStatus::kOptimal)
    throw FillingError(FillingError::Kind::kNotABoundary,
                       "target is not a boundary within model " + model.params().str());
  const std::vector<Rational> root_dual = root.dual;
  std::size_t seq = 0;
  open.push(Node{root.value, seq++, {}, std::move(root)});

  std::optional<Integer> best;
  std::vector<Rational> best_x;
  std::size_t nodes = 0;
  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (best && Rational(ceil_of(node.bound)) >= Rational(*best)) break;
    if (++nodes > options.node_cap)
      throw FillingError(FillingError::Kind::kBudgetExhausted,
                         "branch-and-bound node cap " + std::to_string(options.node_cap) +
                             " exhausted on model " + model.params().str());
    const auto& x = node.sol.x;
    std::optional<std::size_t> branch;
    Rational best_frac = -1;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (is_integer(x[j])) continue;
      Rational frac = x[j] - Rational(floor_of(x[j]));
      Rational closeness = frac < Rational(1, 2) ? frac : Rational(1 - frac);
      if (closeness > best_frac) {
        best_frac = closeness;
        branch = j;
      }
    }
    if (!branch) {
      Integer value = node.sol.value.get_num();
      if (!best || value < *best) {
        best = value;
        best_x = x;
      }
      continue;
    }
    for (bool upper : {true, false}) {
      auto bounds = node.bounds;
      bounds.push_back({*branch, upper, upper ? floor_of(x[*branch]) : ceil_of(x[*branch])});
      NodeLp child = cg.solve(bounds);
      if (child.status != LpStatus::kOptimal) continue;
      if (best && Rational(ceil_of(child.value)) >= Rational(*best)) continue;
      open.push(Node{child.value, seq++, std::move(bounds), std::move(child)});
    }
  }
  if (!best) throw std::logic_error("branch-and-bound found no integral point");

  FillingCertificate cert{Rational(*best), detail::witness_chain(model, best_x),
                          {}, FillMode::kIntegral, nodes};
  cert.dual = root_dual;
  std::string why;
  if (!verify_certificate(model, z, cert, &why))
    throw std::logic_error("fill_int produced an invalid certificate: " + why);
  return cert;
}

inline Chain integral_witness(const FillingCertificate& cert) {
  Chain w(cert.witness.ambient_dim(), cert.witness.degree());
  for (const auto& [s, k] : cert.witness.terms()) {
    if (!is_integer(k)) throw std::invalid_argument("witness is not integral");
    w.add_term(s, k.get_num());
  }
  return w;
}

inline nlohmann::json certificate_to_json(const FillingCertificate& cert) {
  nlohmann::json dual = nlohmann::json::array();
  for (const Rational& y : cert.dual) dual.push_back(rational_to_json(y));
  return {{"value", rational_to_json(cert.value)},
          {"mode", to_string(cert.mode)},
          {"witness", chain_to_json(cert.witness)},
          {"dual", dual}};
}

// Exhaustive search for the least l1 norm of an integral filling, by iterative
// deepening on the norm. Columns are recomputed from the chain calculus rather
// than taken from the model's assembled matrix. Returns nullopt when no filling
// of norm <= budget exists in the model.
inline std::optional<Integer> oracle_fill_int(const FiniteModel& model, const Chain& z,
                                              unsigned budget,
                                              std::size_t max_columns = 5000) {
  model.check_chain(z.ambient_dim(), z.degree());
  if (z.is_zero()) return Integer(0);
  if (model.upper().size() > max_columns)
    throw FillingError(FillingError::Kind::kUniverseTooLarge,
                       "oracle refuses models with more than " + std::to_string(max_columns) +
                           " columns");

  // Residual indexed by lower simplices, sparse.
  using Residual = std::map<StraightSimplex, long long>;
  std::vector<std::vector<std::pair<StraightSimplex, long long>>> cols;
  std::map<StraightSimplex, std::vector<std::size_t>> touching;
  long long max_col_norm = 1;
  for (std::size_t j = 0; j < model.upper().size(); ++j) {
    Chain bd = boundary(Chain::of(model.upper()[j]));
    std::vector<std::pair<StraightSimplex, long long>> col;
    long long norm = 0;
    for (const auto& [s, k] : bd.terms()) {
      col.emplace_back(s, k.get_si());
      touching[s].push_back(j);
      norm += std::abs(k.get_si());
    }
    max_col_norm = std::max(max_col_norm, norm);
    cols.push_back(std::move(col));
  }
  Residual start;
  for (const auto& [s, k] : z.terms()) {
    if (!k.fits_slong_p()) return std::nullopt;
    start[s] = k.get_si();
  }

  // Residual states already shown infeasible with a given remaining budget.
  std::map<Residual, unsigned> dead;

  auto norm_of = [](const Residual& r) {
    long long t = 0;
    for (const auto& [s, k] : r) t += std::abs(k);
    return t;
  };

  std::function<bool(Residual&, unsigned)> search = [&](Residual& r, unsigned left) -> bool {
    if (r.empty()) return true;
    if (left == 0) return false;
    if (norm_of(r) > static_cast<long long>(left) * max_col_norm) return false;
    auto it = dead.find(r);
    if (it != dead.end() && it->second >= left) return false;
    // Copies: applying a column may erase this entry.
    const StraightSimplex target = r.begin()->first;
    const long long amount = r.begin()->second;
    auto touch = touching.find(target);
    if (touch != touching.end()) {
      const std::vector<std::size_t> candidates = touch->second;
      for (std::size_t j : candidates) {
        for (int sign : {1, -1}) {
          // The chosen column must move the residual at |target| toward zero.
          long long entry = 0;
          for (const auto& [s, k] : cols[j])
            if (s == target) entry = k;
          if ((amount > 0) != (entry * sign > 0)) continue;
          for (const auto& [s, k] : cols[j]) {
            long long& v = r[s];
            v -= sign * k;
            if (v == 0) r.erase(s);
          }
          const bool ok = search(r, left - 1);
          for (const auto& [s, k] : cols[j]) {
            long long& v = r[s];
            v += sign * k;
            if (v == 0) r.erase(s);
          }
          if (ok) return true;
        }
      }
    }
    unsigned& mark = dead[r];
    mark = std::max(mark, left);
    return false;
  };

  for (unsigned n = 1; n <= budget; ++n) {
    Residual r = start;
    if (search(r, n)) return Integer(n);
  }
  return std::nullopt;
}

}  // namespace torvol

#endif  // TORVOL_FILLING_HPP_
