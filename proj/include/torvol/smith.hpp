#ifndef TORVOL_SMITH_HPP_
#define TORVOL_SMITH_HPP_

// Smith normal form over Z, enough to read off finitely generated abelian
// groups from integer presentation matrices.

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "torvol/rational.hpp"

namespace torvol {

using IntegerMatrix = std::vector<std::vector<Integer>>;

// Diagonal invariant factors d1 | d2 | ... | dr (all positive); r is the rank.
inline std::vector<Integer> smith_invariants(IntegerMatrix a) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a.front().size() : 0;
  std::vector<Integer> diag;
  std::size_t t = 0;
  while (t < rows && t < cols) {
    // Pivot: smallest nonzero |entry| in the remaining block.
    std::size_t pr = rows, pc = cols;
    for (std::size_t i = t; i < rows; ++i)
      for (std::size_t j = t; j < cols; ++j)
        if (a[i][j] != 0 && (pr == rows || abs(a[i][j]) < abs(a[pr][pc]))) {
          pr = i;
          pc = j;
        }
    if (pr == rows) break;
    std::swap(a[t], a[pr]);
    for (auto& row : a) std::swap(row[t], row[pc]);

    bool clean = false;
    while (!clean) {
      clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (a[i][t] == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), a[i][t].get_mpz_t(), a[t][t].get_mpz_t());
        for (std::size_t j = t; j < cols; ++j) a[i][j] -= q * a[t][j];
        if (a[i][t] != 0) {
          std::swap(a[t], a[i]);
          clean = false;
        }
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (a[t][j] == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), a[t][j].get_mpz_t(), a[t][t].get_mpz_t());
        for (std::size_t i = t; i < rows; ++i) a[i][j] -= q * a[i][t];
        if (a[t][j] != 0) {
          for (auto& row : a) std::swap(row[t], row[j]);
          clean = false;
        }
      }
      if (!clean) continue;
      // Divisibility: the pivot must divide every remaining entry.
      for (std::size_t i = t + 1; i < rows && clean; ++i)
        for (std::size_t j = t + 1; j < cols; ++j) {
          Integer r;
          mpz_fdiv_r(r.get_mpz_t(), a[i][j].get_mpz_t(), a[t][t].get_mpz_t());
          if (r != 0) {
            for (std::size_t k = t; k < cols; ++k) a[t][k] += a[i][k];
            clean = false;
            break;
          }
        }
    }
    diag.push_back(abs(a[t][t]));
    ++t;
  }
  return diag;
}

struct AbelianGroup {
  std::size_t rank = 0;
  std::vector<Integer> torsion;  // invariant factors > 1, each dividing the next

  friend bool operator==(const AbelianGroup& x, const AbelianGroup& y) {
    return x.rank == y.rank && x.torsion == y.torsion;
  }

  std::string str() const {
    std::string out;
    if (rank == 1) out = "Z";
    if (rank > 1) out = "Z^" + std::to_string(rank);
    for (const Integer& t : torsion) out += (out.empty() ? "" : " + ") + ("Z/" + t.get_str());
    return out.empty() ? "0" : out;
  }
};

// Cokernel of an integer matrix with |rows| rows, i.e. Z^rows / image.
inline AbelianGroup cokernel(const IntegerMatrix& a, std::size_t rows) {
  AbelianGroup g;
  const auto inv = a.empty() || a.front().empty() ? std::vector<Integer>{} : smith_invariants(a);
  g.rank = rows - inv.size();
  for (const Integer& d : inv)
    if (d != 1) g.torsion.push_back(d);
  return g;
}

}  // namespace torvol

#endif  // TORVOL_SMITH_HPP_
