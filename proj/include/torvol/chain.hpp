#ifndef TORVOL_CHAIN_HPP_
#define TORVOL_CHAIN_HPP_

// Straight singular chains on tori T^m = R^m / Z^m.
//
// A straight simplex is the image of the affine simplex spanned by a tuple of
// points of R^m. Two tuples that differ by a single integer translation give
// the same singular simplex, so every simplex is stored through its canonical
// lift: the representative whose first vertex lies in [0,1)^m. Vertex order is
// significant and degenerate tuples are allowed.

#include <algorithm>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "torvol/rational.hpp"

namespace torvol {

using Point = std::vector<Rational>;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline bool lex_less(const Point& a, const Point& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

class StraightSimplex {
 public:
  // Translates |vertices| by the integer vector that moves the first vertex
  // into [0,1)^m.
  static StraightSimplex canonicalize(std::vector<Point> vertices) {
    if (vertices.empty()) throw DimensionError("simplex needs at least one vertex");
    const std::size_t m = vertices.front().size();
    if (m == 0) throw DimensionError("ambient dimension must be positive");
    for (const Point& p : vertices)
      if (p.size() != m) throw DimensionError("vertex dimension mismatch");
    for (std::size_t k = 0; k < m; ++k) {
      const Rational shift(floor_of(vertices.front()[k]));
      if (shift == 0) continue;
      for (Point& p : vertices) p[k] -= shift;
    }
    return StraightSimplex(m, std::move(vertices));
  }

  std::size_t ambient_dim() const { return ambient_dim_; }
  std::size_t degree() const { return vertices_.size() - 1; }
  const std::vector<Point>& vertices() const { return vertices_; }
  const Point& vertex(std::size_t i) const { return vertices_[i]; }

  // i-th face: drop vertex i, then re-canonicalize.
  StraightSimplex face(std::size_t i) const {
    if (degree() == 0) throw DimensionError("a 0-simplex has no faces");
    std::vector<Point> rest;
    rest.reserve(vertices_.size() - 1);
    for (std::size_t j = 0; j < vertices_.size(); ++j)
      if (j != i) rest.push_back(vertices_[j]);
    return canonicalize(std::move(rest));
  }

  // Largest coordinate difference between two vertices, over all axes.
  Rational spread() const {
    Rational best = 0;
    for (std::size_t k = 0; k < ambient_dim_; ++k) {
      Rational lo = vertices_[0][k], hi = vertices_[0][k];
      for (const Point& p : vertices_) {
        if (p[k] < lo) lo = p[k];
        if (p[k] > hi) hi = p[k];
      }
      if (hi - lo > best) best = hi - lo;
    }
    return best;
  }

  friend bool operator==(const StraightSimplex& a, const StraightSimplex& b) {
    return a.ambient_dim_ == b.ambient_dim_ && a.vertices_ == b.vertices_;
  }
  friend bool operator!=(const StraightSimplex& a, const StraightSimplex& b) {
    return !(a == b);
  }
  friend bool operator<(const StraightSimplex& a, const StraightSimplex& b) {
    if (a.ambient_dim_ != b.ambient_dim_) return a.ambient_dim_ < b.ambient_dim_;
    if (a.vertices_.size() != b.vertices_.size())
      return a.vertices_.size() < b.vertices_.size();
    return std::lexicographical_compare(a.vertices_.begin(), a.vertices_.end(),
                                        b.vertices_.begin(), b.vertices_.end(),
                                        lex_less);
  }

  std::string str() const {
    std::string out = "[";
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      if (i) out += ",";
      if (ambient_dim_ == 1) {
        out += vertices_[i][0].get_str();
        continue;
      }
      out += "(";
      for (std::size_t k = 0; k < ambient_dim_; ++k) {
        if (k) out += ",";
        out += vertices_[i][k].get_str();
      }
      out += ")";
    }
    return out + "]";
  }

 private:
  StraightSimplex(std::size_t m, std::vector<Point> v)
      : ambient_dim_(m), vertices_(std::move(v)) {}

  std::size_t ambient_dim_;
  std::vector<Point> vertices_;
};

// Shorthand for simplices on S^1 = R/Z.
inline StraightSimplex circle_simplex(std::initializer_list<Rational> xs) {
  std::vector<Point> v;
  for (const Rational& x : xs) v.push_back(Point{x});
  return StraightSimplex::canonicalize(std::move(v));
}

// Finite linear combination of straight simplices of a fixed degree on T^m.
// Coeff is Integer for integral chains and Rational for LP witnesses.
template <typename Coeff>
class BasicChain {
 public:
  using Terms = std::map<StraightSimplex, Coeff>;

  BasicChain(std::size_t ambient_dim, std::size_t degree)
      : ambient_dim_(ambient_dim), degree_(degree) {
    if (ambient_dim == 0) throw DimensionError("ambient dimension must be positive");
  }

  static BasicChain of(const StraightSimplex& s, Coeff coeff = Coeff(1)) {
    BasicChain c(s.ambient_dim(), s.degree());
    c.add_term(s, coeff);
    return c;
  }

  std::size_t ambient_dim() const { return ambient_dim_; }
  std::size_t degree() const { return degree_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  Coeff coeff(const StraightSimplex& s) const {
    auto it = terms_.find(s);
    return it == terms_.end() ? Coeff(0) : it->second;
  }

  void add_term(const StraightSimplex& s, const Coeff& coeff) {
    if (s.ambient_dim() != ambient_dim_ || s.degree() != degree_)
      throw DimensionError("simplex " + s.str() + " does not match chain (m=" +
                           std::to_string(ambient_dim_) + ", d=" +
                           std::to_string(degree_) + ")");
    if (coeff == 0) return;
    auto [it, inserted] = terms_.try_emplace(s, coeff);
    if (inserted) return;
    it->second += coeff;
    if (it->second == 0) terms_.erase(it);
  }

  BasicChain& operator+=(const BasicChain& o) {
    check_compatible(o);
    for (const auto& [s, k] : o.terms_) add_term(s, k);
    return *this;
  }
  BasicChain& operator-=(const BasicChain& o) {
    check_compatible(o);
    for (const auto& [s, k] : o.terms_) add_term(s, -k);
    return *this;
  }
  friend BasicChain operator+(BasicChain a, const BasicChain& b) { return a += b; }
  friend BasicChain operator-(BasicChain a, const BasicChain& b) { return a -= b; }
  friend BasicChain operator-(const BasicChain& a) { return scale(Coeff(-1), a); }

  friend BasicChain scale(const Coeff& n, const BasicChain& c) {
    BasicChain out(c.ambient_dim_, c.degree_);
    if (n == 0) return out;
    for (const auto& [s, k] : c.terms_) out.terms_.emplace(s, n * k);
    return out;
  }

  friend bool operator==(const BasicChain& a, const BasicChain& b) {
    return a.ambient_dim_ == b.ambient_dim_ && a.degree_ == b.degree_ &&
           a.terms_ == b.terms_;
  }
  friend bool operator!=(const BasicChain& a, const BasicChain& b) { return !(a == b); }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [s, k] : terms_) {
      if (k < 0)
        out += " - ";
      else if (!out.empty())
        out += " + ";
      Coeff a = abs(k);
      if (a != 1) out += a.get_str() + "*";
      out += s.str();
    }
    return out;
  }

 private:
  void check_compatible(const BasicChain& o) const {
    if (o.ambient_dim_ != ambient_dim_ || o.degree_ != degree_)
      throw DimensionError("chain (m, d) mismatch");
  }

  std::size_t ambient_dim_;
  std::size_t degree_;
  Terms terms_;
};

using Chain = BasicChain<Integer>;
using RationalChain = BasicChain<Rational>;

template <typename Coeff>
BasicChain<Coeff> boundary(const BasicChain<Coeff>& c) {
  if (c.degree() == 0) throw DimensionError("boundary of a 0-chain is undefined");
  BasicChain<Coeff> out(c.ambient_dim(), c.degree() - 1);
  for (const auto& [s, k] : c.terms()) {
    for (std::size_t i = 0; i <= s.degree(); ++i)
      out.add_term(s.face(i), (i % 2 == 0) ? Coeff(k) : Coeff(-k));
  }
  return out;
}

template <typename Coeff>
Coeff l1_norm(const BasicChain<Coeff>& c) {
  Coeff total = 0;
  for (const auto& [s, k] : c.terms()) total += abs(k);
  return total;
}

inline RationalChain to_rational(const Chain& c) {
  RationalChain out(c.ambient_dim(), c.degree());
  for (const auto& [s, k] : c.terms()) out.add_term(s, Rational(k));
  return out;
}

// Signed volume of the lifted top-dimensional simplices. For a cycle this is
// the integer image of its class in H_m(T^m; Z) = Z.
template <typename Coeff>
Rational degree_of(const BasicChain<Coeff>& z) {
  const std::size_t m = z.ambient_dim();
  if (z.degree() != m)
    throw DimensionError("degree() needs a top-dimensional chain");
  Integer fact = 1;
  for (std::size_t i = 2; i <= m; ++i) fact *= static_cast<unsigned long>(i);
  Rational total = 0;
  std::vector<std::vector<Rational>> mat(m, std::vector<Rational>(m));
  for (const auto& [s, k] : z.terms()) {
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t col = 0; col < m; ++col)
        mat[r][col] = s.vertex(r + 1)[col] - s.vertex(0)[col];
    // Gaussian elimination over Q.
    Rational det = 1;
    auto a = mat;
    for (std::size_t col = 0; col < m && det != 0; ++col) {
      std::size_t piv = col;
      while (piv < m && a[piv][col] == 0) ++piv;
      if (piv == m) {
        det = 0;
        break;
      }
      if (piv != col) {
        std::swap(a[piv], a[col]);
        det = -det;
      }
      det *= a[col][col];
      for (std::size_t r = col + 1; r < m; ++r) {
        if (a[r][col] == 0) continue;
        Rational f = a[r][col] / a[col][col];
        for (std::size_t c2 = col; c2 < m; ++c2) a[r][c2] -= f * a[col][c2];
      }
    }
    total += Rational(k) * det;
  }
  return total / Rational(fact);
}

// x -> M x + t from T^m to T^n; integer M makes the map descend to the tori.
class AffineTorusMap {
 public:
  AffineTorusMap(std::vector<std::vector<Integer>> matrix, std::vector<Rational> translation)
      : matrix_(std::move(matrix)), translation_(std::move(translation)) {
    if (matrix_.empty() || matrix_.front().empty())
      throw DimensionError("affine map needs a non-empty matrix");
    for (const auto& row : matrix_)
      if (row.size() != matrix_.front().size()) throw DimensionError("ragged matrix");
    if (translation_.size() != matrix_.size())
      throw DimensionError("translation length must equal codomain dimension");
  }

  explicit AffineTorusMap(std::vector<std::vector<Integer>> matrix)
      : AffineTorusMap(matrix, std::vector<Rational>(matrix.size(), Rational(0))) {}

  static AffineTorusMap identity(std::size_t m) {
    std::vector<std::vector<Integer>> a(m, std::vector<Integer>(m, 0));
    for (std::size_t i = 0; i < m; ++i) a[i][i] = 1;
    return AffineTorusMap(std::move(a));
  }

  std::size_t domain_dim() const { return matrix_.front().size(); }
  std::size_t codomain_dim() const { return matrix_.size(); }
  const std::vector<std::vector<Integer>>& matrix() const { return matrix_; }
  const std::vector<Rational>& translation() const { return translation_; }

  Point apply(const Point& x) const {
    if (x.size() != domain_dim()) throw DimensionError("point dimension mismatch");
    Point y = translation_;
    for (std::size_t r = 0; r < y.size(); ++r)
      for (std::size_t c = 0; c < x.size(); ++c)
        if (matrix_[r][c] != 0) y[r] += Rational(matrix_[r][c]) * x[c];
    return y;
  }

  // (this ∘ inner)
  AffineTorusMap compose(const AffineTorusMap& inner) const {
    if (inner.codomain_dim() != domain_dim()) throw DimensionError("cannot compose");
    std::vector<std::vector<Integer>> m(codomain_dim(),
                                        std::vector<Integer>(inner.domain_dim(), 0));
    for (std::size_t r = 0; r < codomain_dim(); ++r)
      for (std::size_t c = 0; c < inner.domain_dim(); ++c)
        for (std::size_t k = 0; k < domain_dim(); ++k)
          m[r][c] += matrix_[r][k] * inner.matrix_[k][c];
    return AffineTorusMap(std::move(m), apply(inner.translation_));
  }

  AffineTorusMap power(unsigned long n) const {
    if (domain_dim() != codomain_dim()) throw DimensionError("power of a non-self map");
    AffineTorusMap result = identity(domain_dim());
    AffineTorusMap base = *this;
    while (n) {
      if (n & 1) result = base.compose(result);
      n >>= 1;
      if (n) base = base.compose(base);
    }
    return result;
  }

  Integer determinant() const {
    if (domain_dim() != codomain_dim()) throw DimensionError("non-square matrix");
    std::vector<std::vector<Rational>> a(domain_dim());
    for (std::size_t r = 0; r < domain_dim(); ++r)
      for (const Integer& v : matrix_[r]) a[r].push_back(Rational(v));
    Rational det = 1;
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t piv = col;
      while (piv < n && a[piv][col] == 0) ++piv;
      if (piv == n) return 0;
      if (piv != col) {
        std::swap(a[piv], a[col]);
        det = -det;
      }
      det *= a[col][col];
      for (std::size_t r = col + 1; r < n; ++r) {
        Rational f = a[r][col] / a[col][col];
        for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      }
    }
    return det.get_num();
  }

 private:
  std::vector<std::vector<Integer>> matrix_;
  std::vector<Rational> translation_;
};

inline StraightSimplex pushforward(const AffineTorusMap& phi, const StraightSimplex& s) {
  if (s.ambient_dim() != phi.domain_dim())
    throw DimensionError("pushforward: simplex lives on T^" +
                         std::to_string(s.ambient_dim()) + ", map expects T^" +
                         std::to_string(phi.domain_dim()));
  std::vector<Point> image;
  image.reserve(s.vertices().size());
  for (const Point& p : s.vertices()) image.push_back(phi.apply(p));
  return StraightSimplex::canonicalize(std::move(image));
}

template <typename Coeff>
BasicChain<Coeff> pushforward(const AffineTorusMap& phi, const BasicChain<Coeff>& c) {
  if (c.ambient_dim() != phi.domain_dim())
    throw DimensionError("pushforward: chain/map dimension mismatch");
  BasicChain<Coeff> out(phi.codomain_dim(), c.degree());
  for (const auto& [s, k] : c.terms()) out.add_term(pushforward(phi, s), k);
  return out;
}

}  // namespace torvol

#endif  // TORVOL_CHAIN_HPP_
