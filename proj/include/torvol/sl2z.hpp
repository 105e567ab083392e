#ifndef TORVOL_SL2Z_HPP_
#define TORVOL_SL2Z_HPP_

// Mapping classes of the torus as SL(2,Z) matrices, and the flip graph of
// one-vertex torus triangulations.
//
// A one-vertex triangulation of T^2 is determined by the slopes of its three
// edges: primitive vectors, pairwise unimodular. These slope triples are the
// triangles of the Farey tessellation and flips are its dual edges, so the
// flip graph is the trivalent tree dual to the tessellation.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace torvol {

class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

namespace detail {

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("int64 overflow in SL(2,Z) arithmetic");
  return r;
}
inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("int64 overflow in SL(2,Z) arithmetic");
  return r;
}
inline std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("int64 overflow in SL(2,Z) arithmetic");
  return r;
}

}  // namespace detail

class Sl2Error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// [[a, b], [c, d]] with ad - bc = 1.
class Sl2Matrix {
 public:
  Sl2Matrix(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d)
      : a_(a), b_(b), c_(c), d_(d) {
    if (detail::checked_sub(detail::checked_mul(a, d), detail::checked_mul(b, c)) != 1)
      throw Sl2Error("determinant of [[" + std::to_string(a) + "," + std::to_string(b) + "],[" +
                     std::to_string(c) + "," + std::to_string(d) + "]] is not 1");
  }

  static Sl2Matrix identity() { return {1, 0, 0, 1}; }
  static Sl2Matrix shear() { return {1, 1, 0, 1}; }

  // "a,b,c,d"
  static Sl2Matrix parse(const std::string& text) {
    std::vector<std::int64_t> v;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t next = text.find(',', pos);
      if (next == std::string::npos) next = text.size();
      const std::string field = text.substr(pos, next - pos);
      std::size_t used = 0;
      long long x = 0;
      try {
        x = std::stoll(field, &used);
      } catch (const std::exception&) {
        throw Sl2Error("bad matrix entry '" + field + "' in '" + text + "'");
      }
      if (used != field.size()) throw Sl2Error("bad matrix entry '" + field + "'");
      v.push_back(x);
      pos = next + 1;
    }
    if (v.size() != 4) throw Sl2Error("matrix must have 4 entries: a,b,c,d");
    return {v[0], v[1], v[2], v[3]};
  }

  std::int64_t a() const { return a_; }
  std::int64_t b() const { return b_; }
  std::int64_t c() const { return c_; }
  std::int64_t d() const { return d_; }
  std::int64_t trace() const { return detail::checked_add(a_, d_); }

  bool is_identity() const { return a_ == 1 && b_ == 0 && c_ == 0 && d_ == 1; }
  bool is_minus_identity() const { return a_ == -1 && b_ == 0 && c_ == 0 && d_ == -1; }

  friend Sl2Matrix operator*(const Sl2Matrix& x, const Sl2Matrix& y) {
    using detail::checked_add;
    using detail::checked_mul;
    return Sl2Matrix(checked_add(checked_mul(x.a_, y.a_), checked_mul(x.b_, y.c_)),
                     checked_add(checked_mul(x.a_, y.b_), checked_mul(x.b_, y.d_)),
                     checked_add(checked_mul(x.c_, y.a_), checked_mul(x.d_, y.c_)),
                     checked_add(checked_mul(x.c_, y.b_), checked_mul(x.d_, y.d_)), Trusted{});
  }
  friend bool operator==(const Sl2Matrix& x, const Sl2Matrix& y) {
    return x.a_ == y.a_ && x.b_ == y.b_ && x.c_ == y.c_ && x.d_ == y.d_;
  }

  Sl2Matrix inverse() const { return Sl2Matrix(d_, -b_, -c_, a_, Trusted{}); }

  Sl2Matrix power(unsigned long n) const {
    Sl2Matrix result = identity(), base = *this;
    while (n) {
      if (n & 1) result = result * base;
      n >>= 1;
      if (n) base = base * base;
    }
    return result;
  }

  std::string str() const {
    return std::to_string(a_) + "," + std::to_string(b_) + "," + std::to_string(c_) + "," +
           std::to_string(d_);
  }

 private:
  struct Trusted {};
  Sl2Matrix(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d, Trusted)
      : a_(a), b_(b), c_(c), d_(d) {}

  std::int64_t a_, b_, c_, d_;
};

struct Periodic {
  int order;
};
struct ReducibleTwist {};
struct Anosov {};
using MappingClassType = std::variant<Periodic, ReducibleTwist, Anosov>;

inline MappingClassType classify(const Sl2Matrix& m) {
  const std::int64_t t = std::llabs(m.trace());
  if (t > 2) return Anosov{};
  if (t == 2 && !m.is_identity() && !m.is_minus_identity()) return ReducibleTwist{};
  Sl2Matrix p = m;
  for (int order = 1; order <= 12; ++order) {
    if (p.is_identity()) return Periodic{order};
    p = p * m;
  }
  throw std::logic_error("periodic element of SL(2,Z) with order > 12");
}

inline bool is_periodic(const MappingClassType& t) { return std::holds_alternative<Periodic>(t); }

// fv_Z(f) > 0 exactly for Anosov classes on the torus.
inline bool fv_positive(const Sl2Matrix& m) { return std::holds_alternative<Anosov>(classify(m)); }

inline std::string describe(const MappingClassType& t) {
  if (auto p = std::get_if<Periodic>(&t)) return "periodic (order " + std::to_string(p->order) + ")";
  if (std::holds_alternative<ReducibleTwist>(t)) return "reducible twist";
  return "Anosov";
}

// Primitive integer vector, sign-normalized so the first nonzero entry is positive.
struct Slope {
  std::int64_t p = 1;
  std::int64_t q = 0;

  static Slope normalized(std::int64_t p, std::int64_t q) {
    if (p == 0 && q == 0) throw std::invalid_argument("zero vector is not a slope");
    if (std::gcd(p, q) != 1) throw std::invalid_argument("slope must be primitive");
    if (p < 0 || (p == 0 && q < 0)) return Slope{-p, -q};
    return Slope{p, q};
  }

  std::int64_t height() const { return std::llabs(p) + std::llabs(q); }

  friend bool operator==(const Slope& x, const Slope& y) { return x.p == y.p && x.q == y.q; }
  friend bool operator!=(const Slope& x, const Slope& y) { return !(x == y); }
  friend bool operator<(const Slope& x, const Slope& y) {
    return x.p != y.p ? x.p < y.p : x.q < y.q;
  }

  std::string str() const { return "(" + std::to_string(p) + "," + std::to_string(q) + ")"; }
};

inline std::int64_t cross(const Slope& x, const Slope& y) {
  return detail::checked_sub(detail::checked_mul(x.p, y.q), detail::checked_mul(x.q, y.p));
}

inline Slope apply(const Sl2Matrix& m, const Slope& s) {
  using detail::checked_add;
  using detail::checked_mul;
  return Slope::normalized(checked_add(checked_mul(m.a(), s.p), checked_mul(m.b(), s.q)),
                           checked_add(checked_mul(m.c(), s.p), checked_mul(m.d(), s.q)));
}

// Three pairwise-unimodular slopes held in slots 0..2. Equality and hashing
// ignore slot order; flips replace a slot in place, so flip(flip(t, j), j) = t.
class FareyTriangle {
 public:
  FareyTriangle(Slope x, Slope y, Slope z) : s_{x, y, z} {
    for (int i = 0; i < 3; ++i) {
      if (std::llabs(cross(s_[i], s_[(i + 1) % 3])) != 1)
        throw std::invalid_argument("slopes " + s_[i].str() + " and " + s_[(i + 1) % 3].str() +
                                    " are not unimodular");
    }
  }

  static FareyTriangle base() { return {{1, 0}, {0, 1}, {1, 1}}; }

  const Slope& slope(std::size_t i) const { return s_.at(i); }
  const std::array<Slope, 3>& slopes() const { return s_; }

  std::array<Slope, 3> sorted() const {
    auto v = s_;
    std::sort(v.begin(), v.end());
    return v;
  }

  std::optional<std::size_t> index_of(const Slope& x) const {
    for (std::size_t i = 0; i < 3; ++i)
      if (s_[i] == x) return i;
    return std::nullopt;
  }

  friend bool operator==(const FareyTriangle& x, const FareyTriangle& y) {
    return x.sorted() == y.sorted();
  }
  friend bool operator!=(const FareyTriangle& x, const FareyTriangle& y) { return !(x == y); }

  std::string str() const {
    return "{" + s_[0].str() + "," + s_[1].str() + "," + s_[2].str() + "}";
  }

 private:
  std::array<Slope, 3> s_;
};

// Replaces slot j by the other diagonal of the quadrilateral formed by the
// remaining two slopes: with u, v the others, the slopes unimodular to both
// are u + v and u - v, and slot j holds one of them.
inline FareyTriangle flip(const FareyTriangle& t, std::size_t j) {
  if (j > 2) throw std::out_of_range("flip index must be 0, 1 or 2");
  const Slope& u = t.slope((j + 1) % 3);
  const Slope& v = t.slope((j + 2) % 3);
  const Slope sum = Slope::normalized(detail::checked_add(u.p, v.p), detail::checked_add(u.q, v.q));
  const Slope diff = Slope::normalized(detail::checked_sub(u.p, v.p), detail::checked_sub(u.q, v.q));
  const Slope replacement = (t.slope(j) == sum) ? diff : sum;
  std::array<Slope, 3> s = t.slopes();
  s[j] = replacement;
  return {s[0], s[1], s[2]};
}

inline FareyTriangle act(const Sl2Matrix& m, const FareyTriangle& t) {
  return {apply(m, t.slope(0)), apply(m, t.slope(1)), apply(m, t.slope(2))};
}

struct FareyTriangleHash {
  std::size_t operator()(const FareyTriangle& t) const {
    std::size_t h = 0x9e3779b97f4a7c15ull;
    for (const Slope& s : t.sorted()) {
      h ^= std::hash<std::int64_t>{}(s.p) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      h ^= std::hash<std::int64_t>{}(s.q) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

// Breadth-first search in the flip graph; nullopt when the distance exceeds |cap|.
inline std::optional<unsigned> flip_distance_bfs(const FareyTriangle& from, const FareyTriangle& to,
                                                 unsigned cap) {
  if (from == to) return 0u;
  std::unordered_map<FareyTriangle, unsigned, FareyTriangleHash> seen;
  std::deque<FareyTriangle> frontier{from};
  seen.emplace(from, 0);
  while (!frontier.empty()) {
    FareyTriangle t = frontier.front();
    frontier.pop_front();
    const unsigned d = seen.at(t);
    if (d == cap) continue;
    for (std::size_t j = 0; j < 3; ++j) {
      FareyTriangle n = flip(t, j);
      if (!seen.emplace(n, d + 1).second) continue;
      if (n == to) return d + 1;
      frontier.push_back(std::move(n));
    }
  }
  return std::nullopt;
}

// Tree navigation. The two triangles {(1,0),(0,1),(1,1)} and {(1,0),(0,1),(1,-1)}
// are adjacent; every other triangle has a unique slope of largest height, and
// flipping it strictly lowers the height. Rooting the tree at the first of the
// two, parent() walks each triangle toward the root along the unique geodesic.
namespace detail {

inline const FareyTriangle& root_plus() {
  static const FareyTriangle t{{1, 0}, {0, 1}, {1, 1}};
  return t;
}
inline const FareyTriangle& root_minus() {
  static const FareyTriangle t{{1, 0}, {0, 1}, {1, -1}};
  return t;
}

// Slot to flip to move one step toward the root; nullopt at the root.
inline std::optional<std::size_t> parent_slot(const FareyTriangle& t) {
  if (t == root_plus()) return std::nullopt;
  if (t == root_minus()) return t.index_of(Slope{1, -1});
  std::size_t top = 0;
  for (std::size_t i = 1; i < 3; ++i)
    if (t.slope(i).height() > t.slope(top).height()) top = i;
  return top;
}

// Slots flipped on the way from t to the root, and the visited triangles
// (t first, root last).
struct RootPath {
  std::vector<FareyTriangle> nodes;
  std::vector<std::size_t> slots;
};

inline RootPath path_to_root(const FareyTriangle& t) {
  RootPath p;
  p.nodes.push_back(t);
  while (auto slot = parent_slot(p.nodes.back())) {
    p.slots.push_back(*slot);
    p.nodes.push_back(flip(p.nodes.back(), *slot));
  }
  return p;
}

// Geodesic from |from| to |to| as (triangles visited, slot moves). The slot
// indices refer to the slot layout of the triangle being flipped.
inline std::vector<FareyTriangle> geodesic(const FareyTriangle& from, const FareyTriangle& to) {
  const RootPath a = path_to_root(from), b = path_to_root(to);
  // Strip the common suffix (shared ancestors) down to the lowest common one.
  std::size_t ia = a.nodes.size(), ib = b.nodes.size();
  while (ia > 1 && ib > 1 && a.nodes[ia - 2] == b.nodes[ib - 2]) {
    --ia;
    --ib;
  }
  std::vector<FareyTriangle> path(a.nodes.begin(), a.nodes.begin() + ia);
  for (std::size_t k = ib - 1; k-- > 0;) path.push_back(b.nodes[k]);
  return path;
}

}  // namespace detail

inline unsigned flip_distance_fast(const FareyTriangle& from, const FareyTriangle& to) {
  return static_cast<unsigned>(detail::geodesic(from, to).size() - 1);
}

struct GrowthRow {
  unsigned long i;
  unsigned distance;      // flip distance d(A^i t0, t0)
  unsigned spine_proxy;   // 2 * distance
};

inline std::vector<GrowthRow> spine_growth_table(const Sl2Matrix& m, unsigned long i_max,
                                                 const FareyTriangle& t0 = FareyTriangle::base()) {
  if (is_periodic(classify(m))) throw Sl2Error("periodic monodromy has bounded orbits");
  std::vector<GrowthRow> rows;
  Sl2Matrix p = Sl2Matrix::identity();
  for (unsigned long i = 1; i <= i_max; ++i) {
    p = p * m;
    const unsigned d = flip_distance_fast(act(p, t0), t0);
    rows.push_back({i, d, 2 * d});
  }
  return rows;
}

}  // namespace torvol

#endif  // TORVOL_SL2Z_HPP_
