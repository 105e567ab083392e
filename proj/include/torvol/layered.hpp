#ifndef TORVOL_LAYERED_HPP_
#define TORVOL_LAYERED_HPP_

// Triangulations of torus bundles T^2 x_A S^1.
//
// A block is a prism layer T^2 x [0,1] (two triangular prisms, three
// tetrahedra each) followed by one layered tetrahedron per flip of a path in
// the Farey tree. Stacking blocks and gluing the top surface back to the
// bottom through the monodromy closes the bundle up. Layered tetrahedra only
// use surface vertices, which collapses the vertical arc of each stack to a
// point; the prism keeps a genuine vertical edge, so every vertex link is a
// sphere and the result is a closed 3-manifold triangulation.
//
// Gluing tables follow the usual convention: face f is opposite vertex f, and
// a gluing (t, f) -> (t', f', p) sends vertex v of t to vertex p[v] of t'.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "torvol/sl2z.hpp"
#include "torvol/smith.hpp"

namespace torvol {

class LayeredError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- flip paths

struct FlipPath {
  FareyTriangle start = FareyTriangle::base();
  std::vector<std::size_t> moves;  // slot indices, in the slot layout of the current state

  std::size_t length() const { return moves.size(); }

  // Slopes flipped away at each step.
  std::vector<Slope> flipped_slopes() const {
    std::vector<Slope> out;
    FareyTriangle t = start;
    for (std::size_t j : moves) {
      out.push_back(t.slope(j));
      t = flip(t, j);
    }
    return out;
  }

  FareyTriangle end() const {
    FareyTriangle t = start;
    for (std::size_t j : moves) t = flip(t, j);
    return t;
  }
};

// Geodesic from t0 to act(A, t0) in the flip tree.
inline FlipPath flip_path(const Sl2Matrix& a, const FareyTriangle& t0 = FareyTriangle::base()) {
  if (is_periodic(classify(a))) throw Sl2Error("periodic monodromy: " + a.str());
  FlipPath path{t0, {}};
  const auto nodes = detail::geodesic(t0, act(a, t0));
  FareyTriangle cur = t0;
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    std::size_t j = 0;
    while (j < 3 && flip(cur, j) != nodes[k]) ++j;
    if (j == 3) throw std::logic_error("geodesic step is not a flip");
    path.moves.push_back(j);
    cur = flip(cur, j);
  }
  return path;
}

// i translated copies of |path|: copy c flips the A^c-images of the original
// slopes, located by slope in the current slot layout.
inline FlipPath cyclic_cover_path(const FlipPath& path, const Sl2Matrix& a, unsigned long i) {
  if (i < 1) throw std::invalid_argument("cover degree must be at least 1");
  const std::vector<Slope> slopes = path.flipped_slopes();
  FlipPath out{path.start, {}};
  FareyTriangle cur = path.start;
  Sl2Matrix shift = Sl2Matrix::identity();
  for (unsigned long c = 0; c < i; ++c) {
    for (const Slope& s : slopes) {
      const auto j = cur.index_of(apply(shift, s));
      if (!j) throw LayeredError("translated path leaves the triangulation at slope " + s.str());
      out.moves.push_back(*j);
      cur = flip(cur, *j);
    }
    shift = shift * a;
  }
  return out;
}

// ------------------------------------------------------------ triangulations

using Perm4 = std::array<int, 4>;

struct FaceGluing {
  std::size_t tet;
  int face;
  Perm4 perm;
};

inline Perm4 inverse(const Perm4& p) {
  Perm4 q{};
  for (int i = 0; i < 4; ++i) q[p[i]] = i;
  return q;
}

inline bool is_odd(const Perm4& p) {
  int inversions = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (p[i] > p[j]) ++inversions;
  return inversions % 2 == 1;
}

struct TriangulationReport {
  bool valid = false;
  std::string failure;  // first failing invariant, empty when valid
  std::size_t vertices = 0, edges = 0, faces = 0, tetrahedra = 0;
  long long euler = 0;
  std::vector<long long> link_euler;  // one per vertex class
};

class LayeredTriangulation {
 public:
  std::size_t size() const { return gluings_.size(); }
  std::size_t layer(std::size_t t) const { return layers_.at(t); }
  const std::vector<std::size_t>& layers() const { return layers_; }
  const std::optional<FaceGluing>& gluing(std::size_t t, int f) const {
    return gluings_.at(t).at(f);
  }

  std::size_t add_tetrahedron(std::size_t layer) {
    gluings_.emplace_back();
    layers_.push_back(layer);
    return gluings_.size() - 1;
  }

  void glue(std::size_t t, int f, std::size_t u, const Perm4& p) {
    if (t >= size() || u >= size() || f < 0 || f > 3) throw std::out_of_range("bad face");
    if (p[f] < 0 || p[f] > 3) throw std::invalid_argument("bad permutation");
    const int g = p[f];
    if (t == u && f == g) throw LayeredError("face glued to itself");
    if (gluings_[t][f] || gluings_[u][g]) throw LayeredError("face glued twice");
    gluings_[t][f] = FaceGluing{u, g, p};
    gluings_[u][g] = FaceGluing{t, f, inverse(p)};
  }

  // Tetrahedron t becomes order[t]; vertex labels are untouched.
  LayeredTriangulation relabeled(const std::vector<std::size_t>& order) const {
    if (order.size() != size()) throw std::invalid_argument("relabeling has the wrong length");
    LayeredTriangulation out;
    out.gluings_.resize(size());
    out.layers_.resize(size());
    for (std::size_t t = 0; t < size(); ++t) {
      out.layers_[order[t]] = layers_[t];
      for (int f = 0; f < 4; ++f) {
        auto g = gluings_[t][f];
        if (g) g->tet = order.at(g->tet);
        out.gluings_[order[t]][f] = g;
      }
    }
    return out;
  }

  // Relabels vertices 0 and 1 of every tetrahedron in a coherent class so
  // that all gluing permutations become odd. Throws on non-orientable input.
  void orient() {
    std::vector<int> sign(size(), -1);
    for (std::size_t root = 0; root < size(); ++root) {
      if (sign[root] >= 0) continue;
      sign[root] = 0;
      std::deque<std::size_t> queue{root};
      while (!queue.empty()) {
        const std::size_t t = queue.front();
        queue.pop_front();
        for (int f = 0; f < 4; ++f) {
          const auto& g = gluings_[t][f];
          if (!g) continue;
          const int want = sign[t] ^ (is_odd(g->perm) ? 0 : 1);
          if (sign[g->tet] < 0) {
            sign[g->tet] = want;
            queue.push_back(g->tet);
          } else if (sign[g->tet] != want) {
            throw LayeredError("triangulation is not orientable");
          }
        }
      }
    }
    const Perm4 swap01{1, 0, 2, 3};
    auto relabel = [&](std::size_t t, int v) { return sign[t] ? swap01[v] : v; };
    std::vector<std::array<std::optional<FaceGluing>, 4>> next(size());
    for (std::size_t t = 0; t < size(); ++t) {
      for (int f = 0; f < 4; ++f) {
        const auto& g = gluings_[t][f];
        if (!g) continue;
        Perm4 p{};
        for (int v = 0; v < 4; ++v) p[relabel(t, v)] = relabel(g->tet, g->perm[v]);
        next[t][relabel(t, f)] = FaceGluing{g->tet, relabel(g->tet, g->face), p};
      }
    }
    gluings_ = std::move(next);
  }

  nlohmann::json to_json() const {
    nlohmann::json gl = nlohmann::json::array();
    for (std::size_t t = 0; t < size(); ++t)
      for (int f = 0; f < 4; ++f) {
        const auto& g = gluings_[t][f];
        if (!g) continue;
        gl.push_back({t, f, g->tet, g->face, {g->perm[0], g->perm[1], g->perm[2], g->perm[3]}});
      }
    return {{"tetrahedra", size()}, {"gluings", gl}, {"layers", layers_}};
  }

  static LayeredTriangulation from_json(const nlohmann::json& j) {
    LayeredTriangulation out;
    const auto n = j.at("tetrahedra").get<std::size_t>();
    const auto layers = j.at("layers").get<std::vector<std::size_t>>();
    if (layers.size() != n) throw std::invalid_argument("layers length != tetrahedra");
    for (std::size_t t = 0; t < n; ++t) out.add_tetrahedron(layers[t]);
    for (const auto& row : j.at("gluings")) {
      const auto t = row.at(0).get<std::size_t>();
      const auto f = row.at(1).get<int>();
      const auto u = row.at(2).get<std::size_t>();
      const auto g = row.at(3).get<int>();
      const auto p = row.at(4).get<std::array<int, 4>>();
      if (t >= n || u >= n || f < 0 || f > 3) throw std::invalid_argument("gluing out of range");
      if (p[f] != g) throw std::invalid_argument("permutation does not map face to face");
      const auto& existing = out.gluings_[t][f];
      if (existing) {
        if (existing->tet != u || existing->face != g || existing->perm != p)
          throw std::invalid_argument("inconsistent gluing rows");
        continue;
      }
      out.glue(t, f, u, p);
    }
    return out;
  }

 private:
  std::vector<std::array<std::optional<FaceGluing>, 4>> gluings_;
  std::vector<std::size_t> layers_;
};

// ------------------------------------------------------------------ skeleton

namespace detail {

constexpr std::array<std::array<int, 2>, 6> kTetEdges{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

inline int edge_index(int a, int b) {
  if (a > b) std::swap(a, b);
  for (int e = 0; e < 6; ++e)
    if (kTetEdges[e][0] == a && kTetEdges[e][1] == b) return e;
  throw std::logic_error("not an edge");
}

// Union-find carrying an orientation bit relative to the class root.
class ParityUnionFind {
 public:
  explicit ParityUnionFind(std::size_t n) : parent_(n), parity_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  std::pair<std::size_t, int> find(std::size_t x) {
    int par = 0;
    std::size_t r = x;
    while (parent_[r] != r) {
      par ^= parity_[r];
      r = parent_[r];
    }
    // Path compression with parity bookkeeping.
    int acc = par;
    while (parent_[x] != x) {
      const std::size_t next = parent_[x];
      const int step = parity_[x];
      parent_[x] = r;
      parity_[x] = acc;
      acc ^= step;
      x = next;
    }
    return {r, par};
  }
  // Returns false when the union contradicts an existing parity.
  bool unite(std::size_t a, std::size_t b, int rel) {
    auto [ra, pa] = find(a);
    auto [rb, pb] = find(b);
    if (ra == rb) return (pa ^ pb) == rel;
    parent_[rb] = ra;
    parity_[rb] = pa ^ pb ^ rel;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<int> parity_;
};

struct Skeleton {
  std::vector<std::size_t> vertex_class;  // index 4t+v
  std::vector<std::size_t> edge_class;    // index 6t+e
  std::vector<int> edge_sign;             // +1 when the tet edge (low -> high) agrees with its class
  std::vector<std::size_t> face_class;    // index 4t+f
  std::size_t vertices = 0, edges = 0, faces = 0;
  bool edges_valid = true;
};

inline Skeleton skeleton(const LayeredTriangulation& tri) {
  const std::size_t n = tri.size();
  Skeleton sk;
  ParityUnionFind verts(4 * n), edges(6 * n);
  for (std::size_t t = 0; t < n; ++t)
    for (int f = 0; f < 4; ++f) {
      const auto& g = tri.gluing(t, f);
      if (!g) continue;
      for (int v = 0; v < 4; ++v)
        if (v != f) verts.unite(4 * t + v, 4 * g->tet + g->perm[v], 0);
      for (int e = 0; e < 6; ++e) {
        const int a = kTetEdges[e][0], b = kTetEdges[e][1];
        if (a == f || b == f) continue;
        const int pa = g->perm[a], pb = g->perm[b];
        const int rel = pa < pb ? 0 : 1;
        if (!edges.unite(6 * t + e, 6 * g->tet + edge_index(pa, pb), rel)) sk.edges_valid = false;
      }
    }
  std::map<std::size_t, std::size_t> vid, eid;
  sk.vertex_class.resize(4 * n);
  for (std::size_t i = 0; i < 4 * n; ++i) {
    const auto r = verts.find(i).first;
    sk.vertex_class[i] = vid.emplace(r, vid.size()).first->second;
  }
  sk.edge_class.resize(6 * n);
  sk.edge_sign.resize(6 * n);
  for (std::size_t i = 0; i < 6 * n; ++i) {
    const auto [r, par] = edges.find(i);
    sk.edge_class[i] = eid.emplace(r, eid.size()).first->second;
    sk.edge_sign[i] = par ? -1 : 1;
  }
  sk.face_class.assign(4 * n, static_cast<std::size_t>(-1));
  for (std::size_t t = 0; t < n; ++t)
    for (int f = 0; f < 4; ++f) {
      if (sk.face_class[4 * t + f] != static_cast<std::size_t>(-1)) continue;
      sk.face_class[4 * t + f] = sk.faces;
      const auto& g = tri.gluing(t, f);
      if (g) sk.face_class[4 * g->tet + g->face] = sk.faces;
      ++sk.faces;
    }
  sk.vertices = vid.size();
  sk.edges = eid.size();
  return sk;
}

}  // namespace detail

inline TriangulationReport check_triangulation(const LayeredTriangulation& tri) {
  TriangulationReport rep;
  rep.tetrahedra = tri.size();
  auto fail = [&](const std::string& why) {
    rep.valid = false;
    rep.failure = why;
    return rep;
  };
  if (tri.size() == 0) return fail("empty triangulation");
  for (std::size_t t = 0; t < tri.size(); ++t)
    for (int f = 0; f < 4; ++f) {
      const auto& g = tri.gluing(t, f);
      if (!g)
        return fail("face pairing: face " + std::to_string(f) + " of tetrahedron " +
                    std::to_string(t) + " is unglued");
      const auto& back = tri.gluing(g->tet, g->face);
      if (!back || back->tet != t || back->face != f || back->perm != inverse(g->perm))
        return fail("face pairing: gluing of tetrahedron " + std::to_string(t) + " face " +
                    std::to_string(f) + " is not an involution");
      if (g->tet == t && g->face == f) return fail("face pairing: face glued to itself");
      if (!is_odd(g->perm))
        return fail("orientation: even gluing permutation at tetrahedron " + std::to_string(t) +
                    " face " + std::to_string(f));
    }
  const detail::Skeleton sk = detail::skeleton(tri);
  rep.vertices = sk.vertices;
  rep.edges = sk.edges;
  rep.faces = sk.faces;
  if (!sk.edges_valid) return fail("edge validity: an edge is identified with its reverse");
  rep.euler = static_cast<long long>(sk.vertices) - static_cast<long long>(sk.edges) +
              static_cast<long long>(sk.faces) - static_cast<long long>(tri.size());
  if (rep.euler != 0) return fail("euler characteristic is " + std::to_string(rep.euler));

  // Link of a vertex class: its triangles are the corners at it, its edges
  // the (corner, face through it) pairs taken twice, its vertices the edge
  // ends landing on it.
  std::vector<long long> corners(sk.vertices, 0), ends(sk.vertices, 0);
  for (std::size_t i = 0; i < 4 * tri.size(); ++i) ++corners[sk.vertex_class[i]];
  std::vector<bool> seen(sk.edges, false);
  for (std::size_t t = 0; t < tri.size(); ++t)
    for (int e = 0; e < 6; ++e) {
      const std::size_t c = sk.edge_class[6 * t + e];
      if (seen[c]) continue;
      seen[c] = true;
      ++ends[sk.vertex_class[4 * t + detail::kTetEdges[e][0]]];
      ++ends[sk.vertex_class[4 * t + detail::kTetEdges[e][1]]];
    }
  for (std::size_t v = 0; v < sk.vertices; ++v) {
    // V - E + F with E = 3F/2.
    const long long chi = ends[v] - corners[v] / 2;
    rep.link_euler.push_back(chi);
    if (chi != 2)
      return fail("vertex link: vertex " + std::to_string(v) + " has link euler characteristic " +
                  std::to_string(chi));
  }
  rep.valid = true;
  return rep;
}

// H_1 from the cellular chain complex of the face-paired tetrahedra.
inline AbelianGroup homology_h1(const LayeredTriangulation& tri) {
  const auto rep = check_triangulation(tri);
  if (!rep.valid) throw LayeredError("homology of an invalid triangulation: " + rep.failure);
  const detail::Skeleton sk = detail::skeleton(tri);
  IntegerMatrix d1(sk.vertices, std::vector<Integer>(sk.edges));
  IntegerMatrix d2(sk.edges, std::vector<Integer>(sk.faces));
  std::vector<bool> edge_done(sk.edges, false), face_done(sk.faces, false);
  for (std::size_t t = 0; t < tri.size(); ++t) {
    for (int e = 0; e < 6; ++e) {
      const std::size_t c = sk.edge_class[6 * t + e];
      if (edge_done[c]) continue;
      edge_done[c] = true;
      // Class orientation = this tet edge times its sign.
      std::size_t from = sk.vertex_class[4 * t + detail::kTetEdges[e][0]];
      std::size_t to = sk.vertex_class[4 * t + detail::kTetEdges[e][1]];
      if (sk.edge_sign[6 * t + e] < 0) std::swap(from, to);
      d1[to][c] += 1;
      d1[from][c] -= 1;
    }
    for (int f = 0; f < 4; ++f) {
      const std::size_t c = sk.face_class[4 * t + f];
      if (face_done[c]) continue;
      face_done[c] = true;
      std::array<int, 3> v{};
      int k = 0;
      for (int i = 0; i < 4; ++i)
        if (i != f) v[k++] = i;
      // boundary [v0 v1 v2] = [v1 v2] - [v0 v2] + [v0 v1]
      const std::array<std::pair<int, int>, 3> sides{{{v[1], v[2]}, {v[0], v[2]}, {v[0], v[1]}}};
      const std::array<int, 3> coef{1, -1, 1};
      for (int s = 0; s < 3; ++s) {
        const int e = detail::edge_index(sides[s].first, sides[s].second);
        d2[sk.edge_class[6 * t + e]][c] += coef[s] * sk.edge_sign[6 * t + e];
      }
    }
  }
  const auto inv1 = sk.edges ? smith_invariants(d1) : std::vector<Integer>{};
  const auto inv2 = sk.faces ? smith_invariants(d2) : std::vector<Integer>{};
  AbelianGroup h;
  h.rank = sk.edges - inv1.size() - inv2.size();
  for (const Integer& d : inv2)
    if (d != 1) h.torsion.push_back(d);
  return h;
}

// Z + coker(M - I), the first homology of the torus bundle with monodromy M.
inline AbelianGroup bundle_h1_oracle(const Sl2Matrix& m) {
  const IntegerMatrix a{{Integer(static_cast<long>(m.a() - 1)), Integer(static_cast<long>(m.b()))},
                        {Integer(static_cast<long>(m.c())), Integer(static_cast<long>(m.d() - 1))}};
  AbelianGroup g = cokernel(a, 2);
  g.rank += 1;
  return g;
}

// ------------------------------------------------------------------- builder

namespace detail {

struct Lift {
  std::int64_t x = 0, y = 0;
  friend bool operator==(const Lift& a, const Lift& b) { return a.x == b.x && a.y == b.y; }
  friend bool operator<(const Lift& a, const Lift& b) { return a.x != b.x ? a.x < b.x : a.y < b.y; }
  friend Lift operator+(const Lift& a, const Lift& b) {
    return {checked_add(a.x, b.x), checked_add(a.y, b.y)};
  }
  friend Lift operator-(const Lift& a, const Lift& b) {
    return {checked_sub(a.x, b.x), checked_sub(a.y, b.y)};
  }
};

inline Lift apply_lift(const Sl2Matrix& m, const Lift& p) {
  return {checked_add(checked_mul(m.a(), p.x), checked_mul(m.b(), p.y)),
          checked_add(checked_mul(m.c(), p.x), checked_mul(m.d(), p.y))};
}

inline bool is_normalized(const Lift& v) { return v.x > 0 || (v.x == 0 && v.y > 0); }

// A tetrahedron vertex in the universal cover of the block: lift and level.
struct Pos {
  Lift p;
  int level = 0;
  friend bool operator==(const Pos& a, const Pos& b) { return a.p == b.p && a.level == b.level; }
  friend bool operator<(const Pos& a, const Pos& b) {
    return a.level != b.level ? a.level < b.level : a.p < b.p;
  }
};

// A face of the current surface, seen from the tetrahedron below it.
struct Exposed {
  std::array<Lift, 3> pts;
  std::size_t tet;
  std::array<int, 3> verts;  // tetrahedron vertex at each point
  int face;
};

class Builder {
 public:
  LayeredTriangulation tri;

  // Glues face f of tetrahedron t, whose vertices sit at |pos|, onto the
  // exposed face |x| after transforming x's points by |m| and a translation.
  void attach(std::size_t t, int f, const std::array<Lift, 4>& pos, const Exposed& x,
              const Sl2Matrix& m = Sl2Matrix::identity()) {
    std::array<Lift, 3> img;
    for (int k = 0; k < 3; ++k) img[k] = apply_lift(m, x.pts[k]);
    std::array<int, 3> mine{};
    int c = 0;
    for (int v = 0; v < 4; ++v)
      if (v != f) mine[c++] = v;
    for (int k0 = 0; k0 < 3; ++k0) {
      const Lift shift = pos[mine[0]] - img[k0];
      Perm4 p{};
      p[f] = x.face;
      bool ok = true;
      for (int a = 0; a < 3 && ok; ++a) {
        int hit = -1;
        for (int k = 0; k < 3; ++k)
          if (img[k] + shift == pos[mine[a]]) hit = k;
        if (hit < 0) ok = false;
        else p[mine[a]] = x.verts[hit];
      }
      if (ok) {
        tri.glue(t, f, x.tet, p);
        return;
      }
    }
    throw LayeredError("surface faces do not match");
  }

  std::array<Exposed, 2> surface;
  std::vector<Exposed> bottoms;  // lowest faces, glued at closing

  // Prism layer over the current surface.
  void prism(std::size_t layer, bool first) {
    struct Vertical {
      std::size_t tet;
      int face;
      std::array<Pos, 4> pos;
    };
    std::vector<Vertical> verticals;
    std::array<Exposed, 2> top;
    for (int s = 0; s < 2; ++s) {
      const Exposed& below = surface[s];
      // Order A < B < C along the normalized edge directions.
      std::array<int, 3> ord{0, 1, 2};
      bool found = false;
      do {
        const Lift& a = below.pts[ord[0]];
        const Lift& b = below.pts[ord[1]];
        const Lift& c = below.pts[ord[2]];
        found = is_normalized(b - a) && is_normalized(c - b) && is_normalized(c - a);
      } while (!found && std::next_permutation(ord.begin(), ord.end()));
      if (!found) throw std::logic_error("surface triangle has no monotone vertex order");
      const Lift a = below.pts[ord[0]], b = below.pts[ord[1]], c = below.pts[ord[2]];
      const Pos a0{a, 0}, b0{b, 0}, c0{c, 0}, a1{a, 1}, b1{b, 1}, c1{c, 1};
      const std::array<std::array<Pos, 4>, 3> tets{{{a0, b0, c0, c1}, {a0, b0, b1, c1}, {a0, a1, b1, c1}}};
      std::array<std::size_t, 3> id{};
      for (int k = 0; k < 3; ++k) id[k] = tri.add_tetrahedron(layer);
      glue_translated(id[0], 2, tets[0], id[1], 2, tets[1]);
      glue_translated(id[1], 1, tets[1], id[2], 1, tets[2]);
      const std::array<Lift, 4> lifts0{a, b, c, c};
      Exposed bottom{{a, b, c}, id[0], {0, 1, 2}, 3};
      if (first) bottoms.push_back(bottom);
      else attach(id[0], 3, lifts0, below);
      top[s] = Exposed{{a, b, c}, id[2], {1, 2, 3}, 0};
      for (auto [k, f] : std::array<std::pair<int, int>, 6>{{{0, 0}, {0, 1}, {1, 0}, {1, 3}, {2, 2}, {2, 3}}})
        verticals.push_back({id[k], f, tets[k]});
    }
    // Vertical faces pair up with their translates in the other prism.
    auto key = [](const Vertical& v) {
      std::vector<Pos> pts;
      for (int i = 0; i < 4; ++i)
        if (i != v.face) pts.push_back(v.pos[i]);
      std::sort(pts.begin(), pts.end());
      const Lift base = pts[0].p;
      for (Pos& q : pts) q.p = q.p - base;
      return pts;
    };
    std::vector<bool> used(verticals.size(), false);
    for (std::size_t i = 0; i < verticals.size(); ++i) {
      if (used[i]) continue;
      const auto ki = key(verticals[i]);
      std::size_t partner = verticals.size();
      for (std::size_t j = i + 1; j < verticals.size(); ++j)
        if (!used[j] && key(verticals[j]) == ki) {
          partner = j;
          break;
        }
      if (partner == verticals.size()) throw LayeredError("prism side face has no partner");
      used[i] = used[partner] = true;
      glue_translated(verticals[i].tet, verticals[i].face, verticals[i].pos,
                      verticals[partner].tet, verticals[partner].face, verticals[partner].pos);
    }
    surface = top;
  }

  // One layered tetrahedron across the edge of slope |sigma|.
  void layer_flip(const Slope& sigma, std::size_t layer) {
    const Exposed x1 = surface[0], x2 = surface[1];
    int e1 = -1, e2 = -1;
    for (int i = 0; i < 3 && e1 < 0; ++i)
      for (int j = 0; j < 3; ++j) {
        const Lift d = x1.pts[j] - x1.pts[i];
        if (i != j && d.x == sigma.p && d.y == sigma.q) {
          e1 = i;
          e2 = j;
          break;
        }
      }
    if (e1 < 0) throw LayeredError("slope " + sigma.str() + " is not an edge of the surface");
    const int pi = 3 - e1 - e2;
    const Lift p = x1.pts[pi], q1 = x1.pts[e1], q2 = x1.pts[e2];
    std::optional<Lift> p2;
    for (int i = 0; i < 3 && !p2; ++i)
      for (int j = 0; j < 3; ++j) {
        if (i == j || x2.pts[j] - x2.pts[i] != q2 - q1) continue;
        const Lift shift = q1 - x2.pts[i];
        p2 = x2.pts[3 - i - j] + shift;
        break;
      }
    if (!p2) throw LayeredError("flip quadrilateral does not close up");
    const std::array<Lift, 4> pos{p, q1, q2, *p2};
    const std::size_t t = tri.add_tetrahedron(layer);
    attach(t, 3, pos, x1);
    attach(t, 0, pos, x2);
    surface[0] = Exposed{{p, q2, *p2}, t, {0, 2, 3}, 1};
    surface[1] = Exposed{{p, q1, *p2}, t, {0, 1, 3}, 2};
  }

  // Glues the current surface onto the stored bottom faces through |m|.
  void close(const Sl2Matrix& m) {
    std::vector<bool> used(bottoms.size(), false);
    for (const Exposed& top : surface) {
      bool done = false;
      for (std::size_t b = 0; b < bottoms.size() && !done; ++b) {
        if (used[b]) continue;
        std::array<Lift, 4> pos{};
        for (int k = 0; k < 3; ++k) pos[top.verts[k]] = top.pts[k];
        try {
          attach(top.tet, top.face, pos, bottoms[b], m);
          used[b] = done = true;
        } catch (const LayeredError&) {
        }
      }
      if (!done) throw LayeredError("closing map does not carry the top surface onto the bottom");
    }
  }

  static std::array<Exposed, 2> initial_surface(const FareyTriangle& t) {
    // Slopes x, y, x + y, all normalized.
    const auto& s = t.slopes();
    for (int k = 0; k < 3; ++k) {
      const Slope& x = s[(k + 1) % 3];
      const Slope& y = s[(k + 2) % 3];
      if (s[k].p == x.p + y.p && s[k].q == x.q + y.q) {
        const Lift o{0, 0}, lx{x.p, x.q}, ly{y.p, y.q}, lxy = lx + ly;
        return {Exposed{{o, lx, lxy}, 0, {0, 1, 2}, 0}, Exposed{{o, ly, lxy}, 0, {0, 1, 2}, 0}};
      }
    }
    throw std::logic_error("Farey triangle without a sum slope");
  }

 private:
  // Glues face f of t to face g of u, whose vertex positions are a translate
  // of those of face f.
  void glue_translated(std::size_t t, int f, const std::array<Pos, 4>& pt, std::size_t u, int g,
                       const std::array<Pos, 4>& pu) {
    for (int anchor = 0; anchor < 4; ++anchor) {
      const int first = f == 0 ? 1 : 0;
      if (pt[first].level != pu[anchor].level) continue;
      const Lift shift = pu[anchor].p - pt[first].p;
      Perm4 p{};
      std::array<bool, 4> hit{};
      bool ok = true;
      for (int v = 0; v < 4 && ok; ++v) {
        if (v == f) continue;
        int w = -1;
        for (int k = 0; k < 4; ++k)
          if (pu[k].level == pt[v].level && pu[k].p == pt[v].p + shift) w = k;
        if (w < 0 || hit[w]) ok = false;
        else {
          p[v] = w;
          hit[w] = true;
        }
      }
      if (!ok) continue;
      int face = -1;
      for (int k = 0; k < 4; ++k)
        if (!hit[k]) face = k;
      if (face != g) continue;
      p[f] = face;
      tri.glue(t, f, u, p);
      return;
    }
    throw LayeredError("faces are not translates of each other");
  }
};

}  // namespace detail

struct LayeredBuild {
  LayeredTriangulation triangulation;
  TriangulationReport report;
  std::size_t padded_moves = 0;  // flip/anti-flip moves added to make the closure valid
};

namespace detail {

// |blocks| blocks; block c flips the A^c-images of |path|'s slopes. The
// surface after the last block is glued to the first prism bottom by A^blocks.
inline LayeredTriangulation build_blocks(const FlipPath& path, const Sl2Matrix& a,
                                         unsigned long blocks) {
  const std::vector<Slope> slopes = path.flipped_slopes();
  Builder b;
  b.surface = Builder::initial_surface(path.start);
  std::size_t layer = 0;
  Sl2Matrix shift = Sl2Matrix::identity();
  for (unsigned long c = 0; c < blocks; ++c) {
    b.prism(layer++, c == 0);
    for (const Slope& s : slopes) b.layer_flip(apply(shift, s), layer++);
    shift = shift * a;
  }
  b.close(shift);
  b.tri.orient();
  return std::move(b.tri);
}

inline void check_realizes(const FlipPath& path, const Sl2Matrix& a) {
  if (path.end() != act(a, path.start))
    throw LayeredError("path does not realize " + a.str() + ": ends at " + path.end().str() +
                       ", expected " + act(a, path.start).str());
}

}  // namespace detail

// One block: a prism layer plus one tetrahedron per flip of |path|, closed up
// by A. When the closure fails validation and the path is short, the path is
// padded by a flip and its inverse and rebuilt.
inline LayeredBuild layer(const FlipPath& path, const Sl2Matrix& a) {
  detail::check_realizes(path, a);
  LayeredBuild out;
  std::string failure;
  for (std::size_t pad = 0; pad <= 2; pad += 2) {
    if (pad && path.length() >= 2) break;
    FlipPath p = path;
    if (pad) p.moves.insert(p.moves.begin(), {0, 0});
    try {
      out.triangulation = detail::build_blocks(p, a, 1);
      out.report = check_triangulation(out.triangulation);
      if (out.report.valid) {
        out.padded_moves = pad;
        return out;
      }
      failure = out.report.failure;
    } catch (const LayeredError& e) {
      failure = e.what();
    }
  }
  throw LayeredError("layered triangulation failed validation: " + failure);
}

// The i-sheeted cyclic cover: i blocks, each a translated copy of the
// single-block triangulation of |path|.
inline LayeredBuild layer_cover(const FlipPath& path, const Sl2Matrix& a, unsigned long i) {
  if (i < 1) throw std::invalid_argument("cover degree must be at least 1");
  detail::check_realizes(path, a);
  LayeredBuild out;
  out.triangulation = detail::build_blocks(path, a, i);
  out.report = check_triangulation(out.triangulation);
  if (!out.report.valid) throw LayeredError("cover failed validation: " + out.report.failure);
  return out;
}

struct DeltaRow {
  unsigned long i;
  std::size_t tetrahedra;
};

inline std::vector<DeltaRow> delta_upper_bound_table(const Sl2Matrix& a, unsigned long i_max) {
  if (is_periodic(classify(a))) throw Sl2Error("periodic monodromy: " + a.str());
  const FlipPath path = flip_path(a);
  std::vector<DeltaRow> rows;
  for (unsigned long i = 1; i <= i_max; ++i)
    rows.push_back({i, layer_cover(path, a, i).triangulation.size()});
  return rows;
}

}  // namespace torvol

#endif  // TORVOL_LAYERED_HPP_
