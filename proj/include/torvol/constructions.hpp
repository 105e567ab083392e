#ifndef TORVOL_CONSTRUCTIONS_HPP_
#define TORVOL_CONSTRUCTIONS_HPP_

// Explicit chains filling f^n_*(c) - c for the Dehn twist f = (1 1; 0 1) on the
// torus, with n = 4^k.
//
//   c      fundamental cycle [(0,0),(1,0),(1,1)] - [(0,0),(0,1),(1,1)]
//   a, b   fundamental cycles subdividing c at y = 1/2 and x = 1/2
//   tau_k  prism chain with  boundary(tau_k) + b_k = f^n_*(c) - c,  |tau_k| = 3
//   s_k^i  = [0, 2^i, 2^(2k-i) + 2^i] - [0, 2^(2k-i), 2^(2k-i) + 2^i]   on S^1
//   phi_k^i: T -> S^1,  (x, y) -> 2^i x + 2^(2k-i) y,  with  phi^i_*(c) = s^i
//   gamma:   S^1 -> T,  t -> (t, 0),                   with  gamma_*(s^0) = b_k
//
// Given 3-chains alpha, beta with boundary a - c and c - b, the sum
//   omega_k = sum_{i<k} phi^i_*(alpha) + phi^{i+1}_*(beta)
// has boundary s^k - s^0 = -s^0, and W_k = tau_k - gamma_*(omega_k) fills
// f^n_*(c) - c with |W_k| <= 3 + k(|alpha| + |beta|).

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "torvol/chain.hpp"
#include "torvol/chain_io.hpp"
#include "torvol/filling.hpp"

namespace torvol {

inline constexpr const char* kSolverVersion = "torvol-filling-1";

namespace detail {

inline Point pt(const Rational& x, const Rational& y) { return Point{x, y}; }

inline StraightSimplex torus_simplex(std::vector<Point> v) {
  return StraightSimplex::canonicalize(std::move(v));
}

inline void check_k(unsigned k) {
  if (k < 1) throw std::out_of_range("k must be >= 1");
  if (k > 30) throw std::out_of_range("k > 30 is not supported");
}

}  // namespace detail

inline Integer monodromy_power(unsigned k) { return pow2(2 * k); }

inline Chain make_c() {
  using detail::pt;
  Chain c(2, 2);
  c.add_term(detail::torus_simplex({pt(0, 0), pt(1, 0), pt(1, 1)}), 1);
  c.add_term(detail::torus_simplex({pt(0, 0), pt(0, 1), pt(1, 1)}), -1);
  return c;
}

inline Chain make_a() {
  using detail::pt;
  const Rational h(1, 2);
  Chain a(2, 2);
  a.add_term(detail::torus_simplex({pt(0, 0), pt(1, 0), pt(1, h)}), 1);
  a.add_term(detail::torus_simplex({pt(0, 0), pt(0, h), pt(1, h)}), -1);
  a.add_term(detail::torus_simplex({pt(0, h), pt(1, h), pt(1, 1)}), 1);
  a.add_term(detail::torus_simplex({pt(0, h), pt(0, 1), pt(1, 1)}), -1);
  return a;
}

inline Chain make_b() {
  using detail::pt;
  const Rational h(1, 2);
  Chain b(2, 2);
  b.add_term(detail::torus_simplex({pt(0, 0), pt(h, 0), pt(h, 1)}), 1);
  b.add_term(detail::torus_simplex({pt(0, 0), pt(0, 1), pt(h, 1)}), -1);
  b.add_term(detail::torus_simplex({pt(h, 0), pt(1, 0), pt(1, 1)}), 1);
  b.add_term(detail::torus_simplex({pt(h, 0), pt(h, 1), pt(1, 1)}), -1);
  return b;
}

inline AffineTorusMap dehn_twist() {
  return AffineTorusMap(std::vector<std::vector<Integer>>{{1, 1}, {0, 1}});
}

inline AffineTorusMap gamma() {
  return AffineTorusMap(std::vector<std::vector<Integer>>{{1}, {0}});
}

inline AffineTorusMap make_phi(unsigned k, unsigned i) {
  detail::check_k(k);
  if (i > 2 * k) throw std::out_of_range("phi index i must satisfy 0 <= i <= 2k");
  return AffineTorusMap(std::vector<std::vector<Integer>>{{pow2(i), pow2(2 * k - i)}});
}

inline Chain make_tau(unsigned k) {
  using detail::pt;
  detail::check_k(k);
  const Rational n(monodromy_power(k));
  Chain t(2, 3);
  t.add_term(detail::torus_simplex({pt(0, 0), pt(1, 0), pt(n + 1, 0), pt(n + 1, 1)}), 1);
  t.add_term(detail::torus_simplex({pt(0, 0), pt(n, 0), pt(n + 1, 0), pt(n + 1, 1)}), -1);
  t.add_term(detail::torus_simplex({pt(0, 0), pt(n, 0), pt(n, 1), pt(n + 1, 1)}), 1);
  return t;
}

inline Chain make_bk(unsigned k) {
  using detail::pt;
  detail::check_k(k);
  const Rational n(monodromy_power(k));
  Chain b(2, 2);
  b.add_term(detail::torus_simplex({pt(0, 0), pt(1, 0), pt(n + 1, 0)}), 1);
  b.add_term(detail::torus_simplex({pt(0, 0), pt(n, 0), pt(n + 1, 0)}), -1);
  return b;
}

// Zero at i = k, where both simplices coincide.
inline Chain make_s(unsigned k, unsigned i) {
  detail::check_k(k);
  if (i > 2 * k) throw std::out_of_range("s index i must satisfy 0 <= i <= 2k");
  const Rational p(pow2(i)), r(pow2(2 * k - i));
  Chain s(1, 2);
  s.add_term(circle_simplex({0, p, r + p}), 1);
  s.add_term(circle_simplex({0, r, r + p}), -1);
  return s;
}

struct FillingProvenance {
  unsigned long q = 0;
  unsigned long spread = 0;
  std::string solver_version = kSolverVersion;
  std::size_t alpha_nodes = 0;
  std::size_t beta_nodes = 0;
  Rational alpha_lp_value;
  Rational beta_lp_value;
};

class FillingPairError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// 3-chains on T^2 with boundary(alpha) = a - c and boundary(beta) = c - b.
class FillingPair {
 public:
  FillingPair(Chain alpha, Chain beta, FillingProvenance provenance)
      : alpha_(std::move(alpha)), beta_(std::move(beta)), provenance_(std::move(provenance)) {
    if (alpha_.ambient_dim() != 2 || alpha_.degree() != 3 || beta_.ambient_dim() != 2 ||
        beta_.degree() != 3)
      throw FillingPairError("alpha and beta must be 3-chains on T^2");
    if (boundary(alpha_) != make_a() - make_c())
      throw FillingPairError("boundary(alpha) != a - c");
    if (boundary(beta_) != make_c() - make_b())
      throw FillingPairError("boundary(beta) != c - b");
  }

  const Chain& alpha() const { return alpha_; }
  const Chain& beta() const { return beta_; }
  const FillingProvenance& provenance() const { return provenance_; }

 private:
  Chain alpha_;
  Chain beta_;
  FillingProvenance provenance_;
};

inline nlohmann::json filling_pair_to_json(const FillingPair& pair) {
  const auto& p = pair.provenance();
  return {{"alpha", chain_to_json(pair.alpha())},
          {"beta", chain_to_json(pair.beta())},
          {"provenance",
           {{"q", p.q},
            {"D", p.spread},
            {"solver_version", p.solver_version},
            {"alpha_nodes", p.alpha_nodes},
            {"beta_nodes", p.beta_nodes},
            {"alpha_lp_value", rational_to_json(p.alpha_lp_value)},
            {"beta_lp_value", rational_to_json(p.beta_lp_value)}}}};
}

// Re-verifies both boundary identities.
inline FillingPair filling_pair_from_json(const nlohmann::json& j) {
  FillingProvenance p;
  const auto& pj = j.at("provenance");
  p.q = pj.at("q").get<unsigned long>();
  p.spread = pj.at("D").get<unsigned long>();
  p.solver_version = pj.at("solver_version").get<std::string>();
  p.alpha_nodes = pj.value("alpha_nodes", std::size_t{0});
  p.beta_nodes = pj.value("beta_nodes", std::size_t{0});
  if (pj.contains("alpha_lp_value")) p.alpha_lp_value = rational_from_json(pj["alpha_lp_value"]);
  if (pj.contains("beta_lp_value")) p.beta_lp_value = rational_from_json(pj["beta_lp_value"]);
  return FillingPair(chain_from_json(j.at("alpha")), chain_from_json(j.at("beta")), p);
}

inline FillingPair load_filling_pair(const std::string& path) {
  return filling_pair_from_json(read_json_file(path));
}

inline void save_filling_pair(const FillingPair& pair, const std::string& path) {
  write_text_file_atomic(path, filling_pair_to_json(pair).dump(1) + "\n");
}

struct SolveOptions {
  unsigned long q = 2;
  unsigned long spread = 2;
  unsigned long max_spread = 3;
  unsigned long max_q = 4;
  std::size_t max_universe = 200000;
  FillOptions fill;
};

// Minimal-norm integral alpha and beta within the first model that admits
// both. Infeasible models are skipped by enlarging D, then q.
inline FillingPair solve_alpha_beta(const SolveOptions& options = {}) {
  const Chain a = make_a(), b = make_b(), c = make_c();
  std::string last_error = "no model tried";
  for (unsigned long q = options.q; q <= options.max_q; q *= 2) {
    for (unsigned long spread = options.spread; spread <= options.max_spread; ++spread) {
      ModelParams params{2, 2, q, spread, options.max_universe};
      try {
        const FiniteModel model = build_model(params);
        const FillingCertificate fa = fill_int(model, a - c, options.fill);
        const FillingCertificate fb = fill_int(model, c - b, options.fill);
        FillingProvenance prov;
        prov.q = q;
        prov.spread = spread;
        prov.alpha_nodes = fa.nodes;
        prov.beta_nodes = fb.nodes;
        prov.alpha_lp_value = fill_real(model, a - c).value;
        prov.beta_lp_value = fill_real(model, c - b).value;
        return FillingPair(integral_witness(fa), integral_witness(fb), prov);
      } catch (const FillingError& e) {
        last_error = e.what();
        if (e.kind() == FillingError::Kind::kUniverseTooLarge) break;
      }
    }
  }
  throw FillingPairError("no model admits alpha and beta: " + last_error);
}

inline Chain make_omega(unsigned k, const FillingPair& pair) {
  detail::check_k(k);
  Chain omega(1, 3);
  for (unsigned i = 0; i < k; ++i) {
    omega += pushforward(make_phi(k, i), pair.alpha());
    omega += pushforward(make_phi(k, i + 1), pair.beta());
  }
  return omega;
}

inline Chain make_filling_W(unsigned k, const FillingPair& pair) {
  return make_tau(k) - pushforward(gamma(), make_omega(k, pair));
}

struct FvBound {
  unsigned k = 0;
  Integer n;          // 4^k
  Chain filling{2, 3};  // W_k
  Integer norm;
  Rational bound;     // norm / n
};

// Each term bounds fv_Z(f) from above, since fv is an infimum over powers.
inline std::vector<FvBound> fv_upper_bounds(unsigned k_max, const FillingPair& pair) {
  if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  std::vector<FvBound> out;
  const Chain c = make_c();
  for (unsigned k = 1; k <= k_max; ++k) {
    FvBound row;
    row.k = k;
    row.n = monodromy_power(k);
    row.filling = make_filling_W(k, pair);
    const Chain target = pushforward(dehn_twist().power(row.n.get_ui()), c) - c;
    if (boundary(row.filling) != target)
      throw std::logic_error("boundary(W_" + std::to_string(k) + ") != f^n_*(c) - c");
    row.norm = l1_norm(row.filling);
    row.bound = make_rational(row.norm, row.n);
    out.push_back(std::move(row));
  }
  return out;
}

class IsvBoundError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// (n+1)|z|_1 + |w|_1 bounds the integral simplicial volume of the mapping
// torus of |map| on T^n, given a fundamental cycle z and a filling w of
// map_*(z) - z.
inline Integer isv_upper_bound(const Chain& z, const Chain& w, const AffineTorusMap& map) {
  const std::size_t n = z.ambient_dim();
  if (z.degree() != n) throw IsvBoundError("z must be a top-dimensional chain");
  if (!boundary(z).is_zero()) throw IsvBoundError("z is not a cycle");
  if (degree_of(z) != 1) throw IsvBoundError("z is not a fundamental cycle");
  if (w.ambient_dim() != n || w.degree() != n + 1)
    throw IsvBoundError("w must be an (n+1)-chain on T^n");
  const Chain target = pushforward(map, z) - z;
  const bool ok = w.is_zero() ? target.is_zero() : boundary(w) == target;
  if (!ok) throw IsvBoundError("boundary(w) != f_*(z) - z");
  return Integer(static_cast<unsigned long>(n + 1)) * l1_norm(z) + l1_norm(w);
}

}  // namespace torvol

#endif  // TORVOL_CONSTRUCTIONS_HPP_
