#ifndef TORVOL_VERIFY_HPP_
#define TORVOL_VERIFY_HPP_

// Exact re-verification of every identity behind the filling W_k.
//
// The chains are taken from a StepInputs value rather than rebuilt on the fly,
// so a caller can hand in stored (or deliberately corrupted) data and see
// which step breaks.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "torvol/chain.hpp"
#include "torvol/constructions.hpp"

namespace torvol {

struct StepInputs {
  unsigned k_max = 0;
  Chain c{2, 2};
  Chain a{2, 2};
  Chain b{2, 2};
  std::map<unsigned, Chain> tau;                          // k -> tau_k
  std::map<unsigned, Chain> bk;                           // k -> b_k
  std::map<std::pair<unsigned, unsigned>, Chain> s;       // (k, i) -> s_k^i
  std::optional<Chain> alpha;
  std::optional<Chain> beta;
};

inline StepInputs default_step_inputs(unsigned k_max, const FillingPair* pair = nullptr) {
  StepInputs in;
  in.k_max = k_max;
  in.c = make_c();
  in.a = make_a();
  in.b = make_b();
  for (unsigned k = 1; k <= k_max; ++k) {
    in.tau.emplace(k, make_tau(k));
    in.bk.emplace(k, make_bk(k));
    for (unsigned i = 0; i <= 2 * k; ++i) in.s.emplace(std::make_pair(k, i), make_s(k, i));
  }
  if (pair != nullptr) {
    in.alpha = pair->alpha();
    in.beta = pair->beta();
  }
  return in;
}

// Names accepted by tamper(): c, a, b, tau, bk, s, alpha, beta.
inline const std::vector<std::string>& tamper_targets() {
  static const std::vector<std::string> names{"c", "a", "b", "tau", "bk", "s", "alpha", "beta"};
  return names;
}

namespace detail {

inline void flip_first_coefficient(Chain& chain) {
  if (chain.is_zero()) throw std::invalid_argument("cannot tamper with a zero chain");
  const auto& [simplex, coeff] = *chain.terms().begin();
  const StraightSimplex s = simplex;
  chain.add_term(s, Integer(-2) * coeff);
}

inline Chain& first_nonzero(std::map<std::pair<unsigned, unsigned>, Chain>& m) {
  for (auto& [key, chain] : m)
    if (!chain.is_zero()) return chain;
  throw std::invalid_argument("no nonzero chain to tamper with");
}

}  // namespace detail

// Flips the sign of one coefficient in the named stored chain.
inline void tamper(StepInputs& in, const std::string& target) {
  if (target == "c") detail::flip_first_coefficient(in.c);
  else if (target == "a") detail::flip_first_coefficient(in.a);
  else if (target == "b") detail::flip_first_coefficient(in.b);
  else if (target == "tau" && !in.tau.empty()) detail::flip_first_coefficient(in.tau.begin()->second);
  else if (target == "bk" && !in.bk.empty()) detail::flip_first_coefficient(in.bk.begin()->second);
  else if (target == "s") detail::flip_first_coefficient(detail::first_nonzero(in.s));
  else if (target == "alpha" && in.alpha) detail::flip_first_coefficient(*in.alpha);
  else if (target == "beta" && in.beta) detail::flip_first_coefficient(*in.beta);
  else throw std::invalid_argument("unknown or absent tamper target: " + target);
}

struct StepCheck {
  std::string step;      // "Step 1", "Step 2", "Step 3"
  unsigned k = 0;        // 0 for checks independent of k
  std::string identity;  // human-readable statement
  bool pass = false;
};

namespace detail {

template <typename T, typename Key>
const T* find_or_null(const std::map<Key, T>& m, const Key& key) {
  auto it = m.find(key);
  return it == m.end() ? nullptr : &it->second;
}

}  // namespace detail

// Step 1: the prism chain tau_k.
// Step 2: the circle factorisation through phi_k^i and gamma, plus the two
//         fillings alpha and beta when present.
// Step 3: the assembled filling W_k (requires alpha and beta).
inline std::vector<StepCheck> verify_steps(const StepInputs& in) {
  std::vector<StepCheck> out;
  auto record = [&](const char* step, unsigned k, std::string what, bool ok) {
    out.push_back(StepCheck{step, k, std::move(what), ok});
  };
  const AffineTorusMap f = dehn_twist();

  record("Step 0", 0, "boundary(c) = 0 and deg c = 1",
         boundary(in.c).is_zero() && degree_of(in.c) == 1);
  record("Step 0", 0, "a, b are fundamental cycles",
         boundary(in.a).is_zero() && boundary(in.b).is_zero() && degree_of(in.a) == 1 &&
             degree_of(in.b) == 1);

  const bool have_pair = in.alpha.has_value() && in.beta.has_value();
  if (have_pair) {
    record("Step 2", 0, "boundary(alpha) = a - c", boundary(*in.alpha) == in.a - in.c);
    record("Step 2", 0, "boundary(beta) = c - b", boundary(*in.beta) == in.c - in.b);
  }

  for (unsigned k = 1; k <= in.k_max; ++k) {
    const std::string ks = std::to_string(k);
    const unsigned long n = monodromy_power(k).get_ui();
    const Chain target = pushforward(f.power(n), in.c) - in.c;
    const Chain* tau = detail::find_or_null(in.tau, k);
    const Chain* bk = detail::find_or_null(in.bk, k);
    const bool have_tau = tau != nullptr && bk != nullptr;

    record("Step 1", k, "boundary(tau_" + ks + ") + b_" + ks + " = f^n_*(c) - c",
           have_tau && boundary(*tau) + *bk == target);
    record("Step 1", k, "|tau_" + ks + "|_1 = 3", have_tau && l1_norm(*tau) == 3);

    for (unsigned i = 0; i <= 2 * k; ++i) {
      const Chain* s = detail::find_or_null(in.s, std::make_pair(k, i));
      record("Step 2", k, "phi^" + std::to_string(i) + "_*(c) = s^" + std::to_string(i),
             s != nullptr && pushforward(make_phi(k, i), in.c) == *s);
    }
    for (unsigned i = 0; i < 2 * k; ++i) {
      record("Step 2", k,
             "phi^" + std::to_string(i) + "_*(a) = phi^" + std::to_string(i + 1) + "_*(b)",
             pushforward(make_phi(k, i), in.a) == pushforward(make_phi(k, i + 1), in.b));
    }
    const Chain* s0 = detail::find_or_null(in.s, std::make_pair(k, 0u));
    const Chain* sk = detail::find_or_null(in.s, std::make_pair(k, k));
    record("Step 2", k, "s^" + ks + " = 0", sk != nullptr && sk->is_zero());
    record("Step 2", k, "gamma_*(s^0) = b_" + ks,
           s0 != nullptr && bk != nullptr && pushforward(gamma(), *s0) == *bk);

    if (!have_pair) continue;
    Chain omega(1, 3);
    for (unsigned i = 0; i < k; ++i) {
      omega += pushforward(make_phi(k, i), *in.alpha);
      omega += pushforward(make_phi(k, i + 1), *in.beta);
    }
    record("Step 3", k, "boundary(omega_" + ks + ") = -s^0",
           s0 != nullptr && boundary(omega) == -*s0);
    const Chain w = have_tau ? *tau - pushforward(gamma(), omega) : Chain(2, 3);
    record("Step 3", k, "boundary(W_" + ks + ") = f^n_*(c) - c",
           have_tau && boundary(w) == target);
    const Integer cap = Integer(3) + Integer(k) * (l1_norm(*in.alpha) + l1_norm(*in.beta));
    record("Step 3", k, "|W_" + ks + "|_1 <= 3 + k(|alpha|_1 + |beta|_1)",
           have_tau && l1_norm(w) <= cap);
  }
  return out;
}

inline bool all_pass(const std::vector<StepCheck>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

}  // namespace torvol

#endif  // TORVOL_VERIFY_HPP_
