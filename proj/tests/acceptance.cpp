// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.
//
//   torvol_acceptance [path/to/filling_pair.json]

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "torvol/torvol.hpp"

namespace {

using namespace torvol;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fixed(double x, int digits = 2) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << x;
  return os.str();
}

Outcome step_identities() {
  const auto t0 = Clock::now();
  const Chain c = make_c(), a = make_a(), b = make_b();
  std::size_t checked = 0;
  bool ok = true;
  for (unsigned k = 1; k <= 4; ++k) {
    const Chain target = pushforward(dehn_twist().power(monodromy_power(k).get_ui()), c) - c;
    ok = ok && boundary(make_tau(k)) + make_bk(k) == target;
    ++checked;
    for (unsigned i = 0; i <= 2 * k; ++i, ++checked)
      ok = ok && pushforward(make_phi(k, i), c) == make_s(k, i);
    for (unsigned i = 0; i < 2 * k; ++i, ++checked)
      ok = ok && pushforward(make_phi(k, i), a) == pushforward(make_phi(k, i + 1), b);
    ok = ok && make_s(k, k).is_zero();
    ++checked;
  }
  const double secs = seconds_since(t0);
  return {ok && secs < 10.0,
          std::to_string(checked) + " identities for k=1..4, s_k^k = 0, " + fixed(secs, 3) + " s"};
}

Outcome chain_constants() {
  bool ok = l1_norm(make_c()) == 2 && l1_norm(make_a()) == 4 && l1_norm(make_b()) == 4;
  for (unsigned k = 1; k <= 4; ++k) ok = ok && l1_norm(make_tau(k)) == 3;
  ok = ok && degree_of(make_c()) == 1 && degree_of(make_a()) == 1 && degree_of(make_b()) == 1;
  for (unsigned long k = 1; k <= 16; ++k)
    ok = ok && degree_of(pushforward(dehn_twist().power(k), make_c())) == 1;
  return {ok, "|c|=2, |tau_k|=3 (k<=4), |a|=|b|=4, deg c = deg a = deg b = deg f^k_*c = 1 (k<=16)"};
}

Outcome filling_construction(const FillingPair& pair) {
  const Chain c = make_c();
  const Integer step = l1_norm(pair.alpha()) + l1_norm(pair.beta());
  bool ok = boundary(pair.alpha()) == make_a() - c && boundary(pair.beta()) == c - make_b();
  std::string norms;
  std::optional<Rational> prev;
  for (unsigned k = 1; k <= 4; ++k) {
    const Integer n = monodromy_power(k);
    const Chain omega = make_omega(k, pair);
    const Chain w = make_filling_W(k, pair);
    ok = ok && boundary(omega) == -make_s(k, 0);
    ok = ok && boundary(w) == pushforward(dehn_twist().power(n.get_ui()), c) - c;
    ok = ok && l1_norm(w) <= Integer(3) + Integer(k) * step;
    const Rational ratio = make_rational(l1_norm(w), n);
    if (prev) ok = ok && ratio < *prev;
    prev = ratio;
    norms += (k > 1 ? ", " : "") + ratio.get_str();
  }
  return {ok, "|alpha|+|beta| = " + step.get_str() + "; |W_k|/4^k = " + norms};
}

Outcome isv_bounds(const FillingPair& pair) {
  const Chain c = make_c();
  bool ok = true;
  std::string text;
  std::optional<Rational> prev;
  for (const auto& row : fv_upper_bounds(4, pair)) {
    const Integer bound = isv_upper_bound(c, row.filling, dehn_twist().power(row.n.get_ui()));
    ok = ok && bound == 6 + row.norm;
    const Rational ratio = make_rational(bound, row.n);
    if (prev) ok = ok && ratio < *prev;
    prev = ratio;
    text += (row.k > 1 ? ", " : "") + bound.get_str() + "/" + row.n.get_str();
  }
  return {ok, "(6 + |W_k|)/4^k = " + text};
}

Outcome solver_soundness() {
  const auto t0 = Clock::now();
  const std::vector<ModelParams> models{{1, 1, 1, 3}, {1, 1, 2, 2}, {1, 2, 1, 3},
                                        {2, 1, 1, 1}, {2, 1, 2, 1}, {2, 2, 1, 1}};
  std::mt19937 rng(31337);
  std::size_t instances = 0;
  bool ok = true;
  std::string failure;
  for (const auto& params : models) {
    const FiniteModel model = build_model(params);
    if (model.upper().size() > 5000) return {false, "model " + params.str() + " too large"};
    std::uniform_int_distribution<std::size_t> pick(0, model.upper().size() - 1);
    std::uniform_int_distribution<int> coeff(-2, 2);
    for (int trial = 0; trial < 5; ++trial) {
      Chain gen(params.ambient_dim, params.degree + 1);
      for (int t = 0; t <= trial % 3; ++t) gen.add_term(model.upper()[pick(rng)], coeff(rng));
      const Chain z = boundary(gen);
      const auto fi = fill_int(model, z);
      const auto fr = fill_real(model, z);
      const auto oracle =
          oracle_fill_int(model, z, static_cast<unsigned>(l1_norm(gen).get_ui()));
      ++instances;
      std::string why;
      const bool good = oracle && fi.value == Rational(*oracle) && fr.value <= fi.value &&
                        verify_certificate(model, z, fi, &why) &&
                        verify_certificate(model, z, fr, &why) &&
                        (z.is_zero() || boundary(integral_witness(fi)) == z);
      if (!good && failure.empty()) failure = " first failure in " + params.str() + " " + why;
      ok = ok && good;
    }
  }
  const double secs = seconds_since(t0);
  return {ok && instances >= 20 && secs < 120.0,
          std::to_string(instances) + " random boundaries, fill_int = oracle, LP <= ILP, " +
              "certificates re-verified, " + fixed(secs) + " s" + failure};
}

Outcome model_monotonicity() {
  struct Step {
    ModelParams small, large;
  };
  const std::vector<Step> steps{
      {{1, 1, 1, 2}, {1, 1, 2, 2}}, {{1, 1, 1, 2}, {1, 1, 1, 3}}, {{1, 1, 1, 2}, {1, 1, 2, 3}},
      {{1, 1, 2, 1}, {1, 1, 4, 1}}, {{1, 2, 1, 2}, {1, 2, 1, 3}}, {{2, 1, 1, 1}, {2, 1, 2, 1}},
      {{2, 1, 1, 1}, {2, 1, 1, 2}}, {{2, 2, 1, 1}, {2, 2, 1, 2}}, {{2, 2, 1, 1}, {2, 2, 2, 1}},
      {{1, 1, 2, 2}, {1, 1, 4, 2}}};
  std::mt19937 rng(2718);
  bool ok = true;
  std::size_t strict = 0;
  for (const auto& s : steps) {
    const FiniteModel small = build_model(s.small), large = build_model(s.large);
    std::uniform_int_distribution<std::size_t> pick(0, small.upper().size() - 1);
    Chain gen(s.small.ambient_dim, s.small.degree + 1);
    for (int t = 0; t < 3; ++t) gen.add_term(small.upper()[pick(rng)], 1);
    const Chain z = boundary(gen);
    const Rational vs = fill_int(small, z).value, vl = fill_int(large, z).value;
    const Rational rs = fill_real(small, z).value, rl = fill_real(large, z).value;
    ok = ok && vl <= vs && rl <= rs;
    if (vl < vs || rl < rs) ++strict;
  }
  return {ok, std::to_string(steps.size()) + " instances, " + std::to_string(strict) +
                  " strictly improved by the larger model"};
}

Outcome fv_classification() {
  std::size_t total = 0, anosov = 0;
  bool ok = true;
  for (int a = -5; a <= 5; ++a)
    for (int b = -5; b <= 5; ++b)
      for (int c = -5; c <= 5; ++c)
        for (int d = -5; d <= 5; ++d) {
          if (a * d - b * c != 1) continue;
          const Sl2Matrix m(a, b, c, d);
          const bool by_trace = std::llabs(m.trace()) > 2;
          ok = ok && fv_positive(m) == by_trace;
          ++total;
          if (by_trace) ++anosov;
        }
  for (int n = -8; n <= 8; ++n) {
    if (n == 0) continue;
    ok = ok && !fv_positive(Sl2Matrix(1, n, 0, 1)) && !fv_positive(Sl2Matrix(1, 0, n, 1));
  }
  ok = ok && fv_positive(Sl2Matrix(2, 1, 1, 1)) && fv_positive(Sl2Matrix(2, 1, 1, 1).power(5));
  return {ok, std::to_string(total) + " matrices (" + std::to_string(anosov) +
                  " Anosov); twist powers false, Anosov true"};
}

Outcome growth_proxy() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string text;
  std::size_t bfs_checked = 0;
  const FareyTriangle base = FareyTriangle::base();
  for (const auto& [name, a] : {std::pair{"shear", Sl2Matrix::shear()},
                                std::pair{"[[2,1],[1,1]]", Sl2Matrix(2, 1, 1, 1)}}) {
    const auto rows = spine_growth_table(a, 15);
    double min_ratio = 1e9, lo = 1e9, hi = 0;
    Sl2Matrix p = Sl2Matrix::identity();
    for (const auto& r : rows) {
      p = p * a;
      const double ratio = static_cast<double>(r.distance) / static_cast<double>(r.i);
      min_ratio = std::min(min_ratio, ratio);
      if (r.i > 10) {
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
      if (r.distance <= 18) {
        ok = ok && flip_distance_bfs(act(p, base), base, 18) == r.distance;
        ++bfs_checked;
      }
    }
    ok = ok && min_ratio > 0 && hi <= 1.2 * lo;
    text += std::string(text.empty() ? "" : "; ") + name + ": min d/i = " + fixed(min_ratio) +
            ", last five in [" + fixed(lo) + ", " + fixed(hi) + "]";
  }
  const double secs = seconds_since(t0);
  return {ok && secs < 120.0, text + "; BFS agreed on " + std::to_string(bfs_checked) +
                                  " instances, " + fixed(secs) + " s"};
}

Outcome layered_bundles() {
  const Sl2Matrix a(2, 1, 1, 1);
  const FlipPath path = flip_path(a);
  bool ok = true;
  std::string counts;
  std::size_t per_block = 0;
  for (unsigned long i = 1; i <= 6; ++i) {
    const LayeredBuild b = layer_cover(path, a, i);
    if (i == 1) per_block = b.triangulation.size();
    ok = ok && b.report.valid && b.triangulation.size() == i * per_block;
    ok = ok && homology_h1(b.triangulation) == bundle_h1_oracle(a.power(i));
    counts += (i > 1 ? "," : "") + std::to_string(b.triangulation.size());
  }
  return {ok, "tetrahedra " + counts + " (" + std::to_string(per_block) +
                  " per power), all valid, H1 = Z + coker(A^i - I)"};
}

Outcome negative_controls(const FillingPair& pair) {
  bool ok = all_pass(verify_steps(default_step_inputs(2, &pair)));
  std::string named;
  for (const std::string& target : tamper_targets()) {
    StepInputs in = default_step_inputs(2, &pair);
    tamper(in, target);
    std::string first_failed;
    for (const auto& c : verify_steps(in))
      if (!c.pass) {
        first_failed = c.step;
        break;
      }
    ok = ok && !first_failed.empty();
    named += (named.empty() ? "" : ", ") + target + " -> " +
             (first_failed.empty() ? "undetected" : first_failed);
  }
  return {ok, named};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cache = argc > 1 ? argv[1] : "data/filling_pair.json";
  std::optional<FillingPair> pair;
  std::string pair_note;
  try {
    pair = load_filling_pair(cache);
    pair_note = "cached pair " + cache;
  } catch (const std::exception& e) {
    std::cerr << "cannot load " << cache << " (" << e.what() << "); solving in memory\n";
    pair = solve_alpha_beta();
    pair_note = "pair solved in memory";
  }
  std::cout << "using " << pair_note << " (q=" << pair->provenance().q
            << ", D=" << pair->provenance().spread << ")\n";

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"step identities", step_identities},
      {"chain constants", chain_constants},
      {"filling construction", [&] { return filling_construction(*pair); }},
      {"simplicial volume bound", [&] { return isv_bounds(*pair); }},
      {"solver soundness", solver_soundness},
      {"model monotonicity", model_monotonicity},
      {"fv classification", fv_classification},
      {"flip distance growth", growth_proxy},
      {"layered bundles", layered_bundles},
      {"negative controls", [&] { return negative_controls(*pair); }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    if (!out.pass) ++failures;
    std::cout << (out.pass ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first << ": "
              << out.detail << std::endl;
  }
  std::cout << criteria.size() - failures << "/" << criteria.size() << " criteria passed\n";
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
