// torvol: command-line front end for the filling, mapping class and layered
// triangulation code.
//
// Exit codes:
//   0  success, all requested checks passed
//   1  a requested verification failed
//   2  usage error
//   3  invalid input (bad matrix, malformed chain file, periodic monodromy)
//   4  fill target is not a boundary in the model
//   5  resource cap reached (model too large, node or norm budget)
//   6  cache missing or unreadable
//   7  internal error

#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "torvol/torvol.hpp"

namespace {

constexpr const char* kToolVersion = "0.1.0";

enum Exit : int {
  kOk = 0,
  kCheckFailed = 1,
  kUsage = 2,
  kBadInput = 3,
  kNotABoundary = 4,
  kResourceCap = 5,
  kCacheError = 6,
  kInternal = 7,
};

struct ExitError : std::runtime_error {
  ExitError(int code, const std::string& what) : std::runtime_error(what), code(code) {}
  int code;
};

std::string g_command_line;

nlohmann::json provenance(nlohmann::json config) {
  return {{"tool", "torvol"},
          {"version", kToolVersion},
          {"solver_version", torvol::kSolverVersion},
          {"command", g_command_line},
          {"config", std::move(config)}};
}

std::string csv_header(const nlohmann::json& config) {
  return "# torvol " + std::string(kToolVersion) + " (" + torvol::kSolverVersion +
         ") config=" + config.dump() + "\n";
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
  } else {
    torvol::write_text_file_atomic(out, text);
  }
}

void emit_json(const std::string& out, nlohmann::json j) { emit(out, j.dump(1) + "\n"); }

torvol::Sl2Matrix parse_matrix(const std::string& text) {
  try {
    return torvol::Sl2Matrix::parse(text);
  } catch (const std::exception& e) {
    throw ExitError(kBadInput, std::string("bad --matrix: ") + e.what());
  }
}

torvol::ModelParams parse_model(const std::string& text, std::size_t max_universe) {
  std::vector<unsigned long> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long x = std::stol(item, &used);
      if (used != item.size() || x < 1) throw std::invalid_argument(item);
      v.push_back(static_cast<unsigned long>(x));
    } catch (const std::exception&) {
      throw ExitError(kBadInput, "bad --model entry '" + item + "'");
    }
  }
  if (v.size() != 4) throw ExitError(kBadInput, "--model expects m,d,q,D");
  return torvol::ModelParams{v[0], v[1], v[2], v[3], max_universe};
}

torvol::FillingPair load_cache(const std::string& path) {
  try {
    return torvol::load_filling_pair(path);
  } catch (const std::exception& e) {
    throw ExitError(kCacheError, "cannot use filling-pair cache " + path + ": " + e.what() +
                                     " (regenerate with: torvol solve-pair --regenerate --cache " +
                                     path + ")");
  }
}

int fill_error_code(const torvol::FillingError& e) {
  using K = torvol::FillingError::Kind;
  switch (e.kind()) {
    case K::kNotABoundary: return kNotABoundary;
    case K::kNotRepresentable: return kBadInput;
    case K::kUniverseTooLarge:
    case K::kBudgetExhausted: return kResourceCap;
  }
  return kInternal;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  unsigned k = 4;
  std::string cache = "data/filling_pair.json";
  std::string tamper;
  bool no_pair = false;
};

int cmd_verify_steps(const VerifyArgs& args) {
  std::optional<torvol::FillingPair> pair;
  if (!args.no_pair) pair = load_cache(args.cache);
  torvol::StepInputs in = torvol::default_step_inputs(args.k, pair ? &*pair : nullptr);
  if (!args.tamper.empty()) {
    try {
      torvol::tamper(in, args.tamper);
    } catch (const std::invalid_argument& e) {
      throw ExitError(kUsage, e.what());
    }
  }
  const auto checks = torvol::verify_steps(in);
  std::size_t failed = 0;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "pass " : "FAIL ") << c.step;
    if (c.k != 0) std::cout << " k=" << c.k;
    std::cout << ": " << c.identity << "\n";
    if (!c.pass) ++failed;
  }
  std::cout << checks.size() - failed << "/" << checks.size() << " identities hold\n";
  return failed == 0 ? kOk : kCheckFailed;
}

struct FillArgs {
  std::string model;
  std::string mode = "int";
  std::string chain;
  std::string out;
  std::size_t node_cap = 10000;
  std::size_t max_universe = 200000;
  unsigned budget = 12;
};

int cmd_fill(const FillArgs& args) {
  const torvol::ModelParams params = parse_model(args.model, args.max_universe);
  torvol::Chain z(1, 1);
  try {
    z = torvol::chain_from_json(torvol::read_json_file(args.chain));
  } catch (const std::exception& e) {
    throw ExitError(kBadInput, "cannot read chain " + args.chain + ": " + e.what());
  }
  const nlohmann::json config = {{"model", args.model}, {"mode", args.mode},
                                 {"chain", args.chain}, {"node_cap", args.node_cap},
                                 {"budget", args.budget}};
  try {
    const torvol::FiniteModel model = torvol::build_model(params);
    nlohmann::json cert;
    if (args.mode == "oracle") {
      const auto v = torvol::oracle_fill_int(model, z, args.budget);
      if (!v)
        throw ExitError(kResourceCap, "no filling of norm <= " + std::to_string(args.budget) +
                                          " in model " + params.str());
      cert = {{"value", torvol::rational_to_json(torvol::Rational(*v))},
              {"mode", "oracle"},
              {"witness", nullptr},
              {"dual", nlohmann::json::array()}};
    } else if (args.mode == "int") {
      torvol::FillOptions opt;
      opt.node_cap = args.node_cap;
      cert = torvol::certificate_to_json(torvol::fill_int(model, z, opt));
    } else {
      cert = torvol::certificate_to_json(torvol::fill_real(model, z));
    }
    cert["provenance"] = provenance(config);
    emit_json(args.out, cert);
    std::cerr << "fill value " << cert["value"][0].dump() << "/" << cert["value"][1].dump()
              << " in model " << params.str() << "\n";
    return kOk;
  } catch (const torvol::FillingError& e) {
    throw ExitError(fill_error_code(e), e.what());
  }
}

struct ChainArgs {
  std::string name;
  unsigned k = 1;
  unsigned index = 0;
  std::string cache = "data/filling_pair.json";
  std::string out;
};

int cmd_chain(const ChainArgs& args) {
  torvol::Chain c(2, 2);
  const std::string& n = args.name;
  if (n == "c") c = torvol::make_c();
  else if (n == "a") c = torvol::make_a();
  else if (n == "b") c = torvol::make_b();
  else if (n == "tau") c = torvol::make_tau(args.k);
  else if (n == "bk") c = torvol::make_bk(args.k);
  else if (n == "s") c = torvol::make_s(args.k, args.index);
  else if (n == "alpha") c = load_cache(args.cache).alpha();
  else if (n == "beta") c = load_cache(args.cache).beta();
  else if (n == "omega") c = torvol::make_omega(args.k, load_cache(args.cache));
  else if (n == "W") c = torvol::make_filling_W(args.k, load_cache(args.cache));
  else throw ExitError(kUsage, "unknown chain '" + n + "'");
  nlohmann::json j = torvol::chain_to_json(c);
  j["provenance"] = provenance({{"chain", n}, {"k", args.k}, {"index", args.index}});
  emit_json(args.out, j);
  return kOk;
}

struct BoundsArgs {
  unsigned k = 4;
  std::string cache = "data/filling_pair.json";
  std::string out;
};

int cmd_fv_bounds(const BoundsArgs& args) {
  const auto rows = torvol::fv_upper_bounds(args.k, load_cache(args.cache));
  std::string text = csv_header({{"k_max", args.k}, {"cache", args.cache}});
  text += "k,n,norm_Wk,bound_num,bound_den\n";
  for (const auto& r : rows)
    text += std::to_string(r.k) + "," + r.n.get_str() + "," + r.norm.get_str() + "," +
            r.bound.get_num().get_str() + "," + r.bound.get_den().get_str() + "\n";
  emit(args.out, text);
  return kOk;
}

int cmd_isv_bounds(const BoundsArgs& args) {
  const torvol::FillingPair pair = load_cache(args.cache);
  const torvol::Chain c = torvol::make_c();
  std::string text = csv_header({{"k_max", args.k}, {"cache", args.cache}});
  text += "k,n,isv_bound,ratio_num,ratio_den\n";
  for (const auto& r : torvol::fv_upper_bounds(args.k, pair)) {
    const torvol::Integer bound = torvol::isv_upper_bound(
        c, r.filling, torvol::dehn_twist().power(r.n.get_ui()));
    const torvol::Rational ratio = torvol::make_rational(bound, r.n);
    text += std::to_string(r.k) + "," + r.n.get_str() + "," + bound.get_str() + "," +
            ratio.get_num().get_str() + "," + ratio.get_den().get_str() + "\n";
  }
  emit(args.out, text);
  return kOk;
}

int cmd_classify(const std::string& matrix) {
  const torvol::Sl2Matrix m = parse_matrix(matrix);
  const auto type = torvol::classify(m);
  std::cout << torvol::describe(type) << "; fv_ℤ " << (torvol::fv_positive(m) ? "> 0" : "= 0")
            << "\n";
  return kOk;
}

struct TableArgs {
  std::string matrix;
  unsigned long power = 15;
  bool check = false;
  std::string out;
};

int cmd_growth(const TableArgs& args) {
  const torvol::Sl2Matrix m = parse_matrix(args.matrix);
  std::vector<torvol::GrowthRow> rows;
  try {
    rows = torvol::spine_growth_table(m, args.power);
  } catch (const torvol::Sl2Error& e) {
    throw ExitError(kBadInput, e.what());
  }
  int code = kOk;
  if (args.check) {
    const auto t0 = torvol::FareyTriangle::base();
    torvol::Sl2Matrix p = torvol::Sl2Matrix::identity();
    for (const auto& r : rows) {
      p = p * m;
      if (r.distance > 18) continue;
      const auto bfs = torvol::flip_distance_bfs(torvol::act(p, t0), t0, 18);
      if (!bfs || *bfs != r.distance) {
        std::cerr << "i=" << r.i << ": fast distance " << r.distance << " disagrees with BFS\n";
        code = kCheckFailed;
      }
    }
  }
  std::string text = csv_header({{"matrix", m.str()}, {"i_max", args.power}});
  text += "# spine distance proxy = 2 * distance\n";
  text += "i,distance,ratio_num,ratio_den\n";
  for (const auto& r : rows) {
    const torvol::Rational ratio = torvol::make_rational(r.distance, r.i);
    text += std::to_string(r.i) + "," + std::to_string(r.distance) + "," +
            ratio.get_num().get_str() + "," + ratio.get_den().get_str() + "\n";
  }
  emit(args.out, text);
  return code;
}

int cmd_delta(const TableArgs& args) {
  const torvol::Sl2Matrix m = parse_matrix(args.matrix);
  std::vector<torvol::DeltaRow> rows;
  try {
    rows = torvol::delta_upper_bound_table(m, args.power);
  } catch (const torvol::Sl2Error& e) {
    throw ExitError(kBadInput, e.what());
  }
  std::string text = csv_header({{"matrix", m.str()}, {"i_max", args.power}});
  text += "i,tetra_count\n";
  for (const auto& r : rows) text += std::to_string(r.i) + "," + std::to_string(r.tetrahedra) + "\n";
  emit(args.out, text);
  return kOk;
}

int cmd_layered(const TableArgs& args) {
  const torvol::Sl2Matrix m = parse_matrix(args.matrix);
  if (args.power < 1) throw ExitError(kUsage, "--power must be >= 1");
  if (torvol::is_periodic(torvol::classify(m)))
    throw ExitError(kBadInput, "periodic monodromy " + m.str() + " is not supported");
  torvol::LayeredBuild build;
  try {
    build = torvol::layer_cover(torvol::flip_path(m), m, args.power);
  } catch (const torvol::LayeredError& e) {
    throw ExitError(kCheckFailed, e.what());
  }
  nlohmann::json j = build.triangulation.to_json();
  j["provenance"] = provenance({{"matrix", m.str()}, {"power", args.power}});
  emit_json(args.out, j);
  if (!args.check) return kOk;

  const auto& rep = build.report;
  const torvol::AbelianGroup h1 = torvol::homology_h1(build.triangulation);
  const torvol::AbelianGroup oracle = torvol::bundle_h1_oracle(m.power(args.power));
  std::cerr << "tetrahedra=" << rep.tetrahedra << " vertices=" << rep.vertices
            << " edges=" << rep.edges << " faces=" << rep.faces << " euler=" << rep.euler
            << " vertex_links=" << rep.link_euler.size() << "\n"
            << "H1 = " << h1.str() << " (expected " << oracle.str() << ")\n";
  if (!rep.valid) {
    std::cerr << "invalid: " << rep.failure << "\n";
    return kCheckFailed;
  }
  return h1.str() == oracle.str() ? kOk : kCheckFailed;
}

struct SolvePairArgs {
  std::string cache = "data/filling_pair.json";
  std::string out;
  bool regenerate = false;
  unsigned long q = 2;
  unsigned long spread = 2;
};

int cmd_solve_pair(const SolvePairArgs& args) {
  if (args.out.empty() && !args.regenerate)
    throw ExitError(kUsage, "solve-pair writes the cache only with --regenerate (or use --out)");
  torvol::SolveOptions opt;
  opt.q = args.q;
  opt.spread = args.spread;
  torvol::FillingPair pair = [&] {
    try {
      return torvol::solve_alpha_beta(opt);
    } catch (const torvol::FillingPairError& e) {
      throw ExitError(kResourceCap, e.what());
    }
  }();
  nlohmann::json j = torvol::filling_pair_to_json(pair);
  j["provenance"]["tool"] = "torvol";
  j["provenance"]["version"] = kToolVersion;
  const std::string target = args.out.empty() ? args.cache : args.out;
  torvol::write_text_file_atomic(target, j.dump(1) + "\n");
  std::cerr << "|alpha|_1 = " << torvol::l1_norm(pair.alpha()).get_str()
            << ", |beta|_1 = " << torvol::l1_norm(pair.beta()).get_str() << " in model (q="
            << pair.provenance().q << ", D=" << pair.provenance().spread << "); wrote " << target
            << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 0; i < argc; ++i) g_command_line += (i ? " " : "") + std::string(i ? argv[i] : "torvol");

  CLI::App app{"Exact filling norms, mapping class dynamics and layered triangulations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  VerifyArgs verify;
  auto* sc_verify = app.add_subcommand("verify-steps", "Re-verify every identity behind W_k");
  sc_verify->add_option("--k", verify.k, "Largest k to check")->check(CLI::Range(1u, 12u));
  sc_verify->add_option("--cache", verify.cache, "Filling-pair cache (read only)");
  sc_verify->add_option("--tamper", verify.tamper, "Flip one coefficient of a stored chain")
      ->check(CLI::IsMember(torvol::tamper_targets()));
  sc_verify->add_flag("--no-pair", verify.no_pair, "Skip the checks that need alpha and beta");

  FillArgs fill;
  auto* sc_fill = app.add_subcommand("fill", "Minimal filling of a cycle in a finite model");
  sc_fill->add_option("chain", fill.chain, "Chain JSON file")->required();
  sc_fill->add_option("--model", fill.model, "m,d,q,D")->required();
  sc_fill->add_option("--mode", fill.mode, "int, real or oracle")
      ->check(CLI::IsMember({"int", "real", "oracle"}));
  sc_fill->add_option("--out", fill.out, "Certificate JSON path (default stdout)");
  sc_fill->add_option("--node-cap", fill.node_cap, "Branch-and-bound node cap");
  sc_fill->add_option("--max-universe", fill.max_universe, "Largest model accepted");
  sc_fill->add_option("--budget", fill.budget, "Norm budget for --mode oracle");

  ChainArgs chain;
  auto* sc_chain = app.add_subcommand("chain", "Emit one of the constructed chains as JSON");
  sc_chain->add_option("name", chain.name, "c, a, b, tau, bk, s, alpha, beta, omega or W")
      ->required();
  sc_chain->add_option("--k", chain.k, "k for tau, bk, s, omega, W")->check(CLI::Range(1u, 30u));
  sc_chain->add_option("--index", chain.index, "i for s_k^i");
  sc_chain->add_option("--cache", chain.cache, "Filling-pair cache (read only)");
  sc_chain->add_option("--out", chain.out, "Output path (default stdout)");

  BoundsArgs fv, isv;
  auto* sc_fv = app.add_subcommand("fv-bounds", "Upper bounds |W_k|_1 / 4^k on fv_Z");
  auto* sc_isv = app.add_subcommand("isv-bounds", "Bounds on the integral simplicial volume");
  for (auto [sc, a] : {std::pair{sc_fv, &fv}, std::pair{sc_isv, &isv}}) {
    sc->add_option("--k", a->k, "Largest k")->check(CLI::Range(1u, 12u));
    sc->add_option("--cache", a->cache, "Filling-pair cache (read only)");
    sc->add_option("--out", a->out, "CSV path (default stdout)");
  }

  std::string classify_matrix;
  auto* sc_classify = app.add_subcommand("classify", "Classify an element of SL(2,Z)");
  sc_classify->add_option("--matrix", classify_matrix, "a,b,c,d")->required();

  TableArgs growth, delta, layered;
  auto* sc_growth = app.add_subcommand("growth", "Flip distance d(A^i t0, t0) for i <= power");
  auto* sc_delta = app.add_subcommand("delta", "Tetrahedron counts of layered A^i bundles");
  auto* sc_layered = app.add_subcommand("layered", "Layered triangulation of the A^i bundle");
  for (auto [sc, a] : {std::pair{sc_growth, &growth}, std::pair{sc_delta, &delta},
                       std::pair{sc_layered, &layered}}) {
    sc->add_option("--matrix", a->matrix, "a,b,c,d")->required();
    sc->add_option("--power", a->power, sc == sc_layered ? "Exponent i" : "Largest i");
    sc->add_option("--out", a->out, "Output path (default stdout)");
  }
  sc_growth->add_flag("--check", growth.check, "Cross-check against BFS up to distance 18");
  sc_layered->add_flag("--check", layered.check, "Validate and compare H1 with the oracle");
  layered.power = 1;
  delta.power = 6;

  SolvePairArgs solve;
  auto* sc_solve = app.add_subcommand("solve-pair", "Solve for alpha and beta");
  sc_solve->add_option("--cache", solve.cache, "Cache path to regenerate");
  sc_solve->add_flag("--regenerate", solve.regenerate, "Overwrite the cache");
  sc_solve->add_option("--out", solve.out, "Write here instead of the cache");
  sc_solve->add_option("--q", solve.q, "Starting grid denominator");
  sc_solve->add_option("--spread", solve.spread, "Starting spread D");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*sc_verify) return cmd_verify_steps(verify);
    if (*sc_fill) return cmd_fill(fill);
    if (*sc_chain) return cmd_chain(chain);
    if (*sc_fv) return cmd_fv_bounds(fv);
    if (*sc_isv) return cmd_isv_bounds(isv);
    if (*sc_classify) return cmd_classify(classify_matrix);
    if (*sc_growth) return cmd_growth(growth);
    if (*sc_delta) return cmd_delta(delta);
    if (*sc_layered) return cmd_layered(layered);
    if (*sc_solve) return cmd_solve_pair(solve);
  } catch (const ExitError& e) {
    std::cerr << "torvol: " << e.what() << "\n";
    return e.code;
  } catch (const torvol::OverflowError& e) {
    std::cerr << "torvol: " << e.what() << "\n";
    return kResourceCap;
  } catch (const std::invalid_argument& e) {
    std::cerr << "torvol: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::out_of_range& e) {
    std::cerr << "torvol: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "torvol: internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
