#ifndef TORVOL_CHAIN_IO_HPP_
#define TORVOL_CHAIN_IO_HPP_

// JSON chain files:
//   { "ambient_dim": m, "degree": d,
//     "terms": [ { "coeff": int, "vertices": [ [ [num,den], ... ], ... ] } ] }
// Vertices may be given in any lift; loading canonicalizes and combines terms.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "torvol/chain.hpp"

namespace torvol {

template <typename Coeff>
nlohmann::json coeff_to_json(const Coeff& k);
template <>
inline nlohmann::json coeff_to_json<Integer>(const Integer& k) {
  return integer_to_json(k);
}
template <>
inline nlohmann::json coeff_to_json<Rational>(const Rational& k) {
  return rational_to_json(k);
}

template <typename Coeff>
Coeff coeff_from_json(const nlohmann::json& j);
template <>
inline Integer coeff_from_json<Integer>(const nlohmann::json& j) {
  return integer_from_json(j);
}
template <>
inline Rational coeff_from_json<Rational>(const nlohmann::json& j) {
  return rational_from_json(j);
}

template <typename Coeff>
nlohmann::json chain_to_json(const BasicChain<Coeff>& c) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [s, k] : c.terms()) {
    nlohmann::json verts = nlohmann::json::array();
    for (const Point& p : s.vertices()) {
      nlohmann::json pt = nlohmann::json::array();
      for (const Rational& x : p) pt.push_back(rational_to_json(x));
      verts.push_back(pt);
    }
    terms.push_back({{"coeff", coeff_to_json(k)}, {"vertices", verts}});
  }
  return {{"ambient_dim", c.ambient_dim()}, {"degree", c.degree()}, {"terms", terms}};
}

template <typename Coeff = Integer>
BasicChain<Coeff> chain_from_json(const nlohmann::json& j) {
  const auto m = j.at("ambient_dim").get<std::size_t>();
  const auto d = j.at("degree").get<std::size_t>();
  BasicChain<Coeff> c(m, d);
  for (const auto& term : j.at("terms")) {
    std::vector<Point> verts;
    for (const auto& pt : term.at("vertices")) {
      Point p;
      for (const auto& x : pt) p.push_back(rational_from_json(x));
      if (p.size() != m)
        throw DimensionError("vertex has " + std::to_string(p.size()) +
                             " coordinates, expected " + std::to_string(m));
      verts.push_back(std::move(p));
    }
    if (verts.size() != d + 1)
      throw DimensionError("term has " + std::to_string(verts.size()) +
                           " vertices, expected " + std::to_string(d + 1));
    c.add_term(StraightSimplex::canonicalize(std::move(verts)),
               coeff_from_json<Coeff>(term.at("coeff")));
  }
  return c;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return nlohmann::json::parse(in);
}

// Writes through a sibling temp file and renames, so readers never see a
// partial file.
inline void write_text_file_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << text;
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

}  // namespace torvol

#endif  // TORVOL_CHAIN_IO_HPP_
