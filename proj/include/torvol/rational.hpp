#ifndef TORVOL_RATIONAL_HPP_
#define TORVOL_RATIONAL_HPP_

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace torvol {

using Integer = mpz_class;
using Rational = mpq_class;

// Builds a reduced rational from numerator/denominator.
inline Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Integer floor_of(const Rational& r) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

inline Integer ceil_of(const Rational& r) {
  Integer q;
  mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

inline bool is_integer(const Rational& r) { return r.get_den() == 1; }

inline Integer pow2(unsigned e) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, e);
  return r;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

// JSON numbers fall back to decimal strings once they leave the int64 range.
inline nlohmann::json integer_to_json(const Integer& z) {
  if (z.fits_slong_p()) return static_cast<std::int64_t>(z.get_si());
  return z.get_str();
}

inline Integer integer_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return Integer(std::to_string(j.get<std::int64_t>()));
  if (j.is_string()) return Integer(j.get<std::string>());
  throw std::invalid_argument("expected an integer, got " + j.dump());
}

inline nlohmann::json rational_to_json(const Rational& r) {
  return nlohmann::json::array(
      {integer_to_json(r.get_num()), integer_to_json(r.get_den())});
}

inline Rational rational_from_json(const nlohmann::json& j) {
  if (j.is_array() && j.size() == 2)
    return make_rational(integer_from_json(j[0]), integer_from_json(j[1]));
  if (j.is_number_integer() || j.is_string()) return Rational(integer_from_json(j));
  throw std::invalid_argument("expected [num, den], got " + j.dump());
}

}  // namespace torvol

#endif  // TORVOL_RATIONAL_HPP_
