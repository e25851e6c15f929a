// Copyright 2026 The pgk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PGK_RATIONAL_HPP
#define PGK_RATIONAL_HPP

#include <gmpxx.h>

#include <cctype>
#include <string>
#include <string_view>

#include "pgk/errors.hpp"

namespace pgk {

using rational = mpq_class;

inline bool is_integer(const rational& r) {
  return mpz_cmp_ui(r.get_den().get_mpz_t(), 1) == 0;
}

inline bool fits_long(const mpz_class& z) { return z.fits_slong_p(); }

/// Parse "123", "0.25", "-1.5" or "a/b" into an exact rational.
/// Decimal text maps exactly onto a fraction over a power of ten, so no
/// representation error is introduced here.
inline rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw usage_error("empty number");

  auto slash = s.find('/');
  if (slash != std::string::npos) {
    std::string num = s.substr(0, slash);
    std::string den = s.substr(slash + 1);
    if (num.empty() || den.empty())
      throw usage_error("malformed fraction '" + s + "'");
    try {
      mpz_class num_z(num, 10);
      mpz_class den_z(den, 10);
      if (den_z == 0) throw usage_error("zero denominator in '" + s + "'");
      rational r(num_z, den_z);
      r.canonicalize();
      return r;
    } catch (const std::invalid_argument&) {
      throw usage_error("malformed fraction '" + s + "'");
    }
  }

  bool negative = false;
  std::size_t i = 0;
  if (s[0] == '+' || s[0] == '-') {
    negative = (s[0] == '-');
    i = 1;
  }
  std::string digits;
  long frac_digits = 0;
  bool seen_dot = false;
  bool seen_digit = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c == '.') {
      if (seen_dot) throw usage_error("malformed number '" + s + "'");
      seen_dot = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      seen_digit = true;
      if (seen_dot) ++frac_digits;
    } else {
      throw usage_error("malformed number '" + s + "'");
    }
  }
  if (!seen_digit) throw usage_error("malformed number '" + s + "'");

  mpz_class num(digits.empty() ? "0" : digits, 10);  // base 10 even with leading zeros
  mpz_class den = 1;
  for (long k = 0; k < frac_digits; ++k) den *= 10;
  rational r(num, den);
  r.canonicalize();
  if (negative) r = -r;
  return r;
}

/// base^k for integer k; k < 0 inverts (base must be nonzero then).
inline rational pow_rational(const rational& base, long k) {
  if (k == 0) return rational(1);
  bool invert = k < 0;
  unsigned long e = invert ? static_cast<unsigned long>(-(k + 1)) + 1
                           : static_cast<unsigned long>(k);
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num().get_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), base.get_den().get_mpz_t(), e);
  if (invert) {
    if (num == 0) throw domain_error("zero raised to a negative power");
    std::swap(num, den);
  }
  rational r(num, den);
  r.canonicalize();
  return r;
}

/// Compact text form: integer when exact, "num/den" otherwise.
inline std::string to_string(const rational& r) {
  if (is_integer(r)) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

}  // namespace pgk

#endif  // PGK_RATIONAL_HPP
