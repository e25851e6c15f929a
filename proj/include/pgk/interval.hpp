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

#ifndef PGK_INTERVAL_HPP
#define PGK_INTERVAL_HPP

#include <mpfr.h>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pgk/errors.hpp"
#include "pgk/rational.hpp"

namespace pgk {

/// Outcome of comparing two enclosures. Strictness is only ever asserted
/// across separated enclosures; overlapping enclosures are indeterminate.
enum class verdict {
  strictly_less,     // lhs.hi < rhs.lo
  greater_or_equal,  // lhs.lo >= rhs.hi
  indeterminate,
};

inline const char* to_cstring(verdict v) {
  switch (v) {
    case verdict::strictly_less: return "STRICTLY_LESS";
    case verdict::greater_or_equal: return "GREATER_OR_EQUAL";
    case verdict::indeterminate: return "INDETERMINATE";
  }
  return "?";
}

/// Ascending ladder of working precisions, in bits, with a hard cap.
/// Comparisons walk the ladder until a verdict separates or the cap is
/// exhausted.
struct precision_policy {
  std::vector<mpfr_prec_t> ladder{53, 128, 256, 1024};
  mpfr_prec_t cap = 1024;

  void validate() const {
    if (ladder.empty()) throw usage_error("precision ladder must be nonempty");
    mpfr_prec_t prev = 0;
    for (mpfr_prec_t p : ladder) {
      if (p < MPFR_PREC_MIN) throw usage_error("precision rung too small");
      if (p <= prev) throw usage_error("precision ladder must be strictly ascending");
      prev = p;
    }
    if (cap < ladder.front()) throw usage_error("precision cap below first rung");
  }

  std::vector<mpfr_prec_t> rungs() const {
    std::vector<mpfr_prec_t> r;
    for (mpfr_prec_t p : ladder)
      if (p <= cap) r.push_back(p);
    if (r.empty()) r.push_back(ladder.front());
    return r;
  }

  std::string describe() const {
    std::string s = "ladder=";
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(static_cast<long>(ladder[i]));
    }
    s += " cap=" + std::to_string(static_cast<long>(cap));
    return s;
  }
};

/// Directed-rounded enclosure [lo, hi] of a real value. Both bounds are
/// finite MPFR numbers at a fixed working precision; every operation
/// rounds lo toward -inf and hi toward +inf, so the true real result of
/// the corresponding exact operation always stays inside.
class interval {
 public:
  explicit interval(mpfr_prec_t prec) {
    mpfr_init2(lo_, prec);
    mpfr_init2(hi_, prec);
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
  }

  interval(const interval& o) {
    mpfr_init2(lo_, mpfr_get_prec(o.lo_));
    mpfr_init2(hi_, mpfr_get_prec(o.hi_));
    mpfr_set(lo_, o.lo_, MPFR_RNDN);  // same precision: exact
    mpfr_set(hi_, o.hi_, MPFR_RNDN);
  }

  interval(interval&& o) noexcept {
    mpfr_init2(lo_, MPFR_PREC_MIN);
    mpfr_init2(hi_, MPFR_PREC_MIN);
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
  }

  interval& operator=(const interval& o) {
    if (this != &o) {
      mpfr_set_prec(lo_, mpfr_get_prec(o.lo_));
      mpfr_set_prec(hi_, mpfr_get_prec(o.hi_));
      mpfr_set(lo_, o.lo_, MPFR_RNDN);
      mpfr_set(hi_, o.hi_, MPFR_RNDN);
    }
    return *this;
  }

  interval& operator=(interval&& o) noexcept {
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
    return *this;
  }

  ~interval() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
  }

  static interval from_unsigned(std::uint64_t v, mpfr_prec_t prec) {
    static_assert(sizeof(unsigned long) >= sizeof(std::uint64_t));
    interval r(prec);
    mpfr_set_ui(r.lo_, static_cast<unsigned long>(v), MPFR_RNDD);
    mpfr_set_ui(r.hi_, static_cast<unsigned long>(v), MPFR_RNDU);
    return r;
  }

  static interval from_signed(std::int64_t v, mpfr_prec_t prec) {
    static_assert(sizeof(long) >= sizeof(std::int64_t));
    interval r(prec);
    mpfr_set_si(r.lo_, static_cast<long>(v), MPFR_RNDD);
    mpfr_set_si(r.hi_, static_cast<long>(v), MPFR_RNDU);
    return r;
  }

  static interval from_rational(const rational& q, mpfr_prec_t prec) {
    interval r(prec);
    mpfr_set_q(r.lo_, q.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_, q.get_mpq_t(), MPFR_RNDU);
    return r;
  }

  /// Enclosure spanning [lo, hi] for exactly-known rational endpoints.
  static interval hull(const rational& lo, const rational& hi,
                       mpfr_prec_t prec) {
    if (lo > hi) throw usage_error("hull requires lo <= hi");
    interval r(prec);
    mpfr_set_q(r.lo_, lo.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_, hi.get_mpq_t(), MPFR_RNDU);
    return r;
  }

  static interval zero(mpfr_prec_t prec) { return interval(prec); }

  mpfr_srcptr lo() const { return lo_; }
  mpfr_srcptr hi() const { return hi_; }
  mpfr_prec_t prec() const { return mpfr_get_prec(lo_); }

  bool is_point() const { return mpfr_equal_p(lo_, hi_); }
  bool certainly_positive() const { return mpfr_sgn(lo_) > 0; }
  bool certainly_nonpositive() const { return mpfr_sgn(hi_) <= 0; }
  bool contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }

  /// hi - lo, rounded up, as a double (diagnostics only).
  double width() const {
    mpfr_t w;
    mpfr_init2(w, mpfr_get_prec(lo_));
    mpfr_sub(w, hi_, lo_, MPFR_RNDU);
    double d = mpfr_get_d(w, MPFR_RNDU);
    mpfr_clear(w);
    return d;
  }

  /// True when the exact rational lies inside [lo, hi].
  bool contains(const rational& q) const {
    return mpfr_cmp_q(lo_, q.get_mpq_t()) <= 0 &&
           mpfr_cmp_q(hi_, q.get_mpq_t()) >= 0;
  }

  friend interval add(const interval& a, const interval& b) {
    interval r(std::max(a.prec(), b.prec()));
    mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
  }

  friend interval sub(const interval& a, const interval& b) {
    interval r(std::max(a.prec(), b.prec()));
    mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
    mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
    return r;
  }

  friend interval neg(const interval& a) {
    interval r(a.prec());
    mpfr_neg(r.lo_, a.hi_, MPFR_RNDD);  // exact: same precision
    mpfr_neg(r.hi_, a.lo_, MPFR_RNDU);
    return r;
  }

  friend interval mul(const interval& a, const interval& b) {
    mpfr_prec_t prec = std::max(a.prec(), b.prec());
    interval r(prec);
    mpfr_t t;
    mpfr_init2(t, prec);
    mpfr_mul(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_mul(t, a.lo_, b.hi_, MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
    mpfr_mul(t, a.hi_, b.lo_, MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
    mpfr_mul(t, a.hi_, b.hi_, MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);

    mpfr_mul(r.hi_, a.lo_, b.lo_, MPFR_RNDU);
    mpfr_mul(t, a.lo_, b.hi_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    mpfr_mul(t, a.hi_, b.lo_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    mpfr_mul(t, a.hi_, b.hi_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    mpfr_clear(t);
    return r;
  }

  /// Divisor enclosures containing zero cannot be divided through:
  /// an exact-zero point divisor is a hard domain error, anything else
  /// straddling zero asks the caller to escalate precision.
  friend interval div(const interval& a, const interval& b) {
    if (b.contains_zero()) {
      if (mpfr_zero_p(b.lo_) && mpfr_zero_p(b.hi_))
        throw domain_error("division by zero");
      throw indeterminate_sign_error("division by an enclosure containing zero");
    }
    mpfr_prec_t prec = std::max(a.prec(), b.prec());
    interval r(prec);
    mpfr_t t;
    mpfr_init2(t, prec);
    mpfr_div(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_div(t, a.lo_, b.hi_, MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
    mpfr_div(t, a.hi_, b.lo_, MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
    mpfr_div(t, a.hi_, b.hi_, MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);

    mpfr_div(r.hi_, a.lo_, b.lo_, MPFR_RNDU);
    mpfr_div(t, a.lo_, b.hi_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    mpfr_div(t, a.hi_, b.lo_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    mpfr_div(t, a.hi_, b.hi_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    mpfr_clear(t);
    return r;
  }

  /// Nonpositive enclosures have no logarithm; straddling enclosures need
  /// more precision before the sign of the argument is known.
  friend interval log_i(const interval& a) {
    if (a.certainly_nonpositive())
      throw domain_error("log of a nonpositive enclosure");
    if (!a.certainly_positive())
      throw indeterminate_sign_error("log argument straddles zero");
    interval r(a.prec());
    mpfr_log(r.lo_, a.lo_, MPFR_RNDD);
    mpfr_log(r.hi_, a.hi_, MPFR_RNDU);
    return r;
  }

  friend interval exp_i(const interval& a) {
    interval r(a.prec());
    mpfr_exp(r.lo_, a.lo_, MPFR_RNDD);
    mpfr_exp(r.hi_, a.hi_, MPFR_RNDU);
    return r;
  }

  /// Same argument gate as log_i: positive sequences are the only thing
  /// square roots are taken of here.
  friend interval sqrt_i(const interval& a) {
    if (a.certainly_nonpositive())
      throw domain_error("sqrt of a nonpositive enclosure");
    if (!a.certainly_positive())
      throw indeterminate_sign_error("sqrt argument straddles zero");
    interval r(a.prec());
    mpfr_sqrt(r.lo_, a.lo_, MPFR_RNDD);
    mpfr_sqrt(r.hi_, a.hi_, MPFR_RNDU);
    return r;
  }

  friend interval pow_int(const interval& a, long k);
  friend interval pow_rat(const interval& a, const rational& x);
  friend verdict tri_compare(const interval& lhs, const interval& rhs);

 private:
  mpfr_t lo_, hi_;
};

inline interval pow_int(const interval& a, long k) {
  mpfr_prec_t prec = a.prec();
  if (k == 0) {
    interval r(prec);
    mpfr_set_ui(r.lo_, 1, MPFR_RNDD);
    mpfr_set_ui(r.hi_, 1, MPFR_RNDU);
    return r;
  }
  if (k < 0) {
    interval one(prec);
    mpfr_set_ui(one.lo_, 1, MPFR_RNDD);
    mpfr_set_ui(one.hi_, 1, MPFR_RNDU);
    return div(one, pow_int(a, -k));  // div enforces 0 not in a^|k|
  }
  interval r(prec);
  if (mpfr_sgn(a.lo_) >= 0) {
    mpfr_pow_si(r.lo_, a.lo_, k, MPFR_RNDD);
    mpfr_pow_si(r.hi_, a.hi_, k, MPFR_RNDU);
  } else if (mpfr_sgn(a.hi_) <= 0) {
    if (k % 2 == 0) {
      mpfr_pow_si(r.lo_, a.hi_, k, MPFR_RNDD);
      mpfr_pow_si(r.hi_, a.lo_, k, MPFR_RNDU);
    } else {
      mpfr_pow_si(r.lo_, a.lo_, k, MPFR_RNDD);
      mpfr_pow_si(r.hi_, a.hi_, k, MPFR_RNDU);
    }
  } else if (k % 2 == 0) {
    // straddles zero, even power: [0, max(|lo|, |hi|)^k]
    mpfr_t m;
    mpfr_init2(m, prec);
    mpfr_neg(m, a.lo_, MPFR_RNDU);
    mpfr_max(m, m, a.hi_, MPFR_RNDU);
    mpfr_set_zero(r.lo_, 1);
    mpfr_pow_si(r.hi_, m, k, MPFR_RNDU);
    mpfr_clear(m);
  } else {
    mpfr_pow_si(r.lo_, a.lo_, k, MPFR_RNDD);
    mpfr_pow_si(r.hi_, a.hi_, k, MPFR_RNDU);
  }
  return r;
}

/// a^x for an exact rational exponent. Integer exponents work for any
/// enclosure; fractional ones require a certainly-positive base. Dyadic
/// exponents with small numerators go through exact sqrt chains, the
/// general case through exp(x * log a).
inline interval pow_rat(const interval& a, const rational& x) {
  if (is_integer(x) && fits_long(x.get_num()))
    return pow_int(a, x.get_num().get_si());

  if (a.certainly_nonpositive())
    throw domain_error("fractional power of a nonpositive enclosure");
  if (!a.certainly_positive())
    throw indeterminate_sign_error("fractional power of an enclosure straddling zero");

  // x = num / 2^m with small num: integer power then m square roots.
  const mpz_class& den = x.get_den();
  unsigned long m = mpz_scan1(den.get_mpz_t(), 0);
  mpz_class den_odd = den >> m;
  if (den_odd == 1 && m <= 16 && fits_long(x.get_num()) &&
      std::abs(x.get_num().get_si()) <= 64) {
    interval r = pow_int(a, x.get_num().get_si());
    for (unsigned long i = 0; i < m; ++i) r = sqrt_i(r);
    return r;
  }

  return exp_i(mul(interval::from_rational(x, a.prec()), log_i(a)));
}

/// Enclosure of base^x for an integer base >= 2.
inline interval pow_interval(std::uint64_t base, const rational& expo,
                             mpfr_prec_t prec) {
  if (base < 2) throw usage_error("pow_interval requires base >= 2");
  return pow_rat(interval::from_unsigned(base, prec), expo);
}

inline verdict tri_compare(const interval& lhs, const interval& rhs) {
  if (mpfr_less_p(lhs.hi_, rhs.lo_)) return verdict::strictly_less;
  if (mpfr_greaterequal_p(lhs.lo_, rhs.hi_)) return verdict::greater_or_equal;
  return verdict::indeterminate;
}

/// Result of a ladder comparison: the rung that decided (or the cap when
/// nothing did) plus the enclosures at that rung, so reports can show
/// final widths.
struct escalation_result {
  verdict v = verdict::indeterminate;
  mpfr_prec_t prec_bits = 0;
  std::optional<interval> lhs;
  std::optional<interval> rhs;
};

/// Walk the precision ladder until the two enclosures separate. Thunks
/// may throw indeterminate_sign_error to request the next rung; other
/// evaluation errors are definitive and propagate.
template <typename LhsFn, typename RhsFn>
escalation_result compare_with_escalation(LhsFn&& lhs_fn, RhsFn&& rhs_fn,
                                          const precision_policy& policy) {
  escalation_result res;
  for (mpfr_prec_t prec : policy.rungs()) {
    res.prec_bits = prec;
    try {
      interval l = lhs_fn(prec);
      interval r = rhs_fn(prec);
      res.v = tri_compare(l, r);
      res.lhs = std::move(l);
      res.rhs = std::move(r);
    } catch (const indeterminate_sign_error&) {
      res.v = verdict::indeterminate;
      continue;
    }
    if (res.v != verdict::indeterminate) return res;
  }
  return res;
}

}  // namespace pgk

#endif  // PGK_INTERVAL_HPP
