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

#ifndef PGK_GAP_HPP
#define PGK_GAP_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pgk/errors.hpp"
#include "pgk/interval.hpp"
#include "pgk/kummer.hpp"
#include "pgk/parallel.hpp"
#include "pgk/primes.hpp"
#include "pgk/rational.hpp"
#include "pgk/seq_expr.hpp"

namespace pgk {

// The central strict inequality, decided per index n:
//   lhs = q_n * p_{n+1}^x - q_{n+1} * p_n^x
//   rhs = p_n^x * p_{n+1}^(x-1)
// n is a witness when lhs < rhs with separated enclosures (or by exact
// arithmetic when x is an integer and q stays rational).

struct theorem1_result {
  interval lhs, rhs;
  verdict v = verdict::indeterminate;
  mpfr_prec_t prec_bits = 0;  // 0: exact path
  bool exact = false;

  theorem1_result() : lhs(MPFR_PREC_MIN), rhs(MPFR_PREC_MIN) {}
};

namespace detail {

struct t1_exact_sides {
  rational lhs, rhs;
};

inline std::optional<t1_exact_sides> t1_exact_at(const rational& x,
                                                 const seq_expr& q,
                                                 std::uint64_t n,
                                                 std::uint64_t p,
                                                 std::uint64_t p1) {
  if (!is_integer(x) || !fits_long(x.get_num())) return std::nullopt;
  long xi = x.get_num().get_si();
  auto qn = exact_seq(q, "q", {n, p});
  if (!qn) return std::nullopt;
  auto qn1 = exact_seq(q, "q", {n + 1, p1});
  if (!qn1) return std::nullopt;
  rational rp(static_cast<unsigned long>(p));
  rational rp1(static_cast<unsigned long>(p1));
  rational px = pow_rational(rp, xi);
  rational p1x = pow_rational(rp1, xi);
  t1_exact_sides s;
  s.lhs = *qn * p1x - *qn1 * px;
  s.rhs = px * pow_rational(rp1, xi - 1);
  return s;
}

struct t1_interval_sides {
  interval lhs, rhs;
  interval p1x;  // reusable as the next index's p^x
  interval qn1;  // reusable as the next index's q_n

  explicit t1_interval_sides(mpfr_prec_t prec)
      : lhs(prec), rhs(prec), p1x(prec), qn1(prec) {}
};

inline t1_interval_sides t1_interval_at(const rational& x, const seq_expr& q,
                                        std::uint64_t n, std::uint64_t p,
                                        std::uint64_t p1, mpfr_prec_t prec,
                                        const interval* px_cached,
                                        const interval* qn_cached) {
  t1_interval_sides out(prec);
  interval px = px_cached && px_cached->prec() == prec
                    ? *px_cached
                    : pow_rat(interval::from_unsigned(p, prec), x);
  out.p1x = pow_rat(interval::from_unsigned(p1, prec), x);
  interval qn = qn_cached && qn_cached->prec() == prec
                    ? *qn_cached
                    : interval_seq(q, "q", {n, p}, prec);
  out.qn1 = interval_seq(q, "q", {n + 1, p1}, prec);
  out.lhs = sub(mul(qn, out.p1x), mul(out.qn1, px));
  // p_{n+1}^(x-1) as p_{n+1}^x / p_{n+1}
  out.rhs = mul(px, div(out.p1x, interval::from_unsigned(p1, prec)));
  return out;
}

}  // namespace detail

/// Which evaluation routes a scan may take. interval_only exists so the
/// enclosure route can be cross-checked against the exact one.
enum class scan_path { automatic, interval_only };

enum class theorem1_side { lhs, rhs };

/// Exact rational value of one side of the inequality. Serves as the
/// oracle for the enclosure route; inputs outside the exact domain
/// (fractional exponent, q leaving rational arithmetic) are an error.
inline rational theorem1_side_exact(prime_cache& cache, theorem1_side side,
                                    std::uint64_t n, const rational& x,
                                    const seq_expr& q) {
  if (n == 0) throw usage_error("prime indices are 1-based");
  std::uint64_t p = cache.nth_prime(n);
  std::uint64_t p1 = cache.nth_prime(n + 1);
  auto ex = detail::t1_exact_at(x, q, n, p, p1);
  if (!ex)
    throw usage_error(
        "exact evaluation requires an integer exponent and rational-valued q");
  return side == theorem1_side::lhs ? ex->lhs : ex->rhs;
}

/// Both sides of the inequality and the verdict at one index.
inline theorem1_result theorem1_sides(prime_cache& cache, std::uint64_t n,
                                      const rational& x, const seq_expr& q,
                                      const precision_policy& policy,
                                      scan_path path = scan_path::automatic) {
  if (n == 0) throw usage_error("prime indices are 1-based");
  std::uint64_t p = cache.nth_prime(n);
  std::uint64_t p1 = cache.nth_prime(n + 1);
  theorem1_result res;

  if (path == scan_path::automatic) {
    if (auto ex = detail::t1_exact_at(x, q, n, p, p1)) {
      mpfr_prec_t disp = policy.rungs().front();
      res.lhs = interval::from_rational(ex->lhs, disp);
      res.rhs = interval::from_rational(ex->rhs, disp);
      res.v = ex->lhs < ex->rhs ? verdict::strictly_less
                                : verdict::greater_or_equal;
      res.prec_bits = 0;
      res.exact = true;
      return res;
    }
  }

  for (mpfr_prec_t prec : policy.rungs()) {
    res.prec_bits = prec;
    try {
      auto sides = detail::t1_interval_at(x, q, n, p, p1, prec, nullptr, nullptr);
      res.v = tri_compare(sides.lhs, sides.rhs);
      res.lhs = std::move(sides.lhs);
      res.rhs = std::move(sides.rhs);
    } catch (const indeterminate_sign_error&) {
      res.v = verdict::indeterminate;
      continue;
    }
    if (res.v != verdict::indeterminate) return res;
  }
  return res;
}

struct witness_row {
  std::uint64_t n = 0, p = 0, p_next = 0;
  interval lhs, rhs;
  verdict v = verdict::indeterminate;
  mpfr_prec_t prec_bits = 0;
  bool exact = false;

  witness_row() : lhs(MPFR_PREC_MIN), rhs(MPFR_PREC_MIN) {}
};

struct witness_report {
  rational x;
  std::string q_text;
  std::uint64_t from = 0, to = 0;
  std::uint64_t adjusted_from = 0;  // first index actually scanned
  std::uint64_t scanned = 0;
  std::uint64_t witness_count = 0;
  std::uint64_t non_witness_count = 0;
  std::uint64_t indeterminate_count = 0;
  std::vector<std::uint64_t> first_witnesses;  // up to 10
  std::uint64_t last_witness = 0;              // 0: none found
  decade_histogram per_decade;                 // witnesses by index decade
  std::vector<std::uint64_t> indeterminate_indices;
};

/// Scan [from, to] for witnesses of the strict inequality. Leading
/// indices where q is certainly nonpositive are skipped and reported via
/// adjusted_from; a nonpositive q later in the range is an error. Row
/// order (and thus any emitted report) is independent of thread count.
inline witness_report scan_witnesses(
    prime_cache& cache, const rational& x, const seq_expr& q,
    std::uint64_t from, std::uint64_t to, const precision_policy& policy,
    unsigned threads = 1,
    const std::function<void(const witness_row&)>& row_sink = nullptr,
    scan_path path = scan_path::automatic) {
  if (from == 0) throw usage_error("prime indices are 1-based");
  witness_report rep;
  rep.x = x;
  rep.q_text = q.source();
  rep.from = from;
  rep.to = to;
  rep.adjusted_from = from;
  if (to < from) return rep;

  cache.ensure_count(to + 2);

  // skip leading indices with certainly-nonpositive q (e.g. n*log(n) at 1)
  const bool q_uses_p = q.uses_prime_var();
  std::uint64_t start = from;
  while (start <= to) {
    eval_context ctx{start, q_uses_p ? cache.nth_prime(start) : 0};
    bool nonpositive = false;
    for (mpfr_prec_t prec : policy.rungs()) {
      try {
        evaluate(q, ctx, prec);
        break;
      } catch (const nonpositive_error&) {
        nonpositive = true;
        break;
      } catch (const indeterminate_sign_error&) {
        continue;  // unresolved: do not skip, let the row report it
      }
    }
    if (!nonpositive) break;
    ++start;
  }
  rep.adjusted_from = start;
  if (start > to) return rep;

  auto work = [&](std::uint64_t lo, std::uint64_t hi) {
    std::vector<witness_row> rows;
    rows.reserve(hi - lo + 1);
    pair_stream st = cache.pairs(lo, hi);
    const mpfr_prec_t rung0 = policy.rungs().front();
    std::optional<detail::t1_interval_sides> prev;
    while (auto pr = st.next()) {
      witness_row row;
      row.n = pr->n;
      row.p = pr->p;
      row.p_next = pr->p_next;

      bool done = false;
      if (path == scan_path::automatic) {
        if (auto ex = detail::t1_exact_at(x, q, pr->n, pr->p, pr->p_next)) {
          row.lhs = interval::from_rational(ex->lhs, rung0);
          row.rhs = interval::from_rational(ex->rhs, rung0);
          row.v = ex->lhs < ex->rhs ? verdict::strictly_less
                                    : verdict::greater_or_equal;
          row.prec_bits = 0;
          row.exact = true;
          done = true;
        }
      }
      if (!done) {
        // first rung, reusing the previous index's p^x and q_n
        bool rung0_ok = false;
        try {
          auto sides = detail::t1_interval_at(
              x, q, pr->n, pr->p, pr->p_next, rung0,
              prev ? &prev->p1x : nullptr, prev ? &prev->qn1 : nullptr);
          row.v = tri_compare(sides.lhs, sides.rhs);
          row.lhs = sides.lhs;
          row.rhs = sides.rhs;
          row.prec_bits = rung0;
          prev = std::move(sides);
          rung0_ok = true;
        } catch (const indeterminate_sign_error&) {
          prev.reset();
        }
        if (!rung0_ok || row.v == verdict::indeterminate) {
          for (mpfr_prec_t prec : policy.rungs()) {
            if (prec == rung0 && rung0_ok) continue;
            row.prec_bits = prec;
            try {
              auto sides = detail::t1_interval_at(x, q, pr->n, pr->p,
                                                  pr->p_next, prec, nullptr,
                                                  nullptr);
              row.v = tri_compare(sides.lhs, sides.rhs);
              row.lhs = std::move(sides.lhs);
              row.rhs = std::move(sides.rhs);
            } catch (const indeterminate_sign_error&) {
              row.v = verdict::indeterminate;
              continue;
            }
            if (row.v != verdict::indeterminate) break;
          }
        }
      } else {
        prev.reset();
      }
      rows.push_back(std::move(row));
    }
    return rows;
  };

  run_chunked(start, to, threads, 16384, work,
              [&](std::vector<witness_row>&& rows) {
                for (const auto& r : rows) {
                  if (row_sink) row_sink(r);
                  ++rep.scanned;
                  switch (r.v) {
                    case verdict::strictly_less:
                      ++rep.witness_count;
                      if (rep.first_witnesses.size() < 10)
                        rep.first_witnesses.push_back(r.n);
                      rep.last_witness = r.n;
                      rep.per_decade.add(r.n);
                      break;
                    case verdict::greater_or_equal:
                      ++rep.non_witness_count;
                      break;
                    case verdict::indeterminate:
                      ++rep.indeterminate_count;
                      rep.indeterminate_indices.push_back(r.n);
                      break;
                  }
                }
              });
  return rep;
}

// ---- corollary bounds ----

enum class bound_variant { b1, b2 };

/// Verdict on the corollary's strict inequality at n. gap_value is the
/// left side (the plain gap for B1, the power gap for B2), bound the
/// right side; STRICTLY_LESS means the bound holds.
struct bound_result {
  interval gap_value, bound;
  verdict v = verdict::indeterminate;
  mpfr_prec_t prec_bits = 0;
  bool exact = false;
  std::optional<rational> gap_exact, bound_exact;

  bound_result() : gap_value(MPFR_PREC_MIN), bound(MPFR_PREC_MIN) {}
};

inline bound_result corollary_bound_check(prime_cache& cache,
                                          bound_variant variant,
                                          std::uint64_t n, const rational& x,
                                          const seq_expr& q,
                                          const precision_policy& policy) {
  if (n == 0) throw usage_error("prime indices are 1-based");
  const rational x_eff = variant == bound_variant::b1 ? rational(1) : x;
  std::uint64_t p = cache.nth_prime(n);
  std::uint64_t p1 = cache.nth_prime(n + 1);
  rational rp(static_cast<unsigned long>(p));
  rational rp1(static_cast<unsigned long>(p1));
  bound_result res;

  // exact route: integer exponent and rational q
  if (is_integer(x_eff) && fits_long(x_eff.get_num())) {
    auto qn = detail::exact_seq(q, "q", {n, p});
    auto qn1 = qn ? detail::exact_seq(q, "q", {n + 1, p1}) : std::nullopt;
    if (qn && qn1) {
      long xi = x_eff.get_num().get_si();
      rational px = pow_rational(rp, xi);
      rational p1x = pow_rational(rp1, xi);
      rational gap = p1x - px;
      rational bound = pow_rational(rp * rp1, xi) / (*qn * rp1) +
                       px * (*qn1 - *qn) / *qn;
      mpfr_prec_t disp = policy.rungs().front();
      res.gap_value = interval::from_rational(gap, disp);
      res.bound = interval::from_rational(bound, disp);
      res.v = gap < bound ? verdict::strictly_less : verdict::greater_or_equal;
      res.exact = true;
      res.gap_exact = gap;
      res.bound_exact = bound;
      return res;
    }
  }

  for (mpfr_prec_t prec : policy.rungs()) {
    res.prec_bits = prec;
    try {
      interval p_iv = interval::from_unsigned(p, prec);
      interval p1_iv = interval::from_unsigned(p1, prec);
      interval px = pow_rat(p_iv, x_eff);
      interval p1x = pow_rat(p1_iv, x_eff);
      interval qn = detail::interval_seq(q, "q", {n, p}, prec);
      interval qn1 = detail::interval_seq(q, "q", {n + 1, p1}, prec);
      interval gap = sub(p1x, px);
      // (p * p1)^x written as p^x * p1^x; the plain product can overflow
      interval bound = add(div(mul(px, p1x), mul(qn, p1_iv)),
                           mul(px, div(sub(qn1, qn), qn)));
      res.v = tri_compare(gap, bound);
      res.gap_value = std::move(gap);
      res.bound = std::move(bound);
    } catch (const indeterminate_sign_error&) {
      res.v = verdict::indeterminate;
      continue;
    }
    if (res.v != verdict::indeterminate) return res;
  }
  return res;
}

/// Every decided witness must satisfy the corollary bound; this is the
/// implication the bound is derived through. A false return on a decided
/// witness signals a defect in one of the two computations.
inline bool implication_check(prime_cache& cache, std::uint64_t n,
                              const rational& x, const seq_expr& q,
                              const precision_policy& policy) {
  theorem1_result t1 = theorem1_sides(cache, n, x, q, policy);
  if (t1.v != verdict::strictly_less)
    throw usage_error("implication_check requires a decided witness index");
  bound_result b = corollary_bound_check(cache, bound_variant::b2, n, x, q, policy);
  return b.v == verdict::strictly_less;
}

// ---- record (running minimum) tracking ----

/// Q1: (p_{n+1}-p_n)/p_n^x, x > 0.
/// Q2: (p_{n+1}-p_n)/log(p_n)^(1+x), x > 0.
/// Q3: p_{n+1}^x - p_n^x, 0 <= x < 1.
enum class record_quantity { gap_over_px, gap_over_logpx, power_gap };

inline const char* to_cstring(record_quantity q) {
  switch (q) {
    case record_quantity::gap_over_px: return "gap_over_px";
    case record_quantity::gap_over_logpx: return "gap_over_logpx";
    case record_quantity::power_gap: return "power_gap";
  }
  return "?";
}

struct record_event {
  std::uint64_t n = 0, p = 0, p_next = 0;
  interval value;
  std::optional<rational> exact_value;
  mpfr_prec_t prec_bits = 0;

  record_event() : value(MPFR_PREC_MIN) {}
};

struct unconfirmed_candidate {
  std::uint64_t n = 0, p = 0, p_next = 0;
  interval value;

  unconfirmed_candidate() : value(MPFR_PREC_MIN) {}
};

struct record_report {
  record_quantity quantity = record_quantity::power_gap;
  rational x;
  std::uint64_t from = 0, to = 0;
  std::vector<record_event> events;
  std::vector<unconfirmed_candidate> unconfirmed;
};

namespace detail {

inline void check_record_hypothesis(record_quantity quantity, const rational& x) {
  switch (quantity) {
    case record_quantity::gap_over_px:
      if (x <= 0)
        throw hypothesis_error("gap_over_px requires x > 0 (got " +
                               pgk::to_string(x) + ")");
      return;
    case record_quantity::gap_over_logpx:
      if (x <= 0)
        throw hypothesis_error("gap_over_logpx requires x > 0 (got " +
                               pgk::to_string(x) + ")");
      return;
    case record_quantity::power_gap:
      if (x < 0 || x >= 1)
        throw hypothesis_error("power_gap requires 0 <= x < 1 (got " +
                               pgk::to_string(x) + ")");
      return;
  }
}

inline interval record_value_interval(record_quantity quantity,
                                      const rational& x, std::uint64_t p,
                                      std::uint64_t p1, mpfr_prec_t prec,
                                      const interval* px_cached) {
  interval p_iv = interval::from_unsigned(p, prec);
  switch (quantity) {
    case record_quantity::gap_over_px:
      return div(interval::from_unsigned(p1 - p, prec), pow_rat(p_iv, x));
    case record_quantity::gap_over_logpx:
      return div(interval::from_unsigned(p1 - p, prec),
                 pow_rat(log_i(p_iv), x + 1));
    case record_quantity::power_gap: {
      interval px = px_cached && px_cached->prec() == prec
                        ? *px_cached
                        : pow_rat(p_iv, x);
      return sub(pow_rat(interval::from_unsigned(p1, prec), x), px);
    }
  }
  throw error("unknown record quantity");
}

inline std::optional<rational> record_value_exact(record_quantity quantity,
                                                  const rational& x,
                                                  std::uint64_t p,
                                                  std::uint64_t p1) {
  if (!is_integer(x) || !fits_long(x.get_num())) return std::nullopt;
  long xi = x.get_num().get_si();
  rational rp(static_cast<unsigned long>(p));
  switch (quantity) {
    case record_quantity::gap_over_px:
      return rational(static_cast<unsigned long>(p1 - p)) /
             pow_rational(rp, xi);
    case record_quantity::gap_over_logpx:
      return std::nullopt;  // logarithm: no exact route
    case record_quantity::power_gap:
      return pow_rational(rational(static_cast<unsigned long>(p1)), xi) -
             pow_rational(rp, xi);
  }
  return std::nullopt;
}

}  // namespace detail

/// Track running minima of the chosen quantity over [from, to]. A record
/// is claimed only when the candidate's enclosure falls strictly below
/// the current record's (or by exact comparison on the exact route);
/// near-ties escalate precision and unresolved ones are reported as
/// unconfirmed without moving the record. Ordered traversal, sequential.
inline record_report record_scan(prime_cache& cache, record_quantity quantity,
                                 const rational& x, std::uint64_t from,
                                 std::uint64_t to,
                                 const precision_policy& policy) {
  if (from == 0) throw usage_error("prime indices are 1-based");
  detail::check_record_hypothesis(quantity, x);
  record_report rep;
  rep.quantity = quantity;
  rep.x = x;
  rep.from = from;
  rep.to = to;
  if (to < from) return rep;
  cache.ensure_count(to + 2);

  const mpfr_prec_t rung0 = policy.rungs().front();

  struct record_state {
    std::uint64_t n = 0, p = 0, p1 = 0;
    std::optional<rational> exact;
  };
  std::optional<record_state> rec;

  auto rec_value_fn = [&](mpfr_prec_t prec) {
    if (rec->exact) return interval::from_rational(*rec->exact, prec);
    return detail::record_value_interval(quantity, x, rec->p, rec->p1, prec,
                                         nullptr);
  };

  pair_stream st = cache.pairs(from, to);
  std::optional<interval> next_px;  // power_gap: p_{n+1}^x reused
  while (auto pr = st.next()) {
    std::optional<rational> cand_exact =
        detail::record_value_exact(quantity, x, pr->p, pr->p_next);
    interval cand0 = detail::record_value_interval(
        quantity, x, pr->p, pr->p_next, rung0,
        next_px ? &*next_px : nullptr);
    if (quantity == record_quantity::power_gap)
      next_px = pow_rat(interval::from_unsigned(pr->p_next, rung0), x);

    auto claim = [&](interval value, mpfr_prec_t prec_bits) {
      record_event ev;
      ev.n = pr->n;
      ev.p = pr->p;
      ev.p_next = pr->p_next;
      ev.value = std::move(value);
      ev.exact_value = cand_exact;
      ev.prec_bits = prec_bits;
      rep.events.push_back(std::move(ev));
      rec = record_state{pr->n, pr->p, pr->p_next, cand_exact};
    };

    if (!rec) {
      claim(std::move(cand0), cand_exact ? 0 : rung0);
      continue;
    }

    if (cand_exact && rec->exact) {
      if (*cand_exact < *rec->exact) {
        // refine both displays until the strictly smaller value separates
        mpfr_prec_t disp = rung0;
        interval cand_disp = interval::from_rational(*cand_exact, disp);
        while (tri_compare(cand_disp, rep.events.back().value) !=
               verdict::strictly_less) {
          disp *= 2;
          cand_disp = interval::from_rational(*cand_exact, disp);
          rep.events.back().value =
              interval::from_rational(*rec->exact, disp);
        }
        claim(std::move(cand_disp), 0);
      }
      continue;
    }

    // enclosure route: compare against the stored record enclosure first
    verdict v0 = tri_compare(cand0, rep.events.back().value);
    if (v0 == verdict::greater_or_equal) continue;
    if (v0 == verdict::strictly_less) {
      claim(std::move(cand0), rung0);
      continue;
    }

    auto cand_fn = [&](mpfr_prec_t prec) {
      if (cand_exact) return interval::from_rational(*cand_exact, prec);
      return detail::record_value_interval(quantity, x, pr->p, pr->p_next,
                                           prec, nullptr);
    };
    escalation_result res = compare_with_escalation(cand_fn, rec_value_fn, policy);
    if (res.v == verdict::strictly_less) {
      // Shrinking the stored event keeps every earlier separation intact;
      // a recomputation at a lower rung than the stored one may be wider
      // and must not replace it (separation holds either way, since a
      // wider recomputation has the smaller lower bound).
      interval& stored = rep.events.back().value;
      if (mpfr_cmp(res.rhs->lo(), stored.lo()) >= 0 &&
          mpfr_cmp(res.rhs->hi(), stored.hi()) <= 0)
        stored = std::move(*res.rhs);
      claim(std::move(*res.lhs), res.prec_bits);
    } else if (res.v == verdict::indeterminate) {
      unconfirmed_candidate uc;
      uc.n = pr->n;
      uc.p = pr->p;
      uc.p_next = pr->p_next;
      uc.value = res.lhs ? std::move(*res.lhs) : std::move(cand0);
      rep.unconfirmed.push_back(std::move(uc));
    }
  }
  return rep;
}

}  // namespace pgk

#endif  // PGK_GAP_HPP
