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

#ifndef PGK_KUMMER_HPP
#define PGK_KUMMER_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pgk/errors.hpp"
#include "pgk/interval.hpp"
#include "pgk/parallel.hpp"
#include "pgk/primes.hpp"
#include "pgk/rational.hpp"
#include "pgk/seq_expr.hpp"

namespace pgk {

/// A convergence-test instance: weighted series sum(a_n * b_n) probed with
/// the auxiliary positive sequence q_n, from a starting index on. All
/// three sequences must evaluate positive wherever a scan touches them.
struct kummer_instance {
  seq_expr a, b, q;
  std::uint64_t start_index = 1;

  bool uses_prime_var() const {
    return a.uses_prime_var() || b.uses_prime_var() || q.uses_prime_var();
  }
};

/// margin(n) = q_n * (a_n / a_{n+1}) - q_{n+1} - b_{n+1}.
/// GREATER_OR_EQUAL against zero means the sufficiency condition holds at
/// n; STRICTLY_LESS is a divergence-side violation.
struct kummer_margin_row {
  std::uint64_t n = 0;
  interval margin;
  verdict v = verdict::indeterminate;
  mpfr_prec_t prec_bits = 0;  // 0: decided by exact rational arithmetic
  bool exact = false;

  kummer_margin_row() : margin(MPFR_PREC_MIN) {}
};

namespace detail {

template <typename F>
auto labeled_positive(const char* label, F&& f) {
  try {
    return f();
  } catch (const nonpositive_error& e) {
    throw nonpositive_error(std::string("sequence '") + label + "': " + e.what());
  }
}

inline std::optional<rational> exact_seq(const seq_expr& e, const char* label,
                                         const eval_context& ctx) {
  return labeled_positive(label, [&] { return evaluate_exact(e, ctx); });
}

inline interval interval_seq(const seq_expr& e, const char* label,
                             const eval_context& ctx, mpfr_prec_t prec) {
  return labeled_positive(label, [&] { return evaluate(e, ctx, prec); });
}

inline kummer_margin_row margin_at(const kummer_instance& inst,
                                   const eval_context& cn,
                                   const eval_context& cn1,
                                   const precision_policy& policy) {
  kummer_margin_row row;
  row.n = cn.n;

  auto an = exact_seq(inst.a, "a", cn);
  auto an1 = an ? exact_seq(inst.a, "a", cn1) : std::nullopt;
  auto qn = an1 ? exact_seq(inst.q, "q", cn) : std::nullopt;
  auto qn1 = qn ? exact_seq(inst.q, "q", cn1) : std::nullopt;
  auto bn1 = qn1 ? exact_seq(inst.b, "b", cn1) : std::nullopt;
  if (bn1) {
    rational m = *qn * (*an / *an1) - *qn1 - *bn1;
    row.margin = interval::from_rational(m, policy.rungs().front());
    row.v = m < 0 ? verdict::strictly_less : verdict::greater_or_equal;
    row.prec_bits = 0;
    row.exact = true;
    return row;
  }

  auto margin_fn = [&](mpfr_prec_t prec) {
    interval a_n = interval_seq(inst.a, "a", cn, prec);
    interval a_n1 = interval_seq(inst.a, "a", cn1, prec);
    interval q_n = interval_seq(inst.q, "q", cn, prec);
    interval q_n1 = interval_seq(inst.q, "q", cn1, prec);
    interval b_n1 = interval_seq(inst.b, "b", cn1, prec);
    return sub(sub(mul(q_n, div(a_n, a_n1)), q_n1), b_n1);
  };
  auto zero_fn = [](mpfr_prec_t prec) { return interval::zero(prec); };
  escalation_result res = compare_with_escalation(margin_fn, zero_fn, policy);
  if (res.lhs) row.margin = std::move(*res.lhs);
  row.v = res.v;
  row.prec_bits = res.prec_bits;
  row.exact = false;
  return row;
}

/// Shared driver: margin rows for n in [from, to], delivered in index
/// order regardless of thread count.
inline void scan_margins(prime_cache& cache, const kummer_instance& inst,
                         std::uint64_t from, std::uint64_t to,
                         const precision_policy& policy, unsigned threads,
                         const std::function<void(const kummer_margin_row&)>& emit) {
  if (to < from) return;
  if (from < inst.start_index)
    throw usage_error("scan starts below the instance's starting index");
  const bool wants_p = inst.uses_prime_var();
  if (wants_p) cache.ensure_count(to + 2);

  auto work = [&](std::uint64_t lo, std::uint64_t hi) {
    std::vector<kummer_margin_row> rows;
    rows.reserve(hi - lo + 1);
    if (wants_p) {
      pair_stream st = cache.pairs(lo, hi + 1);
      auto cur = st.next();
      for (std::uint64_t n = lo; n <= hi; ++n) {
        auto nxt = st.next();
        eval_context cn{cur->n, cur->p};
        eval_context cn1{nxt->n, nxt->p};
        rows.push_back(margin_at(inst, cn, cn1, policy));
        cur = nxt;
      }
    } else {
      for (std::uint64_t n = lo; n <= hi; ++n)
        rows.push_back(margin_at(inst, {n, 0}, {n + 1, 0}, policy));
    }
    return rows;
  };
  run_chunked(from, to, threads, 8192, work,
              [&](std::vector<kummer_margin_row>&& rows) {
                for (const auto& r : rows) emit(r);
              });
}

}  // namespace detail

/// Margin and verdict at a single index.
inline kummer_margin_row kummer_margin(prime_cache& cache,
                                       const kummer_instance& inst,
                                       std::uint64_t n,
                                       const precision_policy& policy) {
  if (n < inst.start_index)
    throw usage_error("index below the instance's starting index");
  eval_context cn{n, 0}, cn1{n + 1, 0};
  if (inst.uses_prime_var()) {
    cn.p = cache.nth_prime(n);
    cn1.p = cache.nth_prime(n + 1);
  }
  return detail::margin_at(inst, cn, cn1, policy);
}

struct sufficiency_report {
  std::uint64_t from = 0, to = 0;
  bool all_hold = true;
  std::optional<std::uint64_t> first_failure;
  std::string failure_reason;  // "violation" or "unresolved"
  std::uint64_t hold_count = 0;
  std::uint64_t violation_count = 0;
  std::uint64_t indeterminate_count = 0;
  std::vector<std::uint64_t> indeterminate_indices;
};

/// Does the sufficiency condition hold at every index of the range?
/// Indeterminate rows are never counted as holding; they are listed and
/// force all_hold to false with reason "unresolved".
inline sufficiency_report scan_sufficiency(
    prime_cache& cache, const kummer_instance& inst, std::uint64_t from,
    std::uint64_t to, const precision_policy& policy, unsigned threads = 1,
    const std::function<void(const kummer_margin_row&)>& row_sink = nullptr) {
  sufficiency_report rep;
  rep.from = from;
  rep.to = to;
  detail::scan_margins(cache, inst, from, to, policy, threads,
                       [&](const kummer_margin_row& r) {
                         if (row_sink) row_sink(r);
                         switch (r.v) {
                           case verdict::greater_or_equal:
                             ++rep.hold_count;
                             break;
                           case verdict::strictly_less:
                             ++rep.violation_count;
                             if (!rep.first_failure) {
                               rep.first_failure = r.n;
                               rep.failure_reason = "violation";
                             }
                             break;
                           case verdict::indeterminate:
                             ++rep.indeterminate_count;
                             rep.indeterminate_indices.push_back(r.n);
                             if (!rep.first_failure) {
                               rep.first_failure = r.n;
                               rep.failure_reason = "unresolved";
                             }
                             break;
                         }
                       });
  rep.all_hold = rep.violation_count == 0 && rep.indeterminate_count == 0;
  return rep;
}

struct violation_report {
  std::uint64_t from = 0, to = 0;
  std::vector<std::uint64_t> violations;
  decade_histogram per_decade;  // violations bucketed by index decade
  std::uint64_t indeterminate_count = 0;
  std::vector<std::uint64_t> indeterminate_indices;
};

/// Exactly the indices whose margin is decidedly negative, with a
/// per-decade histogram as finite evidence for "infinitely many".
inline violation_report scan_violations(
    prime_cache& cache, const kummer_instance& inst, std::uint64_t from,
    std::uint64_t to, const precision_policy& policy, unsigned threads = 1,
    const std::function<void(const kummer_margin_row&)>& row_sink = nullptr) {
  violation_report rep;
  rep.from = from;
  rep.to = to;
  detail::scan_margins(cache, inst, from, to, policy, threads,
                       [&](const kummer_margin_row& r) {
                         if (row_sink) row_sink(r);
                         if (r.v == verdict::strictly_less) {
                           rep.violations.push_back(r.n);
                           rep.per_decade.add(r.n);
                         } else if (r.v == verdict::indeterminate) {
                           ++rep.indeterminate_count;
                           rep.indeterminate_indices.push_back(r.n);
                         }
                       });
  return rep;
}

/// q_n reconstructed from a convergent sum: (S - sum_{i<=n} a_i b_i) / a_n.
/// Exact path; nullopt when a or b leaves rational arithmetic.
inline std::optional<rational> constructive_q_exact(prime_cache& cache,
                                                    const seq_expr& a,
                                                    const seq_expr& b,
                                                    const rational& S,
                                                    std::uint64_t n) {
  const bool wants_p = a.uses_prime_var() || b.uses_prime_var();
  rational partial = 0;
  rational a_n;
  for (std::uint64_t i = 1; i <= n; ++i) {
    eval_context ci{i, wants_p ? cache.nth_prime(i) : 0};
    auto ai = detail::exact_seq(a, "a", ci);
    auto bi = detail::exact_seq(b, "b", ci);
    if (!ai || !bi) return std::nullopt;
    partial += *ai * *bi;
    if (i == n) a_n = *ai;
  }
  rational numerator = S - partial;
  if (numerator <= 0)
    throw nonpositive_error(
        "constructive q_n has nonpositive numerator at n=" + std::to_string(n) +
        " (S too small or range too deep)");
  return numerator / a_n;
}

/// Enclosure variant of the same quantity.
inline interval constructive_q(prime_cache& cache, const seq_expr& a,
                               const seq_expr& b, const interval& S,
                               std::uint64_t n, mpfr_prec_t prec) {
  const bool wants_p = a.uses_prime_var() || b.uses_prime_var();
  interval partial = interval::zero(prec);
  interval a_n(prec);
  for (std::uint64_t i = 1; i <= n; ++i) {
    eval_context ci{i, wants_p ? cache.nth_prime(i) : 0};
    interval ai = detail::interval_seq(a, "a", ci, prec);
    interval bi = detail::interval_seq(b, "b", ci, prec);
    partial = add(partial, mul(ai, bi));
    if (i == n) a_n = ai;
  }
  interval numerator = sub(S, partial);
  if (numerator.certainly_nonpositive())
    throw nonpositive_error(
        "constructive q_n has nonpositive numerator at n=" + std::to_string(n) +
        " (S too small or range too deep)");
  if (!numerator.certainly_positive())
    throw indeterminate_sign_error(
        "constructive q_n numerator sign unresolved at n=" + std::to_string(n));
  return div(numerator, a_n);
}

inline interval constructive_q(prime_cache& cache, const seq_expr& a,
                               const seq_expr& b, const rational& S,
                               std::uint64_t n, mpfr_prec_t prec) {
  return constructive_q(cache, a, b, interval::from_rational(S, prec), n, prec);
}

struct constructive_row {
  std::uint64_t n = 0;
  interval q_value;
  std::optional<rational> q_exact;
  interval residual;  // q_n * (a_n/a_{n+1}) - q_{n+1} - b_{n+1}, identically 0
  std::optional<rational> residual_exact;
  mpfr_prec_t prec_bits = 0;

  constructive_row() : q_value(MPFR_PREC_MIN), residual(MPFR_PREC_MIN) {}
};

/// Reconstruct q over a whole range with incremental partial sums and
/// report the identity residual at each index. Exact arithmetic when the
/// sequences allow it, enclosures otherwise.
inline std::vector<constructive_row> constructive_scan(
    prime_cache& cache, const seq_expr& a, const seq_expr& b, const rational& S,
    std::uint64_t from, std::uint64_t to, const precision_policy& policy) {
  if (from == 0) throw usage_error("indices are 1-based");
  std::vector<constructive_row> rows;
  if (to < from) return rows;
  const bool wants_p = a.uses_prime_var() || b.uses_prime_var();
  if (wants_p) cache.ensure_count(to + 2);
  const mpfr_prec_t prec = policy.rungs().front();

  // probe exactness at the first index
  eval_context c1{from, wants_p ? cache.nth_prime(from) : 0};
  bool exact = detail::exact_seq(a, "a", c1).has_value() &&
               detail::exact_seq(b, "b", c1).has_value();

  if (exact) {
    rational partial = 0;
    // prefix up to from-1
    for (std::uint64_t i = 1; i < from; ++i) {
      eval_context ci{i, wants_p ? cache.nth_prime(i) : 0};
      auto ai = detail::exact_seq(a, "a", ci);
      auto bi = detail::exact_seq(b, "b", ci);
      if (!ai || !bi) { exact = false; break; }
      partial += *ai * *bi;
    }
    if (exact) {
      std::vector<rational> q_vals;
      std::vector<rational> a_seq;
      for (std::uint64_t n = from; n <= to + 1; ++n) {
        eval_context cn{n, wants_p ? cache.nth_prime(n) : 0};
        auto an = detail::exact_seq(a, "a", cn);
        auto bn = detail::exact_seq(b, "b", cn);
        if (!an || !bn) { exact = false; break; }
        partial += *an * *bn;
        rational numerator = S - partial;
        if (numerator <= 0)
          throw nonpositive_error(
              "constructive q_n has nonpositive numerator at n=" +
              std::to_string(n) + " (S too small or range too deep)");
        q_vals.push_back(numerator / *an);
        a_seq.push_back(*an);
      }
      if (exact) {
        for (std::uint64_t n = from; n <= to; ++n) {
          std::size_t i = n - from;
          eval_context cn1{n + 1, wants_p ? cache.nth_prime(n + 1) : 0};
          rational b_n1 = *detail::exact_seq(b, "b", cn1);
          rational residual = q_vals[i] * (a_seq[i] / a_seq[i + 1]) -
                              q_vals[i + 1] - b_n1;
          constructive_row row;
          row.n = n;
          row.q_exact = q_vals[i];
          row.residual_exact = residual;
          row.q_value = interval::from_rational(q_vals[i], prec);
          row.residual = interval::from_rational(residual, prec);
          row.prec_bits = 0;
          rows.push_back(std::move(row));
        }
        return rows;
      }
    }
  }

  // enclosure path, incremental at the first rung
  interval partial = interval::zero(prec);
  for (std::uint64_t i = 1; i < from; ++i) {
    eval_context ci{i, wants_p ? cache.nth_prime(i) : 0};
    partial = add(partial, mul(detail::interval_seq(a, "a", ci, prec),
                               detail::interval_seq(b, "b", ci, prec)));
  }
  std::vector<interval> q_vals, a_seq, b_seq;
  interval S_iv = interval::from_rational(S, prec);
  for (std::uint64_t n = from; n <= to + 1; ++n) {
    eval_context cn{n, wants_p ? cache.nth_prime(n) : 0};
    interval an = detail::interval_seq(a, "a", cn, prec);
    interval bn = detail::interval_seq(b, "b", cn, prec);
    partial = add(partial, mul(an, bn));
    interval numerator = sub(S_iv, partial);
    if (numerator.certainly_nonpositive())
      throw nonpositive_error(
          "constructive q_n has nonpositive numerator at n=" +
          std::to_string(n) + " (S too small or range too deep)");
    if (!numerator.certainly_positive()) {
      // one-off recomputation up the ladder for this index
      bool resolved = false;
      for (mpfr_prec_t higher : policy.rungs()) {
        if (higher <= prec) continue;
        try {
          q_vals.push_back(constructive_q(cache, a, b, S, n, higher));
          resolved = true;
          break;
        } catch (const indeterminate_sign_error&) {
        }
      }
      if (!resolved)
        throw indeterminate_sign_error(
            "constructive q_n numerator sign unresolved at n=" +
            std::to_string(n) + " after the precision cap");
    } else {
      q_vals.push_back(div(numerator, an));
    }
    a_seq.push_back(an);
    b_seq.push_back(bn);
  }
  for (std::uint64_t n = from; n <= to; ++n) {
    std::size_t i = n - from;
    constructive_row row;
    row.n = n;
    row.q_value = q_vals[i];
    row.residual = sub(sub(mul(q_vals[i], div(a_seq[i], a_seq[i + 1])),
                           q_vals[i + 1]),
                       b_seq[i + 1]);
    row.prec_bits = prec;
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Checks the telescoped consequence of the sufficiency condition:
///   a_N q_N >= sum_{i=1}^{k+1} a_{N+i} b_{N+i} + a_{N+k+1} q_{N+k+1}.
/// Exact verdict when the instance stays rational; nullopt otherwise.
inline std::optional<bool> telescoped_bound_holds_exact(
    prime_cache& cache, const kummer_instance& inst, std::uint64_t N,
    std::uint64_t k) {
  const bool wants_p = inst.uses_prime_var();
  auto ctx = [&](std::uint64_t i) {
    return eval_context{i, wants_p ? cache.nth_prime(i) : 0};
  };
  auto aN = detail::exact_seq(inst.a, "a", ctx(N));
  auto qN = detail::exact_seq(inst.q, "q", ctx(N));
  if (!aN || !qN) return std::nullopt;
  rational rhs = 0;
  for (std::uint64_t i = 1; i <= k + 1; ++i) {
    auto ai = detail::exact_seq(inst.a, "a", ctx(N + i));
    auto bi = detail::exact_seq(inst.b, "b", ctx(N + i));
    if (!ai || !bi) return std::nullopt;
    rhs += *ai * *bi;
  }
  auto a_last = detail::exact_seq(inst.a, "a", ctx(N + k + 1));
  auto q_last = detail::exact_seq(inst.q, "q", ctx(N + k + 1));
  if (!a_last || !q_last) return std::nullopt;
  rhs += *a_last * *q_last;
  return *aN * *qN >= rhs;
}

/// Enclosure variant: GREATER_OR_EQUAL means the bound holds.
inline verdict telescoped_bound_verdict(prime_cache& cache,
                                        const kummer_instance& inst,
                                        std::uint64_t N, std::uint64_t k,
                                        const precision_policy& policy) {
  if (auto exact = telescoped_bound_holds_exact(cache, inst, N, k))
    return *exact ? verdict::greater_or_equal : verdict::strictly_less;
  const bool wants_p = inst.uses_prime_var();
  auto ctx = [&](std::uint64_t i) {
    return eval_context{i, wants_p ? cache.nth_prime(i) : 0};
  };
  if (wants_p) cache.ensure_count(N + k + 2);
  auto lhs_fn = [&](mpfr_prec_t prec) {
    return mul(detail::interval_seq(inst.a, "a", ctx(N), prec),
               detail::interval_seq(inst.q, "q", ctx(N), prec));
  };
  auto rhs_fn = [&](mpfr_prec_t prec) {
    interval s = interval::zero(prec);
    for (std::uint64_t i = 1; i <= k + 1; ++i)
      s = add(s, mul(detail::interval_seq(inst.a, "a", ctx(N + i), prec),
                     detail::interval_seq(inst.b, "b", ctx(N + i), prec)));
    return add(s, mul(detail::interval_seq(inst.a, "a", ctx(N + k + 1), prec),
                      detail::interval_seq(inst.q, "q", ctx(N + k + 1), prec)));
  };
  return compare_with_escalation(lhs_fn, rhs_fn, policy).v;
}

}  // namespace pgk

#endif  // PGK_KUMMER_HPP
