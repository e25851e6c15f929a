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

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "pgk/gap.hpp"
#include "support/oracles.hpp"

using namespace pgk;

namespace {

rational rat(const char* s) { return parse_rational(s); }

bool encloses_between(const interval& iv, const char* lo, const char* hi) {
  return mpfr_cmp_q(iv.lo(), rat(lo).get_mpq_t()) > 0 &&
         mpfr_cmp_q(iv.hi(), rat(hi).get_mpq_t()) < 0;
}

// enclosure sits inside [lo - tol, hi + tol]: pins the leading digits while
// allowing the outward rounding of the working precision
bool close_within(const interval& iv, const char* lo, const char* hi,
                  const char* tol = "0.000000000001") {
  rational rlo = rat(lo) - rat(tol);
  rational rhi = rat(hi) + rat(tol);
  return mpfr_cmp_q(iv.lo(), rlo.get_mpq_t()) >= 0 &&
         mpfr_cmp_q(iv.hi(), rhi.get_mpq_t()) <= 0;
}

}  // namespace

TEST_CASE("theorem1_sides on exact integer cases") {
  prime_cache cache;
  precision_policy policy;

  // n=1, x=1, q=1: lhs = 3-2 = 1, rhs = 2: witness
  auto r1 = theorem1_sides(cache, 1, rat("1"), seq_expr::parse("1"), policy);
  CHECK(r1.exact);
  CHECK(r1.v == verdict::strictly_less);
  CHECK(r1.lhs.contains(rational(1)));
  CHECK(r1.rhs.contains(rational(2)));

  // n=4, x=1, q=n: lhs = 4*11 - 5*7 = 9, rhs = 7: not a witness
  auto r4 = theorem1_sides(cache, 4, rat("1"), seq_expr::parse("n"), policy);
  CHECK(r4.v == verdict::greater_or_equal);
  CHECK(r4.lhs.contains(rational(9)));
  CHECK(r4.rhs.contains(rational(7)));

  // n=3, x=1, q=n: lhs = 3*7 - 4*5 = 1, rhs = 5: witness
  auto r3 = theorem1_sides(cache, 3, rat("1"), seq_expr::parse("n"), policy);
  CHECK(r3.v == verdict::strictly_less);
  CHECK(r3.lhs.contains(rational(1)));
  CHECK(r3.rhs.contains(rational(5)));
}

TEST_CASE("interval route reproduces the exact verdicts") {
  prime_cache cache;
  precision_policy policy;
  seq_expr q = seq_expr::parse("n");
  for (const char* x : {"0", "1", "2"}) {
    for (std::uint64_t n = 1; n <= 60; ++n) {
      auto exact = theorem1_sides(cache, n, rat(x), q, policy);
      auto ival = theorem1_sides(cache, n, rat(x), q, policy,
                                 scan_path::interval_only);
      CAPTURE(x, n);
      CHECK(exact.exact);
      CHECK_FALSE(ival.exact);
      CHECK(exact.v == ival.v);
    }
  }
}

TEST_CASE("exact side values and their error domain") {
  prime_cache cache;
  // lhs at n=4, x=1, q=n: 4*11 - 5*7 = 9; rhs: 7^1 * 11^0 = 7
  CHECK(theorem1_side_exact(cache, theorem1_side::lhs, 4, rat("1"),
                            seq_expr::parse("n")) == 9);
  CHECK(theorem1_side_exact(cache, theorem1_side::rhs, 4, rat("1"),
                            seq_expr::parse("n")) == 7);
  // lhs at n=1, x=1, q=1: 3 - 2 = 1
  CHECK(theorem1_side_exact(cache, theorem1_side::lhs, 1, rat("1"),
                            seq_expr::parse("1")) == 1);
  // x = 0: rhs = p_5^0 * p_5^... = 1/11 at n=4: p^0 * p1^-1
  CHECK(theorem1_side_exact(cache, theorem1_side::rhs, 4, rat("0"),
                            seq_expr::parse("n")) == rational(1, 11));
  // inapplicable inputs are an error, not a guess
  CHECK_THROWS_AS(theorem1_side_exact(cache, theorem1_side::lhs, 4, rat("0.5"),
                                      seq_expr::parse("n")),
                  usage_error);
  CHECK_THROWS_AS(theorem1_side_exact(cache, theorem1_side::lhs, 4, rat("1"),
                                      seq_expr::parse("log(n)")),
                  usage_error);
}

TEST_CASE("exact side values lie inside the interval sides") {
  prime_cache cache;
  precision_policy policy;
  std::mt19937_64 rng(31415);
  for (const char* x : {"0", "1", "2"}) {
    for (const char* q_text : {"1", "n", "p", "n*n+1"}) {
      seq_expr q = seq_expr::parse(q_text);
      for (int i = 0; i < 25; ++i) {
        std::uint64_t n = 1 + rng() % 10000;
        auto ival = theorem1_sides(cache, n, rat(x), q, policy,
                                   scan_path::interval_only);
        CAPTURE(x, q_text, n);
        CHECK(ival.lhs.contains(theorem1_side_exact(
            cache, theorem1_side::lhs, n, rat(x), q)));
        CHECK(ival.rhs.contains(theorem1_side_exact(
            cache, theorem1_side::rhs, n, rat(x), q)));
      }
    }
  }
}

TEST_CASE("Bertrand reduction: x=1 q=1 makes every index a witness") {
  prime_cache cache;
  precision_policy policy;
  auto rep = scan_witnesses(cache, rat("1"), seq_expr::parse("1"), 1, 1000,
                            policy);
  CHECK(rep.witness_count == 1000);
  CHECK(rep.scanned == 1000);
  CHECK(rep.indeterminate_count == 0);
  CHECK(rep.last_witness == 1000);
  CHECK(rep.first_witnesses ==
        std::vector<std::uint64_t>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
}

TEST_CASE("witness structure for x=1 q=n matches the exact-rational oracle") {
  prime_cache cache;
  precision_policy policy;

  // frozen from an independent enumeration; recomputed below
  const std::set<std::uint64_t> expected_non{4,  9,  11, 24, 30, 34, 42, 46, 47,
                                             53, 61, 62, 66, 68, 91, 97, 99};

  std::set<std::uint64_t> oracle_non;
  auto primes = pgk_oracle::first_primes_td(102);
  for (std::uint64_t n = 1; n <= 100; ++n) {
    // n * p_{n+1} >= (n+2) * p_n, in exact integers
    if (n * primes[n] >= (n + 2) * primes[n - 1]) oracle_non.insert(n);
  }
  CHECK(oracle_non == expected_non);

  std::set<std::uint64_t> scanned_non;
  scan_witnesses(cache, rat("1"), seq_expr::parse("n"), 1, 100, policy, 1,
                 [&](const witness_row& r) {
                   if (r.v == verdict::greater_or_equal) scanned_non.insert(r.n);
                   CHECK(r.v != verdict::indeterminate);
                 });
  CHECK(scanned_non == expected_non);
}

TEST_CASE("exact and interval scans produce identical witness sets") {
  prime_cache cache;
  precision_policy policy;
  seq_expr q = seq_expr::parse("n");
  auto witnesses = [&](scan_path path) {
    std::set<std::uint64_t> ws;
    scan_witnesses(cache, rat("1"), q, 1, 200, policy, 1,
                   [&](const witness_row& r) {
                     if (r.v == verdict::strictly_less) ws.insert(r.n);
                   },
                   path);
    return ws;
  };
  CHECK(witnesses(scan_path::automatic) == witnesses(scan_path::interval_only));
}

TEST_CASE("scan start adjusts past indices with nonpositive q") {
  prime_cache cache;
  precision_policy policy;
  auto rep = scan_witnesses(cache, rat("1"), seq_expr::parse("n*log(n)"), 1,
                            50, policy);
  CHECK(rep.adjusted_from == 2);   // q_1 = 0 is not positive
  CHECK(rep.scanned == 49);
  CHECK(rep.witness_count >= 1);
}

TEST_CASE("x=0.5 q=p: the inequality holds everywhere") {
  prime_cache cache;
  precision_policy policy;
  auto rep = scan_witnesses(cache, rat("0.5"), seq_expr::parse("p"), 1, 1000,
                            policy);
  // lhs = p_n p_{n+1}^x - p_{n+1} p_n^x < 0 < rhs for x < 1
  CHECK(rep.witness_count == 1000);
  CHECK(rep.indeterminate_count == 0);
  // every decade intersecting [1, 1000] is populated
  REQUIRE(rep.per_decade.counts.size() == 4);
  CHECK(rep.per_decade.counts[0] == 9);
  CHECK(rep.per_decade.counts[1] == 90);
  CHECK(rep.per_decade.counts[2] == 900);
  CHECK(rep.per_decade.counts[3] == 1);
}

TEST_CASE("witness rows are identical across thread counts") {
  prime_cache cache;
  precision_policy policy;
  auto run = [&](unsigned threads) {
    std::vector<std::pair<std::uint64_t, verdict>> rows;
    scan_witnesses(cache, rat("0.5"), seq_expr::parse("n*log(n)"), 1, 2000,
                   policy, threads, [&](const witness_row& r) {
                     rows.emplace_back(r.n, r.v);
                   });
    return rows;
  };
  auto r1 = run(1);
  auto r3 = run(3);
  CHECK(r1.size() == 1999);  // starts at 2
  CHECK(r1 == r3);
}

TEST_CASE("corollary bound checks on the quoted cases") {
  prime_cache cache;
  precision_policy policy;

  // B1, n=1, q=1: gap 1 < 2*(0+1)/1 = 2
  auto b1 = corollary_bound_check(cache, bound_variant::b1, 1, rat("1"),
                                  seq_expr::parse("1"), policy);
  CHECK(b1.exact);
  CHECK(b1.v == verdict::strictly_less);
  REQUIRE(b1.bound_exact);
  CHECK(*b1.bound_exact == 2);
  CHECK(*b1.gap_exact == 1);

  // B1, n=4, q=n: gap 4 >= 7*(1+1)/4 = 7/2: fails
  auto b14 = corollary_bound_check(cache, bound_variant::b1, 4, rat("1"),
                                   seq_expr::parse("n"), policy);
  CHECK(b14.v == verdict::greater_or_equal);
  REQUIRE(b14.bound_exact);
  CHECK(*b14.bound_exact == rational(7, 2));
  CHECK(*b14.gap_exact == 4);

  // B2 at x=1 reduces to B1: n=2, q=n: bound 3*(1+1)/2 = 3, gap 2 < 3
  auto b2 = corollary_bound_check(cache, bound_variant::b2, 2, rat("1"),
                                  seq_expr::parse("n"), policy);
  CHECK(b2.v == verdict::strictly_less);
  REQUIRE(b2.bound_exact);
  CHECK(*b2.gap_exact == 2);
  auto b12 = corollary_bound_check(cache, bound_variant::b1, 2, rat("1"),
                                   seq_expr::parse("n"), policy);
  CHECK(*b2.bound_exact == *b12.bound_exact);
}

TEST_CASE("B2 at x=1 equals B1 across indices and sequences") {
  prime_cache cache;
  precision_policy policy;
  for (const char* q_text : {"1", "n", "p"}) {
    seq_expr q = seq_expr::parse(q_text);
    for (std::uint64_t n = 1; n <= 40; ++n) {
      auto b1 = corollary_bound_check(cache, bound_variant::b1, n, rat("1"), q,
                                      policy);
      auto b2 = corollary_bound_check(cache, bound_variant::b2, n, rat("1"), q,
                                      policy);
      CAPTURE(q_text, n);
      REQUIRE(b1.bound_exact);
      REQUIRE(b2.bound_exact);
      CHECK(*b1.bound_exact == *b2.bound_exact);
      CHECK(b1.v == b2.v);
    }
  }
}

TEST_CASE("every decided witness satisfies the derived bound") {
  prime_cache cache;
  precision_policy policy;

  CHECK(implication_check(cache, 1, rat("1"), seq_expr::parse("1"), policy));
  CHECK(implication_check(cache, 3, rat("1"), seq_expr::parse("n"), policy));

  // sampled witnesses from an interval-route scan
  seq_expr q = seq_expr::parse("p");
  std::vector<std::uint64_t> some;
  scan_witnesses(cache, rat("0.5"), q, 1, 400, policy, 1,
                 [&](const witness_row& r) {
                   if (r.v == verdict::strictly_less && r.n % 37 == 0)
                     some.push_back(r.n);
                 });
  REQUIRE(some.size() >= 5);
  for (std::uint64_t n : some)
    CHECK(implication_check(cache, n, rat("0.5"), q, policy));

  // not a witness: precondition violated
  CHECK_THROWS_AS(implication_check(cache, 4, rat("1"), seq_expr::parse("n"),
                                    policy),
                  usage_error);
}

TEST_CASE("power gap records over the first hundred indices") {
  prime_cache cache;
  precision_policy policy;
  auto rep = record_scan(cache, record_quantity::power_gap, rat("0.5"), 1, 100,
                         policy);

  // record indices from an independent high-precision enumeration
  const std::vector<std::uint64_t> expected_n{1,  5,  7,  10, 13, 17, 20, 26,
                                              28, 33, 35, 41, 43, 45, 49, 52,
                                              57, 60, 64, 69, 81, 83, 89, 98};
  REQUIRE(rep.events.size() == expected_n.size());
  for (std::size_t i = 0; i < expected_n.size(); ++i)
    CHECK(rep.events[i].n == expected_n[i]);

  // sqrt(3) - sqrt(2) = 0.3178372451957822...
  CHECK(encloses_between(rep.events[0].value, "0.3178", "0.3179"));
  CHECK(close_within(rep.events[0].value, "0.31783724519578224",
                     "0.31783724519578225", "0.000000000000001"));
  // sqrt(13) - sqrt(11) = 0.2889264851085894...
  CHECK(rep.events[1].p == 11);
  CHECK(close_within(rep.events[1].value, "0.28892648510858944",
                     "0.28892648510858945", "0.000000000000001"));
  CHECK(rep.unconfirmed.empty());
}

TEST_CASE("record values decrease with separated enclosures") {
  prime_cache cache;
  precision_policy policy;
  for (auto [quantity, x] :
       {std::pair{record_quantity::power_gap, rat("0.5")},
        std::pair{record_quantity::gap_over_px, rat("1")},
        std::pair{record_quantity::gap_over_logpx, rat("1")},
        std::pair{record_quantity::gap_over_px, rat("0.5")}}) {
    auto rep = record_scan(cache, quantity, x, 1, 500, policy);
    CAPTURE(to_cstring(quantity));
    REQUIRE(rep.events.size() >= 3);
    for (std::size_t i = 1; i < rep.events.size(); ++i)
      CHECK(mpfr_less_p(rep.events[i].value.hi(),
                        rep.events[i - 1].value.lo()));
  }
}

TEST_CASE("gap ratio records are exact rationals") {
  prime_cache cache;
  precision_policy policy;
  auto rep = record_scan(cache, record_quantity::gap_over_px, rat("1"), 1, 100,
                         policy);
  const std::vector<std::pair<std::uint64_t, rational>> expected{
      {1, rational(1, 2)},  {3, rational(2, 5)},   {5, rational(2, 11)},
      {7, rational(2, 17)}, {10, rational(2, 29)}, {13, rational(2, 41)},
  };
  REQUIRE(rep.events.size() >= expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(rep.events[i].n == expected[i].first);
    REQUIRE(rep.events[i].exact_value);
    CHECK(*rep.events[i].exact_value == expected[i].second);
    CHECK(rep.events[i].prec_bits == 0);
  }
}

TEST_CASE("log-power gap records start from p=2") {
  prime_cache cache;
  precision_policy policy;
  auto rep = record_scan(cache, record_quantity::gap_over_logpx, rat("1"), 1,
                         30, policy);
  REQUIRE(!rep.events.empty());
  CHECK(rep.events[0].n == 1);
  CHECK(rep.events[0].p == 2);
  // 1 / log(2)^2 = 2.0813689810056077978...
  CHECK(close_within(rep.events[0].value, "2.0813689810056077",
                     "2.0813689810056078", "0.000000000000001"));
  // second record at n=2: 2 / log(3)^2 = 1.657...
  REQUIRE(rep.events.size() >= 3);
  CHECK(rep.events[1].n == 2);
  CHECK(encloses_between(rep.events[1].value, "1.6570", "1.6571"));
}

TEST_CASE("record hypotheses gate the exponent") {
  prime_cache cache;
  precision_policy policy;
  try {
    record_scan(cache, record_quantity::power_gap, rat("1"), 1, 10, policy);
    FAIL("expected hypothesis_error");
  } catch (const hypothesis_error& e) {
    CHECK(std::string(e.what()).find("0 <= x < 1") != std::string::npos);
  }
  CHECK_THROWS_AS(record_scan(cache, record_quantity::power_gap, rat("1.5"), 1,
                              10, policy),
                  hypothesis_error);
  CHECK_THROWS_AS(record_scan(cache, record_quantity::gap_over_px, rat("0"), 1,
                              10, policy),
                  hypothesis_error);
  CHECK_THROWS_AS(record_scan(cache, record_quantity::gap_over_logpx,
                              rat("-1"), 1, 10, policy),
                  hypothesis_error);
  // boundary: power_gap accepts x = 0 (every value is exactly zero)
  auto rep = record_scan(cache, record_quantity::power_gap, rat("0"), 1, 50,
                         policy);
  CHECK(rep.events.size() == 1);
  REQUIRE(rep.events[0].exact_value);
  CHECK(*rep.events[0].exact_value == 0);
}

TEST_CASE("record scans can start mid-range") {
  prime_cache cache;
  precision_policy policy;
  auto rep = record_scan(cache, record_quantity::gap_over_px, rat("1"), 5, 100,
                         policy);
  REQUIRE(!rep.events.empty());
  CHECK(rep.events[0].n == 5);
  CHECK(*rep.events[0].exact_value == rational(2, 11));
}
