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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "pgk/primes.hpp"
#include "support/oracles.hpp"

using namespace pgk;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* tag) {
  fs::path dir = fs::temp_directory_path() /
                 (std::string("pgk-test-") + tag + "-" +
                  std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  return dir;
}

std::vector<std::uint64_t> collect_pairs_firsts(prime_cache& cache,
                                                std::uint64_t from,
                                                std::uint64_t to) {
  std::vector<std::uint64_t> firsts;
  auto st = cache.pairs(from, to);
  while (auto pr = st.next()) firsts.push_back(pr->p);
  return firsts;
}

}  // namespace

TEST_CASE("sieve_range matches known windows") {
  CHECK(sieve_range(10, 20) == std::vector<std::uint64_t>{11, 13, 17, 19});
  CHECK(sieve_range(2, 3) == std::vector<std::uint64_t>{2});
  CHECK(sieve_range(24, 29).empty());
}

TEST_CASE("sieve_range rejects bad input") {
  CHECK_THROWS_AS(sieve_range(1, 10), usage_error);
  CHECK_THROWS_AS(sieve_range(10, 10), usage_error);
  CHECK_THROWS_AS(sieve_range(2, 1u << 20, 1u << 10), resource_error);
}

TEST_CASE("sieve_range agrees with trial division on random windows") {
  std::mt19937_64 rng(20260810);
  for (int i = 0; i < 40; ++i) {
    std::uint64_t lo = 2 + rng() % 100000;
    std::uint64_t hi = lo + 1 + rng() % 3000;
    CAPTURE(lo, hi);
    CHECK(sieve_range(lo, hi) == pgk_oracle::primes_in_range_td(lo, hi));
  }
}

TEST_CASE("sieve_range over a partition concatenates to the whole") {
  std::mt19937_64 rng(7);
  const std::uint64_t X = 40000;
  std::vector<std::uint64_t> cuts{2, X};
  for (int i = 0; i < 5; ++i) cuts.push_back(2 + rng() % (X - 2));
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<std::uint64_t> glued;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto part = sieve_range(cuts[i], cuts[i + 1]);
    glued.insert(glued.end(), part.begin(), part.end());
  }
  CHECK(glued == sieve_range(2, X));
}

TEST_CASE("nth_prime and prime_count at small indices") {
  prime_cache cache;
  CHECK(cache.nth_prime(1) == 2);
  CHECK(cache.nth_prime(5) == 11);
  CHECK(cache.nth_prime(25) == 97);
  CHECK(cache.prime_count(10) == 4);
  CHECK(cache.prime_count(2) == 1);
  CHECK_THROWS_AS(cache.nth_prime(0), usage_error);
}

TEST_CASE("nth_prime agrees with trial division enumeration") {
  prime_cache cache;
  auto oracle = pgk_oracle::first_primes_td(2000);
  for (std::uint64_t n : {1ull, 2ull, 10ull, 100ull, 541ull, 2000ull})
    CHECK(cache.nth_prime(n) == oracle[n - 1]);
  CHECK(cache.prime_count(oracle.back()) == 2000);
}

TEST_CASE("small segments join up seamlessly") {
  sieve_options opts;
  opts.segment_size = 100;  // force many segments
  prime_cache cache(opts);
  auto oracle = pgk_oracle::first_primes_td(500);
  for (std::uint64_t n = 1; n <= 500; ++n) CHECK(cache.nth_prime(n) == oracle[n - 1]);
}

TEST_CASE("pairs_stream yields consecutive pairs in index order") {
  prime_cache cache;
  auto st = cache.pairs(1, 3);
  auto a = st.next();
  REQUIRE(a);
  CHECK(a->n == 1);
  CHECK(a->p == 2);
  CHECK(a->p_next == 3);
  auto b = st.next();
  REQUIRE(b);
  CHECK(b->p == 3);
  CHECK(b->p_next == 5);
  auto c = st.next();
  REQUIRE(c);
  CHECK(c->p == 5);
  CHECK(c->p_next == 7);
  CHECK_FALSE(st.next());

  auto single = cache.pairs(4, 4);
  auto d = single.next();
  REQUIRE(d);
  CHECK(d->n == 4);
  CHECK(d->p == 7);
  CHECK(d->p_next == 11);
  CHECK_FALSE(single.next());

  auto empty = cache.pairs(5, 4);
  CHECK_FALSE(empty.next());
}

TEST_CASE("pairs_stream spans segment boundaries") {
  sieve_options opts;
  opts.segment_size = 64;
  prime_cache cache(opts);
  auto oracle = pgk_oracle::first_primes_td(301);
  auto firsts = collect_pairs_firsts(cache, 1, 300);
  REQUIRE(firsts.size() == 300);
  for (std::size_t i = 0; i < firsts.size(); ++i) CHECK(firsts[i] == oracle[i]);
}

TEST_CASE("cache round-trips through disk with identical checksums") {
  fs::path dir = temp_dir("roundtrip");
  std::vector<std::uint64_t> checksums;
  {
    sieve_options opts;
    opts.segment_size = 4096;
    opts.cache_dir = dir;
    prime_cache cache(opts);
    cache.ensure_limit(20000);
    checksums = cache.segment_checksums();
    REQUIRE(checksums.size() >= 4);
  }
  {
    sieve_options opts;
    opts.segment_size = 4096;
    opts.cache_dir = dir;
    prime_cache cache(opts);
    CHECK(cache.segment_checksums() == checksums);
    CHECK(cache.limit() >= 20000 - 1);
    CHECK(cache.nth_prime(25) == 97);
    auto oracle = pgk_oracle::primes_in_range_td(2, 20000);
    CHECK(cache.prime_count(19999) == oracle.size());
  }
  fs::remove_all(dir);
}

TEST_CASE("corrupt tail segments are discarded and re-sieved") {
  fs::path dir = temp_dir("corrupt");
  std::uint64_t p100;
  {
    sieve_options opts;
    opts.segment_size = 1024;
    opts.cache_dir = dir;
    prime_cache cache(opts);
    cache.ensure_limit(8000);
    p100 = cache.nth_prime(100);
  }
  // flip one byte near the end of the file
  fs::path file = dir / "primes.pgkc";
  auto size = fs::file_size(file);
  {
    std::fstream f(file, std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(static_cast<std::streamoff>(size - 12));
    char c;
    f.seekg(static_cast<std::streamoff>(size - 12));
    f.get(c);
    c ^= 0x5a;
    f.seekp(static_cast<std::streamoff>(size - 12));
    f.put(c);
  }
  {
    sieve_options opts;
    opts.segment_size = 1024;
    opts.cache_dir = dir;
    prime_cache cache(opts);
    // tail segment dropped, earlier ones intact
    CHECK(cache.limit() < 8000);
    CHECK(cache.limit() > 0);
    // re-extends over the damaged region without loading bad data
    cache.ensure_limit(8000);
    CHECK(cache.nth_prime(100) == p100);
    auto oracle = pgk_oracle::primes_in_range_td(2, 8000);
    CHECK(cache.prime_count(7999) == oracle.size());
  }
  fs::remove_all(dir);
}

TEST_CASE("a cache from one run keeps growing in the next") {
  fs::path dir = temp_dir("grow");
  {
    sieve_options opts;
    opts.segment_size = 2048;
    opts.cache_dir = dir;
    prime_cache cache(opts);
    cache.ensure_count(100);
  }
  {
    sieve_options opts;
    opts.segment_size = 2048;
    opts.cache_dir = dir;
    prime_cache cache(opts);
    std::uint64_t before = cache.segment_checksums().size();
    cache.ensure_count(1000);
    CHECK(cache.segment_checksums().size() > before);
    CHECK(cache.nth_prime(1000) == pgk_oracle::nth_prime_td(1000));
  }
  fs::remove_all(dir);
}

TEST_CASE("hard limit stops the sieve with a resource error") {
  sieve_options opts;
  opts.hard_limit = 10000;
  opts.segment_size = 4096;
  prime_cache cache(opts);
  CHECK_THROWS_AS(cache.ensure_limit(20000), resource_error);
  CHECK_THROWS_AS(cache.prime_count(20000), resource_error);
  CHECK_THROWS_AS(cache.nth_prime(10000), resource_error);
  // within the limit everything still works
  CHECK(cache.nth_prime(25) == 97);
}
