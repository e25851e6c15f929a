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

#ifndef PGK_PRIMES_HPP
#define PGK_PRIMES_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <deque>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "pgk/errors.hpp"
#include "pgk/version.hpp"

namespace pgk {

inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t hash = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    hash ^= p[i];
    hash *= 0x100000001b3ull;
  }
  return hash;
}

/// Plain sieve of Eratosthenes, primes <= limit. Used for base primes and
/// small one-off requests; the segmented machinery handles everything else.
inline std::vector<std::uint64_t> simple_sieve(std::uint64_t limit) {
  std::vector<std::uint64_t> primes;
  if (limit < 2) return primes;
  std::vector<bool> composite(limit + 1, false);
  for (std::uint64_t i = 2; i * i <= limit; ++i) {
    if (composite[i]) continue;
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  for (std::uint64_t i = 2; i <= limit; ++i)
    if (!composite[i]) primes.push_back(i);
  return primes;
}

inline std::uint64_t isqrt_u64(std::uint64_t x) {
  if (x < 2) return x;
  std::uint64_t r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(x)));
  while (r > 0 && r * r > x) --r;
  while ((r + 1) * (r + 1) <= x) ++r;
  return r;
}

/// Primes in [lo, hi), ascending. The window must fit the budget; callers
/// wanting more split the range themselves (or use prime_cache).
inline std::vector<std::uint64_t> sieve_range(std::uint64_t lo, std::uint64_t hi,
                                              std::uint64_t budget = 1ull << 24) {
  if (lo < 2) throw usage_error("sieve_range requires lo >= 2");
  if (hi <= lo) throw usage_error("sieve_range requires hi > lo");
  if (hi - lo > budget)
    throw resource_error("sieve_range window of " + std::to_string(hi - lo) +
                         " exceeds budget " + std::to_string(budget) +
                         "; split the range");

  std::vector<std::uint64_t> base = simple_sieve(isqrt_u64(hi - 1));
  std::vector<bool> composite(hi - lo, false);
  for (std::uint64_t p : base) {
    std::uint64_t first = p * p;
    if (first < lo) first = ((lo + p - 1) / p) * p;
    for (std::uint64_t m = first; m < hi; m += p) composite[m - lo] = true;
  }
  std::vector<std::uint64_t> out;
  for (std::uint64_t v = lo; v < hi; ++v)
    if (!composite[v - lo]) out.push_back(v);
  return out;
}

struct sieve_options {
  std::uint64_t segment_size = 1ull << 20;  // integers per segment
  std::uint64_t hard_limit = 1ull << 34;    // refuse to sieve past this
  std::optional<std::filesystem::path> cache_dir;  // nullopt: in-memory only
};

struct prime_pair {
  std::uint64_t n;       // 1-based index
  std::uint64_t p;       // p_n
  std::uint64_t p_next;  // p_{n+1}
};

class pair_stream;

/// Indexed store of consecutive primes, extended on demand by a segmented
/// sieve and optionally persisted as append-only checksummed segments.
/// Many readers may query concurrently; extension is serialized.
class prime_cache {
 public:
  explicit prime_cache(sieve_options opts = {}) : opts_(std::move(opts)) {
    if (opts_.segment_size < 64) throw usage_error("segment size too small");
    opts_.segment_size += opts_.segment_size & 1;  // keep segments even-sized
    if (opts_.cache_dir) {
      std::filesystem::create_directories(*opts_.cache_dir);
      load_from_disk();
    }
  }

  const sieve_options& options() const { return opts_; }

  std::uint64_t count() const {
    std::shared_lock lk(mtx_);
    return count_unlocked();
  }

  /// Largest sieved integer (0 when nothing has been sieved yet).
  std::uint64_t limit() const {
    std::shared_lock lk(mtx_);
    return sieved_end_ > 2 ? sieved_end_ - 1 : 0;
  }

  void ensure_limit(std::uint64_t x) {
    if (x > opts_.hard_limit)
      throw resource_error("requested sieve limit " + std::to_string(x) +
                           " exceeds hard limit " +
                           std::to_string(opts_.hard_limit));
    std::unique_lock lk(mtx_);
    while (sieved_end_ <= x) sieve_next_segment();
  }

  void ensure_count(std::uint64_t n) {
    std::unique_lock lk(mtx_);
    while (count_unlocked() < n) {
      if (sieved_end_ > opts_.hard_limit)
        throw resource_error("need " + std::to_string(n) +
                             " primes but the hard sieve limit " +
                             std::to_string(opts_.hard_limit) + " was reached");
      sieve_next_segment();
    }
  }

  /// The n-th prime, 1-based: nth_prime(1) == 2.
  std::uint64_t nth_prime(std::uint64_t n) {
    if (n == 0) throw usage_error("prime indices are 1-based");
    ensure_count(n);
    std::shared_lock lk(mtx_);
    if (n == 1) return 2;
    return select_odd_prime(n - 1);
  }

  /// Number of primes <= x.
  std::uint64_t prime_count(std::uint64_t x) {
    if (x < 2) return 0;
    ensure_limit(x);
    std::shared_lock lk(mtx_);
    std::uint64_t c = 1;  // the prime 2
    for (const segment& s : segments_) {
      if (s.start + s.length <= x + 1) {
        c += s.odd_count;
        continue;
      }
      // partial segment: count set bits for odd values <= x
      if (x <= s.start) break;
      std::uint64_t nbits = (x - s.start + 1) / 2;  // odds in [start, x]
      for (std::uint64_t w = 0; w * 64 < nbits; ++w) {
        std::uint64_t word = s.bits[w];
        std::uint64_t remaining = nbits - w * 64;
        if (remaining < 64) word &= (1ull << remaining) - 1;
        c += static_cast<std::uint64_t>(std::popcount(word));
      }
      break;
    }
    return c;
  }

  /// Consecutive-prime pairs (n, p_n, p_{n+1}) for n in [from, to].
  /// from > to yields an empty stream. The cache must outlive the stream.
  pair_stream pairs(std::uint64_t from, std::uint64_t to);

  std::vector<std::uint64_t> segment_checksums() const {
    std::shared_lock lk(mtx_);
    std::vector<std::uint64_t> cs;
    cs.reserve(segments_.size());
    for (const segment& s : segments_) cs.push_back(s.checksum);
    return cs;
  }

 private:
  friend class pair_stream;

  struct segment {
    std::uint64_t start = 0;   // even; covers [start, start + length)
    std::uint64_t length = 0;  // even
    std::vector<std::uint64_t> bits;  // bit i set <=> start + 2i + 1 is prime
    std::uint64_t odd_count = 0;
    std::uint64_t cum_before = 0;  // odd primes in earlier segments
    std::uint64_t checksum = 0;
  };

  std::uint64_t count_unlocked() const {
    if (segments_.empty()) return 0;
    const segment& last = segments_.back();
    return 1 + last.cum_before + last.odd_count;
  }

  void extend_base_primes(std::uint64_t up_to) {
    if (up_to <= base_limit_) return;
    base_primes_ = simple_sieve(up_to);
    base_limit_ = up_to;
  }

  segment sieve_segment(std::uint64_t start, std::uint64_t length) {
    segment s;
    s.start = start;
    s.length = length;
    std::uint64_t nbits = length / 2;
    s.bits.assign((nbits + 63) / 64, ~0ull);
    std::uint64_t end = start + length;
    extend_base_primes(isqrt_u64(end - 1) + 1);

    for (std::uint64_t p : base_primes_) {
      if (p == 2) continue;
      if (p * p >= end) break;
      std::uint64_t m = p * p;
      if (m < start) {
        m = ((start + p - 1) / p) * p;
        if (m % 2 == 0) m += p;
      }
      for (; m < end; m += 2 * p) s.bits[(m - start) / 2 >> 6] &= ~(1ull << (((m - start) / 2) & 63));
    }
    if (start == 2 && length >= 2) {
      // bit 0 is the integer 3; nothing below it needs clearing
    }
    // mask tail bits past the segment and count
    std::uint64_t tail = nbits & 63;
    if (tail) s.bits.back() &= (1ull << tail) - 1;
    for (std::uint64_t w : s.bits)
      s.odd_count += static_cast<std::uint64_t>(std::popcount(w));
    s.checksum = checksum_of(s);
    return s;
  }

  void sieve_next_segment() {
    std::uint64_t start = segments_.empty()
                              ? 2
                              : segments_.back().start + segments_.back().length;
    segment s = sieve_segment(start, opts_.segment_size);
    s.cum_before = segments_.empty()
                       ? 0
                       : segments_.back().cum_before + segments_.back().odd_count;
    if (opts_.cache_dir) append_to_disk(s);
    segments_.push_back(std::move(s));
    sieved_end_ = segments_.back().start + segments_.back().length;
  }

  // ---- persistence ----
  // Record layout: "PGKC" | version u32 LE | start u64 LE | length u64 LE |
  // payload (ceil(length/2 / 8) bytes) | fnv1a64(header+payload) u64 LE.

  std::filesystem::path cache_file() const {
    return *opts_.cache_dir / "primes.pgkc";
  }

  static void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  static void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  static std::uint32_t get_u32(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
    return v;
  }
  static std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
  }

  static std::string serialize(const segment& s) {
    std::string rec;
    rec.reserve(24 + s.bits.size() * 8 + 8);
    rec += "PGKC";
    put_u32(rec, cache_format_version);
    put_u64(rec, s.start);
    put_u64(rec, s.length);
    std::uint64_t payload_bytes = ((s.length / 2) + 7) / 8;
    for (std::uint64_t i = 0; i < payload_bytes; ++i) {
      std::uint64_t word = s.bits[i / 8];
      rec.push_back(static_cast<char>((word >> (8 * (i % 8))) & 0xff));
    }
    put_u64(rec, fnv1a64(rec.data(), rec.size()));
    return rec;
  }

  static std::uint64_t checksum_of(const segment& s) {
    std::string rec = serialize(s);
    // trailer is the last 8 bytes
    return get_u64(reinterpret_cast<const unsigned char*>(rec.data()) +
                   rec.size() - 8);
  }

  void append_to_disk(const segment& s) {
    std::ofstream f(cache_file(), std::ios::binary | std::ios::app);
    if (!f) throw resource_error("cannot open cache file for writing: " +
                                 cache_file().string());
    std::string rec = serialize(s);
    f.write(rec.data(), static_cast<std::streamsize>(rec.size()));
    if (!f) throw resource_error("short write to cache file");
  }

  /// Read back every valid segment; a corrupt or truncated tail is cut off
  /// (and later overwritten) rather than trusted.
  void load_from_disk() {
    std::ifstream f(cache_file(), std::ios::binary);
    if (!f) return;
    std::string data((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
    std::size_t off = 0;
    std::uint64_t expect_start = 2;
    std::size_t valid_bytes = 0;
    while (data.size() - off >= 24 + 8) {
      const auto* p = reinterpret_cast<const unsigned char*>(data.data()) + off;
      if (std::memcmp(p, "PGKC", 4) != 0) break;
      if (get_u32(p + 4) != cache_format_version) break;
      std::uint64_t start = get_u64(p + 8);
      std::uint64_t length = get_u64(p + 16);
      if (start != expect_start || length == 0 || (length & 1)) break;
      std::uint64_t payload_bytes = ((length / 2) + 7) / 8;
      std::size_t rec_size = 24 + payload_bytes + 8;
      if (data.size() - off < rec_size) break;
      std::uint64_t stored = get_u64(p + 24 + payload_bytes);
      if (fnv1a64(p, 24 + payload_bytes) != stored) break;

      segment s;
      s.start = start;
      s.length = length;
      s.bits.assign((length / 2 + 63) / 64, 0);
      for (std::uint64_t i = 0; i < payload_bytes; ++i)
        s.bits[i / 8] |= static_cast<std::uint64_t>(p[24 + i]) << (8 * (i % 8));
      for (std::uint64_t w : s.bits)
        s.odd_count += static_cast<std::uint64_t>(std::popcount(w));
      s.checksum = stored;
      s.cum_before = segments_.empty() ? 0
                                       : segments_.back().cum_before +
                                             segments_.back().odd_count;
      segments_.push_back(std::move(s));
      expect_start = start + length;
      off += rec_size;
      valid_bytes = off;
    }
    if (!segments_.empty()) sieved_end_ = expect_start;
    if (valid_bytes < data.size())
      std::filesystem::resize_file(cache_file(), valid_bytes);
  }

  /// k-th odd prime, 1-based (so select_odd_prime(1) == 3).
  std::uint64_t select_odd_prime(std::uint64_t k) const {
    std::size_t lo = 0, hi = segments_.size();
    while (lo + 1 < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (segments_[mid].cum_before < k) lo = mid;
      else hi = mid;
    }
    const segment& s = segments_[lo];
    std::uint64_t rank = k - s.cum_before;  // 1-based within segment
    for (std::size_t w = 0; w < s.bits.size(); ++w) {
      std::uint64_t pc = static_cast<std::uint64_t>(std::popcount(s.bits[w]));
      if (pc < rank) {
        rank -= pc;
        continue;
      }
      std::uint64_t word = s.bits[w];
      for (std::uint64_t b = 0;; ++b) {
        if (word & 1) {
          if (--rank == 0) return s.start + 2 * (w * 64 + b) + 1;
        }
        word >>= 1;
      }
    }
    throw error("prime rank out of range");  // unreachable after ensure_count
  }

  sieve_options opts_;
  mutable std::shared_mutex mtx_;
  std::deque<segment> segments_;
  std::uint64_t sieved_end_ = 2;
  std::vector<std::uint64_t> base_primes_;
  std::uint64_t base_limit_ = 0;
};

/// Single-consumer forward stream of (n, p_n, p_{n+1}) in index order.
/// Holds stable pointers into the cache's published segments; safe while
/// the cache is extended concurrently (segments are append-only).
class pair_stream {
 public:
  std::optional<prime_pair> next() {
    if (n_ > to_) return std::nullopt;
    prime_pair out{n_, p_, peek_};
    p_ = peek_;
    advance_peek();
    ++n_;
    return out;
  }

 private:
  friend class prime_cache;

  pair_stream() = default;  // empty stream

  pair_stream(std::vector<const prime_cache::segment*> segs, std::uint64_t from,
              std::uint64_t to, std::uint64_t first_prime)
      : segs_(std::move(segs)), n_(from), to_(to), p_(first_prime) {
    if (n_ > to_) return;
    if (n_ == 1) {
      seg_ = 0;
      word_ = 0;
      bit_ = 0;
    } else {
      // position the cursor on p_n itself, then step past it
      locate(n_ - 1);  // rank among odd primes
      step();
    }
    advance_peek();
  }

  void locate(std::uint64_t odd_rank) {
    std::size_t lo = 0, hi = segs_.size();
    while (lo + 1 < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (segs_[mid]->cum_before < odd_rank) lo = mid;
      else hi = mid;
    }
    seg_ = lo;
    std::uint64_t rank = odd_rank - segs_[seg_]->cum_before;
    const auto& bits = segs_[seg_]->bits;
    for (word_ = 0; word_ < bits.size(); ++word_) {
      std::uint64_t pc = static_cast<std::uint64_t>(std::popcount(bits[word_]));
      if (pc < rank) {
        rank -= pc;
        continue;
      }
      std::uint64_t word = bits[word_];
      for (bit_ = 0;; ++bit_) {
        if (word & 1) {
          if (--rank == 0) return;
        }
        word >>= 1;
      }
    }
  }

  // advance cursor by one bit position
  void step() {
    if (++bit_ == 64) {
      bit_ = 0;
      ++word_;
    }
  }

  void advance_peek() {
    while (seg_ < segs_.size()) {
      const auto& bits = segs_[seg_]->bits;
      while (word_ < bits.size()) {
        std::uint64_t w = bits[word_] >> bit_;
        if (w) {
          bit_ += static_cast<std::uint64_t>(std::countr_zero(w));
          peek_ = segs_[seg_]->start + 2 * (word_ * 64 + bit_) + 1;
          step();
          return;
        }
        bit_ = 0;
        ++word_;
      }
      word_ = 0;
      bit_ = 0;
      ++seg_;
    }
    peek_ = 0;  // exhausted; callers never read past to_
  }

  std::vector<const prime_cache::segment*> segs_;
  std::uint64_t n_ = 1, to_ = 0;
  std::uint64_t p_ = 0, peek_ = 0;
  std::size_t seg_ = 0, word_ = 0, bit_ = 0;
};

inline pair_stream prime_cache::pairs(std::uint64_t from, std::uint64_t to) {
  if (from == 0) throw usage_error("prime indices are 1-based");
  if (to < from) return pair_stream{};
  ensure_count(to + 1);
  std::uint64_t first = nth_prime(from);
  std::shared_lock lk(mtx_);
  std::vector<const segment*> segs;
  segs.reserve(segments_.size());
  for (const segment& s : segments_) segs.push_back(&s);
  return pair_stream(std::move(segs), from, to, first);
}

}  // namespace pgk

#endif  // PGK_PRIMES_HPP
