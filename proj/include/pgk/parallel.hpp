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

#ifndef PGK_PARALLEL_HPP
#define PGK_PARALLEL_HPP

#include <algorithm>
#include <cstdint>
#include <future>
#include <type_traits>
#include <vector>

namespace pgk {

/// Split the inclusive index range [from, to] into fixed-size chunks,
/// evaluate work(chunk_from, chunk_to) on up to `threads` chunks at a
/// time, and hand each result to merge() strictly in chunk order. Chunk
/// results must depend only on the chunk bounds, so the merged output is
/// identical for every thread count.
template <typename Work, typename Merge>
void run_chunked(std::uint64_t from, std::uint64_t to, unsigned threads,
                 std::uint64_t chunk_size, Work&& work, Merge&& merge) {
  if (to < from) return;
  threads = std::max(1u, threads);
  chunk_size = std::max<std::uint64_t>(1, chunk_size);

  using result_t = std::invoke_result_t<Work&, std::uint64_t, std::uint64_t>;

  std::uint64_t next = from;
  if (threads == 1) {
    while (next <= to) {
      std::uint64_t hi = std::min(to, next + chunk_size - 1);
      merge(work(next, hi));
      next = hi + 1;
    }
    return;
  }

  while (next <= to) {
    std::vector<std::future<result_t>> wave;
    for (unsigned t = 0; t < threads && next <= to; ++t) {
      std::uint64_t lo = next;
      std::uint64_t hi = std::min(to, next + chunk_size - 1);
      next = hi + 1;
      wave.push_back(std::async(std::launch::async,
                                [&work, lo, hi]() { return work(lo, hi); }));
    }
    for (auto& f : wave) merge(f.get());
  }
}

/// Histogram over decades of the index: bucket d counts values in
/// [10^d, 10^(d+1)). Merging is plain element-wise addition, so chunked
/// scans can combine partial histograms in any grouping.
struct decade_histogram {
  std::vector<std::uint64_t> counts;

  static unsigned decade_of(std::uint64_t n) {
    unsigned d = 0;
    while (n >= 10) {
      n /= 10;
      ++d;
    }
    return d;
  }

  void add(std::uint64_t n) {
    unsigned d = decade_of(n);
    if (counts.size() <= d) counts.resize(d + 1, 0);
    ++counts[d];
  }

  void merge(const decade_histogram& o) {
    if (counts.size() < o.counts.size()) counts.resize(o.counts.size(), 0);
    for (std::size_t i = 0; i < o.counts.size(); ++i) counts[i] += o.counts[i];
  }

  std::uint64_t total() const {
    std::uint64_t s = 0;
    for (std::uint64_t c : counts) s += c;
    return s;
  }
};

}  // namespace pgk

#endif  // PGK_PARALLEL_HPP
