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

#ifndef PGK_REPORT_HPP
#define PGK_REPORT_HPP

#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pgk/interval.hpp"
#include "pgk/version.hpp"

namespace pgk {

namespace detail {

/// Fixed-width decimal rendering of one enclosure bound: 17 significant
/// digits rounded in the stated direction, so the printed pair is itself
/// a valid (slightly wider) enclosure and identical runs produce
/// byte-identical text.
inline std::string format_directed(mpfr_srcptr v, mpfr_rnd_t rnd) {
  if (mpfr_zero_p(v)) return "0.0000000000000000e+00";
  mpfr_exp_t e;
  char* raw = mpfr_get_str(nullptr, &e, 10, 17, v, rnd);
  std::string digits(raw);
  mpfr_free_str(raw);
  bool neg = !digits.empty() && digits[0] == '-';
  std::string mant = neg ? digits.substr(1) : digits;
  char expbuf[32];
  std::snprintf(expbuf, sizeof(expbuf), "e%+03ld", static_cast<long>(e - 1));
  return (neg ? std::string("-") : std::string()) + mant.substr(0, 1) + "." +
         mant.substr(1) + expbuf;
}

}  // namespace detail

inline std::string format_lo(const interval& iv) {
  return detail::format_directed(iv.lo(), MPFR_RNDD);
}

inline std::string format_hi(const interval& iv) {
  return detail::format_directed(iv.hi(), MPFR_RNDU);
}

inline void json_escape(std::ostream& out, std::string_view s) {
  out << '"';
  for (char c : s) {
    switch (c) {
      case '"': out << "\\\""; break;
      case '\\': out << "\\\\"; break;
      case '\n': out << "\\n"; break;
      case '\t': out << "\\t"; break;
      case '\r': out << "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out << buf;
        } else {
          out << c;
        }
    }
  }
  out << '"';
}

/// Key/value metadata carried at the top of every report so golden files
/// are self-describing. Deliberately excludes anything run-dependent
/// (timestamps, thread counts): identical inputs must give identical bytes.
struct report_meta {
  std::vector<std::pair<std::string, std::string>> entries;

  report_meta() {
    entries.emplace_back("tool", std::string("pgk ") + version_string);
  }

  void add(std::string key, std::string value) {
    entries.emplace_back(std::move(key), std::move(value));
  }
};

inline void write_meta_csv(std::ostream& out, const report_meta& meta) {
  for (const auto& [k, v] : meta.entries) out << "# " << k << ": " << v << "\n";
}

inline void write_meta_json(std::ostream& out, const report_meta& meta) {
  out << "\"meta\":{";
  bool first = true;
  for (const auto& [k, v] : meta.entries) {
    if (!first) out << ",";
    first = false;
    json_escape(out, k);
    out << ":";
    json_escape(out, v);
  }
  out << "}";
}

}  // namespace pgk

#endif  // PGK_REPORT_HPP
