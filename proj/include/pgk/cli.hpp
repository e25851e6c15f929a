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

#ifndef PGK_CLI_HPP
#define PGK_CLI_HPP

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "pgk/gap.hpp"
#include "pgk/kummer.hpp"
#include "pgk/report.hpp"

namespace pgk::cli {

// Exit codes: 0 success, 1 resource/computation failure, 2 usage or
// hypothesis error.

inline std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv("PGK_CACHE_DIR"); env && *env)
    return std::filesystem::path(env);
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg)
    return std::filesystem::path(xdg) / "pgk";
  if (const char* home = std::getenv("HOME"); home && *home)
    return std::filesystem::path(home) / ".cache" / "pgk";
  return std::filesystem::temp_directory_path() / "pgk-cache";
}

namespace detail {

class output_target {
 public:
  output_target(const std::string& spec, std::ostream& fallback) {
    if (spec.empty() || spec == "-") {
      os_ = &fallback;
    } else {
      file_.open(spec, std::ios::binary | std::ios::trunc);
      if (!file_)
        throw resource_error("cannot open output file '" + spec + "'");
      os_ = &file_;
    }
  }
  std::ostream& stream() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_ = nullptr;
};

struct common_options {
  std::string cache_dir;
  std::string ladder;
  long cap = 0;
  std::uint64_t hard_limit = 1ull << 34;
  std::uint64_t segment_size = 1ull << 20;
  unsigned threads = 0;
  std::string format = "csv";
  std::string output = "-";

  precision_policy make_policy() const {
    precision_policy policy;
    if (!ladder.empty()) {
      policy.ladder.clear();
      std::stringstream ss(ladder);
      std::string item;
      while (std::getline(ss, item, ','))
        policy.ladder.push_back(static_cast<mpfr_prec_t>(std::stol(item)));
      policy.cap = policy.ladder.empty() ? 0 : policy.ladder.back();
    }
    if (cap > 0) policy.cap = cap;
    policy.validate();
    return policy;
  }

  sieve_options make_sieve_options() const {
    sieve_options opts;
    opts.segment_size = segment_size;
    opts.hard_limit = hard_limit;
    opts.cache_dir = cache_dir.empty() ? default_cache_dir()
                                       : std::filesystem::path(cache_dir);
    return opts;
  }

  unsigned effective_threads() const {
    if (threads > 0) return threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
  }
};

inline void add_decades_csv(std::ostream& os, const decade_histogram& h,
                            const char* label) {
  for (std::size_t d = 0; d < h.counts.size(); ++d)
    os << "# " << label << " decade " << d << ": " << h.counts[d] << "\n";
}

inline void write_decades_json(std::ostream& os, const decade_histogram& h) {
  os << "[";
  for (std::size_t d = 0; d < h.counts.size(); ++d) {
    if (d) os << ",";
    os << "{\"decade\":" << d << ",\"count\":" << h.counts[d] << "}";
  }
  os << "]";
}

// ---- witness ----

inline int cmd_witness(prime_cache& cache, const common_options& opts,
                       const std::string& x_text, const std::string& q_text,
                       std::uint64_t from, std::uint64_t to,
                       std::ostream& fallback) {
  rational x = parse_rational(x_text);
  seq_expr q = seq_expr::parse(expand_shorthand(q_text));
  precision_policy policy = opts.make_policy();
  output_target target(opts.output, fallback);
  std::ostream& os = target.stream();

  report_meta meta;
  meta.add("command", "witness");
  meta.add("x", to_string(x));
  meta.add("q", q.source());
  meta.add("from", std::to_string(from));
  meta.add("to", std::to_string(to));
  meta.add("policy", policy.describe());
  meta.add("cache-format", std::to_string(cache_format_version));

  const bool json = opts.format == "json";
  bool first_row = true;
  std::function<void(const witness_row&)> sink;
  if (json) {
    os << "{";
    write_meta_json(os, meta);
    os << ",\"rows\":[";
    sink = [&](const witness_row& r) {
      if (!first_row) os << ",";
      first_row = false;
      os << "{\"n\":" << r.n << ",\"p_n\":" << r.p << ",\"p_n1\":" << r.p_next
         << ",\"lhs_lo\":" << format_lo(r.lhs) << ",\"lhs_hi\":" << format_hi(r.lhs)
         << ",\"rhs_lo\":" << format_lo(r.rhs) << ",\"rhs_hi\":" << format_hi(r.rhs)
         << ",\"verdict\":\"" << to_cstring(r.v) << "\"}";
    };
  } else {
    write_meta_csv(os, meta);
    os << "n,p_n,p_n1,lhs_lo,lhs_hi,rhs_lo,rhs_hi,verdict\n";
    sink = [&](const witness_row& r) {
      os << r.n << ',' << r.p << ',' << r.p_next << ',' << format_lo(r.lhs)
         << ',' << format_hi(r.lhs) << ',' << format_lo(r.rhs) << ','
         << format_hi(r.rhs) << ',' << to_cstring(r.v) << '\n';
    };
  }

  witness_report rep = scan_witnesses(cache, x, q, from, to, policy,
                                      opts.effective_threads(), sink);

  if (json) {
    os << "],\"summary\":{\"scanned\":" << rep.scanned
       << ",\"adjusted_from\":" << rep.adjusted_from
       << ",\"witness_count\":" << rep.witness_count
       << ",\"non_witness_count\":" << rep.non_witness_count
       << ",\"indeterminate_count\":" << rep.indeterminate_count
       << ",\"first_witnesses\":[";
    for (std::size_t i = 0; i < rep.first_witnesses.size(); ++i) {
      if (i) os << ",";
      os << rep.first_witnesses[i];
    }
    os << "],\"last_witness\":" << rep.last_witness << ",\"per_decade\":";
    write_decades_json(os, rep.per_decade);
    os << "}}\n";
  } else {
    os << "# scanned: " << rep.scanned << "\n";
    os << "# adjusted_from: " << rep.adjusted_from << "\n";
    os << "# witnesses: " << rep.witness_count << "\n";
    os << "# last_witness: " << rep.last_witness << "\n";
    os << "# indeterminate: " << rep.indeterminate_count << "\n";
    add_decades_csv(os, rep.per_decade, "witness");
  }
  return 0;
}

// ---- records ----

inline record_quantity parse_quantity(const std::string& s) {
  if (s == "gap_over_px") return record_quantity::gap_over_px;
  if (s == "gap_over_logpx") return record_quantity::gap_over_logpx;
  if (s == "power_gap") return record_quantity::power_gap;
  throw usage_error("unknown quantity '" + s +
                    "' (expected gap_over_px, gap_over_logpx or power_gap)");
}

inline int cmd_records(prime_cache& cache, const common_options& opts,
                       const std::string& quantity_text,
                       const std::string& x_text, std::uint64_t from,
                       std::uint64_t to, std::ostream& fallback) {
  record_quantity quantity = parse_quantity(quantity_text);
  rational x = parse_rational(x_text);
  precision_policy policy = opts.make_policy();

  record_report rep = record_scan(cache, quantity, x, from, to, policy);

  output_target target(opts.output, fallback);
  std::ostream& os = target.stream();
  report_meta meta;
  meta.add("command", "records");
  meta.add("quantity", to_cstring(quantity));
  meta.add("x", to_string(x));
  meta.add("from", std::to_string(from));
  meta.add("to", std::to_string(to));
  meta.add("policy", policy.describe());
  meta.add("cache-format", std::to_string(cache_format_version));

  if (opts.format == "json") {
    os << "{";
    write_meta_json(os, meta);
    os << ",\"rows\":[";
    for (std::size_t i = 0; i < rep.events.size(); ++i) {
      const record_event& ev = rep.events[i];
      if (i) os << ",";
      os << "{\"n\":" << ev.n << ",\"p_n\":" << ev.p
         << ",\"value_lo\":" << format_lo(ev.value)
         << ",\"value_hi\":" << format_hi(ev.value) << ",\"quantity\":\""
         << to_cstring(quantity) << "\",\"x\":\"" << to_string(x) << "\"}";
    }
    os << "],\"unconfirmed\":[";
    for (std::size_t i = 0; i < rep.unconfirmed.size(); ++i) {
      const unconfirmed_candidate& uc = rep.unconfirmed[i];
      if (i) os << ",";
      os << "{\"n\":" << uc.n << ",\"value_lo\":" << format_lo(uc.value)
         << ",\"value_hi\":" << format_hi(uc.value) << "}";
    }
    os << "],\"summary\":{\"events\":" << rep.events.size()
       << ",\"unconfirmed\":" << rep.unconfirmed.size();
    if (!rep.events.empty())
      os << ",\"liminf_upper_bound_over_scanned_range\":"
         << format_hi(rep.events.back().value);
    os << "}}\n";
  } else {
    write_meta_csv(os, meta);
    os << "n,p_n,value_lo,value_hi,quantity,x\n";
    for (const record_event& ev : rep.events)
      os << ev.n << ',' << ev.p << ',' << format_lo(ev.value) << ','
         << format_hi(ev.value) << ',' << to_cstring(quantity) << ','
         << to_string(x) << '\n';
    os << "# events: " << rep.events.size() << "\n";
    os << "# unconfirmed: " << rep.unconfirmed.size() << "\n";
    for (const unconfirmed_candidate& uc : rep.unconfirmed)
      os << "# unconfirmed n=" << uc.n << " value in [" << format_lo(uc.value)
         << ", " << format_hi(uc.value) << "]\n";
    if (!rep.events.empty())
      os << "# upper bound on liminf over scanned range: "
         << format_hi(rep.events.back().value) << "\n";
  }
  return 0;
}

// ---- kummer ----

inline int cmd_kummer(prime_cache& cache, const common_options& opts,
                      const std::string& a_text, const std::string& b_text,
                      const std::string& q_text, const std::string& mode,
                      const std::string& sum_text, std::uint64_t from,
                      std::uint64_t to, std::ostream& fallback) {
  seq_expr a = seq_expr::parse(expand_shorthand(a_text));
  seq_expr b = seq_expr::parse(expand_shorthand(b_text));
  precision_policy policy = opts.make_policy();
  output_target target(opts.output, fallback);
  std::ostream& os = target.stream();

  report_meta meta;
  meta.add("command", "kummer");
  meta.add("mode", mode);
  meta.add("a", a.source());
  meta.add("b", b.source());
  if (!q_text.empty()) meta.add("q", expand_shorthand(q_text));
  if (!sum_text.empty()) meta.add("sum", sum_text);
  meta.add("from", std::to_string(from));
  meta.add("to", std::to_string(to));
  meta.add("policy", policy.describe());
  meta.add("cache-format", std::to_string(cache_format_version));

  const bool json = opts.format == "json";

  if (mode == "constructive") {
    if (sum_text.empty())
      throw usage_error("constructive mode requires --sum");
    rational S = parse_rational(sum_text);
    auto rows = constructive_scan(cache, a, b, S, from, to, policy);
    if (json) {
      os << "{";
      write_meta_json(os, meta);
      os << ",\"rows\":[";
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const constructive_row& r = rows[i];
        if (i) os << ",";
        os << "{\"n\":" << r.n << ",\"q_lo\":" << format_lo(r.q_value)
           << ",\"q_hi\":" << format_hi(r.q_value)
           << ",\"residual_lo\":" << format_lo(r.residual)
           << ",\"residual_hi\":" << format_hi(r.residual)
           << ",\"prec_bits\":" << r.prec_bits << "}";
      }
      os << "],\"summary\":{\"rows\":" << rows.size() << "}}\n";
    } else {
      write_meta_csv(os, meta);
      os << "n,q_lo,q_hi,residual_lo,residual_hi,prec_bits\n";
      for (const constructive_row& r : rows)
        os << r.n << ',' << format_lo(r.q_value) << ',' << format_hi(r.q_value)
           << ',' << format_lo(r.residual) << ',' << format_hi(r.residual)
           << ',' << r.prec_bits << '\n';
      os << "# rows: " << rows.size() << "\n";
    }
    return 0;
  }

  if (q_text.empty())
    throw usage_error("mode '" + mode + "' requires --q");
  kummer_instance inst{a, b, seq_expr::parse(expand_shorthand(q_text)), from};

  bool first_row = true;
  std::function<void(const kummer_margin_row&)> sink;
  if (json) {
    os << "{";
    write_meta_json(os, meta);
    os << ",\"rows\":[";
    sink = [&](const kummer_margin_row& r) {
      if (!first_row) os << ",";
      first_row = false;
      os << "{\"n\":" << r.n << ",\"margin_lo\":" << format_lo(r.margin)
         << ",\"margin_hi\":" << format_hi(r.margin) << ",\"verdict\":\""
         << to_cstring(r.v) << "\",\"prec_bits\":" << r.prec_bits << "}";
    };
  } else {
    write_meta_csv(os, meta);
    os << "n,margin_lo,margin_hi,verdict,prec_bits\n";
    sink = [&](const kummer_margin_row& r) {
      os << r.n << ',' << format_lo(r.margin) << ',' << format_hi(r.margin)
         << ',' << to_cstring(r.v) << ',' << r.prec_bits << '\n';
    };
  }

  if (mode == "sufficiency") {
    sufficiency_report rep = scan_sufficiency(cache, inst, from, to, policy,
                                              opts.effective_threads(), sink);
    if (json) {
      os << "],\"summary\":{\"all_hold\":" << (rep.all_hold ? "true" : "false");
      if (rep.first_failure) os << ",\"first_failure\":" << *rep.first_failure;
      if (!rep.failure_reason.empty())
        os << ",\"failure_reason\":\"" << rep.failure_reason << "\"";
      os << ",\"hold_count\":" << rep.hold_count
         << ",\"violation_count\":" << rep.violation_count
         << ",\"indeterminate_count\":" << rep.indeterminate_count << "}}\n";
    } else {
      os << "# all_hold: " << (rep.all_hold ? "true" : "false") << "\n";
      if (rep.first_failure)
        os << "# first_failure: " << *rep.first_failure << " ("
           << rep.failure_reason << ")\n";
      os << "# hold: " << rep.hold_count << "\n";
      os << "# violations: " << rep.violation_count << "\n";
      os << "# indeterminate: " << rep.indeterminate_count << "\n";
    }
  } else if (mode == "violations") {
    violation_report rep = scan_violations(cache, inst, from, to, policy,
                                           opts.effective_threads(), sink);
    if (json) {
      os << "],\"summary\":{\"violations\":" << rep.violations.size()
         << ",\"indeterminate_count\":" << rep.indeterminate_count
         << ",\"per_decade\":";
      write_decades_json(os, rep.per_decade);
      os << "}}\n";
    } else {
      os << "# violations: " << rep.violations.size() << "\n";
      os << "# indeterminate: " << rep.indeterminate_count << "\n";
      add_decades_csv(os, rep.per_decade, "violation");
    }
  } else {
    throw usage_error("unknown mode '" + mode +
                      "' (expected sufficiency, violations or constructive)");
  }
  return 0;
}

// ---- sieve ----

inline int cmd_sieve(prime_cache& cache, std::uint64_t count,
                     std::uint64_t limit, std::ostream& out) {
  if ((count == 0) == (limit == 0))
    throw usage_error("sieve requires exactly one of --count or --limit");
  if (count > 0) {
    cache.ensure_count(count);
    out << "primes: " << count << "\n";
    out << "largest: " << cache.nth_prime(count) << "\n";
  } else {
    if (limit < 2) throw usage_error("--limit must be at least 2");
    std::uint64_t c = cache.prime_count(limit);
    out << "primes: " << c << "\n";
    out << "largest: " << cache.nth_prime(c) << "\n";
  }
  return 0;
}

}  // namespace detail

/// Parse and execute one command line (without the program name).
/// Everything the command prints goes to `out`/`err`.
inline int run_cli(std::vector<std::string> args, std::ostream& out,
                   std::ostream& err) {
  CLI::App app{"prime gap inequality and Kummer convergence scans"};
  app.name("pgk");

  detail::common_options opts;
  app.add_option("--cache-dir", opts.cache_dir,
                 "prime cache directory (default: $PGK_CACHE_DIR or the "
                 "platform cache dir)")
      ->envname("PGK_CACHE_DIR");
  app.add_option("--ladder", opts.ladder,
                 "comma-separated precision ladder in bits (default "
                 "53,128,256,1024)");
  app.add_option("--cap", opts.cap, "precision cap in bits");
  app.add_option("--hard-limit", opts.hard_limit,
                 "largest integer the sieve may reach (default 2^34)");
  app.add_option("--segment-size", opts.segment_size,
                 "sieve segment size in integers (default 2^20)");
  app.add_option("--threads", opts.threads,
                 "worker threads for scans (default: all cores)");
  app.add_option("--format", opts.format, "output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--output", opts.output, "output path, or - for stdout");

  auto* sieve = app.add_subcommand("sieve", "extend the prime cache");
  std::uint64_t sieve_count = 0, sieve_limit = 0;
  sieve->add_option("--count", sieve_count, "sieve until this many primes exist");
  sieve->add_option("--limit", sieve_limit, "sieve all primes up to this bound");

  auto* witness = app.add_subcommand(
      "witness", "scan the strict inequality for witnesses");
  std::string w_x, w_q = "1";
  std::uint64_t w_from = 1, w_to = 0;
  witness->add_option("--x", w_x, "exponent (decimal or fraction)")->required();
  witness->add_option("--q", w_q, "positive sequence q_n (expression in n, p)");
  witness->add_option("--from", w_from, "first index (default 1)");
  witness->add_option("--to", w_to, "last index")->required();

  auto* records = app.add_subcommand(
      "records", "track running minima of a gap quantity");
  std::string r_quantity, r_x;
  std::uint64_t r_from = 1, r_to = 0;
  records
      ->add_option("--quantity", r_quantity,
                   "gap_over_px | gap_over_logpx | power_gap")
      ->required();
  records->add_option("--x", r_x, "exponent (decimal or fraction)")->required();
  records->add_option("--from", r_from, "first index (default 1)");
  records->add_option("--to", r_to, "last index")->required();

  auto* kummer = app.add_subcommand(
      "kummer", "sufficiency/violation scans and constructive q recovery");
  std::string k_a, k_b, k_q, k_mode = "sufficiency", k_sum;
  std::uint64_t k_from = 1, k_to = 0;
  kummer->add_option("--a", k_a, "positive sequence a_n")->required();
  kummer->add_option("--b", k_b, "positive sequence b_n")->required();
  kummer->add_option("--q", k_q, "positive sequence q_n");
  kummer->add_option("--mode", k_mode, "sufficiency | violations | constructive");
  kummer->add_option("--sum", k_sum, "exact value of sum(a_n b_n) for constructive mode");
  kummer->add_option("--from", k_from, "first index / starting index N");
  kummer->add_option("--to", k_to, "last index")->required();

  app.require_subcommand(1);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    prime_cache cache(opts.make_sieve_options());
    if (sieve->parsed())
      return detail::cmd_sieve(cache, sieve_count, sieve_limit, out);
    if (witness->parsed())
      return detail::cmd_witness(cache, opts, w_x, w_q, w_from, w_to, out);
    if (records->parsed())
      return detail::cmd_records(cache, opts, r_quantity, r_x, r_from, r_to, out);
    if (kummer->parsed())
      return detail::cmd_kummer(cache, opts, k_a, k_b, k_q, k_mode, k_sum,
                                k_from, k_to, out);
    err << "error: no subcommand\n";
    return 2;
  } catch (const usage_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const resource_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace pgk::cli

#endif  // PGK_CLI_HPP
