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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "pgk/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct cli_result {
  int code;
  std::string out;
  std::string err;
};

fs::path fresh_dir(const char* tag) {
  fs::path dir = fs::temp_directory_path() /
                 (std::string("pgk-cli-") + tag + "-" +
                  std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  return dir;
}

cli_result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = pgk::cli::run_cli(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

cli_result run_cached(const fs::path& dir, std::vector<std::string> args) {
  args.insert(args.begin(), {"--cache-dir", dir.string()});
  return run(std::move(args));
}

}  // namespace

TEST_CASE("cli: sieve reports count and largest prime") {
  fs::path dir = fresh_dir("sieve");
  auto r = run_cached(dir, {"sieve", "--count", "100"});
  CHECK(r.code == 0);
  CHECK(r.out.find("primes: 100") != std::string::npos);
  CHECK(r.out.find("largest: 541") != std::string::npos);

  auto r2 = run_cached(dir, {"sieve", "--limit", "10"});
  CHECK(r2.code == 0);
  CHECK(r2.out.find("primes: 4") != std::string::npos);
  CHECK(r2.out.find("largest: 7") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("cli: sieve usage errors exit 2") {
  fs::path dir = fresh_dir("sieve-err");
  CHECK(run_cached(dir, {"sieve", "--limit", "1"}).code == 2);
  CHECK(run_cached(dir, {"sieve"}).code == 2);
  CHECK(run_cached(dir, {"sieve", "--count", "5", "--limit", "10"}).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("cli: witness scan emits csv rows and summary") {
  fs::path dir = fresh_dir("witness");
  auto r = run_cached(dir, {"witness", "--x", "1", "--q", "1", "--from", "1",
                            "--to", "1000"});
  CHECK(r.code == 0);
  CHECK(r.out.find("# witnesses: 1000") != std::string::npos);
  CHECK(r.out.find("n,p_n,p_n1,lhs_lo,lhs_hi,rhs_lo,rhs_hi,verdict") !=
        std::string::npos);
  CHECK(r.out.find("1,2,3,") != std::string::npos);
  CHECK(r.out.find("STRICTLY_LESS") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("cli: witnesses for q=n exclude n=4") {
  fs::path dir = fresh_dir("witness-n");
  auto r = run_cached(dir, {"witness", "--x", "1", "--q", "n", "--from", "1",
                            "--to", "10"});
  CHECK(r.code == 0);
  CHECK(r.out.find("# witnesses: 8") != std::string::npos);  // 4 and 9 fail
  CHECK(r.out.find("4,7,11") != std::string::npos);
  std::size_t row4 = r.out.find("\n4,7,11");
  REQUIRE(row4 != std::string::npos);
  std::size_t eol = r.out.find('\n', row4 + 1);
  CHECK(r.out.substr(row4, eol - row4).find("GREATER_OR_EQUAL") !=
        std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("cli: zero witnesses is still a success") {
  fs::path dir = fresh_dir("witness-zero");
  // empty index range: nothing scanned, exit 0
  auto r = run_cached(dir, {"witness", "--x", "1", "--q", "1", "--from", "7",
                            "--to", "6"});
  CHECK(r.code == 0);
  CHECK(r.out.find("# witnesses: 0") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("cli: witness json validates against the expected schema") {
  fs::path dir = fresh_dir("witness-json");
  auto r = run_cached(dir, {"--format", "json", "witness", "--x", "0.5", "--q",
                            "p", "--from", "1", "--to", "50"});
  CHECK(r.code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc.at("meta").at("command") == "witness");
  CHECK(doc.at("meta").at("x") == "1/2");
  CHECK(doc.at("meta").at("q") == "p");
  REQUIRE(doc.at("rows").is_array());
  CHECK(doc.at("rows").size() == 50);
  const auto& row = doc.at("rows").at(0);
  for (const char* key :
       {"n", "p_n", "p_n1", "lhs_lo", "lhs_hi", "rhs_lo", "rhs_hi", "verdict"})
    CHECK(row.contains(key));
  CHECK(row.at("n") == 1);
  CHECK(row.at("p_n") == 2);
  CHECK(row.at("verdict") == "STRICTLY_LESS");
  CHECK(doc.at("summary").at("witness_count") == 50);
  CHECK(doc.at("summary").at("per_decade").is_array());
  fs::remove_all(dir);
}

TEST_CASE("cli: records power_gap produces the Andrica-style first value") {
  fs::path dir = fresh_dir("records");
  auto r = run_cached(dir, {"records", "--quantity", "power_gap", "--x", "0.5",
                            "--to", "1000"});
  CHECK(r.code == 0);
  // first record: sqrt(3)-sqrt(2) = 0.3178372...
  CHECK(r.out.find("1,2,3.17837245195782") != std::string::npos);
  CHECK(r.out.find("# upper bound on liminf over scanned range:") !=
        std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("cli: records hypothesis violations exit 2 with the bound cited") {
  fs::path dir = fresh_dir("records-hyp");
  auto r = run_cached(dir, {"records", "--quantity", "power_gap", "--x", "1",
                            "--to", "100"});
  CHECK(r.code == 2);
  CHECK(r.err.find("0 <= x < 1") != std::string::npos);

  auto r2 = run_cached(dir, {"records", "--quantity", "gap_over_px", "--x",
                             "0", "--to", "100"});
  CHECK(r2.code == 2);
  CHECK(r2.err.find("x > 0") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("cli: records gap_over_px starts at one half") {
  fs::path dir = fresh_dir("records-q1");
  auto r = run_cached(dir, {"records", "--quantity", "gap_over_px", "--x", "1",
                            "--to", "100"});
  CHECK(r.code == 0);
  CHECK(r.out.find("1,2,5.0000000000000000e-01,5.0000000000000000e-01") !=
        std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("cli: kummer sufficiency and violations") {
  fs::path dir = fresh_dir("kummer");
  auto r = run_cached(dir, {"kummer", "--a", "1/2^n", "--b", "1", "--q", "1",
                            "--mode", "sufficiency", "--to", "1000"});
  CHECK(r.code == 0);
  CHECK(r.out.find("# all_hold: true") != std::string::npos);

  auto r2 = run_cached(dir, {"kummer", "--a", "1/n", "--b", "1", "--q", "n",
                             "--mode", "violations", "--to", "1000"});
  CHECK(r2.code == 0);
  CHECK(r2.out.find("# violations: 1000") != std::string::npos);
  CHECK(r2.out.find("n,margin_lo,margin_hi,verdict,prec_bits") !=
        std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("cli: kummer constructive recovers q=1 with zero residual") {
  fs::path dir = fresh_dir("kummer-cons");
  auto r = run_cached(dir, {"kummer", "--a", "1/2^n", "--b", "1", "--sum", "1",
                            "--mode", "constructive", "--to", "50"});
  CHECK(r.code == 0);
  CHECK(r.out.find("n,q_lo,q_hi,residual_lo,residual_hi,prec_bits") !=
        std::string::npos);
  // q_n = 1 exactly, residual exactly 0
  CHECK(r.out.find("7,1.0000000000000000e+00,1.0000000000000000e+00,"
                   "0.0000000000000000e+00,0.0000000000000000e+00,0") !=
        std::string::npos);
  CHECK(r.out.find("# rows: 50") != std::string::npos);

  auto bad = run_cached(dir, {"kummer", "--a", "1/2^n", "--b", "1", "--mode",
                              "constructive", "--to", "50"});
  CHECK(bad.code == 2);  // missing --sum
  fs::remove_all(dir);
}

TEST_CASE("cli: identical commands give byte-identical output") {
  fs::path dir = fresh_dir("determinism");
  std::vector<std::string> cmd{"witness", "--x",  "0.5", "--q", "nlogn",
                               "--from",  "1",    "--to", "400"};
  auto a = run_cached(dir, cmd);
  auto b = run_cached(dir, cmd);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);

  // thread count must not affect bytes either
  auto with_threads = [&](const char* t) {
    std::vector<std::string> full{"--threads", t};
    full.insert(full.end(), cmd.begin(), cmd.end());
    return run_cached(dir, full);
  };
  CHECK(with_threads("1").out == with_threads("4").out);
  fs::remove_all(dir);
}

TEST_CASE("cli: output file and env cache dir are honored") {
  fs::path dir = fresh_dir("env");
  fs::path outfile = dir / "report.csv";
  setenv("PGK_CACHE_DIR", dir.c_str(), 1);
  auto r = run({"--output", outfile.string(), "witness", "--x", "1", "--q",
                "1", "--from", "1", "--to", "10"});
  unsetenv("PGK_CACHE_DIR");
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  REQUIRE(fs::exists(outfile));
  std::ifstream f(outfile);
  std::string contents((std::istreambuf_iterator<char>(f)),
                       std::istreambuf_iterator<char>());
  CHECK(contents.find("# witnesses: 10") != std::string::npos);
  CHECK(fs::exists(dir / "primes.pgkc"));
  fs::remove_all(dir);
}

TEST_CASE("cli: malformed input exits 2") {
  fs::path dir = fresh_dir("bad");
  CHECK(run_cached(dir, {"witness", "--x", "1", "--q", "1/(n+", "--to", "10"})
            .code == 2);
  CHECK(run_cached(dir, {"witness", "--x", "abc", "--q", "1", "--to", "10"})
            .code == 2);
  CHECK(run_cached(dir, {"records", "--quantity", "nonsense", "--x", "1",
                         "--to", "10"})
            .code == 2);
  CHECK(run_cached(dir, {"kummer", "--a", "1/n", "--b", "1", "--mode",
                         "sideways", "--q", "1", "--to", "10"})
            .code == 2);
  CHECK(run_cached(dir, {"--bogus-flag", "sieve", "--count", "5"}).code == 2);
  CHECK(run_cached(dir, {}).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("cli: resource limits exit 1") {
  fs::path dir = fresh_dir("resource");
  auto r = run_cached(dir, {"--hard-limit", "1000", "--segment-size", "256",
                            "sieve", "--count", "100000"});
  CHECK(r.code == 1);
  CHECK(r.err.find("hard") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("cli: custom precision ladder is accepted and reported") {
  fs::path dir = fresh_dir("ladder");
  auto r = run_cached(dir, {"--ladder", "64,192", "witness", "--x", "0.5",
                            "--q", "p", "--to", "20"});
  CHECK(r.code == 0);
  CHECK(r.out.find("# policy: ladder=64,192 cap=192") != std::string::npos);

  auto bad = run_cached(dir, {"--ladder", "192,64", "witness", "--x", "0.5",
                              "--q", "p", "--to", "20"});
  CHECK(bad.code == 2);
  fs::remove_all(dir);
}
