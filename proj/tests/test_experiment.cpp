// SPDX-License-Identifier: Apache-2.0
//
// relaylink: BER analysis and simulation of opportunistic decode-and-forward relaying
// Copyright (C) 2026 The relaylink authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "relaylink/experiment.hpp"

using namespace relaylink;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("experiment file parsing", "[experiment]") {
  SECTION("minimal file") {
    const auto spec = parse_experiment_text("k = 2,4\nd = 0.1,0.5\nschemes = fscr\n");
    CHECK(spec.ks == std::vector<int>{2, 4});
    CHECK(spec.ds == std::vector<double>{0.1, 0.5});
    CHECK(spec.schemes == std::vector<SchemeKind>{SchemeKind::FSCR});
    CHECK(spec.nu == 2.0);
    CHECK(spec.snr_points().size() == 21);
    CHECK(spec.trials == 10'000'000);
  }
  SECTION("every key, comments and blank lines") {
    const auto spec = parse_experiment_text(
        "# figure\n\nschemes = sr, DSC\nk = 1\nd = 0.25\nnu = 3\nsnr = -5:2.5:5\ntrials = 1e5\nseed = 9\n"
        "out = x.csv\nsampler = tilted\nmin_errors = 50\n");
    CHECK(spec.schemes == std::vector<SchemeKind>{SchemeKind::SR, SchemeKind::DSC});
    CHECK(spec.nu == 3.0);
    CHECK(spec.snr_points() == std::vector<double>{-5.0, -2.5, 0.0, 2.5, 5.0});
    CHECK(spec.trials == 100'000);
    CHECK(spec.seed == 9);
    CHECK(spec.out == "x.csv");
    CHECK(spec.sampler == Sampler::Tilted);
    CHECK(spec.min_errors == 50);
  }
  SECTION("range error names d and its interval") {
    CHECK_THROWS_WITH(parse_experiment_text("schemes = sr\nk = 1\nd = 1.5\n", "cfg"),
                      ContainsSubstring("cfg:3") && ContainsSubstring("d = 1.5") && ContainsSubstring("(0, 1)"));
  }
  SECTION("empty file lists the missing keys") {
    CHECK_THROWS_WITH(parse_experiment_text(""),
                      ContainsSubstring("schemes") && ContainsSubstring("k") && ContainsSubstring("d"));
  }
  SECTION("unknown, duplicate and malformed lines carry line numbers") {
    CHECK_THROWS_WITH(parse_experiment_text("schemes = sr\nfoo = 1\n", "f"), ContainsSubstring("f:2") && ContainsSubstring("foo"));
    CHECK_THROWS_WITH(parse_experiment_text("k = 1\nk = 2\n", "f"), ContainsSubstring("f:2"));
    CHECK_THROWS_WITH(parse_experiment_text("schemes sr\n", "f"), ContainsSubstring("f:1"));
    CHECK_THROWS_WITH(parse_experiment_text("schemes = sr\nk = 1\nd = 0.5\nnu = abc\n", "f"), ContainsSubstring("f:4"));
    CHECK_THROWS_WITH(parse_experiment_text("schemes = sr\nk = 0\nd = 0.5\n", "f"), ContainsSubstring("f:2"));
    CHECK_THROWS_WITH(parse_experiment_text("schemes = mrc\nk = 1\nd = 0.5\n", "f"), ContainsSubstring("f:1"));
    CHECK_THROWS_WITH(parse_experiment_text("schemes = sr\nk = 1\nd = 0.5\nsnr = 0:0:10\n", "f"), ContainsSubstring("step"));
    CHECK_THROWS_WITH(parse_experiment_text("schemes = sr\nk = 1\nd = 0.5\nsnr = 0:10\n", "f"), ContainsSubstring("START:STEP:STOP"));
    CHECK_THROWS_WITH(parse_experiment_text("schemes = sr\nk = 1.5\nd = 0.5\n", "f"), ContainsSubstring("f:2"));
  }
  SECTION("later entries override earlier ones") {
    auto entries = parse_experiment_entries("schemes = sr\nk = 1\nd = 0.5\n", "f");
    entries.push_back({"k", "3", "--k"});
    CHECK(build_experiment_spec(entries).ks == std::vector<int>{3});
    entries.push_back({"d", "7", "--d"});
    CHECK_THROWS_WITH(build_experiment_spec(entries), ContainsSubstring("--d"));
  }
  SECTION("files") {
    const auto path = std::filesystem::temp_directory_path() / "relaylink_test.cfg";
    std::ofstream(path) << "schemes = dsc\nk = 2\nd = 0.3\n";
    CHECK(parse_experiment_file(path.string()).ds == std::vector<double>{0.3});
    std::filesystem::remove(path);
    CHECK_THROWS_AS(parse_experiment_file(path.string()), InvalidArgument);
  }
}

TEST_CASE("analytic sweep", "[experiment]") {
  const auto spec = parse_experiment_text("schemes = sr\nk = 2\nd = 0.5\nnu = 2\nsnr = 0:5:40\n");
  const auto rows = cmd_analytic(spec);
  REQUIRE(rows.size() == 9);
  for (const auto& r : rows) {
    CHECK(r.ber_analytic > 0.0);
    CHECK(r.ber_asymptotic > 0.0);
    CHECK_FALSE(r.ber_sim.has_value());
  }
  CHECK(rows.back().snr_db == 40.0);
  CHECK(rows.back().ber_asymptotic / rows.back().ber_analytic < 2.0);
  CHECK(rows.back().ber_analytic / rows.back().ber_asymptotic < 2.0);

  const auto fscr = cmd_analytic(parse_experiment_text("schemes = fscr\nk = 2\nd = 0.1,0.5\nsnr = 30:1:30\n"));
  REQUIRE(fscr.size() == 2);
  CHECK(fscr[0].d == 0.1);
  CHECK(fscr[0].ber_analytic < fscr[1].ber_analytic);

  CHECK(write_csv(cmd_analytic(spec, 4)) == write_csv(rows));
}

TEST_CASE("simulated sweep", "[experiment]") {
  auto spec = parse_experiment_text("schemes = sr\nk = 2\nd = 0.5\nsnr = -5:5:0\ntrials = 100000\nseed = 5\n");
  const auto rows = cmd_simulate(spec);
  REQUIRE(rows.size() == 2);
  CHECK(*rows[0].ber_sim > 0.1);
  for (const auto& r : rows) {
    REQUIRE(r.ber_sim.has_value());
    CHECK(*r.ci_low <= *r.ber_sim);
    CHECK(*r.ber_sim <= *r.ci_high);
    CHECK(*r.sim_trials > 0);
  }
  CHECK(write_csv(cmd_simulate(spec)) == write_csv(rows));
  CHECK(write_csv(cmd_simulate(spec, 3)) == write_csv(rows));
}

TEST_CASE("CSV", "[experiment]") {
  BerCurvePoint a;
  a.snr_db = 12.5;
  a.scheme = SchemeKind::DSC;
  a.k = 4;
  a.d = 0.1;
  a.nu = 2;
  a.ber_analytic = 1.234567e-5;
  a.ber_asymptotic = 1e-40;
  BerCurvePoint b = a;
  b.ber_sim = 2.5e-3;
  b.sim_trials = 1000000;
  b.sim_errors = 2500;
  b.ci_low = 2.4e-3;
  b.ci_high = 2.6e-3;

  const std::string text = write_csv({a, b});
  CHECK(text.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
  CHECK_THAT(text, ContainsSubstring("12.5,dsc,4,0.1,2,1.23457e-05,0,,,,,\n"));
  CHECK_THAT(text, ContainsSubstring(",2.50000e-03,1000000,2500,2.40000e-03,2.60000e-03\n"));

  const auto back = read_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(write_csv(back) == text);
  CHECK(back[0].ber_asymptotic == 0.0);
  CHECK_FALSE(back[0].ber_sim.has_value());
  CHECK(back[1].sim_errors == 2500u);

  const auto rows = cmd_analytic(parse_experiment_text("schemes = fscr,dsc,sr\nk = 1,3\nd = 0.2\nsnr = 0:10:40\n"));
  CHECK(write_csv(read_csv(write_csv(rows))) == write_csv(rows));

  CHECK_THROWS_AS(read_csv("bad header\n"), ParseError);
  CHECK_THROWS_AS(read_csv(std::string(kCsvHeader) + "\n1,sr,2\n"), ParseError);
}
