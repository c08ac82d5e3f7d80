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

// relaylink: closed-form and simulated BER curves for opportunistic DF relaying.
//
//   relaylink analytic  --config experiments/fig1.cfg --out fig1.csv
//   relaylink simulate  --schemes sr --k 2 --d 0.5 --nu 2 --snr 0:2:20 --trials 1e6
//   relaylink validate
//
// Exit status: 0 success, 1 validation or runtime failure, 2 usage error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "relaylink/relaylink.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

unsigned worker_count() {
  const char* env = std::getenv("RELAYLINK_THREADS");
  if (env == nullptr || *env == '\0') return std::max(1U, std::thread::hardware_concurrency());
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 4096) {
    throw UsageError(std::string("RELAYLINK_THREADS must be a positive integer, got '") + env + "'");
  }
  return static_cast<unsigned>(v);
}

// Sweep flags as they arrive from the command line; every set flag becomes
// a config entry placed after the file's entries, so it wins.
struct SweepFlags {
  std::string config;
  std::vector<std::pair<std::string, std::optional<std::string>>> values = {
      {"schemes", {}}, {"k", {}},   {"d", {}},   {"nu", {}},      {"snr", {}},
      {"trials", {}},  {"seed", {}}, {"out", {}}, {"sampler", {}}, {"min_errors", {}}};

  void attach(CLI::App& cmd) {
    cmd.add_option("--config", config, "experiment file of 'key = value' lines");
    for (auto& [key, value] : values) {
      std::string flag = "--" + key;
      for (auto& ch : flag) ch = ch == '_' ? '-' : ch;
      cmd.add_option(flag, value, "overrides '" + key + "' from the config file");
    }
  }

  relaylink::ExperimentSpec build() const {
    std::vector<relaylink::SpecEntry> entries;
    if (!config.empty()) {
      entries = relaylink::parse_experiment_entries(relaylink::read_text_file(config), config);
    }
    for (const auto& [key, value] : values) {
      if (value) entries.push_back({key, *value, "--" + key});
    }
    return relaylink::build_experiment_spec(entries);
  }
};

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fflush(stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out.flush()) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BER of opportunistic decode-and-forward relaying (FSCR, DSC, SR) over Rayleigh fading"};
  app.require_subcommand(1);

  SweepFlags analytic_flags, simulate_flags;
  auto* analytic = app.add_subcommand("analytic", "closed-form and asymptotic BER curves as CSV");
  analytic_flags.attach(*analytic);
  auto* simulate = app.add_subcommand("simulate", "closed-form curves plus Monte Carlo estimates as CSV");
  simulate_flags.attach(*simulate);
  auto* validate = app.add_subcommand("validate", "run the closed-form self-check suite");
  std::string validate_out;
  validate->add_option("--out", validate_out, "write the report here instead of standard output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const unsigned threads = worker_count();
    if (*validate) {
      const auto report = relaylink::cmd_validate();
      emit(report.to_text(), validate_out);
      return report.all_passed() ? kExitOk : kExitFailure;
    }
    const bool sim = static_cast<bool>(*simulate);
    const auto spec = (sim ? simulate_flags : analytic_flags).build();
    const auto rows = sim ? relaylink::cmd_simulate(spec, threads) : relaylink::cmd_analytic(spec, threads);
    emit(relaylink::write_csv(rows), spec.out);
    return kExitOk;
  } catch (const UsageError& e) {
    std::cerr << "relaylink: " << e.what() << "\n";
    return kExitUsage;
  } catch (const relaylink::InvalidArgument& e) {
    std::cerr << "relaylink: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "relaylink: " << e.what() << "\n";
    return kExitFailure;
  }
}
