/* Copyright 2026 The bild Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "bild/cli.h"
#include "bild/io.h"
#include "json.hpp"

namespace bild::cli {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("bild_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "bild");
  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  std::ostringstream out, err;
  int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::size_t line_count(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

// Table models over {a, b, <eos>} plus a 3-prompt file.
fs::path table_experiment(const std::string& name) {
  auto d = fresh_dir(name);
  write_file_atomic(d / "vocab.txt", "a\nb\n<eos>\n");
  write_file_atomic(d / "small.table", "DEFAULT | 0.9 0.05 0.05\n");
  write_file_atomic(d / "large.table", "a a | 0.05 0.05 0.9\nDEFAULT | 0.6 0.3 0.1\n");
  write_file_atomic(d / "prompts.txt", "a\nb b\n-\n");
  write_file_atomic(d / "config.json", R"({
    "small_model": "small.table",
    "large_model": {"path": "large.table", "kind": "table"},
    "vocab": "vocab.txt",
    "prompts": "prompts.txt",
    "policy": {"alpha_fb": 0.5, "alpha_rb": 2.0, "window_cap": 3},
    "max_len": 6,
    "out": "out"
  })");
  return d;
}

TEST(Cli, DecodeWritesTracesAndSummary) {
  auto d = table_experiment("decode");
  auto r = invoke({"decode", (d / "config.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (int i = 0; i < 3; ++i) EXPECT_TRUE(fs::exists(d / "out" / ("trace_p" + std::to_string(i) + ".jsonl")));
  EXPECT_EQ(line_count(read_file(d / "out" / "summary.csv")), 4u);
  auto summary = nlohmann::json::parse(read_file(d / "out" / "summary.json"));
  EXPECT_EQ(summary.size(), 3u);
  EXPECT_EQ(line_count(r.out), 3u);
  EXPECT_FALSE(fs::exists(d / "out" / "summary.csv.tmp"));
}

TEST(Cli, MissingModelNamesPath) {
  auto d = table_experiment("missing");
  fs::remove(d / "large.table");
  auto r = invoke({"decode", (d / "config.json").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("large.table"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(d / "out"));
}

TEST(Cli, MissingConfigNamesPath) {
  auto r = invoke({"decode", "/nonexistent/cfg.json"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("/nonexistent/cfg.json"), std::string::npos);
}

TEST(Cli, MalformedConfig) {
  auto d = fresh_dir("malformed");
  write_file_atomic(d / "config.json", "{\"small_model\": ");
  auto r = invoke({"decode", (d / "config.json").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("config.json"), std::string::npos);
}

TEST(Cli, VocabularyMismatchExitsTwo) {
  auto d = table_experiment("mismatch");
  write_file_atomic(d / "large.table", "DEFAULT | 0.25 0.25 0.25 0.25\n");
  nlohmann::json cfg = nlohmann::json::parse(read_file(d / "config.json"));
  cfg.erase("vocab");
  write_file_atomic(d / "config.json", cfg.dump());
  write_file_atomic(d / "prompts.txt", "0\n");
  EXPECT_EQ(invoke({"decode", (d / "config.json").string()}).code, 2);
}

TEST(Cli, SweepGridRows) {
  auto d = table_experiment("sweep");
  nlohmann::json cfg = nlohmann::json::parse(read_file(d / "config.json"));
  cfg["sweep"] = {{"alpha_fb", {0.0, 0.5}}, {"alpha_rb", {1.0, "inf"}}};
  cfg["policy"]["window_cap"] = 0;
  write_file_atomic(d / "prompts.txt", "a\n");
  write_file_atomic(d / "config.json", cfg.dump());
  auto r = invoke({"sweep", (d / "config.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = read_file(d / "out" / "sweep.csv");
  EXPECT_EQ(line_count(csv), 5u);
  // alpha_fb = 0 rows never fall back.
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  int zero_rows = 0;
  while (std::getline(lines, line)) {
    std::vector<std::string> f;
    std::istringstream in(line);
    for (std::string x; std::getline(in, x, ',');) f.push_back(x);
    ASSERT_EQ(f.size(), 10u);
    if (f[1] == "0.000000") {
      ++zero_rows;
      EXPECT_EQ(f[7], "0.000000");
    }
  }
  EXPECT_EQ(zero_rows, 2);
  EXPECT_TRUE(fs::exists(d / "out" / "pareto.csv"));
}

TEST(Cli, SweepIsByteIdentical) {
  auto d = table_experiment("repeat");
  ASSERT_EQ(invoke({"sweep", (d / "config.json").string(), "--seed", "7"}).code, 0);
  const auto first = read_file(d / "out" / "sweep.csv");
  const auto first_front = read_file(d / "out" / "pareto.csv");
  ASSERT_EQ(invoke({"sweep", (d / "config.json").string(), "--seed", "7"}).code, 0);
  EXPECT_EQ(read_file(d / "out" / "sweep.csv"), first);
  EXPECT_EQ(read_file(d / "out" / "pareto.csv"), first_front);
  EXPECT_EQ(line_count(first), 26u);
}

TEST(Cli, CompareDegenerateEquivalence) {
  auto d = table_experiment("compare");
  nlohmann::json cfg = nlohmann::json::parse(read_file(d / "config.json"));
  cfg["strategies"] = {"bild", "vanilla_large", "speculative:3", "fixed_window:2"};
  cfg["policy"]["alpha_fb"] = 1.01;
  write_file_atomic(d / "config.json", cfg.dump());
  auto r = invoke({"compare", (d / "config.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream csv(read_file(d / "out" / "compare.csv"));
  std::string header, bild, large, spec, fixed;
  std::getline(csv, header);
  std::getline(csv, bild);
  std::getline(csv, large);
  std::getline(csv, spec);
  std::getline(csv, fixed);
  EXPECT_EQ(header.rfind("run_id,alpha_fb,alpha_rb,window_cap,strategy,agreement", 0), 0u);
  auto field = [](const std::string& row, int idx) {
    std::istringstream in(row);
    std::string f;
    for (int i = 0; i <= idx; ++i) std::getline(in, f, ',');
    return f;
  };
  EXPECT_EQ(field(bild, 5), "1.000000");
  EXPECT_EQ(field(large, 5), "1.000000");
  EXPECT_EQ(field(spec, 4), "speculative:3");
  EXPECT_FALSE(field(spec, 8).empty());
}

TEST(Cli, CompareNeedsTwoStrategies) {
  auto d = table_experiment("compare1");
  EXPECT_EQ(invoke({"compare", (d / "config.json").string()}).code, 1);
}

TEST(Cli, OverridesApply) {
  auto d = table_experiment("override");
  auto r = invoke({"decode", (d / "config.json").string(), "--alpha-fb", "1.01", "--max-len", "2",
                   "--strategy", "vanilla_small", "--out", (d / "elsewhere").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = read_file(d / "elsewhere" / "summary.csv");
  EXPECT_NE(csv.find(",vanilla_small,"), std::string::npos);
  EXPECT_NE(csv.find(",1.010000,"), std::string::npos);
  EXPECT_EQ(invoke({"decode", (d / "config.json").string(), "--strategy", "beam"}).code, 1);
  EXPECT_EQ(invoke({"decode", (d / "config.json").string(), "--window-cap", "-1"}).code, 1);
}

TEST(Cli, CostFitAlignSynth) {
  auto d = fresh_dir("tools");
  ASSERT_EQ(invoke({"synth", (d / "exp").string(), "--seed", "2"}).code, 0);
  auto dec = invoke({"decode", (d / "exp" / "config.json").string()});
  ASSERT_EQ(dec.code, 0) << dec.err;

  auto cost = invoke({"cost", (d / "exp" / "out" / "trace_p0.jsonl").string(), "--small", "t5-small",
                      "--large", "t5-large"});
  ASSERT_EQ(cost.code, 0) << cost.err;
  auto tally = nlohmann::json::parse(cost.out);
  EXPECT_GT(tally["mops_ratio"].get<double>(), 0.0);
  EXPECT_EQ(invoke({"cost", (d / "nothing.jsonl").string()}).code, 1);

  write_file_atomic(d / "corpus.txt", "t0 t1 t0 t1\nt1 <eos>\n");
  auto fit = invoke({"fit", (d / "corpus.txt").string(), "--vocab", (d / "exp" / "vocab.txt").string(),
                     "--order", "2", "--out", (d / "fit.json").string()});
  ASSERT_EQ(fit.code, 0) << fit.err;
  EXPECT_EQ(nlohmann::json::parse(read_file(d / "fit.json"))["order"], 2);

  auto align = invoke({"align", (d / "exp" / "large.json").string(), "--prompts",
                       (d / "exp" / "prompts.txt").string(), "--vocab", (d / "exp" / "vocab.txt").string(),
                       "--out", (d / "aligned.json").string()});
  ASSERT_EQ(align.code, 0) << align.err;
  EXPECT_TRUE(fs::exists(d / "aligned.json"));
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(invoke({}).code, 1);
  EXPECT_EQ(invoke({"frobnicate"}).code, 1);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST(Strategy, ParseRoundTrip) {
  for (const char* s : {"bild", "vanilla_small", "vanilla_large", "speculative:4", "no_rollback",
                        "fixed_window:2"}) {
    EXPECT_EQ(Strategy::parse(s).to_string(), s);
  }
  EXPECT_EQ(Strategy::parse("oracle_blend:0.3").to_string(), "oracle_blend:0.300000");
  EXPECT_THROW(Strategy::parse("speculative:0"), InvalidInput);
  EXPECT_THROW(Strategy::parse("speculative:2.5"), InvalidInput);
}

TEST(Pareto, Front) {
  auto row = [](double q, double s) {
    RunSummary r;
    r.agreement_with_reference = q;
    r.modeled_speedup = s;
    return r;
  };
  std::vector<RunSummary> rows{row(1.0, 1.0), row(0.9, 2.0), row(0.8, 1.5), row(0.9, 2.0), RunSummary{}};
  EXPECT_EQ(pareto_front(rows), (std::vector<std::size_t>{0, 1, 3}));
}

}  // namespace
}  // namespace bild::cli
