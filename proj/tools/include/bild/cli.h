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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bild/cost_model.h"
#include "bild/io.h"
#include "bild/metrics.h"
#include "bild/model_descriptor.h"
#include "bild/policy.h"
#include "bild/sampling.h"

namespace bild::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitVocabMismatch = 2;

struct ModelRef {
  std::filesystem::path path;
  std::optional<ModelKind> kind;  // by extension when unset
};

struct Strategy {
  enum class Kind {
    kBild,
    kVanillaSmall,
    kVanillaLarge,
    kSpeculative,
    kOracleBlend,
    kNoRollback,
    kFixedWindow,
  };
  Kind kind = Kind::kBild;
  double param = 0.0;  // k for speculative/fixed_window, tau for oracle_blend

  // "bild", "vanilla_small", "vanilla_large", "speculative:<k>",
  // "oracle_blend:<tau>", "no_rollback", "fixed_window:<k>".
  static Strategy parse(const std::string& text);
  std::string to_string() const;
};

struct ExperimentConfig {
  ModelRef small_model;
  ModelRef large_model;
  std::optional<std::filesystem::path> vocab;
  std::filesystem::path prompts;
  PolicyConfig policy;
  Sampler sampler;
  std::size_t max_len = 32;
  std::filesystem::path out = "out";
  std::vector<Strategy> strategies{Strategy{}};
  std::vector<double> alpha_fb_grid{0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> alpha_rb_grid{1.0, 2.0, 3.0, 5.0, 10.0};
  ModelDescriptor small_desc = kT5Small;
  ModelDescriptor large_desc = kT5Large;
  Roofline roofline;
  // Model scoring the outputs for the perplexity column; the large model when unset.
  std::optional<ModelRef> eval_model;

  // Relative paths are resolved against `base_dir`.
  static ExperimentConfig parse(const std::string& text, const std::filesystem::path& base_dir);
  static ExperimentConfig load(const std::filesystem::path& path);
};

struct Overrides {
  std::optional<double> alpha_fb;
  std::optional<double> alpha_rb;
  std::optional<int> window_cap;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> strategy;
  std::optional<std::size_t> max_len;
  std::optional<std::filesystem::path> out;
};

void apply_overrides(const Overrides& o, ExperimentConfig& config);

// Loaded models, vocabulary and prompts for a config.
struct Workspace {
  Vocabulary vocab;
  std::unique_ptr<LanguageModel> small;
  std::unique_ptr<LanguageModel> large;
  std::unique_ptr<LanguageModel> eval;  // null when the large model is the evaluator
  std::vector<TokenSeq> prompts;

  const LanguageModel& evaluator() const { return eval ? *eval : *large; }
  static Workspace open(const ExperimentConfig& config);
};

struct StrategyRun {
  DecodeResult result;
  TallyReport tally;
  RunSummary summary;
};

// Decodes prompt `index` with `strategy`. The sampler seed for the prompt is
// derive_seed(config seed, index) for every strategy. The reference for the
// agreement column is the large model's own decode with that sampler.
StrategyRun run_strategy(const Workspace& ws, const ExperimentConfig& config,
                         const Strategy& strategy, const PolicyConfig& policy,
                         std::size_t index);

// Aggregate over prompts: mean agreement and perplexity, percentages from the
// summed counters, speedup from the summed latencies.
RunSummary aggregate(const std::vector<StrategyRun>& runs, const std::string& run_id,
                     const std::string& strategy, const PolicyConfig& policy);

// Indices of rows not dominated in (agreement, modeled_speedup); both higher
// is better. Rows without either value are never on the front.
std::vector<std::size_t> pareto_front(const std::vector<RunSummary>& rows);

int cmd_decode(const ExperimentConfig& config, std::ostream& out);
int cmd_sweep(const ExperimentConfig& config, std::ostream& out);
int cmd_compare(const ExperimentConfig& config, std::ostream& out);
int cmd_cost(const std::filesystem::path& trace, const ModelDescriptor& small,
             const ModelDescriptor& large, const Roofline& roofline,
             std::optional<std::size_t> max_len, const std::optional<std::filesystem::path>& out,
             std::ostream& os);
int cmd_fit(const std::filesystem::path& corpus, const std::filesystem::path& vocab, int order,
            double smoothing, const std::filesystem::path& out, std::ostream& os);
int cmd_align(const ModelRef& large, const std::filesystem::path& prompts,
              const std::optional<std::filesystem::path>& vocab, int order, double smoothing,
              std::size_t max_len, const std::filesystem::path& out, std::ostream& os);
// Writes a ready-to-run synthetic experiment (vocab, models, prompts, config).
int cmd_synth(std::uint64_t seed, const std::filesystem::path& dir, std::ostream& os);

// Full command line entry point. Library errors become exit codes with a
// diagnostic on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bild::cli
