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

#include <optional>
#include <string>
#include <vector>

#include "bild/cost_model.h"
#include "bild/lm.h"
#include "bild/trace.h"

namespace bild {

struct Agreement {
  double fraction = 0.0;  // matching positions / max(len)
  std::size_t common_prefix = 0;
};

// Position-wise agreement; the shorter sequence is padded with a sentinel
// that matches nothing. Two empty sequences agree fully.
Agreement agreement(std::span<const TokenId> candidate, std::span<const TokenId> reference);

// exp of the mean negative log-probability (natural log, floored at
// kProbFloor) of every token given its prefix. When `contexts` is non-empty,
// contexts[i] is prepended to sequences[i] as conditioning and not scored.
// Throws InvalidInput when there is nothing to score.
double perplexity(const LanguageModel& model, const std::vector<TokenSeq>& sequences,
                  const std::vector<TokenSeq>& contexts = {});

struct RunSummary {
  std::string run_id;
  std::string strategy;
  double alpha_fb = 0.0;
  double alpha_rb = 0.0;
  int window_cap = 0;
  std::optional<double> agreement_with_reference;
  std::optional<double> perplexity_under_model;
  double fallback_pct = 0.0;
  double rollback_pct = 0.0;
  std::optional<double> modeled_speedup;
  // Extra columns carried for comparisons; not part of the CSV row.
  Counters counters;
};

// fallback_pct = fallbacks / decode iterations; rollback_pct = discarded /
// small-emitted tokens (0 when nothing was drafted). Optional fields stay
// empty when their inputs are absent.
RunSummary summarize(const DecodeResult& result, const TallyReport* tally,
                     const TokenSeq* reference, const LanguageModel* eval_model,
                     const TokenSeq& prompt = {});

// CSV column order:
// run_id,alpha_fb,alpha_rb,window_cap,strategy,agreement,perplexity,fallback_pct,rollback_pct,modeled_speedup
std::string csv_header();
std::string to_csv_row(const RunSummary& s);

// Fixed-precision number formatting shared by all CSV writers.
std::string format_number(double v);

}  // namespace bild
