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

#include "bild/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace bild {

Agreement agreement(std::span<const TokenId> candidate, std::span<const TokenId> reference) {
  const std::size_t n = std::max(candidate.size(), reference.size());
  if (n == 0) return {1.0, 0};
  const std::size_t overlap = std::min(candidate.size(), reference.size());
  std::size_t matches = 0;
  std::size_t prefix = 0;
  bool in_prefix = true;
  for (std::size_t i = 0; i < overlap; ++i) {
    if (candidate[i] == reference[i]) {
      ++matches;
      if (in_prefix) ++prefix;
    } else {
      in_prefix = false;
    }
  }
  return {static_cast<double>(matches) / static_cast<double>(n), prefix};
}

double perplexity(const LanguageModel& model, const std::vector<TokenSeq>& sequences,
                  const std::vector<TokenSeq>& contexts) {
  if (sequences.empty()) throw InvalidInput("perplexity of an empty sequence list");
  if (!contexts.empty() && contexts.size() != sequences.size()) {
    throw InvalidInput("perplexity contexts must match sequences one-to-one");
  }
  double nll = 0.0;
  std::size_t count = 0;
  for (std::size_t s = 0; s < sequences.size(); ++s) {
    TokenSeq prefix = contexts.empty() ? TokenSeq{} : contexts[s];
    for (TokenId t : sequences[s]) {
      if (!model.vocabulary().contains(t)) throw InvalidInput("perplexity token out of range");
      ProbDist d = model.score_next(prefix);
      nll -= std::log(std::max(d[t], kProbFloor));
      ++count;
      prefix.push_back(t);
    }
  }
  if (count == 0) throw InvalidInput("perplexity needs at least one token");
  return std::exp(nll / static_cast<double>(count));
}

RunSummary summarize(const DecodeResult& result, const TallyReport* tally,
                     const TokenSeq* reference, const LanguageModel* eval_model,
                     const TokenSeq& prompt) {
  RunSummary s;
  s.counters = result.counters;
  s.fallback_pct = fallback_fraction(result.counters);
  s.rollback_pct = rollback_fraction(result.counters);
  if (tally != nullptr) s.modeled_speedup = tally->speedup_estimate;
  if (reference != nullptr) s.agreement_with_reference = agreement(result.sequence, *reference).fraction;
  if (eval_model != nullptr && !result.sequence.empty()) {
    s.perplexity_under_model = perplexity(*eval_model, {result.sequence}, {prompt});
  }
  return s;
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string csv_header() {
  return "run_id,alpha_fb,alpha_rb,window_cap,strategy,agreement,perplexity,fallback_pct,"
         "rollback_pct,modeled_speedup";
}

std::string to_csv_row(const RunSummary& s) {
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  return s.run_id + "," + format_number(s.alpha_fb) + "," + format_number(s.alpha_rb) + "," +
         std::to_string(s.window_cap) + "," + s.strategy + "," + opt(s.agreement_with_reference) +
         "," + opt(s.perplexity_under_model) + "," + format_number(s.fallback_pct) + "," +
         format_number(s.rollback_pct) + "," + opt(s.modeled_speedup);
}

}  // namespace bild
