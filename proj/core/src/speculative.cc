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

#include "bild/speculative.h"

#include <algorithm>

#include "bild/engine.h"
#include "bild/policy.h"

namespace bild {

ProbDist residual_distribution(const ProbDist& large, const ProbDist& small) {
  if (large.size() != small.size()) throw InvalidInput("residual over mismatched distributions");
  std::vector<double> w(large.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    auto id = static_cast<TokenId>(i);
    w[i] = std::max(0.0, large[id] - small[id]);
    total += w[i];
  }
  if (!(total > 0.0)) return large;
  return ProbDist::normalized(std::move(w));
}

double acceptance_probability(TokenId token, const ProbDist& large, const ProbDist& small) {
  const double ps = small[token];
  if (!(ps > 0.0)) return 1.0;
  return std::clamp(large[token] / ps, 0.0, 1.0);
}

DecodeResult speculative_decode(const LanguageModel& small, const LanguageModel& large,
                                const SpecConfig& config, const Sampler& sampler,
                                std::span<const TokenId> prompt, std::size_t max_len) {
  require_same_vocabulary(small, large);
  if (config.window < 1) throw InvalidInput("speculative window must be >= 1");
  if (max_len < 1) throw InvalidInput("max_len must be >= 1");
  for (TokenId t : prompt) {
    if (!small.vocabulary().contains(t)) throw InvalidInput("prompt token out of range");
  }
  const TokenId eos = small.vocabulary().eos();
  Rng rng(config.seed);
  GenerationState st;
  DecodeResult r;
  r.biased = !sampler.is_ancestral();
  auto& c = r.counters;
  bool finished = false;

  auto commit = [&](TokenId tok, Provenance p) {
    st.committed.push_back(tok);
    st.provenance.push_back(p);
  };

  while (!finished && st.committed.size() < max_len) {
    const int first = static_cast<int>(st.committed.size());
    bool draft_hit_eos = false;
    for (int i = 0; i < config.window; ++i) {
      ProbDist ps = small.score_next(st.working_sequence(prompt));
      ++c.small_calls;
      TokenId tok = sample(ps, sampler, rng);
      r.trace.push_back(event::SmallStep{static_cast<int>(st.generated()), tok, ps.max()});
      ++c.small_emitted;
      st.pending.push_back({tok, std::move(ps)});
      if (tok == eos) {
        draft_hit_eos = true;
        break;
      }
    }

    const auto reason = draft_hit_eos && static_cast<int>(st.pending.size()) < config.window
                            ? FallbackReason::kForced
                            : FallbackReason::kWindowCap;
    r.trace.push_back(event::Fallback{static_cast<int>(st.generated()), reason});
    ++c.fallback_count;
    ++c.large_calls;
    const TokenSeq working = st.working_sequence(prompt);
    std::vector<ProbDist> large_dists =
        score_range(large, working, prompt.size() + st.committed.size());
    const TokenSeq pending = st.pending_tokens();

    event::LargeVerify verify;
    for (int i = 0; i <= static_cast<int>(pending.size()); ++i) verify.positions.push_back(first + i);
    verify.distances = rollback_distances(pending, large_dists);
    r.trace.push_back(std::move(verify));

    std::optional<std::size_t> rejected;
    for (std::size_t i = 0; i < pending.size(); ++i) {
      double accept = acceptance_probability(pending[i], large_dists[i], st.pending[i].small_dist);
      if (!(rng.uniform() < accept)) {
        rejected = i;
        break;
      }
    }

    if (rejected) {
      const std::size_t m = *rejected;
      for (std::size_t i = 0; i < m; ++i) commit(pending[i], Provenance::kSmall);
      ProbDist residual = residual_distribution(large_dists[m], st.pending[m].small_dist);
      TokenId tok = sample(residual, sampler, rng);
      const int discarded = static_cast<int>(pending.size() - m);
      r.trace.push_back(event::Rollback{first + static_cast<int>(m), discarded, tok, true});
      ++c.rollback_count;
      c.tokens_discarded += discarded;
      commit(tok, Provenance::kLarge);
    } else {
      for (TokenId t : pending) commit(t, Provenance::kSmall);
      if (pending.back() != eos) {
        TokenId tok = sample(large_dists.back(), sampler, rng);
        r.trace.push_back(event::LargeAppend{static_cast<int>(st.committed.size()), tok});
        commit(tok, Provenance::kLarge);
      }
    }
    st.pending.clear();
    if (st.committed.back() == eos) finished = true;
  }

  if (finished) r.trace.push_back(event::Eos{static_cast<int>(st.committed.size()) - 1});
  r.sequence = std::move(st.committed);
  r.provenance = std::move(st.provenance);
  if (r.sequence.size() > max_len) {
    r.sequence.resize(max_len);
    r.provenance.resize(max_len);
  }
  c.small_tokens = static_cast<int>(
      std::count(r.provenance.begin(), r.provenance.end(), Provenance::kSmall));
  c.large_tokens = static_cast<int>(r.provenance.size()) - c.small_tokens;
  return r;
}

}  // namespace bild
