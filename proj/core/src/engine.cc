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

#include "bild/engine.h"

#include <algorithm>

namespace bild {

TokenSeq GenerationState::working_sequence(std::span<const TokenId> prompt) const {
  TokenSeq seq(prompt.begin(), prompt.end());
  seq.insert(seq.end(), committed.begin(), committed.end());
  for (const auto& p : pending) seq.push_back(p.token);
  return seq;
}

TokenSeq GenerationState::pending_tokens() const {
  TokenSeq out;
  out.reserve(pending.size());
  for (const auto& p : pending) out.push_back(p.token);
  return out;
}

namespace {

void check_common(std::span<const TokenId> prompt, std::size_t max_len,
                  const LanguageModel& model) {
  if (max_len < 1) throw InvalidInput("max_len must be >= 1");
  const auto& v = model.vocabulary();
  for (TokenId t : prompt) {
    if (!v.contains(t)) throw InvalidInput("prompt token " + std::to_string(t) + " out of range");
  }
}

// Cuts the sequence to max_len and fills the provenance counters.
void finalize(DecodeResult& r, std::size_t max_len) {
  if (r.sequence.size() > max_len) {
    r.sequence.resize(max_len);
    r.provenance.resize(max_len);
  }
  r.counters.small_tokens = static_cast<int>(
      std::count(r.provenance.begin(), r.provenance.end(), Provenance::kSmall));
  r.counters.large_tokens = static_cast<int>(r.provenance.size()) - r.counters.small_tokens;
}

}  // namespace

DecodeResult vanilla_decode(const LanguageModel& model, std::span<const TokenId> prompt,
                            const Sampler& sampler, std::size_t max_len, Provenance role) {
  check_common(prompt, max_len, model);
  const TokenId eos = model.vocabulary().eos();
  Rng rng(sampler.seed);
  DecodeResult r;
  TokenSeq context(prompt.begin(), prompt.end());
  while (r.sequence.size() < max_len) {
    const int pos = static_cast<int>(r.sequence.size());
    ProbDist dist = model.score_next(context);
    TokenId tok = sample(dist, sampler, rng);
    if (role == Provenance::kSmall) {
      ++r.counters.small_calls;
      ++r.counters.small_emitted;
      r.trace.push_back(event::SmallStep{pos, tok, dist.max()});
    } else {
      ++r.counters.large_calls;
      r.trace.push_back(event::LargeVerify{{pos}, {}});
      r.trace.push_back(event::LargeAppend{pos, tok});
    }
    r.sequence.push_back(tok);
    r.provenance.push_back(role);
    context.push_back(tok);
    if (tok == eos) {
      r.trace.push_back(event::Eos{pos});
      break;
    }
  }
  finalize(r, max_len);
  return r;
}

DecodeResult bild_decode(const LanguageModel& small, const LanguageModel& large,
                         const PolicyConfig& config, const Sampler& sampler,
                         std::span<const TokenId> prompt, std::size_t max_len) {
  require_same_vocabulary(small, large);
  config.validate();
  check_common(prompt, max_len, small);
  const TokenId eos = small.vocabulary().eos();
  const bool fixed = config.fallback_mode == FallbackMode::kFixedWindow;
  const int window = fixed ? config.fixed_window : config.window_cap;

  Rng rng(sampler.seed);
  GenerationState st;
  DecodeResult r;
  auto& c = r.counters;
  bool force_verify = false;  // a drafted eos awaiting verification
  bool finished = false;

  auto commit = [&](TokenId tok, Provenance p) {
    st.committed.push_back(tok);
    st.provenance.push_back(p);
  };

  while (!finished && st.committed.size() < max_len) {
    const int pos = static_cast<int>(st.generated());
    std::optional<FallbackReason> reason;
    if (force_verify) {
      reason = FallbackReason::kForced;
    } else if (window > 0 && st.steps_since_fallback >= window) {
      reason = FallbackReason::kWindowCap;
    } else if (window == 0 && st.generated() >= max_len) {
      break;  // uncapped drafts reached the length limit
    }

    if (!reason) {
      ProbDist ps = small.score_next(st.working_sequence(prompt));
      ++c.small_calls;
      if (!fixed && should_fallback(ps, config)) {
        reason = FallbackReason::kLowConfidence;
      } else {
        TokenId tok = sample(ps, sampler, rng);
        r.trace.push_back(event::SmallStep{pos, tok, ps.max()});
        ++c.small_emitted;
        ++st.steps_since_fallback;
        st.pending.push_back({tok, std::move(ps)});
        if (tok == eos) {
          if (config.verify_eos) {
            force_verify = true;
          } else {
            finished = true;
          }
        }
        continue;
      }
    }

    // Fallback: one large-model pass over the pending window plus the next position.
    r.trace.push_back(event::Fallback{pos, *reason});
    ++c.fallback_count;
    ++c.large_calls;
    const TokenSeq working = st.working_sequence(prompt);
    const std::size_t start = prompt.size() + st.committed.size();
    std::vector<ProbDist> large_dists = score_range(large, working, start);
    const TokenSeq pending = st.pending_tokens();
    std::vector<double> dists = rollback_distances(pending, large_dists);

    event::LargeVerify verify;
    const int first = static_cast<int>(st.committed.size());
    for (int i = 0; i <= static_cast<int>(pending.size()); ++i) verify.positions.push_back(first + i);
    verify.distances = dists;
    r.trace.push_back(std::move(verify));

    auto m = find_rollback_position(pending, large_dists, config);
    if (m) {
      for (std::size_t i = 0; i < *m; ++i) commit(pending[i], Provenance::kSmall);
      TokenId tok = sample(large_dists[*m], sampler, rng);
      const int discarded = static_cast<int>(pending.size() - *m);
      r.trace.push_back(event::Rollback{first + static_cast<int>(*m), discarded, tok});
      ++c.rollback_count;
      c.tokens_discarded += discarded;
      commit(tok, Provenance::kLarge);
    } else {
      for (TokenId t : pending) commit(t, Provenance::kSmall);
      if (!pending.empty() && pending.back() == eos) {
        // Verified eos: nothing follows it.
      } else {
        TokenId tok = sample(large_dists.back(), sampler, rng);
        r.trace.push_back(event::LargeAppend{static_cast<int>(st.committed.size()), tok});
        commit(tok, Provenance::kLarge);
      }
    }
    st.pending.clear();
    st.steps_since_fallback = 0;
    force_verify = false;
    if (st.committed.back() == eos) finished = true;
  }

  for (const auto& p : st.pending) commit(p.token, Provenance::kSmall);
  st.pending.clear();
  if (finished && !st.committed.empty() && st.committed.back() == eos) {
    r.trace.push_back(event::Eos{static_cast<int>(st.committed.size()) - 1});
  }
  r.sequence = std::move(st.committed);
  r.provenance = std::move(st.provenance);
  finalize(r, max_len);
  return r;
}

DecodeResult oracle_blend_decode(const LanguageModel& small, const LanguageModel& large,
                                 double likelihood_threshold, const Sampler& sampler,
                                 std::span<const TokenId> prompt, std::size_t max_len) {
  require_same_vocabulary(small, large);
  check_common(prompt, max_len, small);
  if (!(likelihood_threshold >= 0.0 && likelihood_threshold <= 1.0)) {
    throw InvalidInput("likelihood threshold must lie in [0, 1]");
  }
  const TokenId eos = small.vocabulary().eos();
  Rng rng(sampler.seed);
  DecodeResult r;
  auto& c = r.counters;
  TokenSeq context(prompt.begin(), prompt.end());
  int replaced = 0;
  while (r.sequence.size() < max_len) {
    const int pos = static_cast<int>(r.sequence.size());
    ProbDist ps = small.score_next(context);
    ProbDist pl = large.score_next(context);
    ++c.small_calls;
    ++c.large_calls;
    TokenId tok = sample(ps, sampler, rng);
    if (pl[tok] < likelihood_threshold) {
      tok = sample(pl, sampler, rng);
      ++replaced;
      r.trace.push_back(event::LargeAppend{pos, tok});
      r.provenance.push_back(Provenance::kLarge);
    } else {
      ++c.small_emitted;
      r.trace.push_back(event::SmallStep{pos, tok, ps.max()});
      r.provenance.push_back(Provenance::kSmall);
    }
    r.sequence.push_back(tok);
    context.push_back(tok);
    if (tok == eos) {
      r.trace.push_back(event::Eos{pos});
      break;
    }
  }
  r.engagement = r.sequence.empty() ? 0.0 : static_cast<double>(replaced) / r.sequence.size();
  finalize(r, max_len);
  return r;
}

PolicyConfig apply_ablation(const AblationVariant& variant, PolicyConfig config) {
  switch (variant.kind) {
    case AblationVariant::Kind::kNoRollback:
      config.rollback_enabled = false;
      break;
    case AblationVariant::Kind::kFixedWindow:
      config.fallback_mode = FallbackMode::kFixedWindow;
      config.fixed_window = variant.window;
      break;
  }
  return config;
}

DecodeResult ablation_decode(const AblationVariant& variant, const LanguageModel& small,
                             const LanguageModel& large, const PolicyConfig& config,
                             const Sampler& sampler, std::span<const TokenId> prompt,
                             std::size_t max_len) {
  return bild_decode(small, large, apply_ablation(variant, config), sampler, prompt, max_len);
}

}  // namespace bild
