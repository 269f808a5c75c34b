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

#include <cstddef>
#include <span>
#include <vector>

#include "bild/lm.h"
#include "bild/policy.h"
#include "bild/sampling.h"
#include "bild/trace.h"

namespace bild {

// Working state of a collaborative decode. committed followed by the pending
// tokens is the current generated sequence.
struct GenerationState {
  struct PendingToken {
    TokenId token;
    ProbDist small_dist;  // distribution the token was sampled from
  };

  TokenSeq committed;
  std::vector<Provenance> provenance;  // parallel to committed
  std::vector<PendingToken> pending;
  int steps_since_fallback = 0;

  std::size_t generated() const { return committed.size() + pending.size(); }
  // prompt ++ committed ++ pending tokens.
  TokenSeq working_sequence(std::span<const TokenId> prompt) const;
  TokenSeq pending_tokens() const;
};

// Plain autoregressive decoding with one model. Stops after eos or max_len
// tokens. With role kSmall the trace holds small_step events; with kLarge each
// token is a one-position large_verify followed by large_append, which is what
// the cost model charges for a large-model step.
DecodeResult vanilla_decode(const LanguageModel& model, std::span<const TokenId> prompt,
                            const Sampler& sampler, std::size_t max_len,
                            Provenance role = Provenance::kSmall);

// Small/large collaborative decoding with fallback and rollback.
//
// Each iteration either lets the small model draft one more token into the
// pending window or falls back. A fallback scores every pending position plus
// the next one with a single large-model pass, rolls back from the first
// pending token whose distance exceeds alpha_rb (committing a large-model
// replacement there), and otherwise commits the window and appends the large
// model's next token.
//
// max_len bounds the committed sequence. Drafting is bounded by the window cap
// only, so a round may draft past max_len; the result is cut to max_len. With
// window_cap 0 there is no cap and the run ends once the drafted length
// reaches max_len, leaving the last drafts unverified.
// A confident small-model eos ends the run without verification unless
// config.verify_eos is set.
//
// Throws ConfigError when the vocabularies differ.
DecodeResult bild_decode(const LanguageModel& small, const LanguageModel& large,
                         const PolicyConfig& config, const Sampler& sampler,
                         std::span<const TokenId> prompt, std::size_t max_len);

// Both models score every position. The small model's token is kept unless the
// large model gives it probability below `likelihood_threshold`, in which case
// the large model's own sample replaces it. result.engagement holds the
// replaced fraction.
DecodeResult oracle_blend_decode(const LanguageModel& small, const LanguageModel& large,
                                 double likelihood_threshold, const Sampler& sampler,
                                 std::span<const TokenId> prompt, std::size_t max_len);

struct AblationVariant {
  enum class Kind { kNoRollback, kFixedWindow };
  Kind kind = Kind::kNoRollback;
  int window = 1;

  static AblationVariant no_rollback() { return {Kind::kNoRollback, 1}; }
  static AblationVariant fixed_window(int k) { return {Kind::kFixedWindow, k}; }
};

// The policy `config` adjusted for the variant.
PolicyConfig apply_ablation(const AblationVariant& variant, PolicyConfig config);

DecodeResult ablation_decode(const AblationVariant& variant, const LanguageModel& small,
                             const LanguageModel& large, const PolicyConfig& config,
                             const Sampler& sampler, std::span<const TokenId> prompt,
                             std::size_t max_len);

}  // namespace bild
