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
#include <span>

#include "bild/lm.h"
#include "bild/sampling.h"
#include "bild/trace.h"

namespace bild {

struct SpecConfig {
  int window = 4;  // draft length k
  std::uint64_t seed = 0;
};

// Element-wise max(0, large - small), renormalized. Falls back to `large` when
// the difference has no mass (the distributions coincide).
ProbDist residual_distribution(const ProbDist& large, const ProbDist& small);

// Probability of keeping a drafted token: min(1, p_large / p_small).
double acceptance_probability(TokenId token, const ProbDist& large, const ProbDist& small);

// Rejection-sampling speculative decoding with a fixed draft window.
//
// Each round drafts up to `window` tokens from the small model (stopping early
// at eos), scores them plus one more position in a single large-model pass,
// and accepts drafts left to right with probability min(1, p_L / p_S). The
// first rejection commits a token drawn from the residual distribution and
// drops the rest of the draft; a fully accepted draft earns one bonus token
// from the large model. Rounds are recorded as fallback events and rejections
// as rejection events, so the counters line up with bild_decode's.
//
// Draws follow the model distributions only when `sampler` is ancestral; any
// other sampler sets result.biased. The rng is seeded from config.seed.
DecodeResult speculative_decode(const LanguageModel& small, const LanguageModel& large,
                                const SpecConfig& config, const Sampler& sampler,
                                std::span<const TokenId> prompt, std::size_t max_len);

}  // namespace bild
