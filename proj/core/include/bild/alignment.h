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
#include <vector>

#include "bild/lm.h"
#include "bild/ngram_lm.h"
#include "bild/sampling.h"

namespace bild {

// Prompts paired with the large model's continuations.
struct CalibrationSet {
  std::vector<TokenSeq> inputs;
  std::vector<TokenSeq> outputs;

  // prompt ++ output for every pair.
  std::vector<TokenSeq> joined() const;
};

// Decodes each prompt with `model` until eos or max_len. Prompt i uses an rng
// seeded from (sampler.seed, i), so outputs do not depend on evaluation order.
std::vector<TokenSeq> generate_corpus(const LanguageModel& model,
                                      const std::vector<TokenSeq>& prompts,
                                      const Sampler& sampler, std::size_t max_len);

struct AlignedModel {
  NgramLM model;
  CalibrationSet calibration;
};

// Refits a small n-gram on the large model's greedy continuations of
// `prompts`. Only continuation tokens are counted; each prompt serves as
// conditioning context.
AlignedModel align_small(const LanguageModel& large, const std::vector<TokenSeq>& prompts,
                         int order, double smoothing, std::size_t max_len);

// Seed for the i-th independent stream derived from `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace bild
