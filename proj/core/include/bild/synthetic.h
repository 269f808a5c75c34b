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

namespace bild::synthetic {

// Random Markov source of the given order over `vocab`. Each context puts
// most of its mass on one or two tokens (controlled by `peak` in (0, 1)) and
// gives eos roughly `eos_rate`. With `shared` > 0 that fraction of the
// contexts (order >= 3) copies one distribution per last token, so a bigram
// model sees most of the structure.
NgramLM markov_source(const Vocabulary& vocab, int order, std::uint64_t seed, double peak = 0.6,
                      double eos_rate = 0.05, double shared = 0.0);

// Ancestral samples from `model`, each at most max_len tokens. The i-th
// sample uses derive_seed(seed, i).
std::vector<TokenSeq> sample_corpus(const LanguageModel& model, std::size_t count,
                                    std::size_t max_len, std::uint64_t seed);

// Prompts made of the first 1..max_prompt tokens of fresh source samples.
std::vector<TokenSeq> sample_prompts(const LanguageModel& source, std::size_t count,
                                     std::size_t max_prompt, std::uint64_t seed);

struct TaskParams {
  std::size_t vocab_size = 8;
  int gold_order = 3;
  int large_order = 3;
  int small_order = 2;
  std::size_t large_corpus = 4000;
  std::size_t small_corpus = 150;
  std::size_t sample_len = 24;
  double peak = 0.8;
  double shared = 0.5;
  double smoothing = 0.5;
  std::size_t prompts = 12;
};

// Gold generator plus a large model fit on plenty of its samples and a small
// lower-order model fit on few. The large model has lower held-out perplexity
// under the gold source than the small one.
struct Task {
  Vocabulary vocab;
  NgramLM gold;
  NgramLM large;
  NgramLM small;
  std::vector<TokenSeq> prompts;  // evaluation prompts
  std::vector<TokenSeq> heldout;  // gold samples not used for fitting
};

Task make_task(std::uint64_t seed, const TaskParams& params = {});

// Two sources that agree everywhere except on one phrase: after the token
// "is" one emits "hard", the other "difficult". The small model is fit on the
// first phrasing, the large model on the second.
struct PhrasingTask {
  Vocabulary vocab;
  NgramLM source_small;  // phrasing used by the small model's corpus
  NgramLM source_large;  // phrasing used by the large model's corpus
  NgramLM large;
  NgramLM small;         // fit on the small phrasing corpus
  std::vector<TokenSeq> calibration_prompts;
  std::vector<TokenSeq> heldout_prompts;
  int order = 2;
  double smoothing = 0.5;
  std::size_t max_len = 16;
};

PhrasingTask make_phrasing_task(std::uint64_t seed);

}  // namespace bild::synthetic
