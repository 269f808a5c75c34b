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

#include "bild/alignment.h"

#include "bild/engine.h"

namespace bild {

std::vector<TokenSeq> CalibrationSet::joined() const {
  std::vector<TokenSeq> out;
  out.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    TokenSeq s = inputs[i];
    s.insert(s.end(), outputs[i].begin(), outputs[i].end());
    out.push_back(std::move(s));
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  // splitmix64 finalizer over the combined value.
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<TokenSeq> generate_corpus(const LanguageModel& model,
                                      const std::vector<TokenSeq>& prompts,
                                      const Sampler& sampler, std::size_t max_len) {
  if (max_len < 1) throw InvalidInput("max_len must be >= 1");
  std::vector<TokenSeq> out;
  out.reserve(prompts.size());
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    Sampler s = sampler;
    s.seed = derive_seed(sampler.seed, i);
    out.push_back(vanilla_decode(model, prompts[i], s, max_len).sequence);
  }
  return out;
}

AlignedModel align_small(const LanguageModel& large, const std::vector<TokenSeq>& prompts,
                         int order, double smoothing, std::size_t max_len) {
  if (prompts.empty()) throw InvalidInput("align_small: no calibration prompts");
  CalibrationSet cal;
  cal.inputs = prompts;
  cal.outputs = generate_corpus(large, prompts, Sampler::greedy(), max_len);
  NgramLM model = fit_ngram(cal.outputs, large.vocabulary(), order, smoothing, cal.inputs);
  return {std::move(model), std::move(cal)};
}

}  // namespace bild
