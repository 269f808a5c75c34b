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
#include <map>
#include <string>
#include <vector>

#include "bild/lm.h"

namespace bild {

// Context slot used for positions before the start of a sequence. It is not a
// member of any vocabulary and is never sampled.
inline constexpr TokenId kBos = -1;

// Add-lambda smoothed n-gram model:
//   p(t | c) = (count(c, t) + lambda) / (sum_t' count(c, t') + lambda * V)
// where c is the last (order - 1) tokens of the prefix, left-padded with kBos.
class NgramLM final : public LanguageModel {
 public:
  using Context = TokenSeq;
  using CountTable = std::map<Context, std::vector<std::uint64_t>>;

  NgramLM(Vocabulary vocab, int order, double smoothing, CountTable counts = {});

  const Vocabulary& vocabulary() const override { return vocab_; }
  ProbDist score_next(std::span<const TokenId> prefix) const override;

  int order() const { return order_; }
  double smoothing() const { return smoothing_; }
  const CountTable& counts() const { return counts_; }
  std::uint64_t count(const Context& context, TokenId next) const;

  // Conditioning context for the next position after `prefix`.
  Context context_of(std::span<const TokenId> prefix) const;

  // JSON document:
  //   {"order", "smoothing", "vocab_size", "eos", "counts": [[[ctx ids], token, count], ...]}
  // with kBos written as -1.
  std::string to_json() const;
  // `vocab` supplies symbols; when absent the vocabulary is built from the
  // document's vocab_size and eos.
  static NgramLM from_json(const std::string& text, const Vocabulary* vocab = nullptr);

 private:
  Vocabulary vocab_;
  int order_;
  double smoothing_;
  CountTable counts_;
};

// Counts every length-`order` window of every sequence (with kBos padding) and
// returns the smoothed model. Sequences are used as given; no eos is appended.
// When `contexts` is non-empty, contexts[i] conditions corpus[i]: its tokens
// fill the n-gram contexts but are not counted as targets.
NgramLM fit_ngram(const std::vector<TokenSeq>& corpus, const Vocabulary& vocab, int order,
                  double smoothing, const std::vector<TokenSeq>& contexts = {});

}  // namespace bild
