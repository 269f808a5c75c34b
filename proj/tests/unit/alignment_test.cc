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

#include <gtest/gtest.h>

#include "bild/alignment.h"
#include "bild/engine.h"
#include "bild/metrics.h"
#include "bild/synthetic.h"
#include "bild/table_lm.h"
#include "test_models.h"

namespace bild {
namespace {

constexpr TokenId a = 0, b = 1, eos = 2;
Vocabulary abe() { return Vocabulary(3, 2, {"a", "b", "eos"}); }

TableLM a_then_eos() {
  // Emits a once, then eos.
  TableLM::Rows rows;
  rows.emplace(TokenSeq{}, ProbDist({0.9, 0.05, 0.05}));
  return TableLM(abe(), rows, ProbDist({0.05, 0.05, 0.9}));
}

TEST(GenerateCorpus, Examples) {
  auto stop = TableLM::constant(abe(), ProbDist({0.1, 0.1, 0.8}));
  auto out = generate_corpus(stop, {{a}, {b, b}}, Sampler::greedy(), 5);
  EXPECT_EQ(out, (std::vector<TokenSeq>{{eos}, {eos}}));
  EXPECT_EQ(generate_corpus(a_then_eos(), {{}}, Sampler::greedy(), 5)[0], (TokenSeq{a, eos}));
  auto lm = fit_ngram({{a, b, a, b}}, abe(), 2, 1.0);
  EXPECT_EQ(generate_corpus(lm, {{a}}, Sampler::greedy(), 4)[0], testing::greedy_walk(lm, {a}, 4));
  EXPECT_THROW(generate_corpus(lm, {{a}}, Sampler::greedy(), 0), InvalidInput);
}

// Five identical generations "a eos": counts BOS->a = 5 and a->eos = 5.
TEST(AlignSmall, CountsFromIdenticalGenerations) {
  auto aligned = align_small(a_then_eos(), {{}, {}, {}, {}, {}}, 2, 1.0, 8);
  EXPECT_EQ(aligned.model.count({kBos}, a), 5u);
  EXPECT_EQ(aligned.model.count({a}, eos), 5u);
  EXPECT_DOUBLE_EQ(aligned.model.score_next(TokenSeq{})[a], 6.0 / 8.0);
  EXPECT_DOUBLE_EQ(aligned.model.score_next(TokenSeq{a})[eos], 6.0 / 8.0);
  EXPECT_EQ(aligned.calibration.outputs.size(), 5u);
  EXPECT_EQ(aligned.calibration.joined()[0], (TokenSeq{a, eos}));
  EXPECT_THROW(align_small(a_then_eos(), {}, 2, 1.0, 8), InvalidInput);
}

TEST(AlignSmall, SelfConsistentRefit) {
  synthetic::Task task = synthetic::make_task(5);
  // Same order as the large model and tiny smoothing: every context visited by
  // greedy decoding was seen with a single continuation.
  auto aligned = align_small(task.large, task.prompts, task.large.order(), 0.01, 24);
  for (const auto& p : task.prompts) {
    EXPECT_EQ(vanilla_decode(aligned.model, p, Sampler::greedy(), 24).sequence,
              vanilla_decode(task.large, p, Sampler::greedy(), 24).sequence);
  }
}

TEST(Synthetic, TaskShape) {
  synthetic::Task t = synthetic::make_task(1);
  EXPECT_EQ(t.vocab.size(), 8u);
  EXPECT_EQ(t.prompts.size(), 12u);
  // The large model fits the gold source better than the small one.
  EXPECT_LT(perplexity(t.large, t.heldout), perplexity(t.small, t.heldout));
}

TEST(Synthetic, SharedContextsDependOnLastToken) {
  Vocabulary v(5, 4);
  NgramLM all = synthetic::markov_source(v, 3, 9, 0.8, 0.05, 1.0);
  for (TokenId last = 0; last < 4; ++last) {
    const ProbDist ref = all.score_next(TokenSeq{0, last});
    for (TokenId first = 1; first < 4; ++first) {
      const ProbDist p = all.score_next(TokenSeq{first, last});
      for (TokenId t = 0; t < 5; ++t) EXPECT_DOUBLE_EQ(p[t], ref[t]);
    }
  }
  // Without sharing these two contexts get their own distributions.
  NgramLM none = synthetic::markov_source(v, 3, 9, 0.8, 0.05, 0.0);
  EXPECT_NE(none.score_next(TokenSeq{0, 1})[0], none.score_next(TokenSeq{2, 1})[0]);
  EXPECT_THROW(synthetic::markov_source(v, 3, 9, 0.8, 0.05, 1.5), InvalidInput);
}

}  // namespace
}  // namespace bild
