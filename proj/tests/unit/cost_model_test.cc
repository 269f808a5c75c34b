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

#include "bild/cost_model.h"
#include "bild/engine.h"
#include "test_models.h"

namespace bild {
namespace {

TEST(StepCost, EmptyStep) {
  auto t = step_cost(kMt5Large, 12, 0);
  EXPECT_EQ(t, WorkloadTally{});
}

TEST(StepCost, Formula) {
  // flops 2*P*n; weights P*2 bytes; kv 2*24*1024*2 bytes per entry, (5+3) reads + 3 writes.
  auto t = step_cost(kMt5Large, 5, 3);
  EXPECT_DOUBLE_EQ(t.flops, 2.0 * 409e6 * 3);
  EXPECT_DOUBLE_EQ(t.weight_bytes, 409e6 * 2);
  EXPECT_DOUBLE_EQ(t.kv_bytes, 2.0 * 24 * 1024 * 2 * (8 + 3));
  EXPECT_EQ(t.invocations, 1);
}

TEST(StepCost, ParallelCallParity) {
  auto one = step_cost(kMt5Large, 0, 4);
  WorkloadTally four;
  for (int i = 0; i < 4; ++i) four += step_cost(kMt5Large, i, 1);
  EXPECT_DOUBLE_EQ(one.flops, 2.0 * 409e6 * 4);
  EXPECT_DOUBLE_EQ(four.flops, one.flops);
  EXPECT_DOUBLE_EQ(four.weight_bytes / one.weight_bytes, 4.0);
  EXPECT_GT(one.arithmetic_intensity(), step_cost(kMt5Large, 0, 1).arithmetic_intensity());
}

TEST(StepCost, IntensityIncreasesWithTokens) {
  for (std::int64_t ctx : {0, 16, 512}) {
    double prev = 0.0;
    for (std::int64_t k = 1; k <= 64; ++k) {
      double ai = step_cost(kT5Large, ctx, k).arithmetic_intensity();
      EXPECT_GT(ai, prev);
      prev = ai;
    }
  }
}

TEST(Roofline, LatencyProxy) {
  WorkloadTally t{100.0, 30.0, 10.0, 1};
  EXPECT_DOUBLE_EQ(Roofline{}.latency(t), 40.0);
  EXPECT_DOUBLE_EQ((Roofline{10.0, 2.0}).latency(t), 20.0);
  EXPECT_DOUBLE_EQ((Roofline{1.0, 100.0}).latency(t), 100.0);
}

TEST(TallyTrace, PureLargeIsIdentity) {
  testing::HashLM m(5, 2, 3);
  auto r = vanilla_decode(m, {}, Sampler::greedy(), 12, Provenance::kLarge);
  auto rep = tally_trace(r.trace, kT5Small, kT5Large);
  EXPECT_EQ(rep.bild, rep.vanilla_large_equivalent);
  EXPECT_DOUBLE_EQ(rep.speedup_estimate, 1.0);
  EXPECT_DOUBLE_EQ(rep.mops_ratio, 1.0);
}

TEST(TallyTrace, AllSmallRatioNearParamRatio) {
  testing::HashLM m(5, 2, 3);
  auto r = vanilla_decode(m, {}, Sampler::greedy(), 12, Provenance::kSmall);
  auto rep = tally_trace(r.trace, kT5Small, kT5Large);
  EXPECT_EQ(rep.large.invocations, 0);
  EXPECT_NEAR(rep.mops_ratio, 402.0 / 25.0, 0.2);
}

TEST(TallyTrace, FlopsParityOnDecodeTraces) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    testing::HashLM small(6, 2, seed, 2.0), large(6, 3, seed + 1000, 2.0);
    PolicyConfig c;
    c.alpha_fb = 0.4;
    c.alpha_rb = 1.5;
    c.window_cap = 1 + static_cast<int>(seed % 6);
    auto r = bild_decode(small, large, c, Sampler::greedy(), {}, 20);
    // Re-charge each verification as single-token steps.
    WorkloadTally parallel, serial;
    for (const auto& e : r.trace) {
      if (auto v = std::get_if<event::LargeVerify>(&e)) {
        const auto k = static_cast<std::int64_t>(v->positions.size());
        const auto one = step_cost(kT5Large, v->positions.front(), k);
        WorkloadTally steps;
        for (std::int64_t i = 0; i < k; ++i) steps += step_cost(kT5Large, v->positions.front() + i, 1);
        EXPECT_DOUBLE_EQ(one.flops, steps.flops);
        EXPECT_DOUBLE_EQ(steps.weight_bytes / one.weight_bytes, static_cast<double>(k));
        parallel += one;
        serial += steps;
      }
    }
    EXPECT_DOUBLE_EQ(parallel.flops, serial.flops);
    auto rep = tally_trace(r.trace, kT5Small, kT5Large);
    EXPECT_DOUBLE_EQ(rep.large.flops, parallel.flops);
  }
}

TEST(TallyTrace, Additivity) {
  testing::HashLM m(5, 2, 3);
  auto r1 = vanilla_decode(m, {}, Sampler::greedy(), 6, Provenance::kSmall);
  auto whole = tally_model_calls(r1.trace, kT5Small, kT5Large);
  Trace head(r1.trace.begin(), r1.trace.begin() + 3), tail(r1.trace.begin() + 3, r1.trace.end());
  auto sum = tally_model_calls(head, kT5Small, kT5Large) + tally_model_calls(tail, kT5Small, kT5Large);
  EXPECT_EQ(whole, sum);
}

TEST(TallyTrace, InconsistentTraceThrows) {
  Trace bad{event::SmallStep{3, 0, 0.9}};
  EXPECT_THROW(tally_trace(bad, kT5Small, kT5Large), InvalidTrace);
  Trace verify{event::SmallStep{0, 0, 0.9}, event::Fallback{1, FallbackReason::kWindowCap},
               event::LargeVerify{{0}, {}}};
  EXPECT_THROW(tally_trace(verify, kT5Small, kT5Large), InvalidTrace);
}

TEST(SynthesizeTrace, TracksRates) {
  auto t = synthesize_trace(2000, 0.3233, 0.0641, 10);
  auto replay = replay_trace(t);
  EXPECT_EQ(replay.sequence.size(), 2000u);
  Counters c;
  for (const auto& e : t) {
    if (std::holds_alternative<event::SmallStep>(e)) ++c.small_emitted;
    if (std::holds_alternative<event::Fallback>(e)) ++c.fallback_count;
    if (auto r = std::get_if<event::Rollback>(&e)) c.tokens_discarded += r->tokens_discarded;
  }
  EXPECT_NEAR(fallback_fraction(c), 0.3233, 0.005);
  EXPECT_NEAR(rollback_fraction(c), 0.0641, 0.005);
}

TEST(Descriptor, JsonRoundTrip) {
  const std::string text =
      R"({"layers":24,"hidden_dim":1024,"ffn_dim":2816,"decoder_params":409000000,"bytes_per_param":2})";
  EXPECT_EQ(descriptor_from_json(text), kMt5Large);
  EXPECT_EQ(descriptor_from_json(descriptor_to_json(kT5Small)), kT5Small);
  EXPECT_THROW(descriptor_from_json(R"({"layers":0,"hidden_dim":1,"decoder_params":1})"), InvalidInput);
}

}  // namespace
}  // namespace bild
