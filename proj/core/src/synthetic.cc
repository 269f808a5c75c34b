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

#include "bild/synthetic.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "bild/alignment.h"
#include "bild/engine.h"
#include "bild/sampling.h"

namespace bild::synthetic {

namespace {

constexpr double kSourceSmoothing = 0.01;
constexpr double kCountScale = 10000.0;

// Every context of length `len` over {kBos} and the vocabulary, with kBos
// only as left padding.
std::vector<TokenSeq> all_contexts(std::size_t vocab_size, std::size_t len) {
  std::vector<TokenSeq> out{TokenSeq{}};
  for (std::size_t pos = 0; pos < len; ++pos) {
    std::vector<TokenSeq> next;
    for (const auto& ctx : out) {
      const bool padding_allowed = ctx.empty() || ctx.back() == kBos;
      if (padding_allowed) {
        auto c = ctx;
        c.push_back(kBos);
        next.push_back(std::move(c));
      }
      for (std::size_t t = 0; t < vocab_size; ++t) {
        auto c = ctx;
        c.push_back(static_cast<TokenId>(t));
        next.push_back(std::move(c));
      }
    }
    out = std::move(next);
  }
  return out;
}

std::vector<std::uint64_t> to_counts(const std::vector<double>& weights) {
  std::vector<std::uint64_t> row(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    row[i] = static_cast<std::uint64_t>(std::llround(weights[i] * kCountScale));
  }
  return row;
}

Vocabulary make_vocab(std::size_t size) {
  std::vector<std::string> symbols;
  for (std::size_t i = 0; i + 1 < size; ++i) symbols.push_back("t" + std::to_string(i));
  symbols.emplace_back("<eos>");
  return Vocabulary(size, static_cast<TokenId>(size - 1), std::move(symbols));
}

TokenSeq strip_eos(TokenSeq s, TokenId eos) {
  while (!s.empty() && s.back() == eos) s.pop_back();
  return s;
}

}  // namespace

NgramLM markov_source(const Vocabulary& vocab, int order, std::uint64_t seed, double peak,
                      double eos_rate, double shared) {
  if (order < 1) throw InvalidInput("markov_source order must be >= 1");
  if (shared < 0.0 || shared > 1.0) throw InvalidInput("markov_source shared must be in [0, 1]");
  const std::size_t v = vocab.size();
  const TokenId eos = vocab.eos();
  auto draw = [&](Rng& rng, bool at_start) {
    const double ctx_peak = std::clamp(peak - 0.25 + 0.55 * rng.uniform(), 0.3, 0.95);
    auto pick = [&] {
      TokenId t;
      do {
        t = static_cast<TokenId>(rng.uniform() * static_cast<double>(v));
      } while (t == eos);
      return t;
    };
    const TokenId dominant = pick();
    TokenId second = pick();
    const double eos_mass = at_start ? 0.0 : eos_rate;
    std::vector<double> w(v, 0.0);
    double rest = std::max(0.0, 1.0 - ctx_peak - eos_mass);
    w[static_cast<std::size_t>(dominant)] += ctx_peak;
    w[static_cast<std::size_t>(second)] += 0.6 * rest;
    double spread = 0.4 * rest;
    std::vector<double> jitter(v, 0.0);
    double jt = 0.0;
    for (std::size_t t = 0; t < v; ++t) {
      if (static_cast<TokenId>(t) == eos) continue;
      jitter[t] = 0.2 + rng.uniform();
      jt += jitter[t];
    }
    for (std::size_t t = 0; t < v; ++t) w[t] += spread * jitter[t] / jt;
    w[static_cast<std::size_t>(eos)] += eos_mass;
    return w;
  };
  Rng rng(seed);
  Rng suffix_rng(derive_seed(seed, 1));
  std::map<TokenId, std::vector<double>> by_last;
  NgramLM::CountTable counts;
  for (const auto& ctx : all_contexts(v, static_cast<std::size_t>(order - 1))) {
    const bool at_start = !ctx.empty() && ctx.back() == kBos;
    if (shared > 0.0 && ctx.size() >= 2 && rng.uniform() < shared) {
      // Same distribution as every other context ending in this token.
      auto it = by_last.find(ctx.back());
      if (it == by_last.end()) it = by_last.emplace(ctx.back(), draw(suffix_rng, at_start)).first;
      counts[ctx] = to_counts(it->second);
    } else {
      counts[ctx] = to_counts(draw(rng, at_start));
    }
  }
  return NgramLM(vocab, order, kSourceSmoothing, std::move(counts));
}

std::vector<TokenSeq> sample_corpus(const LanguageModel& model, std::size_t count,
                                    std::size_t max_len, std::uint64_t seed) {
  std::vector<TokenSeq> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(
        vanilla_decode(model, {}, Sampler::temperature(1.0, derive_seed(seed, i)), max_len).sequence);
  }
  return out;
}

std::vector<TokenSeq> sample_prompts(const LanguageModel& source, std::size_t count,
                                     std::size_t max_prompt, std::uint64_t seed) {
  std::vector<TokenSeq> out;
  out.reserve(count);
  const TokenId eos = source.vocabulary().eos();
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t len = 1 + i % std::max<std::size_t>(1, max_prompt);
    auto s = vanilla_decode(source, {}, Sampler::temperature(1.0, derive_seed(seed, i)), len);
    out.push_back(strip_eos(std::move(s.sequence), eos));
  }
  return out;
}

Task make_task(std::uint64_t seed, const TaskParams& p) {
  Vocabulary vocab = make_vocab(p.vocab_size);
  NgramLM gold = markov_source(vocab, p.gold_order, derive_seed(seed, 0), p.peak, 0.05, p.shared);
  auto large_corpus = sample_corpus(gold, p.large_corpus, p.sample_len, derive_seed(seed, 1));
  auto small_corpus = sample_corpus(gold, p.small_corpus, p.sample_len, derive_seed(seed, 2));
  NgramLM large = fit_ngram(large_corpus, vocab, p.large_order, p.smoothing);
  NgramLM small = fit_ngram(small_corpus, vocab, p.small_order, p.smoothing);
  auto prompts = sample_prompts(gold, p.prompts, 3, derive_seed(seed, 3));
  auto heldout = sample_corpus(gold, 200, p.sample_len, derive_seed(seed, 4));
  return Task{std::move(vocab), std::move(gold),    std::move(large),
              std::move(small), std::move(prompts), std::move(heldout)};
}

PhrasingTask make_phrasing_task(std::uint64_t seed) {
  std::vector<std::string> symbols = {"w0", "w1", "w2", "w3", "w4",
                                      "is", "hard", "difficult", "<eos>"};
  const TokenId is = 5, hard = 6, difficult = 7;
  Vocabulary vocab(symbols.size(), 8, symbols);

  NgramLM base = markov_source(vocab, 2, derive_seed(seed, 10), 0.6, 0.06);
  NgramLM::CountTable counts = base.counts();
  Rng rng(derive_seed(seed, 11));
  for (auto& [ctx, row] : counts) {
    // "is" is common, "difficult" never appears in the small phrasing.
    if (rng.uniform() < 0.4) row[is] += static_cast<std::uint64_t>(0.5 * kCountScale);
    row[hard] += row[difficult];
    row[difficult] = 0;
  }
  // After "is" the phrase word dominates; the phrase words share a continuation.
  auto& after_is = counts[{is}];
  std::fill(after_is.begin(), after_is.end(), 0);
  after_is[hard] = static_cast<std::uint64_t>(0.92 * kCountScale);
  after_is[0] = static_cast<std::uint64_t>(0.08 * kCountScale);
  counts[{difficult}] = counts[{hard}];

  auto swapped = counts;
  for (auto& [ctx, row] : swapped) std::swap(row[hard], row[difficult]);
  std::swap(swapped[{hard}], swapped[{difficult}]);

  PhrasingTask task{vocab,
                    NgramLM(vocab, 2, kSourceSmoothing, counts),
                    NgramLM(vocab, 2, kSourceSmoothing, swapped),
                    NgramLM(vocab, 2, 0.5),
                    NgramLM(vocab, 2, 0.5),
                    {},
                    {}};
  task.large = fit_ngram(sample_corpus(task.source_large, 3000, 20, derive_seed(seed, 12)), vocab,
                         task.order, task.smoothing);
  task.small = fit_ngram(sample_corpus(task.source_small, 300, 20, derive_seed(seed, 13)), vocab,
                         task.order, task.smoothing);
  task.calibration_prompts = sample_prompts(task.source_small, 40, 3, derive_seed(seed, 14));
  task.heldout_prompts = sample_prompts(task.source_small, 40, 3, derive_seed(seed, 15));
  return task;
}

}  // namespace bild::synthetic
