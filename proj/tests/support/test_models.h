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

// Test-only models and oracles. Nothing here calls into the engine, so the
// library's decode loops can be checked against it.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "bild/lm.h"
#include "bild/policy.h"
#include "bild/trace.h"

namespace bild::testing {

inline std::uint64_t mix(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

// Random but pure model: the distribution depends on a hash of the last
// `order - 1` tokens of the prefix (padded) and the model seed. `sharpness`
// raises random weights to a power, so larger values give peakier rows.
class HashLM final : public LanguageModel {
 public:
  HashLM(std::size_t vocab_size, int order, std::uint64_t seed, double sharpness = 3.0)
      : vocab_(vocab_size, static_cast<TokenId>(vocab_size) - 1),
        order_(order),
        seed_(seed),
        sharpness_(sharpness) {}

  const Vocabulary& vocabulary() const override { return vocab_; }

  ProbDist score_next(std::span<const TokenId> prefix) const override {
    check_tokens(prefix);
    std::uint64_t h = mix(seed_ + 0x1234567ULL);
    const std::size_t k = static_cast<std::size_t>(order_ - 1);
    for (std::size_t i = 0; i < k; ++i) {
      const std::int64_t at = static_cast<std::int64_t>(prefix.size()) - 1 - static_cast<std::int64_t>(i);
      const std::uint64_t tok = at >= 0 ? static_cast<std::uint64_t>(prefix[at]) + 1 : 0;
      h = mix(h ^ (tok + 0x9e3779b97f4a7c15ULL * (i + 1)));
    }
    std::vector<double> w(vocab_.size());
    for (std::size_t t = 0; t < w.size(); ++t) {
      h = mix(h + t + 1);
      const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
      w[t] = std::pow(0.02 + u, sharpness_);
    }
    // Keep eos rare so sequences run for a while.
    w.back() *= 0.15;
    return ProbDist::normalized(std::move(w));
  }

 private:
  Vocabulary vocab_;
  int order_;
  std::uint64_t seed_;
  double sharpness_;
};

inline TokenId greedy_token(const ProbDist& d) {
  TokenId best = 0;
  for (TokenId t = 1; t < static_cast<TokenId>(d.size()); ++t) {
    if (d[t] > d[best]) best = t;
  }
  return best;
}

inline double max_prob(const ProbDist& d) {
  double m = 0.0;
  for (double p : d.probs()) m = std::max(m, p);
  return m;
}

// Greedy autoregressive walk, written out directly.
inline TokenSeq greedy_walk(const LanguageModel& m, const TokenSeq& prompt, std::size_t max_len) {
  TokenSeq ctx = prompt, out;
  while (out.size() < max_len) {
    TokenId t = greedy_token(m.score_next(ctx));
    out.push_back(t);
    ctx.push_back(t);
    if (t == m.vocabulary().eos()) break;
  }
  return out;
}

struct ReferenceRun {
  TokenSeq sequence;
  Trace trace;
  int small_calls = 0;
  int large_calls = 0;
};

// Step-by-step transcription of the collaborative loop for greedy sampling.
// Large-model positions are scored one score_next call at a time.
inline ReferenceRun reference_bild(const LanguageModel& small, const LanguageModel& large,
                                   const PolicyConfig& cfg, const TokenSeq& prompt,
                                   std::size_t max_len) {
  const TokenId eos = small.vocabulary().eos();
  const bool fixed = cfg.fallback_mode == FallbackMode::kFixedWindow;
  const int cap = fixed ? cfg.fixed_window : cfg.window_cap;
  ReferenceRun run;
  TokenSeq done;
  TokenSeq draft;
  bool stop = false;
  bool verify_next = false;
  auto context = [&] {
    TokenSeq c = prompt;
    c.insert(c.end(), done.begin(), done.end());
    c.insert(c.end(), draft.begin(), draft.end());
    return c;
  };
  while (!stop && done.size() < max_len) {
    const int here = static_cast<int>(done.size() + draft.size());
    std::optional<FallbackReason> why;
    if (verify_next) {
      why = FallbackReason::kForced;
    } else if (cap > 0 && static_cast<int>(draft.size()) >= cap) {
      why = FallbackReason::kWindowCap;
    } else if (cap == 0 && done.size() + draft.size() >= max_len) {
      break;
    } else {
      ProbDist ps = small.score_next(context());
      ++run.small_calls;
      if (!fixed && max_prob(ps) < cfg.alpha_fb) {
        why = FallbackReason::kLowConfidence;
      } else {
        TokenId t = greedy_token(ps);
        run.trace.push_back(event::SmallStep{here, t, max_prob(ps)});
        draft.push_back(t);
        if (t == eos) {
          if (cfg.verify_eos) verify_next = true;
          else stop = true;
        }
        continue;
      }
    }
    run.trace.push_back(event::Fallback{here, *why});
    ++run.large_calls;
    TokenSeq base = prompt;
    base.insert(base.end(), done.begin(), done.end());
    event::LargeVerify v;
    std::vector<ProbDist> pl;
    for (std::size_t i = 0; i <= draft.size(); ++i) {
      TokenSeq c = base;
      c.insert(c.end(), draft.begin(), draft.begin() + static_cast<std::ptrdiff_t>(i));
      pl.push_back(large.score_next(c));
      v.positions.push_back(static_cast<int>(done.size() + i));
    }
    std::optional<std::size_t> m;
    for (std::size_t i = 0; i < draft.size(); ++i) {
      const double d = -std::log(std::max(pl[i][draft[i]], 1e-12));
      v.distances.push_back(d);
      if (!m && cfg.rollback_enabled && d > cfg.alpha_rb) m = i;
    }
    run.trace.push_back(v);
    const int start = static_cast<int>(done.size());
    if (m) {
      done.insert(done.end(), draft.begin(), draft.begin() + static_cast<std::ptrdiff_t>(*m));
      TokenId t = greedy_token(pl[*m]);
      run.trace.push_back(event::Rollback{start + static_cast<int>(*m),
                                          static_cast<int>(draft.size() - *m), t});
      done.push_back(t);
    } else {
      done.insert(done.end(), draft.begin(), draft.end());
      if (draft.empty() || draft.back() != eos) {
        TokenId t = greedy_token(pl.back());
        run.trace.push_back(event::LargeAppend{static_cast<int>(done.size()), t});
        done.push_back(t);
      }
    }
    draft.clear();
    verify_next = false;
    if (done.back() == eos) stop = true;
  }
  done.insert(done.end(), draft.begin(), draft.end());
  if (stop && done.back() == eos) run.trace.push_back(event::Eos{static_cast<int>(done.size()) - 1});
  if (done.size() > max_len) done.resize(max_len);
  run.sequence = done;
  return run;
}

// Total-variation distance between a normalized histogram and `p`.
inline double tv_distance(const std::vector<double>& empirical, std::span<const double> p) {
  double tv = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(empirical[i] - p[i]);
  return 0.5 * tv;
}

}  // namespace bild::testing
