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

#include "bild/lm.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bild {

Vocabulary::Vocabulary(std::size_t size, TokenId eos, std::vector<std::string> tokens)
    : size_(size), eos_(eos), tokens_(std::move(tokens)) {
  if (size_ < 2) {
    throw InvalidInput("vocabulary needs at least 2 tokens, got " + std::to_string(size_));
  }
  if (!contains(eos_)) {
    throw InvalidInput("eos id " + std::to_string(eos_) + " outside vocabulary of size " +
                       std::to_string(size_));
  }
  if (!tokens_.empty() && tokens_.size() != size_) {
    throw InvalidInput("vocabulary symbol count does not match size");
  }
}

std::string Vocabulary::symbol(TokenId id) const {
  if (has_symbols() && contains(id)) return tokens_[static_cast<std::size_t>(id)];
  return std::to_string(id);
}

std::optional<TokenId> Vocabulary::lookup(const std::string& symbol) const {
  auto it = std::find(tokens_.begin(), tokens_.end(), symbol);
  if (it == tokens_.end()) return std::nullopt;
  return static_cast<TokenId>(it - tokens_.begin());
}

ProbDist::ProbDist(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw InvalidInput("empty probability vector");
  double total = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) {
      throw InvalidInput("probability entries must be finite and non-negative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kNormTolerance) {
    throw InvalidInput("probabilities sum to " + std::to_string(total) + ", expected 1");
  }
}

ProbDist ProbDist::normalized(std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw InvalidInput("weights must be finite and non-negative");
    }
    total += w;
  }
  if (!(total > 0.0)) throw InvalidInput("cannot normalize zero total mass");
  for (double& w : weights) w /= total;
  return ProbDist(std::move(weights));
}

ProbDist ProbDist::uniform(std::size_t size) {
  return ProbDist(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

ProbDist ProbDist::one_hot(std::size_t size, TokenId id) {
  std::vector<double> p(size, 0.0);
  p.at(static_cast<std::size_t>(id)) = 1.0;
  return ProbDist(std::move(p));
}

TokenId ProbDist::argmax() const {
  // std::max_element returns the first maximal element: lowest id wins ties.
  return static_cast<TokenId>(std::max_element(probs_.begin(), probs_.end()) - probs_.begin());
}

double ProbDist::max() const { return *std::max_element(probs_.begin(), probs_.end()); }

std::vector<ProbDist> LanguageModel::score_all(std::span<const TokenId> sequence) const {
  if (sequence.empty()) {
    throw InvalidInput("score_all needs a non-empty sequence; use score_next for position 0");
  }
  check_tokens(sequence);
  std::vector<ProbDist> out;
  out.reserve(sequence.size());
  for (std::size_t m = 1; m <= sequence.size(); ++m) {
    out.push_back(score_next(sequence.first(m)));
  }
  return out;
}

void LanguageModel::check_tokens(std::span<const TokenId> tokens) const {
  const Vocabulary& v = vocabulary();
  for (TokenId t : tokens) {
    if (!v.contains(t)) {
      throw InvalidInput("token id " + std::to_string(t) + " outside vocabulary of size " +
                         std::to_string(v.size()));
    }
  }
}

ProbDist score_next(const LanguageModel& model, std::span<const TokenId> prefix) {
  return model.score_next(prefix);
}

std::vector<ProbDist> score_all(const LanguageModel& model, std::span<const TokenId> sequence) {
  return model.score_all(sequence);
}

std::vector<ProbDist> score_range(const LanguageModel& model,
                                  std::span<const TokenId> sequence,
                                  std::size_t from_len) {
  if (from_len > sequence.size()) throw InvalidInput("score_range start past sequence end");
  std::vector<ProbDist> out;
  out.reserve(sequence.size() - from_len + 1);
  if (from_len == 0) {
    out.push_back(model.score_next({}));
    from_len = 1;
    if (sequence.empty()) return out;
  }
  auto all = model.score_all(sequence);
  for (std::size_t m = from_len; m <= sequence.size(); ++m) out.push_back(std::move(all[m - 1]));
  return out;
}

void require_same_vocabulary(const LanguageModel& a, const LanguageModel& b) {
  const auto& va = a.vocabulary();
  const auto& vb = b.vocabulary();
  if (!(va == vb)) {
    throw ConfigError("vocabulary mismatch: sizes " + std::to_string(va.size()) + " vs " +
                      std::to_string(vb.size()) + ", eos " + std::to_string(va.eos()) + " vs " +
                      std::to_string(vb.eos()));
  }
}

}  // namespace bild
