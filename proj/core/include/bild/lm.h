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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bild/model_descriptor.h"

namespace bild {

using TokenId = std::int32_t;
using TokenSeq = std::vector<TokenId>;

// Lower bound applied to probabilities before taking a logarithm.
inline constexpr double kProbFloor = 1e-12;
// Normalization tolerance for ProbDist.
inline constexpr double kNormTolerance = 1e-9;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: out-of-range token ids, empty inputs, bad distributions.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Components that cannot be combined, e.g. models over different vocabularies.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class Vocabulary {
 public:
  // Dense ids [0, size). Display strings are optional; when given there must
  // be exactly one per id.
  Vocabulary(std::size_t size, TokenId eos, std::vector<std::string> tokens = {});

  std::size_t size() const { return size_; }
  TokenId eos() const { return eos_; }
  bool contains(TokenId id) const {
    return id >= 0 && static_cast<std::size_t>(id) < size_;
  }
  bool has_symbols() const { return !tokens_.empty(); }
  const std::vector<std::string>& symbols() const { return tokens_; }

  // Display string for `id`, or its decimal form when no symbols are attached.
  std::string symbol(TokenId id) const;
  std::optional<TokenId> lookup(const std::string& symbol) const;

  bool operator==(const Vocabulary& other) const {
    return size_ == other.size_ && eos_ == other.eos_;
  }

 private:
  std::size_t size_;
  TokenId eos_;
  std::vector<std::string> tokens_;
};

// Normalized probability vector over a vocabulary.
class ProbDist {
 public:
  // Validates: non-empty, entries finite and >= 0, sum within kNormTolerance of 1.
  explicit ProbDist(std::vector<double> probs);

  // Scales non-negative weights to sum to one. Throws InvalidInput when the
  // total mass is zero.
  static ProbDist normalized(std::vector<double> weights);
  static ProbDist uniform(std::size_t size);
  static ProbDist one_hot(std::size_t size, TokenId id);

  std::size_t size() const { return probs_.size(); }
  double operator[](TokenId id) const { return probs_[static_cast<std::size_t>(id)]; }
  std::span<const double> probs() const { return probs_; }

  // Lowest id among the maximal entries.
  TokenId argmax() const;
  double max() const;

  bool operator==(const ProbDist& other) const = default;

 private:
  std::vector<double> probs_;
};

// A pure mapping from a token prefix to next-token distributions.
//
// Implementations must be immutable after construction so a single instance
// can be shared by concurrent decode runs.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;

  virtual const Vocabulary& vocabulary() const = 0;

  // Distribution over the token following `prefix`. An empty prefix asks for
  // the first position.
  virtual ProbDist score_next(std::span<const TokenId> prefix) const = 0;

  // One distribution per position m = 1..n, the m-th conditioned on
  // sequence[0, m). Element-wise identical to calling score_next on each
  // prefix. The position-0 distribution is not included.
  virtual std::vector<ProbDist> score_all(std::span<const TokenId> sequence) const;

  // Shape used by the cost model; absent for models without one.
  const std::optional<ModelDescriptor>& descriptor() const { return descriptor_; }
  void set_descriptor(ModelDescriptor d) { descriptor_ = d; }

 protected:
  // Throws InvalidInput if any token is outside the vocabulary.
  void check_tokens(std::span<const TokenId> tokens) const;

 private:
  std::optional<ModelDescriptor> descriptor_;
};

// Free-function forms of the model contract.
ProbDist score_next(const LanguageModel& model, std::span<const TokenId> prefix);
std::vector<ProbDist> score_all(const LanguageModel& model, std::span<const TokenId> sequence);

// Distributions for every prefix length in [from_len, sequence.size()], i.e.
// sequence.size() - from_len + 1 entries. Models a single parallel scoring
// pass that reuses cached state for the first from_len tokens.
std::vector<ProbDist> score_range(const LanguageModel& model,
                                  std::span<const TokenId> sequence,
                                  std::size_t from_len);

// Throws ConfigError when the two models disagree on vocabulary size or eos.
void require_same_vocabulary(const LanguageModel& a, const LanguageModel& b);

}  // namespace bild
