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
#include <random>
#include <string>
#include <vector>

#include "bild/lm.h"

namespace bild {

// Seeded uniform source. Every sampling decision consumes exactly one draw,
// so a run is reproducible from its seed and the order of decisions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform double in [0, 1) built from the top 53 bits of one engine output.
  // Portable across standard library implementations.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

enum class SamplerKind { kGreedy, kNucleus, kTemperature };

struct Sampler {
  SamplerKind kind = SamplerKind::kGreedy;
  double param = 1.0;  // top-p for nucleus, temperature for temperature
  std::uint64_t seed = 0;

  static Sampler greedy(std::uint64_t seed = 0) { return {SamplerKind::kGreedy, 1.0, seed}; }
  static Sampler nucleus(double p, std::uint64_t seed = 0);
  static Sampler temperature(double t, std::uint64_t seed = 0);

  bool is_greedy() const { return kind == SamplerKind::kGreedy; }
  // True when draws follow the model distribution unchanged.
  bool is_ancestral() const {
    return (kind == SamplerKind::kTemperature && param == 1.0) ||
           (kind == SamplerKind::kNucleus && param == 1.0);
  }

  std::string to_string() const;
  // Accepts "greedy", "nucleus:<p>", "temperature:<t>".
  static Sampler parse(const std::string& spec, std::uint64_t seed = 0);
};

// Smallest set of ids, taken in descending-probability order (ties toward the
// lower id), whose cumulative mass reaches p. Returned in ascending id order.
std::vector<TokenId> nucleus_support(const ProbDist& dist, double p);

// Picks a token using one draw u in [0, 1).
//   greedy: argmax, ties toward the lowest id (u is ignored).
//   nucleus(p): inverse CDF over the renormalized nucleus, ascending id order.
//   temperature(t): inverse CDF over probs^(1/t) renormalized.
TokenId sample_with(const ProbDist& dist, const Sampler& sampler, double u);

// Draws u from rng and calls sample_with.
TokenId sample(const ProbDist& dist, const Sampler& sampler, Rng& rng);

// Inverse CDF in ascending id order; the first id whose cumulative mass
// exceeds u * total. Zero-weight ids are never returned.
TokenId inverse_cdf(std::span<const double> weights, double u);

}  // namespace bild
