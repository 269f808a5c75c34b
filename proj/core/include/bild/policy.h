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

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bild/lm.h"

namespace bild {

// Largest value the rollback distance can take: -ln(kProbFloor).
inline const double kMaxDistance = -std::log(kProbFloor);

enum class FallbackMode { kConfidence, kFixedWindow };

struct PolicyConfig {
  double alpha_fb = 0.5;
  double alpha_rb = 2.0;
  int window_cap = 10;  // 0: no cap
  bool rollback_enabled = true;
  FallbackMode fallback_mode = FallbackMode::kConfidence;
  int fixed_window = 1;  // k for FallbackMode::kFixedWindow
  // Run one large-model verification before accepting an eos drafted by the
  // small model. Off by default: a confident small-model eos ends the run.
  bool verify_eos = false;

  // Throws InvalidInput on negative thresholds or windows.
  void validate() const;

  // {"alpha_fb", "alpha_rb", "window_cap", "rollback_enabled", "fallback_mode"}
  // with fallback_mode "confidence" or "fixed_window:<k>". Infinite alpha_rb is
  // written as the string "inf".
  std::string to_json() const;
  static PolicyConfig from_json(const std::string& text);
};

// True iff the small model's top probability is strictly below alpha_fb.
bool should_fallback(const ProbDist& small_dist, const PolicyConfig& config);

// Cross-entropy of the hard label `chosen` under `large_dist`, in nats, with
// the probability clamped to kProbFloor.
double distance(TokenId chosen, const ProbDist& large_dist);

// Smallest index i whose distance strictly exceeds alpha_rb; none when
// rollback is disabled. large_dists[i] is the large model's distribution for
// the position at which pending_tokens[i] was emitted.
std::optional<std::size_t> find_rollback_position(std::span<const TokenId> pending_tokens,
                                                  std::span<const ProbDist> large_dists,
                                                  const PolicyConfig& config);

// distance() for each pending position.
std::vector<double> rollback_distances(std::span<const TokenId> pending_tokens,
                                       std::span<const ProbDist> large_dists);

}  // namespace bild
