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

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bild/lm.h"

namespace bild {

class InvalidTrace : public Error {
 public:
  using Error::Error;
};

enum class Provenance { kSmall, kLarge };
enum class FallbackReason { kLowConfidence, kWindowCap, kForced };

const char* to_string(FallbackReason reason);

// Positions count generated tokens only; the prompt is not included.
namespace event {

// The small model emitted `token` into the pending window.
struct SmallStep {
  int position;
  TokenId token;
  double max_prob;
  bool operator==(const SmallStep&) const = default;
};

struct Fallback {
  int position;
  FallbackReason reason;
  bool operator==(const Fallback&) const = default;
};

// One parallel large-model call. `positions` covers every pending position
// plus the next one; `distances` holds one entry per pending position.
struct LargeVerify {
  std::vector<int> positions;
  std::vector<double> distances;
  bool operator==(const LargeVerify&) const = default;
};

// Pending tokens from `position` on are discarded and `replacement` (drawn
// from the large model) is committed at `position`. `rejection` marks the
// speculative-sampling variant.
struct Rollback {
  int position;
  int tokens_discarded;
  TokenId replacement;
  bool rejection = false;
  bool operator==(const Rollback&) const = default;
};

// All pending tokens are committed and `token` from the large model follows.
struct LargeAppend {
  int position;
  TokenId token;
  bool operator==(const LargeAppend&) const = default;
};

struct Eos {
  int position;
  bool operator==(const Eos&) const = default;
};

}  // namespace event

using TraceEvent = std::variant<event::SmallStep, event::Fallback, event::LargeVerify,
                                event::Rollback, event::LargeAppend, event::Eos>;
using Trace = std::vector<TraceEvent>;

struct Counters {
  int small_tokens = 0;      // final tokens that came from the small model
  int large_tokens = 0;      // final tokens that came from the large model
  int fallback_count = 0;    // large-model verification rounds
  int rollback_count = 0;    // rollbacks (or rejections)
  int tokens_discarded = 0;  // drafted tokens thrown away by rollbacks
  int small_calls = 0;
  int large_calls = 0;
  int small_emitted = 0;     // SmallStep events

  bool operator==(const Counters&) const = default;
};

struct DecodeResult {
  TokenSeq sequence;
  std::vector<Provenance> provenance;  // parallel to sequence
  Trace trace;
  Counters counters;
  // Oracle blend: replaced positions / total positions.
  std::optional<double> engagement;
  // Speculative sampling with non-ancestral drafts loses its exactness guarantee.
  bool biased = false;
};

// Loop iterations of a decode: small steps plus fallbacks.
int decode_iterations(const Counters& c);
// fallback_count / iterations, 0 when there were none.
double fallback_fraction(const Counters& c);
// tokens_discarded / small_emitted, 0 when the small model emitted nothing.
double rollback_fraction(const Counters& c);

// One JSON object per line.
std::string trace_to_jsonl(const Trace& trace);
Trace trace_from_jsonl(const std::string& text);
std::string event_to_json(const TraceEvent& e);

// Summary JSON with the sequence, counters and derived percentages.
std::string result_summary_json(const DecodeResult& result);

struct ReplayResult {
  TokenSeq sequence;
  std::vector<Provenance> provenance;
};

// Rebuilds the final sequence from accept/discard events, checking that every
// position is consistent with the working sequence. Tokens beyond `max_len`
// are dropped. Throws InvalidTrace on any inconsistency.
ReplayResult replay_trace(const Trace& trace, std::optional<std::size_t> max_len = std::nullopt);

}  // namespace bild
