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
#include <optional>
#include <string>

#include "bild/model_descriptor.h"
#include "bild/trace.h"

namespace bild {

// Accumulated work for a set of model invocations. MOPs are bytes moved:
// weight loads plus key/value cache traffic.
struct WorkloadTally {
  double flops = 0.0;
  double weight_bytes = 0.0;
  double kv_bytes = 0.0;
  std::int64_t invocations = 0;

  double mops() const { return weight_bytes + kv_bytes; }
  double arithmetic_intensity() const { return mops() > 0.0 ? flops / mops() : 0.0; }

  WorkloadTally& operator+=(const WorkloadTally& o);
  friend WorkloadTally operator+(WorkloadTally a, const WorkloadTally& b) { return a += b; }
  bool operator==(const WorkloadTally&) const = default;
};

// Cost of one forward pass that appends `new_tokens` to a cache already
// holding `context_len` tokens.
//   flops        = 2 * decoder_params * new_tokens
//   weight_bytes = decoder_params * bytes_per_param   (once per pass)
//   kv_bytes     = kv_bytes_per_token * ((context_len + new_tokens) reads + new_tokens writes)
// The cache is read once per pass and shared by all new tokens' attention.
// A pass with no new tokens costs nothing.
WorkloadTally step_cost(const ModelDescriptor& desc, std::int64_t context_len,
                        std::int64_t new_tokens);

// Hardware peaks for the roofline latency proxy. Zero means unset; with no
// peaks the proxy is plain bytes moved (memory-bound ratio reporting).
struct Roofline {
  double peak_flops = 0.0;      // FLOP/s
  double peak_bandwidth = 0.0;  // bytes/s

  // max(flops / peak_flops, mops / peak_bandwidth) for one pass.
  double latency(const WorkloadTally& pass) const;
};

struct TallyReport {
  WorkloadTally small;
  WorkloadTally large;
  WorkloadTally bild;                      // small + large
  WorkloadTally vanilla_large_equivalent;  // large model decoding the same length alone
  double bild_latency = 0.0;
  double vanilla_latency = 0.0;
  double speedup_estimate = 0.0;            // vanilla_latency / bild_latency
  double mops_ratio = 0.0;                  // vanilla MOPs / BiLD MOPs
  double arithmetic_intensity_ratio = 0.0;  // BiLD AI / vanilla AI
  std::size_t sequence_length = 0;

  std::string to_json() const;
};

// Charges every small_step and low-confidence fallback as a one-token small
// pass, and every large_verify as one large pass over its scored positions
// (context = first scored position). Positions are generated-token indices;
// prompt cost is excluded since both systems pay it. The vanilla tally is N
// one-token large passes for the final length N (cut to max_len when given).
// Throws InvalidTrace for inconsistent traces.
TallyReport tally_trace(const Trace& trace, const ModelDescriptor& small_desc,
                        const ModelDescriptor& large_desc, const Roofline& roofline = {},
                        std::optional<std::size_t> max_len = std::nullopt);

// step_cost summed over every model call in a trace, both models together.
WorkloadTally tally_model_calls(const Trace& trace, const ModelDescriptor& small_desc,
                                const ModelDescriptor& large_desc);

// A deterministic decode trace of `tokens` committed tokens whose fallback
// fraction (fallbacks / iterations) and rollback fraction (discarded /
// drafted) track the given rates, with drafts capped at `window_cap`.
Trace synthesize_trace(std::size_t tokens, double fallback_rate, double rollback_rate,
                       int window_cap = 10);

ModelDescriptor descriptor_from_json(const std::string& text);
std::string descriptor_to_json(const ModelDescriptor& desc);

}  // namespace bild
