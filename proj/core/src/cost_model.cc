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

#include "bild/cost_model.h"

#include <algorithm>
#include <cmath>
#include <functional>

#include "json.hpp"

namespace bild {

using nlohmann::json;

WorkloadTally& WorkloadTally::operator+=(const WorkloadTally& o) {
  flops += o.flops;
  weight_bytes += o.weight_bytes;
  kv_bytes += o.kv_bytes;
  invocations += o.invocations;
  return *this;
}

WorkloadTally step_cost(const ModelDescriptor& desc, std::int64_t context_len,
                        std::int64_t new_tokens) {
  if (context_len < 0 || new_tokens < 0) throw InvalidInput("step_cost needs non-negative sizes");
  WorkloadTally t;
  if (new_tokens == 0) return t;
  const auto params = static_cast<double>(desc.decoder_params);
  t.flops = 2.0 * params * static_cast<double>(new_tokens);
  t.weight_bytes = params * desc.bytes_per_param;
  const double reads = static_cast<double>(context_len + new_tokens);
  const double writes = static_cast<double>(new_tokens);
  t.kv_bytes = desc.kv_bytes_per_token() * (reads + writes);
  t.invocations = 1;
  return t;
}

double Roofline::latency(const WorkloadTally& pass) const {
  const double mem = peak_bandwidth > 0.0 ? pass.mops() / peak_bandwidth : pass.mops();
  if (peak_flops > 0.0 && peak_bandwidth > 0.0) return std::max(pass.flops / peak_flops, mem);
  return mem;
}

namespace {

// Calls `on_pass(is_large, context_len, new_tokens)` for every model pass.
void for_each_pass(const Trace& trace,
                   const std::function<void(bool, std::int64_t, std::int64_t)>& on_pass) {
  for (const auto& e : trace) {
    if (const auto* s = std::get_if<event::SmallStep>(&e)) {
      on_pass(false, s->position, 1);
    } else if (const auto* f = std::get_if<event::Fallback>(&e)) {
      if (f->reason == FallbackReason::kLowConfidence) on_pass(false, f->position, 1);
    } else if (const auto* v = std::get_if<event::LargeVerify>(&e)) {
      if (!v->positions.empty()) {
        on_pass(true, v->positions.front(), static_cast<std::int64_t>(v->positions.size()));
      }
    }
  }
}

}  // namespace

WorkloadTally tally_model_calls(const Trace& trace, const ModelDescriptor& small_desc,
                                const ModelDescriptor& large_desc) {
  WorkloadTally total;
  for_each_pass(trace, [&](bool is_large, std::int64_t ctx, std::int64_t n) {
    total += step_cost(is_large ? large_desc : small_desc, ctx, n);
  });
  return total;
}

TallyReport tally_trace(const Trace& trace, const ModelDescriptor& small_desc,
                        const ModelDescriptor& large_desc, const Roofline& roofline,
                        std::optional<std::size_t> max_len) {
  if (small_desc.decoder_params <= 0 || large_desc.decoder_params <= 0) {
    throw InvalidInput("model descriptors need positive decoder_params");
  }
  const ReplayResult replay = replay_trace(trace, max_len);
  TallyReport rep;
  rep.sequence_length = replay.sequence.size();
  for_each_pass(trace, [&](bool is_large, std::int64_t ctx, std::int64_t n) {
    WorkloadTally pass = step_cost(is_large ? large_desc : small_desc, ctx, n);
    (is_large ? rep.large : rep.small) += pass;
    rep.bild_latency += roofline.latency(pass);
  });
  rep.bild = rep.small + rep.large;
  for (std::size_t p = 0; p < rep.sequence_length; ++p) {
    WorkloadTally pass = step_cost(large_desc, static_cast<std::int64_t>(p), 1);
    rep.vanilla_large_equivalent += pass;
    rep.vanilla_latency += roofline.latency(pass);
  }
  rep.speedup_estimate = rep.bild_latency > 0.0 ? rep.vanilla_latency / rep.bild_latency : 0.0;
  rep.mops_ratio = rep.bild.mops() > 0.0 ? rep.vanilla_large_equivalent.mops() / rep.bild.mops() : 0.0;
  const double vanilla_ai = rep.vanilla_large_equivalent.arithmetic_intensity();
  rep.arithmetic_intensity_ratio = vanilla_ai > 0.0 ? rep.bild.arithmetic_intensity() / vanilla_ai : 0.0;
  return rep;
}

namespace {

json tally_json(const WorkloadTally& t) {
  return {{"flops", t.flops},
          {"mops", t.mops()},
          {"weight_bytes", t.weight_bytes},
          {"kv_bytes", t.kv_bytes},
          {"invocations", t.invocations},
          {"arithmetic_intensity", t.arithmetic_intensity()}};
}

}  // namespace

std::string TallyReport::to_json() const {
  json doc = {{"bild", tally_json(bild)},
              {"small", tally_json(small)},
              {"large", tally_json(large)},
              {"vanilla_large_equivalent", tally_json(vanilla_large_equivalent)},
              {"sequence_length", sequence_length},
              {"speedup_estimate", speedup_estimate},
              {"mops_ratio", mops_ratio},
              {"arithmetic_intensity_ratio", arithmetic_intensity_ratio}};
  return doc.dump(2);
}

Trace synthesize_trace(std::size_t tokens, double fallback_rate, double rollback_rate,
                       int window_cap) {
  if (!(fallback_rate > 0.0 && fallback_rate <= 1.0)) {
    throw InvalidInput("fallback_rate must lie in (0, 1]");
  }
  if (!(rollback_rate >= 0.0 && rollback_rate <= 1.0)) {
    throw InvalidInput("rollback_rate must lie in [0, 1]");
  }
  if (window_cap < 1) throw InvalidInput("window_cap must be >= 1");
  Trace trace;
  int committed = 0;
  int pending = 0;
  long iterations = 0;
  long fallbacks = 0;
  long drafted = 0;
  long discarded = 0;
  const int target = static_cast<int>(tokens);
  while (committed < target) {
    const bool cap = pending >= window_cap;
    const bool want_fallback =
        static_cast<double>(fallbacks + 1) <= fallback_rate * static_cast<double>(iterations + 1);
    ++iterations;
    if (!cap && !want_fallback) {
      trace.push_back(event::SmallStep{committed + pending, 0, 0.9});
      ++pending;
      ++drafted;
      continue;
    }
    ++fallbacks;
    const int pos = committed + pending;
    trace.push_back(event::Fallback{
        pos, cap ? FallbackReason::kWindowCap : FallbackReason::kLowConfidence});
    event::LargeVerify verify;
    for (int i = 0; i <= pending; ++i) verify.positions.push_back(committed + i);
    verify.distances.assign(static_cast<std::size_t>(pending), 0.0);

    const double owed = rollback_rate * static_cast<double>(drafted) - static_cast<double>(discarded);
    const int drop = std::min(pending, static_cast<int>(std::lround(owed)));
    if (drop >= 1) {
      const int m = pending - drop;
      verify.distances[static_cast<std::size_t>(m)] = -std::log(kProbFloor);
      trace.push_back(std::move(verify));
      trace.push_back(event::Rollback{committed + m, drop, 1});
      discarded += drop;
      committed += m + 1;
    } else {
      trace.push_back(std::move(verify));
      trace.push_back(event::LargeAppend{pos, 1});
      committed += pending + 1;
    }
    pending = 0;
  }
  return trace;
}

ModelDescriptor descriptor_from_json(const std::string& text) {
  try {
    json doc = json::parse(text);
    ModelDescriptor d;
    d.layers = doc.at("layers").get<int>();
    d.hidden_dim = doc.at("hidden_dim").get<int>();
    d.ffn_dim = doc.value("ffn_dim", 0);
    d.decoder_params = doc.at("decoder_params").get<std::int64_t>();
    d.bytes_per_param = doc.value("bytes_per_param", 2);
    if (d.layers <= 0 || d.hidden_dim <= 0 || d.decoder_params <= 0 || d.bytes_per_param <= 0) {
      throw InvalidInput("descriptor fields must be positive");
    }
    return d;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed descriptor JSON: ") + e.what());
  }
}

std::string descriptor_to_json(const ModelDescriptor& d) {
  json doc = {{"layers", d.layers},
              {"hidden_dim", d.hidden_dim},
              {"ffn_dim", d.ffn_dim},
              {"decoder_params", d.decoder_params},
              {"bytes_per_param", d.bytes_per_param}};
  return doc.dump();
}

}  // namespace bild
