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

#include "bild/trace.h"

#include <sstream>

#include "json.hpp"

namespace bild {

using nlohmann::json;

const char* to_string(FallbackReason reason) {
  switch (reason) {
    case FallbackReason::kLowConfidence:
      return "low_confidence";
    case FallbackReason::kWindowCap:
      return "window_cap";
    case FallbackReason::kForced:
      return "forced";
  }
  return "forced";
}

namespace {

FallbackReason parse_reason(const std::string& s) {
  if (s == "low_confidence") return FallbackReason::kLowConfidence;
  if (s == "window_cap") return FallbackReason::kWindowCap;
  if (s == "forced") return FallbackReason::kForced;
  throw InvalidTrace("unknown fallback reason '" + s + "'");
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

json event_json(const TraceEvent& e) {
  return std::visit(
      Overloaded{
          [](const event::SmallStep& s) {
            return json{{"event", "small_step"},
                        {"position", s.position},
                        {"token", s.token},
                        {"max_prob", s.max_prob}};
          },
          [](const event::Fallback& f) {
            return json{{"event", "fallback"},
                        {"position", f.position},
                        {"reason", to_string(f.reason)}};
          },
          [](const event::LargeVerify& v) {
            return json{{"event", "large_verify"},
                        {"positions", v.positions},
                        {"distances", v.distances}};
          },
          [](const event::Rollback& r) {
            return json{{"event", r.rejection ? "rejection" : "rollback"},
                        {"position", r.position},
                        {"tokens_discarded", r.tokens_discarded},
                        {"replacement", r.replacement}};
          },
          [](const event::LargeAppend& a) {
            return json{{"event", "large_append"}, {"position", a.position}, {"token", a.token}};
          },
          [](const event::Eos& e) { return json{{"event", "eos"}, {"position", e.position}}; },
      },
      e);
}

}  // namespace

int decode_iterations(const Counters& c) { return c.small_emitted + c.fallback_count; }

double fallback_fraction(const Counters& c) {
  int it = decode_iterations(c);
  return it == 0 ? 0.0 : static_cast<double>(c.fallback_count) / it;
}

double rollback_fraction(const Counters& c) {
  return c.small_emitted == 0 ? 0.0
                              : static_cast<double>(c.tokens_discarded) / c.small_emitted;
}

std::string event_to_json(const TraceEvent& e) { return event_json(e).dump(); }

std::string trace_to_jsonl(const Trace& trace) {
  std::string out;
  for (const auto& e : trace) {
    out += event_to_json(e);
    out += '\n';
  }
  return out;
}

Trace trace_from_jsonl(const std::string& text) {
  Trace trace;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json j = json::parse(line);
      auto kind = j.at("event").get<std::string>();
      if (kind == "small_step") {
        trace.push_back(event::SmallStep{j.at("position").get<int>(), j.at("token").get<TokenId>(),
                                         j.at("max_prob").get<double>()});
      } else if (kind == "fallback") {
        trace.push_back(event::Fallback{j.at("position").get<int>(),
                                        parse_reason(j.at("reason").get<std::string>())});
      } else if (kind == "large_verify") {
        trace.push_back(event::LargeVerify{j.at("positions").get<std::vector<int>>(),
                                           j.at("distances").get<std::vector<double>>()});
      } else if (kind == "rollback" || kind == "rejection") {
        trace.push_back(event::Rollback{j.at("position").get<int>(),
                                        j.at("tokens_discarded").get<int>(),
                                        j.at("replacement").get<TokenId>(), kind == "rejection"});
      } else if (kind == "large_append") {
        trace.push_back(
            event::LargeAppend{j.at("position").get<int>(), j.at("token").get<TokenId>()});
      } else if (kind == "eos") {
        trace.push_back(event::Eos{j.at("position").get<int>()});
      } else {
        throw InvalidTrace("unknown event '" + kind + "'");
      }
    } catch (const json::exception& e) {
      throw InvalidTrace("trace line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return trace;
}

std::string result_summary_json(const DecodeResult& r) {
  const auto& c = r.counters;
  std::vector<std::string> prov;
  prov.reserve(r.provenance.size());
  for (auto p : r.provenance) prov.emplace_back(p == Provenance::kSmall ? "small" : "large");
  json doc = {{"sequence", r.sequence},
              {"provenance", prov},
              {"counters",
               {{"small_tokens", c.small_tokens},
                {"large_tokens", c.large_tokens},
                {"fallback_count", c.fallback_count},
                {"rollback_count", c.rollback_count},
                {"tokens_discarded", c.tokens_discarded},
                {"small_calls", c.small_calls},
                {"large_calls", c.large_calls},
                {"small_emitted", c.small_emitted}}},
              {"fallback_pct", fallback_fraction(c)},
              {"rollback_pct", rollback_fraction(c)}};
  if (r.engagement) doc["engagement"] = *r.engagement;
  if (r.biased) doc["biased"] = true;
  return doc.dump();
}

ReplayResult replay_trace(const Trace& trace, std::optional<std::size_t> max_len) {
  ReplayResult out;
  std::vector<TokenId> pending;
  bool ended = false;
  auto working = [&] { return static_cast<int>(out.sequence.size() + pending.size()); };
  auto fail = [](std::size_t idx, const std::string& msg) {
    throw InvalidTrace("event " + std::to_string(idx) + ": " + msg);
  };
  auto commit_pending = [&](std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
      out.sequence.push_back(pending[i]);
      out.provenance.push_back(Provenance::kSmall);
    }
    pending.clear();
  };

  for (std::size_t idx = 0; idx < trace.size(); ++idx) {
    if (ended) fail(idx, "event after eos");
    std::visit(
        Overloaded{
            [&](const event::SmallStep& s) {
              if (s.position != working()) fail(idx, "small_step position mismatch");
              pending.push_back(s.token);
            },
            [&](const event::Fallback& f) {
              if (f.position != working()) fail(idx, "fallback position mismatch");
            },
            [&](const event::LargeVerify& v) {
              const int start = static_cast<int>(out.sequence.size());
              if (v.positions.size() != pending.size() + 1) {
                fail(idx, "large_verify must score every pending position plus the next");
              }
              for (std::size_t i = 0; i < v.positions.size(); ++i) {
                if (v.positions[i] != start + static_cast<int>(i)) {
                  fail(idx, "large_verify positions not contiguous from the committed prefix");
                }
              }
              if (v.distances.size() != pending.size()) {
                fail(idx, "large_verify needs one distance per pending position");
              }
            },
            [&](const event::Rollback& r) {
              const int start = static_cast<int>(out.sequence.size());
              if (r.position < start || r.position >= working()) {
                fail(idx, "rollback position outside the pending window");
              }
              if (r.tokens_discarded != working() - r.position) {
                fail(idx, "rollback discard count inconsistent with position");
              }
              commit_pending(static_cast<std::size_t>(r.position - start));
              out.sequence.push_back(r.replacement);
              out.provenance.push_back(Provenance::kLarge);
            },
            [&](const event::LargeAppend& a) {
              if (a.position != working()) fail(idx, "large_append position mismatch");
              commit_pending(pending.size());
              out.sequence.push_back(a.token);
              out.provenance.push_back(Provenance::kLarge);
            },
            [&](const event::Eos& e) {
              if (e.position != working() - 1) fail(idx, "eos position must be the last token");
              ended = true;
            },
        },
        trace[idx]);
  }
  commit_pending(pending.size());
  if (max_len && out.sequence.size() > *max_len) {
    out.sequence.resize(*max_len);
    out.provenance.resize(*max_len);
  }
  return out;
}

}  // namespace bild
