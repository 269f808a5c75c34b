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

#include "bild/policy.h"

#include <algorithm>
#include <limits>

#include "json.hpp"

namespace bild {

using nlohmann::json;

void PolicyConfig::validate() const {
  if (!(alpha_fb >= 0.0)) throw InvalidInput("alpha_fb must be >= 0");
  if (!(alpha_rb >= 0.0)) throw InvalidInput("alpha_rb must be >= 0");
  if (window_cap < 0) throw InvalidInput("window_cap must be >= 0");
  if (fallback_mode == FallbackMode::kFixedWindow && fixed_window < 1) {
    throw InvalidInput("fixed_window must be >= 1");
  }
}

std::string PolicyConfig::to_json() const {
  json doc;
  doc["alpha_fb"] = alpha_fb;
  if (std::isinf(alpha_rb)) {
    doc["alpha_rb"] = "inf";
  } else {
    doc["alpha_rb"] = alpha_rb;
  }
  doc["window_cap"] = window_cap;
  doc["rollback_enabled"] = rollback_enabled;
  doc["fallback_mode"] = fallback_mode == FallbackMode::kConfidence
                             ? std::string("confidence")
                             : "fixed_window:" + std::to_string(fixed_window);
  if (verify_eos) doc["verify_eos"] = true;
  return doc.dump();
}

namespace {

double threshold_value(const json& v) {
  if (v.is_string()) {
    auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    throw InvalidInput("threshold must be a number or \"inf\", got '" + s + "'");
  }
  return v.get<double>();
}

}  // namespace

PolicyConfig PolicyConfig::from_json(const std::string& text) {
  PolicyConfig c;
  try {
    json doc = json::parse(text);
    if (doc.contains("alpha_fb")) c.alpha_fb = threshold_value(doc["alpha_fb"]);
    if (doc.contains("alpha_rb")) c.alpha_rb = threshold_value(doc["alpha_rb"]);
    if (doc.contains("window_cap")) {
      const auto& w = doc["window_cap"];
      if (w.is_string()) {
        if (w.get<std::string>() != "inf") throw InvalidInput("window_cap must be an integer or \"inf\"");
        c.window_cap = 0;
      } else {
        c.window_cap = w.get<int>();
      }
    }
    if (doc.contains("rollback_enabled")) c.rollback_enabled = doc["rollback_enabled"].get<bool>();
    if (doc.contains("verify_eos")) c.verify_eos = doc["verify_eos"].get<bool>();
    if (doc.contains("fallback_mode")) {
      auto mode = doc["fallback_mode"].get<std::string>();
      if (mode == "confidence") {
        c.fallback_mode = FallbackMode::kConfidence;
      } else if (mode.rfind("fixed_window", 0) == 0) {
        c.fallback_mode = FallbackMode::kFixedWindow;
        auto colon = mode.find(':');
        if (colon != std::string::npos) c.fixed_window = std::stoi(mode.substr(colon + 1));
        if (doc.contains("fixed_window")) c.fixed_window = doc["fixed_window"].get<int>();
      } else {
        throw InvalidInput("unknown fallback_mode '" + mode + "'");
      }
    }
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed policy JSON: ") + e.what());
  } catch (const std::logic_error& e) {
    throw InvalidInput(std::string("malformed policy JSON: ") + e.what());
  }
  c.validate();
  return c;
}

bool should_fallback(const ProbDist& small_dist, const PolicyConfig& config) {
  return small_dist.max() < config.alpha_fb;
}

double distance(TokenId chosen, const ProbDist& large_dist) {
  return -std::log(std::max(large_dist[chosen], kProbFloor));
}

std::vector<double> rollback_distances(std::span<const TokenId> pending_tokens,
                                       std::span<const ProbDist> large_dists) {
  if (large_dists.size() < pending_tokens.size()) {
    throw InvalidInput("fewer large-model distributions than pending tokens");
  }
  std::vector<double> out;
  out.reserve(pending_tokens.size());
  for (std::size_t i = 0; i < pending_tokens.size(); ++i) {
    out.push_back(distance(pending_tokens[i], large_dists[i]));
  }
  return out;
}

std::optional<std::size_t> find_rollback_position(std::span<const TokenId> pending_tokens,
                                                  std::span<const ProbDist> large_dists,
                                                  const PolicyConfig& config) {
  if (!config.rollback_enabled) return std::nullopt;
  if (large_dists.size() < pending_tokens.size()) {
    throw InvalidInput("fewer large-model distributions than pending tokens");
  }
  for (std::size_t i = 0; i < pending_tokens.size(); ++i) {
    if (distance(pending_tokens[i], large_dists[i]) > config.alpha_rb) return i;
  }
  return std::nullopt;
}

}  // namespace bild
