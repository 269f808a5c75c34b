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

#include "bild/sampling.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bild {

Sampler Sampler::nucleus(double p, std::uint64_t seed) {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidInput("nucleus p must lie in (0, 1]");
  return {SamplerKind::kNucleus, p, seed};
}

Sampler Sampler::temperature(double t, std::uint64_t seed) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidInput("temperature must be positive");
  return {SamplerKind::kTemperature, t, seed};
}

std::string Sampler::to_string() const {
  switch (kind) {
    case SamplerKind::kGreedy:
      return "greedy";
    case SamplerKind::kNucleus:
      return "nucleus:" + std::to_string(param);
    case SamplerKind::kTemperature:
      return "temperature:" + std::to_string(param);
  }
  return "greedy";
}

Sampler Sampler::parse(const std::string& spec, std::uint64_t seed) {
  if (spec == "greedy") return greedy(seed);
  auto colon = spec.find(':');
  if (colon == std::string::npos) throw InvalidInput("unknown sampler '" + spec + "'");
  std::string name = spec.substr(0, colon);
  double value = 0.0;
  try {
    value = std::stod(spec.substr(colon + 1));
  } catch (const std::exception&) {
    throw InvalidInput("bad sampler parameter in '" + spec + "'");
  }
  if (name == "nucleus") return nucleus(value, seed);
  if (name == "temperature") return temperature(value, seed);
  throw InvalidInput("unknown sampler '" + spec + "'");
}

std::vector<TokenId> nucleus_support(const ProbDist& dist, double p) {
  std::vector<TokenId> order(dist.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](TokenId a, TokenId b) { return dist[a] > dist[b]; });
  std::vector<TokenId> support;
  double mass = 0.0;
  for (TokenId id : order) {
    support.push_back(id);
    mass += dist[id];
    if (mass >= p) break;
  }
  std::sort(support.begin(), support.end());
  return support;
}

TokenId inverse_cdf(std::span<const double> weights, double u) {
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double target = u * total;
  double cum = 0.0;
  TokenId last_positive = -1;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last_positive = static_cast<TokenId>(i);
    cum += weights[i];
    if (target < cum) return last_positive;
  }
  // Rounding can leave target == total; fall back to the last positive entry.
  if (last_positive < 0) throw InvalidInput("inverse_cdf over zero mass");
  return last_positive;
}

TokenId sample_with(const ProbDist& dist, const Sampler& sampler, double u) {
  switch (sampler.kind) {
    case SamplerKind::kGreedy:
      return dist.argmax();
    case SamplerKind::kNucleus: {
      std::vector<double> w(dist.size(), 0.0);
      for (TokenId id : nucleus_support(dist, sampler.param)) w[id] = dist[id];
      return inverse_cdf(w, u);
    }
    case SamplerKind::kTemperature: {
      if (sampler.param == 1.0) return inverse_cdf(dist.probs(), u);
      // Work in log space so small temperatures do not underflow everything.
      double inv_t = 1.0 / sampler.param;
      double max_log = -INFINITY;
      std::vector<double> logs(dist.size(), -INFINITY);
      for (std::size_t i = 0; i < dist.size(); ++i) {
        double p = dist[static_cast<TokenId>(i)];
        if (p > 0.0) {
          logs[i] = std::log(p) * inv_t;
          max_log = std::max(max_log, logs[i]);
        }
      }
      std::vector<double> w(dist.size(), 0.0);
      for (std::size_t i = 0; i < dist.size(); ++i) {
        if (std::isfinite(logs[i])) w[i] = std::exp(logs[i] - max_log);
      }
      return inverse_cdf(w, u);
    }
  }
  return dist.argmax();
}

TokenId sample(const ProbDist& dist, const Sampler& sampler, Rng& rng) {
  return sample_with(dist, sampler, rng.uniform());
}

}  // namespace bild
