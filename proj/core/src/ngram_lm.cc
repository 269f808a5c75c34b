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

#include "bild/ngram_lm.h"

#include <cmath>

#include "json.hpp"

namespace bild {

using nlohmann::json;

NgramLM::NgramLM(Vocabulary vocab, int order, double smoothing, CountTable counts)
    : vocab_(std::move(vocab)), order_(order), smoothing_(smoothing), counts_(std::move(counts)) {
  if (order_ < 1) throw InvalidInput("n-gram order must be >= 1");
  if (!(smoothing_ > 0.0) || !std::isfinite(smoothing_)) {
    throw InvalidInput("smoothing must be positive");
  }
  const auto ctx_len = static_cast<std::size_t>(order_ - 1);
  for (const auto& [context, row] : counts_) {
    if (context.size() != ctx_len) throw InvalidInput("n-gram context has wrong length");
    if (row.size() != vocab_.size()) throw InvalidInput("n-gram count row has wrong width");
    for (TokenId t : context) {
      if (t != kBos && !vocab_.contains(t)) throw InvalidInput("n-gram context token out of range");
    }
  }
}

NgramLM::Context NgramLM::context_of(std::span<const TokenId> prefix) const {
  const auto ctx_len = static_cast<std::size_t>(order_ - 1);
  Context ctx(ctx_len, kBos);
  std::size_t take = std::min(ctx_len, prefix.size());
  std::copy(prefix.end() - static_cast<std::ptrdiff_t>(take), prefix.end(),
            ctx.end() - static_cast<std::ptrdiff_t>(take));
  return ctx;
}

std::uint64_t NgramLM::count(const Context& context, TokenId next) const {
  auto it = counts_.find(context);
  if (it == counts_.end() || !vocab_.contains(next)) return 0;
  return it->second[static_cast<std::size_t>(next)];
}

ProbDist NgramLM::score_next(std::span<const TokenId> prefix) const {
  check_tokens(prefix);
  const std::size_t v = vocab_.size();
  auto it = counts_.find(context_of(prefix));
  if (it == counts_.end()) return ProbDist::uniform(v);
  const auto& row = it->second;
  double total = 0.0;
  for (auto c : row) total += static_cast<double>(c);
  const double denom = total + smoothing_ * static_cast<double>(v);
  std::vector<double> probs(v);
  for (std::size_t t = 0; t < v; ++t) probs[t] = (static_cast<double>(row[t]) + smoothing_) / denom;
  return ProbDist(std::move(probs));
}

std::string NgramLM::to_json() const {
  json counts = json::array();
  for (const auto& [context, row] : counts_) {
    for (std::size_t t = 0; t < row.size(); ++t) {
      if (row[t] == 0) continue;
      counts.push_back(json::array({context, t, row[t]}));
    }
  }
  json doc = {{"order", order_},
              {"smoothing", smoothing_},
              {"vocab_size", vocab_.size()},
              {"eos", vocab_.eos()},
              {"counts", std::move(counts)}};
  return doc.dump(1);
}

NgramLM NgramLM::from_json(const std::string& text, const Vocabulary* vocab) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("n-gram JSON parse error: ") + e.what());
  }
  try {
    const int order = doc.at("order").get<int>();
    const double smoothing = doc.at("smoothing").get<double>();
    const auto vocab_size = doc.at("vocab_size").get<std::size_t>();
    const TokenId eos = doc.contains("eos") ? doc.at("eos").get<TokenId>()
                                            : static_cast<TokenId>(vocab_size) - 1;
    if (vocab != nullptr && (vocab->size() != vocab_size || vocab->eos() != eos)) {
      throw ConfigError("n-gram model vocabulary (size " + std::to_string(vocab_size) +
                        ") does not match the supplied vocabulary (size " +
                        std::to_string(vocab->size()) + ")");
    }
    Vocabulary v = vocab != nullptr ? *vocab : Vocabulary(vocab_size, eos);
    CountTable table;
    for (const auto& entry : doc.at("counts")) {
      auto context = entry.at(0).get<Context>();
      auto token = entry.at(1).get<TokenId>();
      auto n = entry.at(2).get<std::uint64_t>();
      if (!v.contains(token)) throw InvalidInput("n-gram count token out of range");
      auto& row = table[context];
      if (row.empty()) row.assign(vocab_size, 0);
      row[static_cast<std::size_t>(token)] += n;
    }
    return NgramLM(std::move(v), order, smoothing, std::move(table));
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed n-gram JSON: ") + e.what());
  }
}

NgramLM fit_ngram(const std::vector<TokenSeq>& corpus, const Vocabulary& vocab, int order,
                  double smoothing, const std::vector<TokenSeq>& contexts) {
  if (corpus.empty()) throw InvalidInput("fit_ngram: empty corpus");
  if (order < 1) throw InvalidInput("n-gram order must be >= 1");
  if (!contexts.empty() && contexts.size() != corpus.size()) {
    throw InvalidInput("fit_ngram: contexts must match the corpus one-to-one");
  }
  const auto ctx_len = static_cast<std::size_t>(order - 1);
  NgramLM::CountTable counts;
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    TokenSeq seq = contexts.empty() ? TokenSeq{} : contexts[s];
    const std::size_t skip = seq.size();
    seq.insert(seq.end(), corpus[s].begin(), corpus[s].end());
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const TokenId t = seq[i];
      if (!vocab.contains(t)) {
        throw InvalidInput("corpus token " + std::to_string(t) + " outside vocabulary");
      }
      if (i < skip) continue;
      NgramLM::Context ctx(ctx_len, kBos);
      for (std::size_t k = 0; k < ctx_len; ++k) {
        // ctx[k] holds the token ctx_len - k positions back.
        std::size_t back = ctx_len - k;
        if (i >= back) ctx[k] = seq[i - back];
      }
      auto& row = counts[ctx];
      if (row.empty()) row.assign(vocab.size(), 0);
      ++row[static_cast<std::size_t>(t)];
    }
  }
  return NgramLM(vocab, order, smoothing, std::move(counts));
}

}  // namespace bild
