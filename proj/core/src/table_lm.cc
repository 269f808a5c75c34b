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

#include "bild/table_lm.h"

namespace bild {

TableLM::TableLM(Vocabulary vocab, Rows rows, ProbDist default_row)
    : vocab_(std::move(vocab)), rows_(std::move(rows)), default_row_(std::move(default_row)) {
  if (default_row_.size() != vocab_.size()) {
    throw InvalidInput("default row width does not match vocabulary size");
  }
  for (const auto& [context, row] : rows_) {
    if (row.size() != vocab_.size()) throw InvalidInput("table row width does not match vocabulary");
    check_tokens(context);
  }
}

TableLM TableLM::constant(Vocabulary vocab, ProbDist row) {
  return TableLM(std::move(vocab), {}, std::move(row));
}

ProbDist TableLM::score_next(std::span<const TokenId> prefix) const {
  check_tokens(prefix);
  if (rows_.empty()) return default_row_;
  auto it = rows_.find(TokenSeq(prefix.begin(), prefix.end()));
  return it == rows_.end() ? default_row_ : it->second;
}

}  // namespace bild
