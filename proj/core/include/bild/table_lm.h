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

#include <map>
#include <vector>

#include "bild/lm.h"

namespace bild {

// Lookup-table model keyed by the exact full prefix. Prefixes without a row
// use the default row.
class TableLM final : public LanguageModel {
 public:
  using Rows = std::map<TokenSeq, ProbDist>;

  TableLM(Vocabulary vocab, Rows rows, ProbDist default_row);

  // A model that returns `row` for every prefix.
  static TableLM constant(Vocabulary vocab, ProbDist row);

  const Vocabulary& vocabulary() const override { return vocab_; }
  ProbDist score_next(std::span<const TokenId> prefix) const override;

  const Rows& rows() const { return rows_; }
  const ProbDist& default_row() const { return default_row_; }

 private:
  Vocabulary vocab_;
  Rows rows_;
  ProbDist default_row_;
};

}  // namespace bild
