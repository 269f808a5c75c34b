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

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bild/lm.h"
#include "bild/ngram_lm.h"
#include "bild/table_lm.h"

namespace bild {

// Raised for unreadable files and malformed text formats. Messages name the
// path (when known) and line.
class ParseError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// Symbols that mark end-of-sequence in a vocabulary file. When none is
// present the last id is eos.
inline constexpr const char* kEosSymbols[] = {"<eos>", "</s>", "eos"};

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Vocabulary file: one symbol per line, line number (0-based) is the id.
Vocabulary parse_vocabulary(const std::string& text);
Vocabulary load_vocabulary(const std::filesystem::path& path);
std::string format_vocabulary(const Vocabulary& vocab);

// Corpus / prompt file: one sequence per line, whitespace-separated symbols.
// With a symbol vocabulary, symbols map through it; otherwise tokens are
// decimal ids. A line holding only "-" is the empty sequence. Blank lines and
// lines starting with '#' are skipped.
std::vector<TokenSeq> parse_corpus(const std::string& text, const Vocabulary& vocab);
std::vector<TokenSeq> load_corpus(const std::filesystem::path& path, const Vocabulary& vocab);
std::string format_sequence(const TokenSeq& seq, const Vocabulary& vocab);
std::string format_corpus(const std::vector<TokenSeq>& corpus, const Vocabulary& vocab);

// Table-LM file: `<context tokens or -> | <p_0> ... <p_{V-1}>` per line plus a
// required `DEFAULT | ...` row. Without `vocab`, V is taken from the rows,
// contexts are decimal ids and eos is V - 1.
TableLM parse_table_lm(const std::string& text, const Vocabulary* vocab = nullptr);
TableLM load_table_lm(const std::filesystem::path& path, const Vocabulary* vocab = nullptr);
std::string format_table_lm(const TableLM& model);

enum class ModelKind { kTable, kNgram };

// Loads a model by kind; kind defaults from the extension (.json is n-gram).
std::unique_ptr<LanguageModel> load_model(const std::filesystem::path& path,
                                          std::optional<ModelKind> kind,
                                          const Vocabulary* vocab);

}  // namespace bild
