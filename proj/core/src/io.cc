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

#include "bild/io.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace bild {

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

TokenId parse_token(const std::string& tok, const Vocabulary* vocab, std::size_t line_no) {
  if (vocab != nullptr && vocab->has_symbols()) {
    if (auto id = vocab->lookup(tok)) return *id;
    throw ParseError("line " + std::to_string(line_no) + ": unknown symbol '" + tok + "'");
  }
  TokenId id = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), id);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError("line " + std::to_string(line_no) + ": expected a token id, got '" + tok +
                     "'");
  }
  if (vocab != nullptr && !vocab->contains(id)) {
    throw ParseError("line " + std::to_string(line_no) + ": token id " + tok +
                     " outside vocabulary");
  }
  return id;
}

double parse_double(const std::string& tok, std::size_t line_no) {
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line_no) + ": expected a probability, got '" + tok +
                     "'");
  }
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file: " + tmp.string());
    out << content;
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Vocabulary parse_vocabulary(const std::string& text) {
  std::vector<std::string> symbols;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::string s = trim(line);
    if (s.empty()) continue;
    symbols.push_back(s);
  }
  if (symbols.size() < 2) throw ParseError("vocabulary file needs at least 2 symbols");
  TokenId eos = static_cast<TokenId>(symbols.size()) - 1;
  for (const char* marker : kEosSymbols) {
    auto it = std::find(symbols.begin(), symbols.end(), marker);
    if (it != symbols.end()) {
      eos = static_cast<TokenId>(it - symbols.begin());
      break;
    }
  }
  const auto n = symbols.size();
  return Vocabulary(n, eos, std::move(symbols));
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  return parse_vocabulary(read_file(path));
}

std::string format_vocabulary(const Vocabulary& vocab) {
  std::string out;
  for (std::size_t i = 0; i < vocab.size(); ++i) out += vocab.symbol(static_cast<TokenId>(i)) + "\n";
  return out;
}

std::vector<TokenSeq> parse_corpus(const std::string& text, const Vocabulary& vocab) {
  std::vector<TokenSeq> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    TokenSeq seq;
    if (s != "-") {
      for (const auto& tok : split_ws(s)) seq.push_back(parse_token(tok, &vocab, line_no));
    }
    out.push_back(std::move(seq));
  }
  return out;
}

std::vector<TokenSeq> load_corpus(const std::filesystem::path& path, const Vocabulary& vocab) {
  try {
    return parse_corpus(read_file(path), vocab);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string format_sequence(const TokenSeq& seq, const Vocabulary& vocab) {
  if (seq.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) out += ' ';
    out += vocab.symbol(seq[i]);
  }
  return out;
}

std::string format_corpus(const std::vector<TokenSeq>& corpus, const Vocabulary& vocab) {
  std::string out;
  for (const auto& seq : corpus) out += format_sequence(seq, vocab) + "\n";
  return out;
}

TableLM parse_table_lm(const std::string& text, const Vocabulary* vocab) {
  struct Record {
    std::vector<std::string> context;
    bool is_default;
    std::vector<double> probs;
    std::size_t line_no;
  };
  std::vector<Record> records;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    auto bar = s.find('|');
    if (bar == std::string::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": missing '|' separator");
    }
    std::string lhs = trim(s.substr(0, bar));
    Record r{{}, lhs == "DEFAULT", {}, line_no};
    if (!r.is_default && lhs != "-") r.context = split_ws(lhs);
    for (const auto& tok : split_ws(s.substr(bar + 1))) r.probs.push_back(parse_double(tok, line_no));
    records.push_back(std::move(r));
  }
  const Record* def = nullptr;
  for (const auto& r : records) {
    if (r.is_default) {
      if (def != nullptr) throw ParseError("line " + std::to_string(r.line_no) + ": duplicate DEFAULT row");
      def = &r;
    }
  }
  if (def == nullptr) throw ParseError("table LM is missing the required DEFAULT row");

  const std::size_t width = def->probs.size();
  Vocabulary v = vocab != nullptr ? *vocab : Vocabulary(width, static_cast<TokenId>(width) - 1);
  if (width != v.size()) {
    throw ConfigError("table LM rows have " + std::to_string(width) +
                      " entries but the vocabulary has " + std::to_string(v.size()));
  }
  auto make_row = [&](const Record& r) {
    if (r.probs.size() != width) {
      throw ParseError("line " + std::to_string(r.line_no) + ": row width " +
                       std::to_string(r.probs.size()) + " != " + std::to_string(width));
    }
    try {
      return ProbDist(r.probs);
    } catch (const InvalidInput& e) {
      throw ParseError("line " + std::to_string(r.line_no) + ": " + e.what());
    }
  };
  TableLM::Rows rows;
  for (const auto& r : records) {
    if (r.is_default) continue;
    TokenSeq ctx;
    for (const auto& tok : r.context) ctx.push_back(parse_token(tok, &v, r.line_no));
    if (!rows.emplace(ctx, make_row(r)).second) {
      throw ParseError("line " + std::to_string(r.line_no) + ": duplicate context");
    }
  }
  return TableLM(std::move(v), std::move(rows), make_row(*def));
}

TableLM load_table_lm(const std::filesystem::path& path, const Vocabulary* vocab) {
  try {
    return parse_table_lm(read_file(path), vocab);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string format_table_lm(const TableLM& model) {
  std::ostringstream out;
  out << std::setprecision(17);
  auto row_text = [&](const ProbDist& d) {
    for (double p : d.probs()) out << ' ' << p;
    out << '\n';
  };
  for (const auto& [ctx, row] : model.rows()) {
    out << format_sequence(ctx, model.vocabulary()) << " |";
    row_text(row);
  }
  out << "DEFAULT |";
  row_text(model.default_row());
  return out.str();
}

std::unique_ptr<LanguageModel> load_model(const std::filesystem::path& path,
                                          std::optional<ModelKind> kind,
                                          const Vocabulary* vocab) {
  if (!std::filesystem::exists(path)) throw ParseError("model file not found: " + path.string());
  ModelKind k = kind.value_or(path.extension() == ".json" ? ModelKind::kNgram : ModelKind::kTable);
  if (k == ModelKind::kNgram) {
    return std::make_unique<NgramLM>(NgramLM::from_json(read_file(path), vocab));
  }
  return std::make_unique<TableLM>(load_table_lm(path, vocab));
}

}  // namespace bild
