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

#include <gtest/gtest.h>

#include <filesystem>

#include "bild/io.h"

namespace bild {
namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("bild_io_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

TEST(Io, VocabularyFindsEosMarker) {
  auto v = parse_vocabulary("a\n<eos>\nb\n");
  EXPECT_EQ(v.size(), 3u);
  EXPECT_EQ(v.eos(), 1);
  EXPECT_EQ(v.symbol(2), "b");
  // Without a marker the last symbol is eos.
  EXPECT_EQ(parse_vocabulary("x\ny\nz\n").eos(), 2);
  EXPECT_THROW(parse_vocabulary("solo\n"), ParseError);
}

TEST(Io, CorpusParsing) {
  auto v = parse_vocabulary("a\nb\n<eos>\n");
  auto c = parse_corpus("# comment\na b <eos>\n\n-\nb\n", v);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0], (TokenSeq{0, 1, 2}));
  EXPECT_TRUE(c[1].empty());
  EXPECT_EQ(c[2], (TokenSeq{1}));
  EXPECT_THROW(parse_corpus("a q\n", v), ParseError);
  EXPECT_EQ(format_corpus(c, v), "a b <eos>\n-\nb\n");
}

TEST(Io, NumericCorpusWithoutSymbols) {
  Vocabulary v(4, 3);
  EXPECT_EQ(parse_corpus("0 3 2\n", v)[0], (TokenSeq{0, 3, 2}));
  EXPECT_THROW(parse_corpus("4\n", v), ParseError);
}

TEST(Io, TableLmRoundTrip) {
  const std::string text =
      "# small table\n"
      "- | 0.7 0.2 0.1\n"
      "0 | 0.1 0.8 0.1\n"
      "DEFAULT | 0.2 0.2 0.6\n";
  TableLM lm = parse_table_lm(text);
  EXPECT_EQ(lm.vocabulary().size(), 3u);
  EXPECT_EQ(lm.score_next(TokenSeq{}), ProbDist({0.7, 0.2, 0.1}));
  EXPECT_EQ(lm.score_next(TokenSeq{0}), ProbDist({0.1, 0.8, 0.1}));
  EXPECT_EQ(lm.score_next(TokenSeq{1, 1}), ProbDist({0.2, 0.2, 0.6}));
  TableLM again = parse_table_lm(format_table_lm(lm));
  EXPECT_EQ(again.rows(), lm.rows());
  EXPECT_EQ(again.default_row(), lm.default_row());
}

TEST(Io, TableLmErrors) {
  EXPECT_THROW(parse_table_lm("- | 0.5 0.5\n"), ParseError);             // no DEFAULT
  EXPECT_THROW(parse_table_lm("DEFAULT | 0.5 0.6\n"), ParseError);       // not normalized
  EXPECT_THROW(parse_table_lm("DEFAULT 0.5 0.5\n"), ParseError);         // no separator
  EXPECT_THROW(parse_table_lm("0 | 1 0 0\nDEFAULT | 0.5 0.5\n"), ParseError);
  Vocabulary v(3, 2);
  EXPECT_THROW(parse_table_lm("DEFAULT | 0.5 0.5\n", &v), ConfigError);
}

TEST(Io, SymbolicTableContexts) {
  auto v = parse_vocabulary("a\nb\n<eos>\n");
  auto lm = parse_table_lm("a b | 0 0 1\nDEFAULT | 1 0 0\n", &v);
  EXPECT_EQ(lm.score_next(TokenSeq{0, 1}).argmax(), 2);
}

TEST(Io, AtomicWriteAndLoadModel) {
  auto dir = temp_dir("load");
  write_file_atomic(dir / "t.table", "DEFAULT | 0.25 0.75\n");
  EXPECT_FALSE(fs::exists(dir / "t.table.tmp"));
  auto m = load_model(dir / "t.table", std::nullopt, nullptr);
  EXPECT_EQ(m->vocabulary().size(), 2u);
  try {
    load_model(dir / "missing.json", std::nullopt, nullptr);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("missing.json"), std::string::npos);
  }
}

}  // namespace
}  // namespace bild
