#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "sarah/dataset.hpp"
#include "sarah/errors.hpp"
#include "sarah/rng.hpp"

using namespace sarah;

namespace {

ParseOptions raw() {
  ParseOptions o;
  o.labels = LabelMode::kRaw;
  return o;
}

std::size_t error_line(const std::string& text, const ParseOptions& opts = {}) {
  try {
    parse_libsvm_string(text, opts);
  } catch (const ParseError& e) {
    return e.line();
  }
  ADD_FAILURE() << "no ParseError for:\n" << text;
  return 0;
}

TEST(ParseLibsvm, Basic) {
  const Dataset ds = parse_libsvm_string("+1 1:0.5 3:2\n-1 2:-1\n");
  EXPECT_EQ(ds.n(), 2u);
  EXPECT_EQ(ds.dim(), 3u);
  EXPECT_EQ(ds.label(0), 1.0);
  EXPECT_EQ(ds.label(1), -1.0);
  EXPECT_EQ(ds.row(0), SparseRow({0, 2}, {0.5, 2.0}));
  EXPECT_EQ(ds.row(1), SparseRow({1}, {-1.0}));
}

TEST(ParseLibsvm, CommentsBlankLinesAndUnicodeMinus) {
  const Dataset ds =
      parse_libsvm_string("# header\n\n1 1:1 # trailing\n   \n\xE2\x88\x92" "1 2:3\n");
  EXPECT_EQ(ds.n(), 2u);
  EXPECT_EQ(ds.label(1), -1.0);
}

TEST(ParseLibsvm, ZeroValuesDroppedButCountTowardDimension) {
  const Dataset ds = parse_libsvm_string("1 1:1 5:0\n", raw());
  EXPECT_EQ(ds.row(0).nnz(), 1u);
  EXPECT_EQ(ds.dim(), 5u);
}

TEST(ParseLibsvm, EmptyFeatureLineIsAllowed) {
  const Dataset ds = parse_libsvm_string("1\n-1 2:1\n");
  EXPECT_EQ(ds.row(0).nnz(), 0u);
  EXPECT_EQ(ds.dim(), 2u);
}

TEST(ParseLibsvm, BinaryLabelRemaps) {
  EXPECT_EQ(parse_libsvm_string("0 1:1\n1 1:1\n").labels(), (std::vector<double>{-1, 1}));
  EXPECT_EQ(parse_libsvm_string("2 1:1\n1 1:1\n").labels(), (std::vector<double>{1, -1}));
  EXPECT_EQ(parse_libsvm_string("-1 1:1\n1 1:1\n").labels(), (std::vector<double>{-1, 1}));
  EXPECT_EQ(parse_libsvm_string("0 1:1\n0 1:2\n").labels(), (std::vector<double>{-1, -1}));
  EXPECT_EQ(parse_libsvm_string("2 1:1\n").labels(), (std::vector<double>{1}));
}

TEST(ParseLibsvm, RawLabelsKept) {
  EXPECT_EQ(parse_libsvm_string("3.25 1:1\n-7 1:1\n", raw()).labels(),
            (std::vector<double>{3.25, -7}));
}

TEST(ParseLibsvm, MalformedLinesReportLineNumbers) {
  EXPECT_EQ(error_line("1 1:1\nabc 1:1\n"), 2u);
  EXPECT_EQ(error_line("1 1:1\n\n1 2\n"), 3u);
  EXPECT_EQ(error_line("1 x:1\n"), 1u);
  EXPECT_EQ(error_line("1 1:1\n1 0:1\n"), 2u);
  EXPECT_EQ(error_line("# c\n1 2:1 2:3\n"), 2u);
  EXPECT_EQ(error_line("1 3:1 2:3\n"), 1u);
  EXPECT_EQ(error_line("1 1:1\n-1 1:zz\n"), 2u);
  EXPECT_EQ(error_line("1 1:1\n-1 1:1\n3 1:1\n"), 3u);
  EXPECT_EQ(error_line("1 -2:1\n"), 1u);
  EXPECT_EQ(error_line("1 1:nan\n"), 1u);
}

TEST(ParseLibsvm, EmptyInputIsAnError) {
  EXPECT_THROW(parse_libsvm_string(""), ParseError);
  EXPECT_THROW(parse_libsvm_string("# only a comment\n\n"), ParseError);
}

TEST(ParseLibsvm, DeclaredDimension) {
  ParseOptions o;
  o.dim = 10;
  EXPECT_EQ(parse_libsvm_string("1 3:1\n", o).dim(), 10u);
  o.dim = 2;
  EXPECT_THROW(parse_libsvm_string("1 3:1\n", o), ParseError);
}

TEST(ParseLibsvm, ErrorMessageNamesFileAndLine) {
  const auto path = std::filesystem::temp_directory_path() / "sarah_bad.svm";
  std::ofstream(path) << "1 1:1\n1 1:1 1:2\n";
  try {
    load_libsvm(path.string());
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find(path.string() + ":2:"), std::string::npos) << e.what();
  }
  std::filesystem::remove(path);
  EXPECT_THROW(load_libsvm("/nonexistent/file.svm"), DataError);
}

// Random canonical text must survive parse -> write unchanged.
std::string random_canonical_file(CounterRng& rng, bool binary) {
  std::string text;
  const std::size_t n = 1 + rng.uniform_index(20);
  const std::size_t d = 1 + rng.uniform_index(30);
  char buf[64];
  for (std::size_t i = 0; i < n; ++i) {
    if (binary) {
      text += rng.uniform_index(2) ? "1" : "-1";
    } else {
      std::snprintf(buf, sizeof buf, "%.17g", rng.normal() * 10.0);
      text += buf;
    }
    for (std::size_t j = 0; j < d; ++j) {
      if (rng.uniform01() < 0.3) {
        double v = rng.normal() * std::pow(10.0, static_cast<double>(rng.uniform_index(7)) - 3.0);
        if (v == 0.0) v = 1.0;
        std::snprintf(buf, sizeof buf, " %zu:%.17g", j + 1, v);
        text += buf;
      }
    }
    text += '\n';
  }
  return text;
}

TEST(ParseLibsvm, RoundTripProperty) {
  CounterRng rng(2718);
  for (int trial = 0; trial < 100; ++trial) {
    const bool binary = trial % 2 == 0;
    const std::string text = random_canonical_file(rng, binary);
    ParseOptions o;
    o.labels = binary ? LabelMode::kBinary : LabelMode::kRaw;
    const Dataset ds = parse_libsvm_string(text, o);
    ASSERT_EQ(to_libsvm_string(ds), text) << "trial " << trial;
    EXPECT_EQ(parse_libsvm_string(to_libsvm_string(ds), o), ds);
  }
}

TEST(NormalizeRows, UnitNorms) {
  const Dataset ds = parse_libsvm_string("1 1:3 2:4\n-1 3:-2\n");
  const Dataset nd = normalize_rows(ds);
  EXPECT_EQ(nd.row(0), SparseRow({0, 1}, {0.6, 0.8}));
  EXPECT_EQ(nd.row(1), SparseRow({2}, {-1.0}));
  EXPECT_EQ(nd.labels(), ds.labels());
  EXPECT_THROW(normalize_rows(parse_libsvm_string("1 1:1\n-1\n")), DataError);
}

TEST(Synthetic, DeterministicAndNormalized) {
  const Dataset a = synth_ridge(50, 7, 3);
  EXPECT_EQ(a, synth_ridge(50, 7, 3));
  EXPECT_FALSE(a == synth_ridge(50, 7, 4));
  for (std::size_t i = 0; i < a.n(); ++i) EXPECT_NEAR(norm_sq(a.row(i)), 1.0, 1e-12);
  const Dataset c = synth_classification(50, 7, 3);
  EXPECT_TRUE(c.has_binary_labels());
  // Same draw order, so the rows coincide.
  EXPECT_EQ(a.rows(), c.rows());
}

// Golden value from an independent Python reimplementation of the generator.
TEST(Synthetic, GoldenChecksum) {
  EXPECT_EQ(checksum(synth_ridge(100, 10, 7)), 0x891a67324c288bb2ULL);
}

TEST(Checksum, IsFnv1aOfCanonicalText) {
  const Dataset ds = parse_libsvm_string("1 1:0.5\n");
  // FNV-1a 64 of "1 1:0.5\n", computed independently.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : std::string("1 1:0.5\n")) h = (h ^ c) * 0x100000001b3ULL;
  EXPECT_EQ(checksum(ds), h);
}

}  // namespace
