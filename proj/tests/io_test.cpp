#include "mtpkit/io.hpp"

#include <gtest/gtest.h>
#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace mtpkit {
namespace {

const TransformationClass& t2() { return *find_transformation_class("2T"); }
const TransformationClass& tr2() { return *find_transformation_class("2TR"); }
const TransformationClass& str2() { return *find_transformation_class("2STR"); }

Transformation make(const TransformationClass& cls, std::initializer_list<Rational> sigma) {
  return cls.make(SigmaVector(sigma));
}

std::size_t error_line(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ParseError& error) {
    return error.line();
  }
  ADD_FAILURE() << "expected a ParseError";
  return 0;
}

class ScopedDir {
 public:
  ScopedDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("mtpkit_io_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~ScopedDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::filesystem::path file(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// ---- datasets ------------------------------------------------------------

TEST(DatasetFormat, ParsesPointsCommentsAndBlanks) {
  const Dataset dataset = parse_dataset(
      "# header comment\n"
      "0 0\n"
      "\n"
      "1 2   # trailing comment\n"
      "\t3\t1\n");
  EXPECT_EQ(dataset, Dataset::from({{0, 0}, {1, 2}, {3, 1}}));
}

TEST(DatasetFormat, ParsesDecimalsAndQuotientsExactly) {
  const Dataset dataset = parse_dataset("3/4 -2.5\n-1 7\n");
  ASSERT_EQ(dataset.size(), 2u);
  EXPECT_EQ(dataset.points()[0], (Point{-1, 7}));
  EXPECT_EQ(dataset.points()[1], (Point{Rational(3, 4), Rational(-5, 2)}));
}

TEST(DatasetFormat, HandlesCarriageReturns) {
  EXPECT_EQ(parse_dataset("0 0\r\n1 0\r\n"), Dataset::from({{0, 0}, {1, 0}}));
}

TEST(DatasetFormat, EmptyTextGivesEmptyDataset) {
  EXPECT_TRUE(parse_dataset("").empty());
  EXPECT_TRUE(parse_dataset("# only a comment\n").empty());
}

TEST(DatasetFormat, ReportsArityMismatchWithLine) {
  EXPECT_EQ(error_line([] { parse_dataset("0 0\n1 1 1\n"); }), 2u);
}

TEST(DatasetFormat, ReportsMalformedNumberWithLine) {
  EXPECT_EQ(error_line([] { parse_dataset("0 0\n1 x\n"); }), 2u);
  EXPECT_EQ(error_line([] { parse_dataset("1/0 0\n"); }), 1u);
}

TEST(DatasetFormat, ReportsDuplicatePointWithBothLines) {
  try {
    parse_dataset("5 5\n# gap\n\n5 5\n");
    FAIL() << "expected a ParseError";
  } catch (const ParseError& error) {
    EXPECT_EQ(error.line(), 4u);
    EXPECT_NE(std::string(error.what()).find("first on line 1"), std::string::npos);
  }
}

TEST(DatasetFormat, SerializesCanonically) {
  const Dataset dataset = Dataset::from({{1, 2}, {0, Rational(1, 2)}});
  EXPECT_EQ(serialize_dataset(dataset), "0 1/2\n1 2\n");
}

TEST(DatasetFormat, RoundTripsRandomDatasets) {
  std::mt19937 rng(83);
  std::uniform_int_distribution<int> numerator(-20, 20);
  std::uniform_int_distribution<int> denominator(1, 3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Point> points;
    for (int i = 0; i < 12; ++i) {
      points.push_back(Point{Rational(numerator(rng), denominator(rng)),
                             Rational(numerator(rng), denominator(rng))});
    }
    const Dataset dataset = Dataset::from(std::move(points));
    EXPECT_EQ(parse_dataset(serialize_dataset(dataset)), dataset);
  }
}

// ---- encodings -----------------------------------------------------------

Encoding doubled_shape_encoding() {
  return encode_point_set(
      Dataset::from({{0, 0}, {1, 2}, {2, 1}, {4, 0}, {6, 2}, {8, 1}}), str2());
}

TEST(EncodingFormat, SerializesTheDoubledShapeExactly) {
  EXPECT_EQ(serialize_encoding(doubled_shape_encoding()),
            "MTPENC 1 2STR 2\n"
            "P 3\n"
            "0 0\n"
            "1 2\n"
            "2 1\n"
            "T 1\n"
            "2 4 0 1\n");
}

TEST(EncodingFormat, WritesResidualAsTrailingEmptyTransformationBlock) {
  const Dataset dataset = Dataset::from({{0, 0}, {1, 0}, {2, 0}, {3, 0}, {50, 31}});
  const std::string text = serialize_encoding(encode_point_set(dataset, t2()));
  EXPECT_EQ(text,
            "MTPENC 1 2T 2\n"
            "P 2\n"
            "0 0\n"
            "1 0\n"
            "T 1\n"
            "2 0\n"
            "P 1\n"
            "50 31\n"
            "T 0\n");
}

TEST(EncodingFormat, RoundTripsStructurallyAndByteForByte) {
  std::mt19937 rng(89);
  std::uniform_int_distribution<int> coord(0, 9);
  for (const TransformationClass* cls : {&t2(), &tr2(), &str2()}) {
    std::vector<Point> points;
    for (int i = 0; i < 12; ++i) points.push_back(Point{coord(rng), coord(rng)});
    const Dataset dataset = Dataset::from(std::move(points));
    const Encoding encoding = encode_point_set(dataset, *cls);
    const std::string text = serialize_encoding(encoding);
    const Encoding parsed = parse_encoding(text);
    EXPECT_EQ(parsed, encoding);
    EXPECT_EQ(serialize_encoding(parsed), text);
    EXPECT_EQ(decode(parsed), dataset);
  }
}

TEST(EncodingFormat, AcceptsCommentsAndNormalizesTransformations) {
  const Encoding encoding = parse_encoding(
      "# compressed point set\n"
      "MTPENC 1 2T 2\n"
      "P 1\n"
      "0 0\n"
      "T 3\n"
      "2 0\n"
      "1 0   # duplicates and order get normalized\n"
      "2 0\n");
  ASSERT_EQ(encoding.occurrence_sets.size(), 1u);
  EXPECT_EQ(encoding.occurrence_sets[0].transformations,
            (std::vector<Transformation>{make(t2(), {1, 0}), make(t2(), {2, 0})}));
  EXPECT_TRUE(encoding.residual.empty());
}

TEST(EncodingFormat, ParsesResidualOnlyFiles) {
  const Encoding encoding = parse_encoding("MTPENC 1 2TR 2\nP 2\n0 0\n4 4\nT 0\n");
  EXPECT_TRUE(encoding.occurrence_sets.empty());
  EXPECT_EQ(encoding.residual, Dataset::from({{0, 0}, {4, 4}}));
  EXPECT_EQ(encoding.class_id, ClassId::TR2);
}

TEST(EncodingFormat, RejectsMalformedHeaders) {
  EXPECT_THROW(parse_encoding(""), ParseError);
  EXPECT_THROW(parse_encoding("BOGUS 1 2T 2\n"), ParseError);
  EXPECT_THROW(parse_encoding("MTPENC 9 2T 2\n"), ParseError);
  EXPECT_THROW(parse_encoding("MTPENC 1 3T 2\n"), ParseError);
  EXPECT_THROW(parse_encoding("MTPENC 1 2T 3\n"), ParseError);
  EXPECT_THROW(parse_encoding("MTPENC 1 2T\n"), ParseError);
}

TEST(EncodingFormat, RejectsStructuralDamage) {
  // First block must open with a pattern.
  EXPECT_THROW(parse_encoding("MTPENC 1 2T 2\nT 1\n1 0\n"), ParseError);
  // A pattern may not be empty.
  EXPECT_THROW(parse_encoding("MTPENC 1 2T 2\nP 0\nT 1\n1 0\n"), ParseError);
  // Counts must match the block contents.
  EXPECT_EQ(error_line([] { parse_encoding("MTPENC 1 2T 2\nP 3\n0 0\n1 0\nT 1\n1 0\n"); }), 5u);
  EXPECT_THROW(parse_encoding("MTPENC 1 2T 2\nP 1\n0 0\nT 2\n1 0\n"), ParseError);
  // Truncation mid-block.
  EXPECT_THROW(parse_encoding("MTPENC 1 2T 2\nP 2\n0 0\n"), ParseError);
  EXPECT_THROW(parse_encoding("MTPENC 1 2T 2\nP 1\n0 0\n"), ParseError);
}

TEST(EncodingFormat, RejectsInvalidContent) {
  // Duplicate point inside one pattern.
  EXPECT_EQ(error_line([] { parse_encoding("MTPENC 1 2T 2\nP 2\n0 0\n0 0\nT 1\n1 0\n"); }), 4u);
  // Sigma arity must match the class.
  EXPECT_THROW(parse_encoding("MTPENC 1 2TR 2\nP 1\n0 0\nT 1\n1 0\n"), ParseError);
  // Flags outside the class domain.
  EXPECT_THROW(parse_encoding("MTPENC 1 2TR 2\nP 1\n0 0\nT 1\n1 0 2\n"), ParseError);
  EXPECT_THROW(parse_encoding("MTPENC 1 2STR 2\nP 1\n0 0\nT 1\n0 0 0 1\n"), ParseError);
}

TEST(EncodingFormat, RejectsContentAfterTheResidual) {
  EXPECT_EQ(error_line([] {
              parse_encoding(
                  "MTPENC 1 2T 2\n"
                  "P 1\n0 0\nT 0\n"
                  "P 1\n1 1\nT 1\n1 0\n");
            }),
            5u);
}

// ---- manifests and file loading ------------------------------------------

TEST(Manifest, ParsesPathLabelPairs) {
  const auto entries = parse_corpus_manifest(
      "# corpus\n"
      "a.pts alpha\n"
      "sub/b.pts beta\n");
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].path, "a.pts");
  EXPECT_EQ(entries[0].label, "alpha");
  EXPECT_EQ(entries[1].path, "sub/b.pts");
  EXPECT_EQ(entries[1].label, "beta");
}

TEST(Manifest, RejectsWrongArity) {
  EXPECT_EQ(error_line([] { parse_corpus_manifest("a.pts\n"); }), 1u);
  EXPECT_EQ(error_line([] { parse_corpus_manifest("a.pts alpha extra\n"); }), 1u);
}

TEST(Files, LoadsDatasetsAndPrefixesErrorsWithThePath) {
  ScopedDir dir;
  write_file(dir.file("good.pts"), "0 0\n1 2\n");
  EXPECT_EQ(load_dataset(dir.file("good.pts")), Dataset::from({{0, 0}, {1, 2}}));

  write_file(dir.file("bad.pts"), "0 0\n1\n");
  try {
    load_dataset(dir.file("bad.pts"));
    FAIL() << "expected a failure";
  } catch (const std::runtime_error& error) {
    const std::string what = error.what();
    EXPECT_NE(what.find("bad.pts"), std::string::npos);
    EXPECT_NE(what.find("line 2"), std::string::npos);
  }
  EXPECT_THROW(load_dataset(dir.file("missing.pts")), std::runtime_error);
}

TEST(Files, RoundTripsEncodings) {
  ScopedDir dir;
  const Encoding encoding = doubled_shape_encoding();
  write_file(dir.file("shape.enc"), serialize_encoding(encoding));
  EXPECT_EQ(load_encoding(dir.file("shape.enc")), encoding);
}

TEST(Files, LoadsCorporaRelativeToTheManifest) {
  ScopedDir dir;
  std::filesystem::create_directories(dir.file("sub"));
  write_file(dir.file("a.pts"), "0 0\n1 0\n");
  write_file(dir.file("sub/b.pts"), "2 2\n");
  write_file(dir.file("corpus.txt"), "a.pts x\nsub/b.pts y\n");
  const Corpus corpus = load_corpus(dir.file("corpus.txt"));
  ASSERT_EQ(corpus.items.size(), 2u);
  EXPECT_EQ(corpus.items[0].name, "a.pts");
  EXPECT_EQ(corpus.items[0].label, "x");
  EXPECT_EQ(corpus.items[0].dataset, Dataset::from({{0, 0}, {1, 0}}));
  EXPECT_EQ(corpus.items[1].name, "sub/b.pts");
  EXPECT_EQ(corpus.items[1].label, "y");
  EXPECT_EQ(corpus.items[1].dataset, Dataset::from({{2, 2}}));
}

TEST(Files, RejectsBrokenCorpora) {
  ScopedDir dir;
  write_file(dir.file("a.pts"), "0 0\n");
  write_file(dir.file("flat.pts"), "1 2 3\n");
  write_file(dir.file("void.pts"), "# nothing\n");

  write_file(dir.file("dup.txt"), "a.pts x\na.pts y\n");
  EXPECT_THROW(load_corpus(dir.file("dup.txt")), std::runtime_error);

  write_file(dir.file("mixed.txt"), "a.pts x\nflat.pts y\n");
  EXPECT_THROW(load_corpus(dir.file("mixed.txt")), std::runtime_error);

  write_file(dir.file("empty.txt"), "a.pts x\nvoid.pts y\n");
  EXPECT_THROW(load_corpus(dir.file("empty.txt")), std::runtime_error);

  write_file(dir.file("missing.txt"), "a.pts x\nnope.pts y\n");
  EXPECT_THROW(load_corpus(dir.file("missing.txt")), std::runtime_error);
}

}  // namespace
}  // namespace mtpkit
