#include "mtpkit/mtp.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>
#include <vector>

namespace mtpkit {
namespace {

const TransformationClass& t2() { return *find_transformation_class("2T"); }
const TransformationClass& tr2() { return *find_transformation_class("2TR"); }
const TransformationClass& str2() { return *find_transformation_class("2STR"); }

Transformation make(const TransformationClass& cls, std::initializer_list<Rational> sigma) {
  return cls.make(SigmaVector(sigma));
}

Dataset random_dataset(std::mt19937& rng, std::size_t size, int max_coordinate) {
  std::uniform_int_distribution<int> coord(0, max_coordinate);
  std::set<std::pair<int, int>> seen;
  while (seen.size() < size) seen.emplace(coord(rng), coord(rng));
  std::vector<Point> points;
  for (const auto& [t, p] : seen) points.push_back(Point{t, p});
  return Dataset::from(std::move(points));
}

void expect_same_records(const std::vector<MTPRecord>& actual,
                         const std::vector<MTPRecord>& expected) {
  ASSERT_EQ(actual.size(), expected.size());
  for (std::size_t i = 0; i < actual.size(); ++i) {
    EXPECT_EQ(actual[i].transformation, expected[i].transformation) << "record " << i;
    EXPECT_EQ(actual[i].pattern, expected[i].pattern) << "record " << i;
  }
}

// ---- bases and permutations ----------------------------------------------

TEST(ObjectBases, SinglePointBasesAreTheDataset) {
  const Dataset dataset = Dataset::from({{0, 0}, {1, 0}, {2, 1}});
  const BasisTable table = compute_object_bases(dataset, 1);
  ASSERT_EQ(table.bases.size(), 3u);
  EXPECT_EQ(table.bases[0], (IndexTuple{0}));
  EXPECT_EQ(table.bases[1], (IndexTuple{1}));
  EXPECT_EQ(table.bases[2], (IndexTuple{2}));
}

TEST(ObjectBases, PairBasesAreAscendingCombinations) {
  const Dataset dataset = Dataset::from({{0, 0}, {1, 0}, {2, 1}});
  const BasisTable table = compute_object_bases(dataset, 2);
  ASSERT_EQ(table.bases.size(), 3u);
  EXPECT_EQ(table.bases[0], (IndexTuple{0, 1}));
  EXPECT_EQ(table.bases[1], (IndexTuple{0, 2}));
  EXPECT_EQ(table.bases[2], (IndexTuple{1, 2}));
}

TEST(ObjectBases, CountsMatchBinomials) {
  std::mt19937 rng(3);
  const Dataset dataset = random_dataset(rng, 10, 40);
  EXPECT_EQ(compute_object_bases(dataset, 1).bases.size(), 10u);
  EXPECT_EQ(compute_object_bases(dataset, 2).bases.size(), 45u);
  EXPECT_EQ(compute_object_bases(dataset, 3).bases.size(), 120u);
}

TEST(ObjectBases, RejectsImpossibleBasisSize) {
  const Dataset dataset = Dataset::from({{0, 0}, {1, 0}});
  EXPECT_THROW(compute_object_bases(dataset, 0), std::invalid_argument);
  EXPECT_THROW(compute_object_bases(dataset, 3), std::invalid_argument);
}

TEST(Permutations, EnumeratesAllOrderings) {
  EXPECT_EQ(permutation_index_sequences(1),
            (std::vector<std::vector<std::uint32_t>>{{0}}));
  EXPECT_EQ(permutation_index_sequences(2),
            (std::vector<std::vector<std::uint32_t>>{{0, 1}, {1, 0}}));
  EXPECT_EQ(permutation_index_sequences(3).size(), 6u);
}

// ---- discovery on small fixtures -----------------------------------------

TEST(Discovery, ThreePointTranslationInventory) {
  const Dataset dataset = Dataset::from({{0, 0}, {1, 0}, {2, 1}});
  const auto records = maximal_transformable_patterns(dataset, t2());
  const std::vector<MTPRecord> expected{
      {make(t2(), {-2, -1}), Dataset::from({{2, 1}})},
      {make(t2(), {-1, -1}), Dataset::from({{2, 1}})},
      {make(t2(), {-1, 0}), Dataset::from({{1, 0}})},
      {make(t2(), {1, 0}), Dataset::from({{0, 0}})},
      {make(t2(), {1, 1}), Dataset::from({{1, 0}})},
      {make(t2(), {2, 1}), Dataset::from({{0, 0}})},
  };
  expect_same_records(records, expected);
}

TEST(Discovery, SinglePointHasNoTranslationPatterns) {
  EXPECT_TRUE(maximal_transformable_patterns(Dataset::from({{0, 0}}), t2()).empty());
}

TEST(Discovery, SinglePointReflectsOntoItself) {
  // The pitch reflection about the point's own height fixes it, so one
  // non-identity self-map survives.
  const Dataset dataset = Dataset::from({{3, 5}});
  const auto records = maximal_transformable_patterns(dataset, tr2());
  const std::vector<MTPRecord> expected{{make(tr2(), {0, -10, -1}), dataset}};
  expect_same_records(records, expected);
}

TEST(Discovery, MinSizeFiltersSmallPatterns) {
  const Dataset dataset = Dataset::from({{0, 0}, {1, 0}, {2, 1}});
  EXPECT_TRUE(maximal_transformable_patterns(dataset, t2(), 2).empty());
}

TEST(Discovery, CollinearRunHasGrowingPatterns) {
  const Dataset dataset = Dataset::from({{0, 0}, {1, 0}, {2, 0}, {3, 0}});
  const auto records = maximal_transformable_patterns(dataset, t2());
  const std::vector<MTPRecord> expected{
      {make(t2(), {-3, 0}), Dataset::from({{3, 0}})},
      {make(t2(), {-2, 0}), Dataset::from({{2, 0}, {3, 0}})},
      {make(t2(), {-1, 0}), Dataset::from({{1, 0}, {2, 0}, {3, 0}})},
      {make(t2(), {1, 0}), Dataset::from({{0, 0}, {1, 0}, {2, 0}})},
      {make(t2(), {2, 0}), Dataset::from({{0, 0}, {1, 0}})},
      {make(t2(), {3, 0}), Dataset::from({{0, 0}})},
  };
  expect_same_records(records, expected);
}

TEST(Discovery, PalindromeHasTotalSymmetry) {
  const Dataset dataset =
      Dataset::from({{0, 0}, {1, 2}, {2, 1}, {3, 1}, {4, 2}, {5, 0}});
  const auto records = maximal_transformable_patterns(dataset, str2(), 6);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].transformation, make(str2(), {-1, 5, 0, 1}));
  EXPECT_EQ(records[0].pattern, dataset);
  EXPECT_EQ(apply_to_set(records[0].transformation, dataset), dataset);
  EXPECT_EQ(invert(records[0].transformation), records[0].transformation);
}

TEST(Discovery, IdentityNeverAppears) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const Dataset dataset = random_dataset(rng, 8, 6);
    for (const TransformationClass* cls : {&t2(), &tr2(), &str2()}) {
      for (const MTPRecord& record : maximal_transformable_patterns(dataset, *cls)) {
        EXPECT_FALSE(is_identity(record.transformation));
      }
    }
  }
}

TEST(Discovery, RejectsBadArguments) {
  const Dataset dataset = Dataset::from({{0, 0}});
  EXPECT_THROW(maximal_transformable_patterns(dataset, t2(), 0), std::invalid_argument);
  EXPECT_THROW(maximal_transformable_patterns(dataset, str2()), std::invalid_argument);
}

// ---- discovery properties ------------------------------------------------

// Every pattern is maximal: no point outside it is mapped into the dataset.
TEST(DiscoveryProperties, PatternsAreMaximal) {
  std::mt19937 rng(29);
  for (int trial = 0; trial < 15; ++trial) {
    const Dataset dataset = random_dataset(rng, 9, 7);
    for (const TransformationClass* cls : {&t2(), &tr2(), &str2()}) {
      for (const MTPRecord& record : maximal_transformable_patterns(dataset, *cls)) {
        for (const Point& p : dataset.points()) {
          const bool mapped_inside = dataset.contains(apply(record.transformation, p));
          EXPECT_EQ(record.pattern.contains(p), mapped_inside);
        }
      }
    }
  }
}

// The image of a pattern under its own transformation lies in the dataset
// and is the pattern of the inverse transformation.
TEST(DiscoveryProperties, InverseImageLaw) {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 15; ++trial) {
    const Dataset dataset = random_dataset(rng, 8, 6);
    for (const TransformationClass* cls : {&t2(), &tr2(), &str2()}) {
      const auto records = maximal_transformable_patterns(dataset, *cls);
      std::map<SigmaVector, const MTPRecord*> by_sigma;
      for (const MTPRecord& record : records) by_sigma[record.transformation.sigma] = &record;
      for (const MTPRecord& record : records) {
        const Dataset image = apply_to_set(record.transformation, record.pattern);
        EXPECT_TRUE(is_subset(image, dataset));
        const auto inverse = by_sigma.find(invert(record.transformation).sigma);
        ASSERT_NE(inverse, by_sigma.end());
        EXPECT_EQ(inverse->second->pattern, image);
      }
    }
  }
}

// Translation discovery is the difference-vector table: for every vector v
// between two points, the pattern of v is exactly the set of origins whose
// translate stays inside.
TEST(DiscoveryProperties, TranslationsMatchDifferenceTable) {
  std::mt19937 rng(37);
  for (int trial = 0; trial < 15; ++trial) {
    const Dataset dataset = random_dataset(rng, 10, 8);
    std::map<SigmaVector, std::vector<Point>> table;
    for (const Point& origin : dataset.points()) {
      for (const Point& target : dataset.points()) {
        if (origin == target) continue;
        table[{target[0] - origin[0], target[1] - origin[1]}].push_back(origin);
      }
    }
    const auto records = maximal_transformable_patterns(dataset, t2());
    ASSERT_EQ(records.size(), table.size());
    std::size_t index = 0;
    for (const auto& [sigma, origins] : table) {
      EXPECT_EQ(records[index].transformation.sigma, sigma);
      EXPECT_EQ(records[index].pattern, Dataset::from(origins));
      ++index;
    }
  }
}

TEST(DiscoveryProperties, AgreesWithOracleOnRandomData) {
  std::mt19937 rng(43);
  std::uniform_int_distribution<int> size(3, 10);
  for (int trial = 0; trial < 25; ++trial) {
    const Dataset dataset = random_dataset(rng, size(rng), 9);
    for (const TransformationClass* cls : {&t2(), &tr2(), &str2()}) {
      expect_same_records(maximal_transformable_patterns(dataset, *cls),
                          mtp_oracle(dataset, *cls));
    }
  }
}

TEST(DiscoveryProperties, WorkerCountDoesNotChangeResults) {
  std::mt19937 rng(47);
  const Dataset dataset = random_dataset(rng, 12, 9);
  for (const TransformationClass* cls : {&t2(), &tr2(), &str2()}) {
    const auto one = maximal_transformable_patterns(dataset, *cls, 1, 1);
    const auto four = maximal_transformable_patterns(dataset, *cls, 1, 4);
    expect_same_records(four, one);
  }
}

TEST(DiscoveryProperties, MinSizeMatchesPostFilter) {
  std::mt19937 rng(53);
  const Dataset dataset = random_dataset(rng, 10, 6);
  for (const TransformationClass* cls : {&t2(), &tr2(), &str2()}) {
    const auto all = maximal_transformable_patterns(dataset, *cls, 1);
    const auto filtered = maximal_transformable_patterns(dataset, *cls, 3);
    std::vector<MTPRecord> expected;
    for (const MTPRecord& record : all) {
      if (record.pattern.size() >= 3) expected.push_back(record);
    }
    expect_same_records(filtered, expected);
  }
}

// Exercise the worker-local flush path with a buffer small enough to force
// several sort-and-merge rounds.
TEST(DiscoveryInternals, FlushThresholdDoesNotChangeResults) {
  std::mt19937 rng(59);
  const Dataset dataset = random_dataset(rng, 12, 5);
  const auto baseline = maximal_transformable_patterns(dataset, str2());

  const BasisTable table = compute_object_bases(dataset, 2);
  detail::EntryAccumulator tiny;
  tiny.flush_threshold = 8;
  const auto permutations = permutation_index_sequences(2);
  boost::container::small_vector<Point, 2> object;
  boost::container::small_vector<Point, 2> image;
  for (std::size_t i = 0; i < table.bases.size(); ++i) {
    object.clear();
    for (const std::uint32_t index : table.bases[i]) object.push_back(table.points[index]);
    for (std::size_t j = i; j < table.bases.size(); ++j) {
      for (const auto& order : permutations) {
        image.clear();
        for (const std::uint32_t slot : order) {
          image.push_back(table.points[table.bases[j][slot]]);
        }
        for (Transformation& f : str2().transformations_between(
                 {object.data(), object.size()}, {image.data(), image.size()})) {
          tiny.add(invert(f).sigma, table.bases[j]);
          tiny.add(std::move(f.sigma), table.bases[i]);
        }
      }
    }
  }
  tiny.flush();

  std::vector<MTPRecord> rebuilt;
  for (detail::PatternEntry& entry : tiny.collapsed) {
    Transformation f{ClassId::STR2, std::move(entry.sigma)};
    if (str2().is_identity(f)) continue;
    std::vector<Point> points;
    for (const std::uint32_t index : entry.members) points.push_back(table.points[index]);
    rebuilt.push_back(MTPRecord{std::move(f), Dataset::from(std::move(points))});
  }
  expect_same_records(rebuilt, baseline);
}

}  // namespace
}  // namespace mtpkit
