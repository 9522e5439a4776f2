#pragma once

// Similarity between point sets through compression: the normalised
// compression distance treats the encoder's description length as an
// approximation of information content. Two sets are close when encoding
// their concatenation costs little more than encoding the larger one
// alone. The concatenation keeps both sets intact by shifting the second
// one past the first along the first axis.

#include "mtpkit/encoder.hpp"
#include "mtpkit/geometry.hpp"
#include "mtpkit/parallel.hpp"
#include "mtpkit/rational.hpp"
#include "mtpkit/transform.hpp"

#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mtpkit {

struct CorpusItem {
  std::string name;
  std::string label;
  Dataset dataset;
};

struct Corpus {
  std::vector<CorpusItem> items;
};

/// Union of `first` with a copy of `second` translated along axis 0 so it
/// starts strictly after `first` ends; the copies stay disjoint and the
/// internal structure of both operands survives unchanged.
inline Dataset build_pair_dataset(const Dataset& first, const Dataset& second,
                                  const Rational& gap) {
  if (first.empty() || second.empty()) {
    throw std::invalid_argument("build_pair_dataset: operands must be nonempty");
  }
  if (first.dimension() != second.dimension()) {
    throw std::invalid_argument("build_pair_dataset: dimension mismatch");
  }
  if (gap <= 0) throw std::invalid_argument("build_pair_dataset: gap must be positive");
  // Points are sorted lexicographically, so the first axis extremes sit at
  // the ends of the point vectors.
  const Rational shift = first.points().back()[0] - second.points().front()[0] + gap;
  std::vector<Point> moved;
  moved.reserve(second.size());
  for (const Point& p : second.points()) {
    Point::Coords coords(p.coords().begin(), p.coords().end());
    coords[0] += shift;
    moved.push_back(Point(std::move(coords)));
  }
  return set_union(first, Dataset(second.dimension(), std::move(moved)));
}

/// The distance given the three description lengths.
inline Rational ncd_from_lengths(std::size_t pair_length, std::size_t first_length,
                                 std::size_t second_length) {
  const std::size_t lo = std::min(first_length, second_length);
  const std::size_t hi = std::max(first_length, second_length);
  if (hi == 0) throw std::invalid_argument("ncd_from_lengths: zero description length");
  return Rational(BigInt(pair_length) - BigInt(lo), BigInt(hi));
}

/// Normalised compression distance between two point sets under one
/// encoder configuration.
inline Rational ncd(const Dataset& first, const Dataset& second, const TransformationClass& cls,
                    std::uint32_t min_size = 1, const Rational& gap = Rational(1),
                    unsigned jobs = 0) {
  const std::size_t first_length =
      encoding_description_length(encode_point_set(first, cls, min_size, jobs));
  const std::size_t second_length =
      encoding_description_length(encode_point_set(second, cls, min_size, jobs));
  const std::size_t pair_length = encoding_description_length(
      encode_point_set(build_pair_dataset(first, second, gap), cls, min_size, jobs));
  return ncd_from_lengths(pair_length, first_length, second_length);
}

/// Pairwise distances over a corpus. Every item is encoded once and every
/// unordered pair once; the description lengths are kept so callers can
/// derive compression statistics without re-encoding.
struct DistanceMatrix {
  std::vector<std::vector<Rational>> entries;
  std::vector<std::size_t> item_lengths;
  std::vector<std::size_t> pair_lengths;
  std::size_t encoder_invocations = 0;

  static std::size_t pair_slot(std::size_t count, std::size_t i, std::size_t j) {
    return i * count - i * (i + 1) / 2 + (j - i - 1);
  }
};

inline DistanceMatrix distance_matrix(const Corpus& corpus, const TransformationClass& cls,
                                      std::uint32_t min_size = 1,
                                      const Rational& gap = Rational(1), unsigned jobs = 0) {
  const std::size_t count = corpus.items.size();
  DistanceMatrix matrix;
  matrix.entries.assign(count, std::vector<Rational>(count, Rational(0)));
  matrix.item_lengths.assign(count, 0);
  matrix.pair_lengths.assign(count * (count > 0 ? count - 1 : 0) / 2, 0);
  std::atomic<std::size_t> invocations{0};

  parallel_for(count, jobs, [&](std::size_t i, unsigned) {
    matrix.item_lengths[i] =
        encoding_description_length(encode_point_set(corpus.items[i].dataset, cls, min_size, 1));
    invocations.fetch_add(1, std::memory_order_relaxed);
  });

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(matrix.pair_lengths.size());
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) pairs.emplace_back(i, j);
  }
  parallel_for(pairs.size(), jobs, [&](std::size_t task, unsigned) {
    const auto [i, j] = pairs[task];
    const Dataset joined = build_pair_dataset(corpus.items[i].dataset, corpus.items[j].dataset, gap);
    matrix.pair_lengths[DistanceMatrix::pair_slot(count, i, j)] =
        encoding_description_length(encode_point_set(joined, cls, min_size, 1));
    invocations.fetch_add(1, std::memory_order_relaxed);
  });

  for (const auto& [i, j] : pairs) {
    const Rational distance =
        ncd_from_lengths(matrix.pair_lengths[DistanceMatrix::pair_slot(count, i, j)],
                         matrix.item_lengths[i], matrix.item_lengths[j]);
    matrix.entries[i][j] = distance;
    matrix.entries[j][i] = distance;
  }
  matrix.encoder_invocations = invocations.load();
  return matrix;
}

/// Leave-one-out nearest-neighbour classification over a distance matrix.
/// Ties go to the smallest index, which keeps the result deterministic.
struct LoocvResult {
  std::vector<std::size_t> nearest;
  std::vector<std::string> predicted;
  std::size_t correct = 0;
  Rational success_rate;
};

inline LoocvResult one_nn_loocv(const DistanceMatrix& matrix,
                                const std::vector<std::string>& labels) {
  const std::size_t count = labels.size();
  if (count < 2) throw std::invalid_argument("one_nn_loocv: need at least two items");
  if (matrix.entries.size() != count) {
    throw std::invalid_argument("one_nn_loocv: matrix and label sizes differ");
  }
  LoocvResult result;
  result.nearest.resize(count);
  result.predicted.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t best = i == 0 ? 1 : 0;
    for (std::size_t j = 0; j < count; ++j) {
      if (j == i) continue;
      if (matrix.entries[i][j] < matrix.entries[i][best]) best = j;
    }
    result.nearest[i] = best;
    result.predicted[i] = labels[best];
    if (labels[best] == labels[i]) ++result.correct;
  }
  result.success_rate = Rational(result.correct, count);
  return result;
}

}  // namespace mtpkit
