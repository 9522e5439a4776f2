#pragma once

// k-dimensional points with exact rational coordinates, and point sets kept
// in a canonical form: sorted ascending lexicographically, no duplicates.
// The canonical order makes set operations linear merges and set equality
// structural equality.

#include "mtpkit/rational.hpp"

#include <boost/container/small_vector.hpp>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mtpkit {

class Point {
 public:
  using Coords = boost::container::small_vector<Rational, 2>;

  Point() = default;
  explicit Point(Coords coords) : coords_(std::move(coords)) {}
  Point(std::initializer_list<Rational> coords) : coords_(coords) {}

  std::uint32_t dimension() const { return static_cast<std::uint32_t>(coords_.size()); }
  const Rational& operator[](std::size_t axis) const { return coords_[axis]; }
  std::span<const Rational> coords() const { return {coords_.data(), coords_.size()}; }

  bool operator==(const Point& other) const { return coords_ == other.coords_; }

 private:
  Coords coords_;
};

/// Total lexicographic order on points of equal dimension: earlier axes
/// dominate. Comparing points of different dimensions is a usage error.
inline std::strong_ordering lex_compare(const Point& a, const Point& b) {
  if (a.dimension() != b.dimension()) {
    throw std::invalid_argument("lex_compare: dimension mismatch");
  }
  for (std::size_t axis = 0; axis < a.dimension(); ++axis) {
    if (a[axis] < b[axis]) return std::strong_ordering::less;
    if (b[axis] < a[axis]) return std::strong_ordering::greater;
  }
  return std::strong_ordering::equal;
}

inline bool lex_less(const Point& a, const Point& b) {
  return lex_compare(a, b) == std::strong_ordering::less;
}

struct PointLess {
  bool operator()(const Point& a, const Point& b) const { return lex_less(a, b); }
};

/// A finite set of distinct points of uniform dimension. Immutable after
/// construction; the backing vector is always sorted ascending by
/// lex_compare, so two Datasets are equal iff their point vectors are.
class Dataset {
 public:
  Dataset() = default;

  explicit Dataset(std::uint32_t dimension) : dimension_(dimension) {}

  Dataset(std::uint32_t dimension, std::vector<Point> points)
      : dimension_(dimension), points_(std::move(points)) {
    for (const Point& p : points_) {
      if (p.dimension() != dimension_) {
        throw std::invalid_argument("Dataset: point dimension mismatch");
      }
    }
    canonicalize();
  }

  /// Build from a point list, taking the dimension from the first point.
  static Dataset from(std::vector<Point> points) {
    const std::uint32_t dimension = points.empty() ? 0 : points.front().dimension();
    return Dataset(dimension, std::move(points));
  }

  std::uint32_t dimension() const { return dimension_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  const std::vector<Point>& points() const { return points_; }
  const Point& operator[](std::size_t index) const { return points_[index]; }

  bool contains(const Point& p) const {
    return std::binary_search(points_.begin(), points_.end(), p, PointLess{});
  }

  bool operator==(const Dataset& other) const {
    return dimension_ == other.dimension_ && points_ == other.points_;
  }

 private:
  void canonicalize() {
    std::sort(points_.begin(), points_.end(), PointLess{});
    points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
  }

  std::uint32_t dimension_ = 0;
  std::vector<Point> points_;
};

/// The points of a set in ascending lexicographic order.
inline const std::vector<Point>& sorted_points(const Dataset& dataset) {
  return dataset.points();
}

namespace detail {

inline std::uint32_t common_dimension(const Dataset& a, const Dataset& b) {
  if (!a.empty() && !b.empty() && a.dimension() != b.dimension()) {
    throw std::invalid_argument("set operation: dimension mismatch");
  }
  return a.empty() ? b.dimension() : a.dimension();
}

}  // namespace detail

inline Dataset set_union(const Dataset& a, const Dataset& b) {
  const std::uint32_t dimension = detail::common_dimension(a, b);
  std::vector<Point> merged;
  merged.reserve(a.size() + b.size());
  std::set_union(a.points().begin(), a.points().end(), b.points().begin(), b.points().end(),
                 std::back_inserter(merged), PointLess{});
  return Dataset(dimension, std::move(merged));
}

inline Dataset set_intersection(const Dataset& a, const Dataset& b) {
  const std::uint32_t dimension = detail::common_dimension(a, b);
  std::vector<Point> shared;
  std::set_intersection(a.points().begin(), a.points().end(), b.points().begin(),
                        b.points().end(), std::back_inserter(shared), PointLess{});
  return Dataset(dimension, std::move(shared));
}

inline Dataset set_difference(const Dataset& a, const Dataset& b) {
  const std::uint32_t dimension = detail::common_dimension(a, b);
  std::vector<Point> rest;
  std::set_difference(a.points().begin(), a.points().end(), b.points().begin(), b.points().end(),
                      std::back_inserter(rest), PointLess{});
  return Dataset(dimension, std::move(rest));
}

/// True iff every point of `inner` is also a point of `outer`.
inline bool is_subset(const Dataset& inner, const Dataset& outer) {
  if (inner.size() > outer.size()) return false;
  for (const Point& p : inner.points()) {
    if (!outer.contains(p)) return false;
  }
  return true;
}

}  // namespace mtpkit
