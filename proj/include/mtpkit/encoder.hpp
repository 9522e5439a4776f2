#pragma once

// Lossless compression of a point set as a selection of occurrence sets.
// An occurrence set <P, T> stands for the points P together with every
// image f(P), f in T; a greedy pass admits occurrence sets in decreasing
// order of compression factor as long as each pays for itself against the
// points it newly covers, and whatever stays uncovered lands in a residual
// that is stored verbatim. Decoding is the plain union of all images and
// the residual, so the encoding is lossless by construction.

#include "mtpkit/geometry.hpp"
#include "mtpkit/mtp.hpp"
#include "mtpkit/parallel.hpp"
#include "mtpkit/rational.hpp"
#include "mtpkit/transform.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mtpkit {

/// A pattern and the transformations whose maximal transformable pattern
/// contains it. Transformations are ascending by parameter vector.
struct OccurrenceSet {
  Dataset pattern;
  std::vector<Transformation> transformations;

  bool operator==(const OccurrenceSet&) const = default;
};

/// Encoded form of a point set: occurrence sets in admission order plus the
/// residual points no admitted occurrence set covers.
struct Encoding {
  std::uint32_t dimension = 0;
  ClassId class_id = ClassId::T2;
  std::vector<OccurrenceSet> occurrence_sets;
  Dataset residual;

  bool operator==(const Encoding&) const = default;
};

/// Records bucketed by pattern size. by_size[s] holds the records whose
/// pattern has exactly s points; sizes lists the non-empty buckets in
/// ascending order.
template <typename Record>
struct SizeIndex {
  std::vector<std::vector<Record>> by_size;
  std::vector<std::uint32_t> sizes;
};

inline std::strong_ordering compare_point_sequences(const Dataset& a, const Dataset& b) {
  return std::lexicographical_compare_three_way(
      a.points().begin(), a.points().end(), b.points().begin(), b.points().end(),
      [](const Point& x, const Point& y) { return lex_compare(x, y); });
}

inline std::strong_ordering compare_transformation_lists(const std::vector<Transformation>& a,
                                                         const std::vector<Transformation>& b) {
  return std::lexicographical_compare_three_way(
      a.begin(), a.end(), b.begin(), b.end(),
      [](const Transformation& x, const Transformation& y) {
        return compare_transformations(x, y);
      });
}

/// Bucket discovery output by pattern size. Within a bucket records are
/// sorted by (pattern, transformation), so records sharing a pattern are
/// contiguous.
inline SizeIndex<MTPRecord> index_mtps(std::vector<MTPRecord> records,
                                       std::size_t dataset_size) {
  SizeIndex<MTPRecord> index;
  index.by_size.resize(dataset_size + 1);
  for (MTPRecord& record : records) {
    const std::size_t size = record.pattern.size();
    if (size == 0 || size > dataset_size) {
      throw std::invalid_argument("index_mtps: pattern size out of range");
    }
    index.by_size[size].push_back(std::move(record));
  }
  for (std::uint32_t size = 1; size <= dataset_size; ++size) {
    auto& bucket = index.by_size[size];
    if (bucket.empty()) continue;
    detail::sort_by_index(bucket, [](const MTPRecord& a, const MTPRecord& b) {
      const auto by_pattern = compare_point_sequences(a.pattern, b.pattern);
      if (by_pattern != std::strong_ordering::equal) {
        return by_pattern == std::strong_ordering::less;
      }
      return compare_transformations(a.transformation, b.transformation) ==
             std::strong_ordering::less;
    });
    index.sizes.push_back(size);
  }
  return index;
}

/// Collapse records sharing a pattern into one occurrence set per pattern.
inline SizeIndex<OccurrenceSet> merge_mtps(const SizeIndex<MTPRecord>& index) {
  SizeIndex<OccurrenceSet> merged;
  merged.by_size.resize(index.by_size.size());
  merged.sizes = index.sizes;
  for (const std::uint32_t size : index.sizes) {
    const auto& bucket = index.by_size[size];
    auto& out = merged.by_size[size];
    std::size_t run = 0;
    while (run < bucket.size()) {
      std::size_t end = run + 1;
      while (end < bucket.size() && bucket[end].pattern == bucket[run].pattern) ++end;
      OccurrenceSet os;
      os.pattern = bucket[run].pattern;
      os.transformations.reserve(end - run);
      for (std::size_t i = run; i < end; ++i) {
        os.transformations.push_back(bucket[i].transformation);
      }
      out.push_back(std::move(os));
      run = end;
    }
  }
  return merged;
}

namespace detail {

inline std::vector<std::pair<std::uint32_t, std::uint32_t>> flatten_index(
    const SizeIndex<OccurrenceSet>& index) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> slots;
  for (const std::uint32_t size : index.sizes) {
    for (std::uint32_t i = 0; i < index.by_size[size].size(); ++i) slots.emplace_back(size, i);
  }
  return slots;
}

}  // namespace detail

/// Extend every occurrence set with the transformations of all occurrence
/// sets whose pattern strictly contains its own: if f maps a superset of P
/// into the dataset it maps P into the dataset too. Absorbed lists are the
/// pre-augmentation ones, which matches processing sizes in ascending
/// order, and makes the step order-free and safe to parallelise.
inline SizeIndex<OccurrenceSet> augment_from_supersets(const SizeIndex<OccurrenceSet>& index,
                                                       unsigned jobs = 0) {
  SizeIndex<OccurrenceSet> augmented = index;
  const auto slots = detail::flatten_index(index);
  parallel_for(slots.size(), jobs, [&](std::size_t task, unsigned) {
    const auto [size, element] = slots[task];
    OccurrenceSet& os = augmented.by_size[size][element];
    // Pool every absorbed list and union once at the end; repeated pairwise
    // unions would re-copy the growing result per superset.
    std::vector<Transformation> pooled;
    for (const std::uint32_t larger : index.sizes) {
      if (larger <= size) continue;
      for (const OccurrenceSet& candidate : index.by_size[larger]) {
        if (!is_subset(os.pattern, candidate.pattern)) continue;
        pooled.insert(pooled.end(), candidate.transformations.begin(),
                      candidate.transformations.end());
      }
    }
    if (pooled.empty()) return;
    pooled.insert(pooled.end(), os.transformations.begin(), os.transformations.end());
    detail::sort_by_index(pooled, TransformationLess{});
    pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());
    os.transformations = std::move(pooled);
  });
  return augmented;
}

/// Points reachable from an occurrence set: the pattern plus every image.
inline Dataset covered_set(const OccurrenceSet& os) {
  Dataset covered = os.pattern;
  for (const Transformation& f : os.transformations) {
    covered = set_union(covered, apply_to_set(f, os.pattern));
  }
  return covered;
}

/// Cost of storing an occurrence set: one k-tuple per pattern point plus
/// one K-tuple per transformation.
inline std::size_t description_length(const OccurrenceSet& os, std::uint32_t dimension,
                                      std::uint32_t complexity) {
  return std::size_t{dimension} * os.pattern.size() +
         std::size_t{complexity} * os.transformations.size();
}

inline Rational compression_factor(const OccurrenceSet& os, std::uint32_t dimension,
                                   std::uint32_t complexity) {
  return Rational(std::size_t{dimension} * covered_set(os).size(),
                  description_length(os, dimension, complexity));
}

/// Drop transformations that add nothing to the covered set. First, of
/// several transformations with the same image only the cheapest survives
/// (lowest complexity rank, then lowest sigma). Second, a greedy pass over
/// the rest, most complex first, removes each transformation whose image
/// stays covered by the pattern and the other surviving images; self-maps
/// always go. The covered set is unchanged by construction.
inline OccurrenceSet remove_redundant_transformations(const OccurrenceSet& os) {
  if (os.transformations.empty()) return os;
  const std::size_t count = os.transformations.size();
  std::vector<Dataset> images;
  images.reserve(count);
  for (const Transformation& f : os.transformations) {
    images.push_back(apply_to_set(f, os.pattern));
  }
  std::vector<int> ranks(count);
  for (std::size_t i = 0; i < count; ++i) ranks[i] = complexity_rank(os.transformations[i]);

  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto by_image = compare_point_sequences(images[a], images[b]);
    if (by_image != std::strong_ordering::equal) return by_image == std::strong_ordering::less;
    if (ranks[a] != ranks[b]) return ranks[a] < ranks[b];
    return compare_transformations(os.transformations[a], os.transformations[b]) ==
           std::strong_ordering::less;
  });

  std::vector<bool> kept(count, false);
  for (std::size_t i = 0; i < order.size();) {
    std::size_t end = i + 1;
    while (end < order.size() && images[order[end]] == images[order[i]]) ++end;
    kept[order[i]] = true;
    i = end;
  }

  // Multiplicity of every covered point among the pattern and the kept
  // images; an image is droppable iff each of its points is covered at
  // least twice.
  std::map<Point, std::size_t, PointLess> multiplicity;
  for (const Point& p : os.pattern.points()) ++multiplicity[p];
  for (std::size_t i = 0; i < count; ++i) {
    if (!kept[i]) continue;
    for (const Point& p : images[i].points()) ++multiplicity[p];
  }

  std::vector<std::size_t> survivors;
  for (std::size_t i = 0; i < count; ++i) {
    if (kept[i]) survivors.push_back(i);
  }
  std::sort(survivors.begin(), survivors.end(), [&](std::size_t a, std::size_t b) {
    if (ranks[a] != ranks[b]) return ranks[a] > ranks[b];
    return compare_transformations(os.transformations[a], os.transformations[b]) ==
           std::strong_ordering::greater;
  });
  for (const std::size_t i : survivors) {
    bool droppable = true;
    for (const Point& p : images[i].points()) {
      if (multiplicity[p] < 2) {
        droppable = false;
        break;
      }
    }
    if (!droppable) continue;
    for (const Point& p : images[i].points()) --multiplicity[p];
    kept[i] = false;
  }

  OccurrenceSet pruned;
  pruned.pattern = os.pattern;
  for (std::size_t i = 0; i < count; ++i) {
    if (kept[i]) pruned.transformations.push_back(os.transformations[i]);
  }
  return pruned;
}

/// Full occurrence-set computation: absorb transformations from strict
/// superset patterns, restore per-bucket order, prune redundant
/// transformations, and drop occurrence sets left without any.
inline SizeIndex<OccurrenceSet> compute_occurrence_sets(const SizeIndex<OccurrenceSet>& index,
                                                        unsigned jobs = 0) {
  SizeIndex<OccurrenceSet> result = augment_from_supersets(index, jobs);
  for (const std::uint32_t size : result.sizes) {
    auto& bucket = result.by_size[size];
    detail::sort_by_index(bucket, [](const OccurrenceSet& a, const OccurrenceSet& b) {
      const auto by_pattern = compare_point_sequences(a.pattern, b.pattern);
      if (by_pattern != std::strong_ordering::equal) {
        return by_pattern == std::strong_ordering::less;
      }
      return compare_transformation_lists(a.transformations, b.transformations) ==
             std::strong_ordering::less;
    });
    bucket.erase(std::unique(bucket.begin(), bucket.end()), bucket.end());
  }

  const auto slots = detail::flatten_index(result);
  parallel_for(slots.size(), jobs, [&](std::size_t task, unsigned) {
    const auto [size, element] = slots[task];
    OccurrenceSet& os = result.by_size[size][element];
    os = remove_redundant_transformations(os);
  });

  std::vector<std::uint32_t> occupied;
  for (const std::uint32_t size : result.sizes) {
    auto& bucket = result.by_size[size];
    std::erase_if(bucket, [](const OccurrenceSet& os) { return os.transformations.empty(); });
    if (!bucket.empty()) occupied.push_back(size);
  }
  result.sizes = std::move(occupied);
  return result;
}

/// Flatten an index into the candidate list for the greedy selection:
/// only occurrence sets that actually compress (factor above 1), ordered
/// by compression factor, then coverage, then pattern.
inline std::vector<OccurrenceSet> sort_occurrence_sets(const SizeIndex<OccurrenceSet>& index,
                                                       const TransformationClass& cls) {
  struct Scored {
    OccurrenceSet os;
    Rational factor;
    std::size_t coverage = 0;
  };
  std::vector<Scored> scored;
  for (const std::uint32_t size : index.sizes) {
    // Covered sets obey |COV| <= |P| * (|T| + 1), so k|P| <= K caps the
    // factor at 1 for any number of transformations; skip those buckets
    // without computing any covered set.
    if (std::size_t{cls.dimension()} * size <= cls.complexity()) continue;
    for (const OccurrenceSet& os : index.by_size[size]) {
      Scored entry;
      entry.coverage = covered_set(os).size();
      entry.factor = Rational(std::size_t{cls.dimension()} * entry.coverage,
                              description_length(os, cls.dimension(), cls.complexity()));
      if (entry.factor <= 1) continue;
      entry.os = os;
      scored.push_back(std::move(entry));
    }
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.factor != b.factor) return a.factor > b.factor;
    if (a.coverage != b.coverage) return a.coverage > b.coverage;
    return compare_point_sequences(a.os.pattern, b.os.pattern) == std::strong_ordering::less;
  });
  std::vector<OccurrenceSet> sorted;
  sorted.reserve(scored.size());
  for (Scored& entry : scored) sorted.push_back(std::move(entry.os));
  return sorted;
}

/// Greedy selection: walk the sorted candidates and admit each occurrence
/// set whose description is strictly cheaper than storing the points it
/// newly covers verbatim. Uncovered points form the residual.
inline Encoding compute_encoding(const std::vector<OccurrenceSet>& sorted,
                                 const Dataset& dataset, const TransformationClass& cls) {
  if (!dataset.empty() && dataset.dimension() != cls.dimension()) {
    throw std::invalid_argument("compute_encoding: dataset dimension mismatch");
  }
  Encoding encoding;
  encoding.dimension = dataset.empty() ? cls.dimension() : dataset.dimension();
  encoding.class_id = cls.class_id();
  Dataset covered(encoding.dimension);
  for (const OccurrenceSet& os : sorted) {
    const std::size_t cost = description_length(os, cls.dimension(), cls.complexity());
    const Dataset fresh = set_difference(covered_set(os), covered);
    if (cost < std::size_t{cls.dimension()} * fresh.size()) {
      encoding.occurrence_sets.push_back(os);
      covered = set_union(covered, fresh);
    }
  }
  encoding.residual = set_difference(dataset, covered);
  return encoding;
}

/// Total description length: admitted occurrence sets plus the residual
/// stored as plain k-tuples.
inline std::size_t encoding_description_length(const Encoding& encoding) {
  const TransformationClass& cls = transformation_class(encoding.class_id);
  std::size_t total = std::size_t{encoding.dimension} * encoding.residual.size();
  for (const OccurrenceSet& os : encoding.occurrence_sets) {
    total += description_length(os, encoding.dimension, cls.complexity());
  }
  return total;
}

/// End-to-end encoder: discover patterns, build occurrence sets, select
/// greedily. Never longer than storing the dataset verbatim.
inline Encoding encode_point_set(const Dataset& dataset, const TransformationClass& cls,
                                 std::uint32_t min_size = 1, unsigned jobs = 0) {
  if (dataset.empty()) throw std::invalid_argument("encode_point_set: dataset is empty");
  if (dataset.dimension() != cls.dimension()) {
    throw std::invalid_argument("encode_point_set: dataset dimension mismatch");
  }
  std::vector<OccurrenceSet> sorted;
  if (dataset.size() >= cls.basis_size()) {
    auto records = maximal_transformable_patterns(dataset, cls, min_size, jobs);
    if (!records.empty()) {
      const auto merged = merge_mtps(index_mtps(std::move(records), dataset.size()));
      sorted = sort_occurrence_sets(compute_occurrence_sets(merged, jobs), cls);
    }
  }
  return compute_encoding(sorted, dataset, cls);
}

/// Reconstruct the encoded set: union of every covered set and the
/// residual. Lossless inverse of encode_point_set.
inline Dataset decode(const Encoding& encoding) {
  Dataset out(encoding.dimension);
  for (const OccurrenceSet& os : encoding.occurrence_sets) {
    out = set_union(out, covered_set(os));
  }
  return set_union(out, encoding.residual);
}

}  // namespace mtpkit
