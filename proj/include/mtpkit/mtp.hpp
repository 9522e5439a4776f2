#pragma once

// Discovery of maximal transformable patterns. For a point set D and a
// transformation f, the maximal transformable pattern of f is
// M(D, f) = D intersect f^-1(D): all points of D that f maps back into D.
// The discovery enumerates, for every pair of object bases and every
// ordering of the image basis, the class members mapping one onto the
// other; each solution f contributes its object basis to M(D, f) and its
// inverse contributes the image basis to M(D, f^-1). Collecting every
// contribution of a transformation therefore assembles its full pattern.
//
// Workers append to private buffers, sort them by parameter vector and
// collapse equal-transformation runs by set union; merging the per-worker
// lists yields one sigma-sorted list per run, independent of the worker
// count and of scheduling order. Basis pairs are grouped by the class's
// pairing key beforehand, so pairs no member can relate are never solved.

#include "mtpkit/geometry.hpp"
#include "mtpkit/parallel.hpp"
#include "mtpkit/transform.hpp"

#include <boost/container/small_vector.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mtpkit {

/// One discovered pattern: a non-identity transformation together with
/// M(D, f), which is never smaller than the requested minimum size.
struct MTPRecord {
  Transformation transformation;
  Dataset pattern;
};

using IndexTuple = boost::container::small_vector<std::uint32_t, 2>;

/// The object bases of a dataset: every ascending beta-tuple of point
/// indices, listed in ascending lexicographic order.
struct BasisTable {
  std::uint32_t basis_size = 0;
  std::vector<Point> points;
  std::vector<IndexTuple> bases;
};

inline BasisTable compute_object_bases(const Dataset& dataset, std::uint32_t beta) {
  if (beta < 1) throw std::invalid_argument("compute_object_bases: basis size must be >= 1");
  if (dataset.size() < beta) {
    throw std::invalid_argument("compute_object_bases: dataset smaller than basis size");
  }
  BasisTable table;
  table.basis_size = beta;
  table.points = dataset.points();
  const std::uint32_t n = static_cast<std::uint32_t>(dataset.size());
  IndexTuple combo(beta);
  for (std::uint32_t i = 0; i < beta; ++i) combo[i] = i;
  for (;;) {
    table.bases.push_back(combo);
    // Advance the rightmost index that still has room, reset the tail.
    std::uint32_t axis = beta;
    while (axis > 0) {
      --axis;
      if (combo[axis] + (beta - axis) < n) break;
      if (axis == 0) return table;
    }
    ++combo[axis];
    for (std::uint32_t i = axis + 1; i < beta; ++i) combo[i] = combo[i - 1] + 1;
  }
}

/// All orderings of 0..beta-1, in ascending lexicographic order.
inline std::vector<std::vector<std::uint32_t>> permutation_index_sequences(std::uint32_t beta) {
  std::vector<std::uint32_t> order(beta);
  for (std::uint32_t i = 0; i < beta; ++i) order[i] = i;
  std::vector<std::vector<std::uint32_t>> sequences;
  do {
    sequences.push_back(order);
  } while (std::next_permutation(order.begin(), order.end()));
  return sequences;
}

namespace detail {

// A transformation and the point indices collected for it so far, in
// ascending order without duplicates.
struct PatternEntry {
  SigmaVector sigma;
  boost::container::small_vector<std::uint32_t, 4> members;
};

inline bool sigma_less(const SigmaVector& a, const SigmaVector& b) {
  return lex_compare(a, b) == std::strong_ordering::less;
}

// Reorder heavy elements through an index permutation: the sort swaps
// 4-byte indices and every element moves exactly once at the end.
template <typename Element, typename Less>
void sort_by_index(std::vector<Element>& items, Less&& less) {
  std::vector<std::uint32_t> order(items.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return less(items[a], items[b]);
  });
  std::vector<Element> sorted;
  sorted.reserve(items.size());
  for (const std::uint32_t i : order) sorted.push_back(std::move(items[i]));
  items = std::move(sorted);
}

// Sort a buffer of single-basis contributions and collapse equal-sigma runs
// into one entry whose members are the union of the run's bases.
inline void sort_and_collapse(std::vector<PatternEntry>& entries) {
  sort_by_index(entries, [](const PatternEntry& a, const PatternEntry& b) {
    return sigma_less(a.sigma, b.sigma);
  });
  std::size_t out = 0;
  std::size_t run = 0;
  std::vector<std::uint32_t> pool;
  while (run < entries.size()) {
    std::size_t end = run + 1;
    while (end < entries.size() && entries[end].sigma == entries[run].sigma) ++end;
    if (end - run > 1) {
      pool.clear();
      for (std::size_t i = run; i < end; ++i) {
        pool.insert(pool.end(), entries[i].members.begin(), entries[i].members.end());
      }
      std::sort(pool.begin(), pool.end());
      pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
      entries[run].members.assign(pool.begin(), pool.end());
    }
    if (out != run) entries[out] = std::move(entries[run]);
    ++out;
    run = end;
  }
  entries.resize(out);
}

// Merge two sigma-sorted collapsed lists, unioning members on equal sigma.
inline std::vector<PatternEntry> merge_entry_lists(std::vector<PatternEntry> a,
                                                   std::vector<PatternEntry> b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  std::vector<PatternEntry> merged;
  merged.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  std::vector<std::uint32_t> pool;
  while (i < a.size() && j < b.size()) {
    const auto order = lex_compare(a[i].sigma, b[j].sigma);
    if (order == std::strong_ordering::less) {
      merged.push_back(std::move(a[i++]));
    } else if (order == std::strong_ordering::greater) {
      merged.push_back(std::move(b[j++]));
    } else {
      pool.clear();
      std::set_union(a[i].members.begin(), a[i].members.end(), b[j].members.begin(),
                     b[j].members.end(), std::back_inserter(pool));
      a[i].members.assign(pool.begin(), pool.end());
      merged.push_back(std::move(a[i]));
      ++i;
      ++j;
    }
  }
  while (i < a.size()) merged.push_back(std::move(a[i++]));
  while (j < b.size()) merged.push_back(std::move(b[j++]));
  return merged;
}

struct EntryAccumulator {
  std::vector<PatternEntry> buffer;
  std::vector<PatternEntry> collapsed;
  std::size_t flush_threshold = 1u << 19;

  void add(SigmaVector sigma, const IndexTuple& basis) {
    PatternEntry entry;
    entry.sigma = std::move(sigma);
    entry.members.assign(basis.begin(), basis.end());
    buffer.push_back(std::move(entry));
    if (buffer.size() >= flush_threshold) flush();
  }

  void flush() {
    if (buffer.empty()) return;
    sort_and_collapse(buffer);
    collapsed = merge_entry_lists(std::move(collapsed), std::move(buffer));
    buffer.clear();
  }
};

}  // namespace detail

/// All maximal transformable patterns of `dataset` under `cls` with at
/// least `min_size` points, sorted ascending by transformation. The
/// identity never appears. Deterministic for any worker count.
inline std::vector<MTPRecord> maximal_transformable_patterns(const Dataset& dataset,
                                                             const TransformationClass& cls,
                                                             std::uint32_t min_size = 1,
                                                             unsigned jobs = 0) {
  if (min_size < 1) {
    throw std::invalid_argument("maximal_transformable_patterns: min_size must be >= 1");
  }
  if (dataset.size() < cls.basis_size()) {
    throw std::invalid_argument("maximal_transformable_patterns: dataset smaller than basis");
  }
  const BasisTable table = compute_object_bases(dataset, cls.basis_size());
  const auto permutations = permutation_index_sequences(cls.basis_size());
  const std::uint32_t beta = cls.basis_size();

  // Group the bases by pairing key; only same-bucket pairs can be related.
  std::map<Rational, std::vector<std::uint32_t>> bucket_map;
  {
    boost::container::small_vector<Point, 2> tuple;
    for (std::uint32_t b = 0; b < table.bases.size(); ++b) {
      tuple.clear();
      for (const std::uint32_t index : table.bases[b]) tuple.push_back(table.points[index]);
      if (const auto key = cls.basis_pairing_key({tuple.data(), tuple.size()})) {
        bucket_map[*key].push_back(b);
      }
    }
  }
  std::vector<const std::vector<std::uint32_t>*> bucket_of(table.bases.size(), nullptr);
  for (const auto& [key, members] : bucket_map) {
    for (const std::uint32_t b : members) bucket_of[b] = &members;
  }

  jobs = resolve_jobs(jobs);
  std::vector<detail::EntryAccumulator> workers(jobs);

  parallel_for(table.bases.size(), jobs, [&](std::size_t i, unsigned worker) {
    const std::vector<std::uint32_t>* bucket = bucket_of[i];
    if (bucket == nullptr) return;
    detail::EntryAccumulator& acc = workers[worker];
    boost::container::small_vector<Point, 2> object;
    boost::container::small_vector<Point, 2> image;
    for (const std::uint32_t index : table.bases[i]) object.push_back(table.points[index]);
    const auto partners =
        std::lower_bound(bucket->begin(), bucket->end(), static_cast<std::uint32_t>(i));
    for (auto it = partners; it != bucket->end(); ++it) {
      const IndexTuple& image_basis = table.bases[*it];
      for (const auto& order : permutations) {
        image.clear();
        for (std::uint32_t slot = 0; slot < beta; ++slot) {
          image.push_back(table.points[image_basis[order[slot]]]);
        }
        for (Transformation& f : cls.transformations_between(
                 {object.data(), object.size()}, {image.data(), image.size()})) {
          acc.add(cls.invert(f).sigma, image_basis);
          acc.add(std::move(f.sigma), table.bases[i]);
        }
      }
    }
  });

  std::vector<detail::PatternEntry> merged;
  for (detail::EntryAccumulator& acc : workers) {
    acc.flush();
    merged = detail::merge_entry_lists(std::move(merged), std::move(acc.collapsed));
  }

  std::vector<MTPRecord> records;
  for (detail::PatternEntry& entry : merged) {
    if (entry.members.size() < min_size) continue;
    Transformation f{cls.class_id(), std::move(entry.sigma)};
    if (cls.is_identity(f)) continue;
    std::vector<Point> pattern;
    pattern.reserve(entry.members.size());
    for (const std::uint32_t index : entry.members) pattern.push_back(table.points[index]);
    records.push_back(MTPRecord{std::move(f), Dataset(dataset.dimension(), std::move(pattern))});
  }
  return records;
}

/// Reference implementation used to cross-check the discovery: collect the
/// candidate transformations from every ordered basis pair, then compute
/// each pattern directly as D intersect f^-1(D).
inline std::vector<MTPRecord> mtp_oracle(const Dataset& dataset, const TransformationClass& cls,
                                         std::uint32_t min_size = 1) {
  if (min_size < 1) throw std::invalid_argument("mtp_oracle: min_size must be >= 1");
  if (dataset.size() < cls.basis_size()) {
    throw std::invalid_argument("mtp_oracle: dataset smaller than basis");
  }
  const BasisTable table = compute_object_bases(dataset, cls.basis_size());
  const auto permutations = permutation_index_sequences(cls.basis_size());
  const std::uint32_t beta = cls.basis_size();

  std::vector<Transformation> candidates;
  boost::container::small_vector<Point, 2> object;
  boost::container::small_vector<Point, 2> image;
  for (const IndexTuple& object_basis : table.bases) {
    object.clear();
    for (const std::uint32_t index : object_basis) object.push_back(table.points[index]);
    for (const IndexTuple& image_basis : table.bases) {
      for (const auto& order : permutations) {
        image.clear();
        for (std::uint32_t slot = 0; slot < beta; ++slot) {
          image.push_back(table.points[image_basis[order[slot]]]);
        }
        for (Transformation& f : cls.transformations_between(
                 {object.data(), object.size()}, {image.data(), image.size()})) {
          if (!cls.is_identity(f)) candidates.push_back(std::move(f));
        }
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), TransformationLess{});
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::vector<MTPRecord> records;
  for (Transformation& f : candidates) {
    const Dataset preimage = apply_to_set(cls.invert(f), dataset);
    Dataset pattern = set_intersection(dataset, preimage);
    if (pattern.size() < min_size) continue;
    records.push_back(MTPRecord{std::move(f), std::move(pattern)});
  }
  return records;
}

}  // namespace mtpkit
