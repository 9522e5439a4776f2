#pragma once

// Text formats. A dataset file holds one point per line, coordinates
// separated by whitespace, with '#' comments and blank lines ignored. An
// encoding file starts with a "MTPENC <version> <class> <k>" header and
// then alternates pattern and transformation blocks; a trailing block with
// an empty transformation list is the residual. A corpus manifest holds
// one "path label" pair per line, paths relative to the manifest.
// Serialization is canonical: equal values produce byte-identical files.

#include "mtpkit/encoder.hpp"
#include "mtpkit/geometry.hpp"
#include "mtpkit/ncd.hpp"
#include "mtpkit/rational.hpp"
#include "mtpkit/transform.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mtpkit {

/// Parse failure with the 1-based line it was detected on.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

struct Line {
  std::size_t number = 0;
  std::vector<std::string> tokens;
};

// Split into content lines: comments stripped, blanks dropped, tokens
// separated by spaces or tabs. Line numbers refer to the original text.
inline std::vector<Line> tokenize_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    ++number;
    if (const std::size_t hash = raw.find('#'); hash != std::string_view::npos) {
      raw = raw.substr(0, hash);
    }
    Line line;
    line.number = number;
    std::size_t pos = 0;
    while (pos < raw.size()) {
      while (pos < raw.size() && (raw[pos] == ' ' || raw[pos] == '\t' || raw[pos] == '\r')) ++pos;
      const std::size_t token_start = pos;
      while (pos < raw.size() && raw[pos] != ' ' && raw[pos] != '\t' && raw[pos] != '\r') ++pos;
      if (pos > token_start) line.tokens.emplace_back(raw.substr(token_start, pos - token_start));
    }
    if (!line.tokens.empty()) lines.push_back(std::move(line));
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

inline std::size_t parse_size(const Line& line, const std::string& token) {
  if (token.empty() ||
      !std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw ParseError(line.number, "malformed count '" + token + "'");
  }
  try {
    return std::stoul(token);
  } catch (const std::exception&) {
    throw ParseError(line.number, "malformed count '" + token + "'");
  }
}

inline Point parse_point_line(const Line& line, std::uint32_t expected_arity) {
  if (expected_arity != 0 && line.tokens.size() != expected_arity) {
    throw ParseError(line.number, "expected " + std::to_string(expected_arity) +
                                      " coordinates, got " + std::to_string(line.tokens.size()));
  }
  Point::Coords coords;
  for (const std::string& token : line.tokens) {
    try {
      coords.push_back(parse_rational(token));
    } catch (const std::invalid_argument& error) {
      throw ParseError(line.number, error.what());
    }
  }
  return Point(std::move(coords));
}

}  // namespace detail

inline Dataset parse_dataset(std::string_view text) {
  const auto lines = detail::tokenize_lines(text);
  std::uint32_t arity = 0;
  std::vector<Point> points;
  std::map<Point, std::size_t, PointLess> seen;
  for (const detail::Line& line : lines) {
    Point p = detail::parse_point_line(line, arity);
    arity = p.dimension();
    if (const auto [it, fresh] = seen.emplace(p, line.number); !fresh) {
      throw ParseError(line.number,
                       "duplicate point, first on line " + std::to_string(it->second));
    }
    points.push_back(std::move(p));
  }
  return Dataset::from(std::move(points));
}

inline std::string serialize_point(const Point& p) {
  std::string out;
  for (std::size_t axis = 0; axis < p.dimension(); ++axis) {
    if (axis > 0) out += ' ';
    out += format_rational(p[axis]);
  }
  return out;
}

inline std::string serialize_dataset(const Dataset& dataset) {
  std::string out;
  for (const Point& p : dataset.points()) {
    out += serialize_point(p);
    out += '\n';
  }
  return out;
}

// ---- encodings -----------------------------------------------------------

inline constexpr std::string_view kEncodingMagic = "MTPENC";
inline constexpr int kEncodingVersion = 1;

inline std::string serialize_encoding(const Encoding& encoding) {
  const TransformationClass& cls = transformation_class(encoding.class_id);
  std::string out;
  out += kEncodingMagic;
  out += ' ';
  out += std::to_string(kEncodingVersion);
  out += ' ';
  out += cls.name();
  out += ' ';
  out += std::to_string(encoding.dimension);
  out += '\n';
  const auto write_block = [&out](const Dataset& pattern,
                                  const std::vector<Transformation>& transformations) {
    out += "P " + std::to_string(pattern.size()) + '\n';
    for (const Point& p : pattern.points()) {
      out += serialize_point(p);
      out += '\n';
    }
    out += "T " + std::to_string(transformations.size()) + '\n';
    for (const Transformation& f : transformations) {
      out += format_sigma(f);
      out += '\n';
    }
  };
  for (const OccurrenceSet& os : encoding.occurrence_sets) {
    write_block(os.pattern, os.transformations);
  }
  if (!encoding.residual.empty()) write_block(encoding.residual, {});
  return out;
}

inline Encoding parse_encoding(std::string_view text) {
  const auto lines = detail::tokenize_lines(text);
  if (lines.empty()) throw ParseError(1, "missing encoding header");
  std::size_t cursor = 0;

  const detail::Line& header = lines[cursor++];
  if (header.tokens.size() != 4 || header.tokens[0] != kEncodingMagic) {
    throw ParseError(header.number, "malformed header, expected 'MTPENC <version> <class> <k>'");
  }
  if (header.tokens[1] != std::to_string(kEncodingVersion)) {
    throw ParseError(header.number, "unsupported version '" + header.tokens[1] + "'");
  }
  const TransformationClass* cls = find_transformation_class(header.tokens[2]);
  if (cls == nullptr) {
    throw ParseError(header.number, "unknown transformation class '" + header.tokens[2] + "'");
  }
  const std::uint32_t dimension =
      static_cast<std::uint32_t>(detail::parse_size(header, header.tokens[3]));
  if (dimension != cls->dimension()) {
    throw ParseError(header.number, "dimension " + header.tokens[3] + " does not match class " +
                                        std::string(cls->name()));
  }

  const auto read_count = [&lines](std::size_t at, char tag) -> std::size_t {
    if (at >= lines.size()) {
      throw ParseError(lines.back().number, std::string("unexpected end of file, expected '") +
                                                tag + " <count>'");
    }
    const detail::Line& line = lines[at];
    if (line.tokens.size() != 2 || line.tokens[0] != std::string(1, tag)) {
      throw ParseError(line.number, std::string("expected '") + tag + " <count>'");
    }
    return detail::parse_size(line, line.tokens[1]);
  };

  Encoding encoding;
  encoding.dimension = dimension;
  encoding.class_id = cls->class_id();
  encoding.residual = Dataset(dimension);
  bool residual_seen = false;

  while (cursor < lines.size()) {
    if (residual_seen) {
      throw ParseError(lines[cursor].number, "content after the residual block");
    }
    const std::size_t point_count = read_count(cursor, 'P');
    if (point_count == 0) throw ParseError(lines[cursor].number, "empty pattern block");
    ++cursor;
    std::vector<Point> points;
    points.reserve(point_count);
    std::set<Point, PointLess> unique_points;
    for (std::size_t i = 0; i < point_count; ++i) {
      if (cursor >= lines.size()) {
        throw ParseError(lines.back().number, "pattern block shorter than its count");
      }
      const detail::Line& line = lines[cursor];
      // Coordinates are numbers, so a block header here means the count
      // overshot the block.
      if (!line.tokens.empty() && (line.tokens[0] == "P" || line.tokens[0] == "T")) {
        throw ParseError(line.number, "pattern block shorter than its count");
      }
      Point p = detail::parse_point_line(line, dimension);
      if (!unique_points.insert(p).second) {
        throw ParseError(line.number, "duplicate point in pattern");
      }
      points.push_back(std::move(p));
      ++cursor;
    }

    const std::size_t sigma_count = read_count(cursor, 'T');
    ++cursor;
    std::vector<Transformation> transformations;
    transformations.reserve(sigma_count);
    for (std::size_t i = 0; i < sigma_count; ++i) {
      if (cursor >= lines.size()) {
        throw ParseError(lines.back().number, "transformation block shorter than its count");
      }
      const detail::Line& line = lines[cursor];
      if (!line.tokens.empty() && (line.tokens[0] == "P" || line.tokens[0] == "T")) {
        throw ParseError(line.number, "transformation block shorter than its count");
      }
      if (line.tokens.size() != cls->complexity()) {
        throw ParseError(line.number, "expected " + std::to_string(cls->complexity()) +
                                          " sigma components, got " +
                                          std::to_string(line.tokens.size()));
      }
      SigmaVector sigma;
      for (const std::string& token : line.tokens) {
        try {
          sigma.push_back(parse_rational(token));
        } catch (const std::invalid_argument& error) {
          throw ParseError(line.number, error.what());
        }
      }
      try {
        transformations.push_back(cls->make(std::move(sigma)));
      } catch (const std::invalid_argument& error) {
        throw ParseError(line.number, error.what());
      }
      ++cursor;
    }

    if (sigma_count == 0) {
      encoding.residual = Dataset(dimension, std::move(points));
      residual_seen = true;
    } else {
      OccurrenceSet os;
      os.pattern = Dataset(dimension, std::move(points));
      std::sort(transformations.begin(), transformations.end(), TransformationLess{});
      transformations.erase(std::unique(transformations.begin(), transformations.end()),
                            transformations.end());
      os.transformations = std::move(transformations);
      encoding.occurrence_sets.push_back(std::move(os));
    }
  }
  return encoding;
}

// ---- corpus manifests ----------------------------------------------------

struct ManifestEntry {
  std::string path;
  std::string label;
};

inline std::vector<ManifestEntry> parse_corpus_manifest(std::string_view text) {
  std::vector<ManifestEntry> entries;
  for (const detail::Line& line : detail::tokenize_lines(text)) {
    if (line.tokens.size() != 2) {
      throw ParseError(line.number, "expected 'path label'");
    }
    entries.push_back(ManifestEntry{line.tokens[0], line.tokens[1]});
  }
  return entries;
}

// ---- files ---------------------------------------------------------------

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream stream(path, std::ios::binary);
  if (!stream) throw std::runtime_error("cannot read file: " + path.string());
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  return std::move(buffer).str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream stream(path, std::ios::binary);
  if (!stream) throw std::runtime_error("cannot write file: " + path.string());
  stream.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!stream) throw std::runtime_error("cannot write file: " + path.string());
}

namespace detail {

template <typename Parse>
auto parse_file(const std::filesystem::path& path, Parse&& parse) {
  try {
    return parse(read_file(path));
  } catch (const ParseError& error) {
    throw std::runtime_error(path.string() + ": " + error.what());
  }
}

}  // namespace detail

inline Dataset load_dataset(const std::filesystem::path& path) {
  return detail::parse_file(path, [](const std::string& text) { return parse_dataset(text); });
}

inline Encoding load_encoding(const std::filesystem::path& path) {
  return detail::parse_file(path, [](const std::string& text) { return parse_encoding(text); });
}

/// Load a manifest and every dataset it names. Item names are the manifest
/// path strings and must be unique; datasets must be nonempty and share
/// one dimension.
inline Corpus load_corpus(const std::filesystem::path& manifest_path) {
  const auto entries = detail::parse_file(
      manifest_path, [](const std::string& text) { return parse_corpus_manifest(text); });
  const std::filesystem::path base = manifest_path.parent_path();
  Corpus corpus;
  std::set<std::string> names;
  for (const ManifestEntry& entry : entries) {
    if (!names.insert(entry.path).second) {
      throw std::runtime_error(manifest_path.string() + ": duplicate item '" + entry.path + "'");
    }
    CorpusItem item;
    item.name = entry.path;
    item.label = entry.label;
    item.dataset = load_dataset(base / entry.path);
    if (item.dataset.empty()) {
      throw std::runtime_error(manifest_path.string() + ": empty dataset '" + entry.path + "'");
    }
    if (!corpus.items.empty() &&
        item.dataset.dimension() != corpus.items.front().dataset.dimension()) {
      throw std::runtime_error(manifest_path.string() + ": dimension mismatch in '" +
                               entry.path + "'");
    }
    corpus.items.push_back(std::move(item));
  }
  return corpus;
}

}  // namespace mtpkit
