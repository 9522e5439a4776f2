// Command-line front end: pattern discovery, encoding, decoding, pairwise
// distance and corpus classification over dataset files.

#include "mtpkit/mtpkit.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace mtpkit;

struct Options {
  std::string class_name = "2T";
  std::uint32_t min_size = 1;
  unsigned jobs = 0;
  std::string gap = "1";
  std::string output;
};

const TransformationClass& resolve_class(const std::string& name) {
  const TransformationClass* cls = find_transformation_class(name);
  if (cls == nullptr) {
    throw std::runtime_error("unknown transformation class '" + name +
                             "', expected one of 2T, 2TR, 2STR");
  }
  return *cls;
}

std::string approx_suffix(const Rational& value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), " (~%.4f)", approx(value));
  return buffer;
}

void emit(const Options& options, const std::string& content) {
  if (options.output.empty()) {
    std::cout << content;
  } else {
    write_file(options.output, content);
  }
}

std::string format_point_list(const Dataset& points) {
  std::string out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0) out += ' ';
    const Point& p = points[i];
    for (std::size_t axis = 0; axis < p.dimension(); ++axis) {
      if (axis > 0) out += ',';
      out += format_rational(p[axis]);
    }
  }
  return out;
}

void run_mtps(const std::string& dataset_path, const Options& options) {
  const Dataset dataset = load_dataset(dataset_path);
  const TransformationClass& cls = resolve_class(options.class_name);
  const auto records =
      maximal_transformable_patterns(dataset, cls, options.min_size, options.jobs);
  std::string report;
  for (const MTPRecord& record : records) {
    report += format_sigma(record.transformation);
    report += " | ";
    report += format_point_list(record.pattern);
    report += '\n';
  }
  report += "MTPs: " + std::to_string(records.size()) + '\n';
  emit(options, report);
}

void run_encode(const std::string& dataset_path, const Options& options) {
  const Dataset dataset = load_dataset(dataset_path);
  const TransformationClass& cls = resolve_class(options.class_name);
  const Encoding encoding = encode_point_set(dataset, cls, options.min_size, options.jobs);
  const std::size_t length = encoding_description_length(encoding);
  const std::size_t extensional = std::size_t{dataset.dimension()} * dataset.size();
  const Rational factor(extensional, length);
  const std::string stats = "DL=" + std::to_string(length) +
                            " extensional=" + std::to_string(extensional) +
                            " CF=" + format_rational(factor) + approx_suffix(factor) + '\n';
  emit(options, serialize_encoding(encoding));
  // Keep the stats off the encoding stream when both share stdout.
  if (options.output.empty()) {
    std::cerr << stats;
  } else {
    std::cout << stats;
  }
}

void run_decode(const std::string& encoding_path, const Options& options) {
  const Encoding encoding = load_encoding(encoding_path);
  emit(options, serialize_dataset(decode(encoding)));
}

void run_ncd(const std::string& first_path, const std::string& second_path,
             const Options& options) {
  const Dataset first = load_dataset(first_path);
  const Dataset second = load_dataset(second_path);
  const TransformationClass& cls = resolve_class(options.class_name);
  const Rational gap = parse_rational(options.gap);
  const Rational distance = ncd(first, second, cls, options.min_size, gap, options.jobs);
  emit(options, format_rational(distance) + approx_suffix(distance) + '\n');
}

void run_classify(const std::string& manifest_path, const Options& options) {
  const Corpus corpus = load_corpus(manifest_path);
  const TransformationClass& cls = resolve_class(options.class_name);
  const Rational gap = parse_rational(options.gap);
  const DistanceMatrix matrix =
      distance_matrix(corpus, cls, options.min_size, gap, options.jobs);
  std::vector<std::string> labels;
  labels.reserve(corpus.items.size());
  for (const CorpusItem& item : corpus.items) labels.push_back(item.label);
  const LoocvResult result = one_nn_loocv(matrix, labels);

  const std::size_t count = corpus.items.size();
  const std::uint32_t k = corpus.items.front().dataset.dimension();
  Rational corpus_factor_sum(0);
  for (std::size_t i = 0; i < count; ++i) {
    corpus_factor_sum += Rational(std::size_t{k} * corpus.items[i].dataset.size(),
                                  matrix.item_lengths[i]);
  }
  const Rational mean_corpus_factor = corpus_factor_sum / count;
  Rational pair_factor_sum(0);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      const std::size_t extensional =
          std::size_t{k} * (corpus.items[i].dataset.size() + corpus.items[j].dataset.size());
      pair_factor_sum +=
          Rational(extensional, matrix.pair_lengths[DistanceMatrix::pair_slot(count, i, j)]);
    }
  }
  const std::size_t pair_count = count * (count - 1) / 2;
  const Rational mean_pair_factor =
      pair_count > 0 ? pair_factor_sum / pair_count : Rational(0);

  std::string report;
  for (std::size_t i = 0; i < count; ++i) {
    const bool hit = result.predicted[i] == corpus.items[i].label;
    report += corpus.items[i].name + " label=" + corpus.items[i].label +
              " predicted=" + result.predicted[i] + (hit ? " ok" : " miss") + '\n';
  }
  report += "success-rate=" + format_rational(result.success_rate) +
            approx_suffix(result.success_rate) + '\n';
  report += "mean-cf-corpus=" + format_rational(mean_corpus_factor) +
            approx_suffix(mean_corpus_factor) + '\n';
  report += "mean-cf-pairs=" + format_rational(mean_pair_factor) +
            approx_suffix(mean_pair_factor) + '\n';
  report += "encoder-invocations=" + std::to_string(matrix.encoder_invocations) + '\n';
  emit(options, report);
}

void add_common_options(CLI::App* sub, Options& options, bool with_gap) {
  sub->add_option("-c,--class", options.class_name,
                  "Transformation class: 2T, 2TR or 2STR (default 2T)");
  sub->add_option("-m,--min-size", options.min_size, "Smallest pattern size to keep (default 1)")
      ->check(CLI::PositiveNumber);
  sub->add_option("-j,--jobs", options.jobs,
                  "Worker threads (default: MTPKIT_JOBS or all cores)");
  if (with_gap) {
    sub->add_option("--gap", options.gap,
                    "First-axis gap inserted between paired datasets (default 1)");
  }
  sub->add_option("-o,--output", options.output, "Write the result to a file instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pattern discovery, compression and classification for point-set data"};
  app.require_subcommand(1);

  Options options;
  std::string dataset_path;
  std::string encoding_path;
  std::string second_path;
  std::string manifest_path;

  CLI::App* mtps = app.add_subcommand("mtps", "List maximal transformable patterns");
  mtps->add_option("dataset", dataset_path, "Dataset file")->required();
  add_common_options(mtps, options, false);
  mtps->callback([&] { run_mtps(dataset_path, options); });

  CLI::App* encode = app.add_subcommand("encode", "Compress a dataset into an encoding file");
  encode->add_option("dataset", dataset_path, "Dataset file")->required();
  add_common_options(encode, options, false);
  encode->callback([&] { run_encode(dataset_path, options); });

  CLI::App* decode = app.add_subcommand("decode", "Reconstruct the dataset of an encoding file");
  decode->add_option("encoding", encoding_path, "Encoding file")->required();
  decode->add_option("-o,--output", options.output, "Write the dataset to a file");
  decode->callback([&] { run_decode(encoding_path, options); });

  CLI::App* dist = app.add_subcommand("ncd", "Normalised compression distance of two datasets");
  dist->add_option("first", dataset_path, "First dataset file")->required();
  dist->add_option("second", second_path, "Second dataset file")->required();
  add_common_options(dist, options, true);
  dist->callback([&] { run_ncd(dataset_path, second_path, options); });

  CLI::App* classify =
      app.add_subcommand("classify", "Leave-one-out nearest-neighbour corpus classification");
  classify->add_option("manifest", manifest_path, "Corpus manifest file")->required();
  add_common_options(classify, options, true);
  classify->callback([&] { run_classify(manifest_path, options); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::CallForAllHelp& help) {
    return app.exit(help);
  } catch (const CLI::ParseError& error) {
    app.exit(error);
    return 2;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << '\n';
    return 2;
  }
  return 0;
}
