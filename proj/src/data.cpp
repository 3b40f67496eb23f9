#include "dsvm/data.hpp"
#include "dsvm/rng.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace dsvm {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view field, std::size_t line) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size() ||
      !std::isfinite(value)) {
    throw ParseError("line " + std::to_string(line) + ": cannot parse '" + std::string(field) +
                     "' as a number");
  }
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

bool Dataset::has_both_classes() const {
  return (labels.array() > 0).any() && (labels.array() < 0).any();
}

Dataset parse_dataset(std::istream& in, bool skip_header) {
  std::vector<double> labels;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  Eigen::Index dim = -1;
  if (skip_header) {
    std::getline(in, line);
    ++line_no;
  }
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = split_fields(body);
    if (fields.size() < 2) {
      throw DimMismatch("line " + std::to_string(line_no) + ": need a label and at least one feature");
    }
    const Eigen::Index row_dim = static_cast<Eigen::Index>(fields.size()) - 1;
    if (dim < 0) dim = row_dim;
    if (row_dim != dim) {
      throw DimMismatch("line " + std::to_string(line_no) + ": " + std::to_string(row_dim) +
                        " features, expected " + std::to_string(dim));
    }
    const double label = parse_number(fields[0], line_no);
    if (label != 1.0 && label != -1.0) {
      throw LabelError("line " + std::to_string(line_no) + ": label '" +
                       std::string(trim(fields[0])) + "' is not -1 or +1");
    }
    std::vector<double> x(dim);
    for (Eigen::Index k = 0; k < dim; ++k) x[k] = parse_number(fields[k + 1], line_no);
    labels.push_back(label);
    rows.push_back(std::move(x));
  }
  if (rows.empty()) throw ParseError("dataset has no samples");

  Dataset out;
  out.features.resize(dim, static_cast<Eigen::Index>(rows.size()));
  out.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out.labels(i) = labels[i];
    for (Eigen::Index k = 0; k < dim; ++k) out.features(k, i) = rows[i][k];
  }
  return out;
}

Dataset load_dataset(const std::filesystem::path& path, bool skip_header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path.string() + "'");
  return parse_dataset(in, skip_header);
}

void write_dataset(std::ostream& out, const Dataset& dataset) {
  char buf[64];
  for (Eigen::Index i = 0; i < dataset.size(); ++i) {
    out << (dataset.labels(i) > 0 ? "1" : "-1");
    for (Eigen::Index k = 0; k < dataset.feature_dim(); ++k) {
      const auto res = std::to_chars(buf, buf + sizeof buf, dataset.features(k, i));
      out << ',' << std::string_view(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

PartitionStrategy parse_partition_strategy(std::string_view name) {
  if (name == "contiguous") return PartitionStrategy::contiguous;
  if (name == "round_robin") return PartitionStrategy::round_robin;
  throw InvalidParam("unknown partition strategy '" + std::string(name) + "'");
}

std::string_view to_string(PartitionStrategy strategy) {
  return strategy == PartitionStrategy::contiguous ? "contiguous" : "round_robin";
}

NodePartition partition(const Dataset& dataset, Eigen::Index node_count,
                        PartitionStrategy strategy) {
  if (node_count < 1) throw InvalidParam("partition needs at least one node");
  const Eigen::Index n = dataset.size();
  if (n < node_count) {
    throw TooFewSamples(std::to_string(n) + " samples cannot cover " +
                        std::to_string(node_count) + " nodes");
  }
  NodePartition out;
  out.members.resize(node_count);
  if (strategy == PartitionStrategy::round_robin) {
    for (Eigen::Index i = 0; i < n; ++i) out.members[i % node_count].push_back(i);
  } else {
    const Eigen::Index base = n / node_count;
    const Eigen::Index extra = n % node_count;
    Eigen::Index next = 0;
    for (Eigen::Index j = 0; j < node_count; ++j) {
      const Eigen::Index count = base + (j < extra ? 1 : 0);
      for (Eigen::Index k = 0; k < count; ++k) out.members[j].push_back(next++);
    }
  }
  return out;
}

Dataset gen_synthetic(const SyntheticSpec& spec) {
  if (spec.n_per_class < 1) throw InvalidParam("n_per_class must be >= 1");
  if (spec.dim < 1) throw InvalidParam("dim must be >= 1");
  if (!(spec.separation > 0.0) || !std::isfinite(spec.separation)) {
    throw InvalidParam("separation must be > 0");
  }
  std::mt19937_64 rng(spec.seed);
  const Eigen::Index n = 2 * spec.n_per_class;
  Dataset out;
  out.features.resize(spec.dim, n);
  out.labels.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double label = (i % 2 == 0) ? 1.0 : -1.0;
    out.labels(i) = label;
    for (Eigen::Index k = 0; k < spec.dim; ++k) out.features(k, i) = standard_normal(rng);
    out.features(0, i) += label * 0.5 * spec.separation;
  }
  return out;
}

}  // namespace dsvm
