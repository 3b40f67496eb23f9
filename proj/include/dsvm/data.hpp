#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "dsvm/errors.hpp"

namespace dsvm {

/// Labeled samples. Column i of `features` is x_i; labels are ±1.
struct Dataset {
  Eigen::MatrixXd features;  // d × N
  Eigen::VectorXd labels;    // N

  Eigen::Index size() const { return labels.size(); }
  Eigen::Index feature_dim() const { return features.rows(); }
  bool has_both_classes() const;
};

/// Throws ParseError, LabelError or DimMismatch.
Dataset parse_dataset(std::istream& in, bool skip_header = false);
Dataset load_dataset(const std::filesystem::path& path, bool skip_header = false);
void write_dataset(std::ostream& out, const Dataset& dataset);

enum class PartitionStrategy { contiguous, round_robin };
PartitionStrategy parse_partition_strategy(std::string_view name);
std::string_view to_string(PartitionStrategy strategy);

/// Horizontal split: node j owns the samples listed in `members[j]`, in
/// ascending dataset order.
struct NodePartition {
  std::vector<std::vector<Eigen::Index>> members;

  Eigen::Index node_count() const { return static_cast<Eigen::Index>(members.size()); }
  Eigen::Index count(Eigen::Index node) const {
    return static_cast<Eigen::Index>(members[node].size());
  }
};

/// Contiguous: the first (N mod m) nodes receive ⌊N/m⌋+1 samples.
/// Round-robin: sample i goes to node i mod m. Throws TooFewSamples if N < m.
NodePartition partition(const Dataset& dataset, Eigen::Index node_count,
                        PartitionStrategy strategy);

struct SyntheticSpec {
  Eigen::Index n_per_class = 0;
  Eigen::Index dim = 0;
  double separation = 0.0;
  std::uint64_t seed = 0;
};

/// Two unit-variance Gaussian blobs centered at ±(separation/2)·e₁.
///
/// Samples alternate +1, −1, +1, ... Randomness comes from std::mt19937_64
/// (whose output sequence is fixed by the C++ standard) turned into uniforms
/// with 53-bit mantissa extraction and into normals with the Box–Muller
/// transform, so a seed produces the same dataset on every platform.
Dataset gen_synthetic(const SyntheticSpec& spec);

}  // namespace dsvm
