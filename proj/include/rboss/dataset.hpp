#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rboss {

// Fixed-length univariate series with 0-based contiguous class labels.
// Values are stored row-major, one row per instance.
class LabeledDataset {
 public:
  LabeledDataset(std::vector<double> values, std::size_t length,
                 std::vector<int> labels, int class_count,
                 std::vector<std::string> class_names = {});

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t length() const noexcept { return length_; }
  int class_count() const noexcept { return class_count_; }

  std::span<const double> series(std::size_t i) const {
    return {values_.data() + i * length_, length_};
  }
  int label(std::size_t i) const { return labels_[i]; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  const std::vector<double>& values() const noexcept { return values_; }

  // Original label tokens, indexed by class id.
  const std::vector<std::string>& class_names() const noexcept {
    return class_names_;
  }

  std::vector<std::size_t> class_sizes() const;

  // Instances at `indices`, in the given order. Class ids and names are kept.
  LabeledDataset subset(std::span<const std::size_t> indices) const;

  bool operator==(const LabeledDataset&) const = default;

 private:
  std::vector<double> values_;
  std::size_t length_;
  std::vector<int> labels_;
  int class_count_;
  std::vector<std::string> class_names_;
};

// Text format: one instance per line, "label,v1,v2,...". Lines starting with
// '#' and blank lines are skipped. Labels are remapped to 0-based ids in order
// of first appearance.
LabeledDataset parse_dataset(std::istream& in);
LabeledDataset parse_dataset(std::string_view text);
LabeledDataset load_dataset(const std::filesystem::path& path);

// Writes the text format back using the original label tokens and
// shortest round-trip formatting of the values.
std::string serialize_dataset(const LabeledDataset& data);

inline constexpr double kStdEpsilon = 1e-8;

// Mean 0, population standard deviation 1. Series whose deviation is below
// kStdEpsilon map to all zeros.
std::vector<double> z_normalize(std::span<const double> series);
void z_normalize_into(std::span<const double> series, std::span<double> out);

struct ResampleSplit {
  LabeledDataset train;
  LabeledDataset test;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
  std::uint64_t seed = 0;
  std::size_t resample_index = 0;
};

// Stratified train/test split. Every class contributes at least one instance
// to each side.
ResampleSplit stratified_resample(const LabeledDataset& data,
                                  double train_fraction, std::uint64_t seed,
                                  std::size_t resample_index = 0);

struct FractionPolicy {
  double fraction = 1.0;
  bool operator==(const FractionPolicy&) const = default;
};

struct MaxTotalPolicy {
  std::size_t cap = 500;
  bool operator==(const MaxTotalPolicy&) const = default;
};

using SubsamplePolicy = std::variant<FractionPolicy, MaxTotalPolicy>;

struct Subsample {
  LabeledDataset data;
  std::vector<std::size_t> indices;  // ascending, into the input dataset
};

Subsample subsample(const LabeledDataset& data, const SubsamplePolicy& policy,
                    std::uint64_t seed);

// Per-class counts aiming at `total`: round-half-up of fraction * class size,
// clamped to [min_per_class, size - keep_back], then the largest class that
// can still move is nudged one unit at a time until the sum equals `total`
// (or no class can move).
std::vector<std::size_t> allocate_stratified(
    std::span<const std::size_t> class_sizes, double fraction,
    std::size_t total, std::size_t min_per_class, std::size_t keep_back);

// 64-bit FNV-1a over shape, labels and value bytes.
std::uint64_t content_hash(const LabeledDataset& data);

}  // namespace rboss
