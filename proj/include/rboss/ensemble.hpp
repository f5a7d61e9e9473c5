#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "rboss/boss.hpp"
#include "rboss/dataset.hpp"
#include "rboss/sfa.hpp"

namespace rboss {

inline constexpr double kGridRetention = 0.92;
inline constexpr double kCawpeWeightFloor = 1e-4;
inline constexpr double kDefaultCawpeExponent = 4.0;
inline constexpr std::size_t kDefaultContractMemberCap = 500;

// Candidate configurations: ascending window length, then word length
// 16..8, then normalize true before false. Alphabet size is always 4.
struct ParameterSpace {
  std::vector<SfaParameters> combinations;
  std::vector<int> window_lengths;  // distinct candidates, ascending
  std::size_t series_length = 0;
  double max_window_factor = 1.0;

  std::size_t size() const noexcept { return combinations.size(); }
  bool empty() const noexcept { return combinations.empty(); }
};

// Window candidates: max(1, floor(m / 4)) values linearly spaced over
// [min(10, W), W] with W = floor(m * factor), rounded and deduplicated.
// `factor` must be 1 or 0.5.
ParameterSpace enumerate_parameter_space(std::size_t series_length,
                                         double factor);

struct NoEstimate {
  bool operator==(const NoEstimate&) const = default;
};
struct FullLoocv {
  bool operator==(const FullLoocv&) const = default;
};
struct FastLoocv {
  std::size_t per_class_cap = 50;
  bool operator==(const FastLoocv&) const = default;
};
using EstimateMode = std::variant<NoEstimate, FullLoocv, FastLoocv>;

struct CheckpointSettings {
  std::filesystem::path path;
  std::size_t every_members = 1;
  // Also write when this many seconds have passed since the last write.
  std::optional<double> every_seconds;
  bool operator==(const CheckpointSettings&) const = default;
};

struct RbossConfig {
  std::optional<std::size_t> ensemble_size;      // members to try (k)
  std::optional<std::size_t> max_ensemble_size;  // capacity (s), none = unbounded
  std::optional<double> time_budget_seconds;     // contract, replaces k
  std::size_t contract_member_cap = kDefaultContractMemberCap;
  std::optional<SubsamplePolicy> subsample_policy;
  bool use_cawpe = false;
  double cawpe_exponent = kDefaultCawpeExponent;
  EstimateMode estimate = NoEstimate{};
  std::uint64_t seed = 0;
  std::optional<CheckpointSettings> checkpoint;

  bool has_estimate() const noexcept {
    return !std::holds_alternative<NoEstimate>(estimate);
  }
  bool contracted() const noexcept { return time_budget_seconds.has_value(); }
  // Half-length windows only for members that never see an estimate.
  double max_window_factor() const noexcept {
    return has_estimate() ? 1.0 : 0.5;
  }
  // Throws ConfigError on inconsistent settings.
  void validate() const;

  bool operator==(const RbossConfig&) const = default;
};

struct EnsembleMember {
  BaseBossModel model;
  std::optional<double> train_accuracy;
  double weight = 1.0;
  std::optional<std::vector<std::size_t>> subsample_indices;
  std::uint32_t parameter_id = 0;   // index into the build's ParameterSpace
  std::uint64_t build_ordinal = 0;  // position in the draw sequence

  const SfaParameters& params() const noexcept { return model.params; }
  bool operator==(const EnsembleMember&) const = default;
};

enum class Combiner { MajorityVote, WeightedProbability };

struct BuildMetadata {
  std::uint64_t seed = 0;
  double build_seconds = 0.0;
  std::size_t params_tried = 0;
  std::size_t peak_bags = 0;
  std::optional<RbossConfig> config;  // absent for grid builds
  double retention = kGridRetention;  // grid builds only
};

struct EnsembleModel {
  std::vector<EnsembleMember> members;
  Combiner combiner = Combiner::MajorityVote;
  int class_count = 0;
  std::size_t series_length = 0;
  BuildMetadata metadata;

  std::size_t stored_bags() const;
};

// Capacity-limited member pool. Once full, a newcomer replaces the current
// lowest-accuracy member only when strictly more accurate. Among equally low
// members the most recently built one is evicted, so the pool always holds
// the top-capacity accuracies with earlier members winning ties.
class FilteredPool {
 public:
  struct Slot {
    double accuracy;
    std::uint64_t ordinal;
  };
  // Outcome of offer(): slot index written to, or nullopt when discarded.
  using Placement = std::optional<std::size_t>;

  explicit FilteredPool(std::optional<std::size_t> capacity)
      : capacity_(capacity) {}

  Placement offer(double accuracy, std::uint64_t ordinal);
  void restore(std::vector<Slot> slots) { slots_ = std::move(slots); }

  const std::vector<Slot>& slots() const noexcept { return slots_; }
  bool full() const noexcept {
    return capacity_ && slots_.size() >= *capacity_;
  }

 private:
  std::size_t lowest() const;

  std::optional<std::size_t> capacity_;
  std::vector<Slot> slots_;
};

// max(accuracy, 1e-4) ^ exponent
double cawpe_weight(double accuracy, double exponent);
double cawpe_weight(const TrainEstimate& estimate, double exponent);

// Builds every combination with full leave-one-out and keeps members whose
// accuracy is at least retention * best. Majority vote.
EnsembleModel build_grid_boss(const LabeledDataset& train,
                              double retention = kGridRetention);

// Randomised ensemble: draws unused parameter sets uniformly until k sets
// have been tried (or the time budget is spent), the space is exhausted or
// the member cap is reached.
EnsembleModel build_rboss(const LabeledDataset& train, const RbossConfig& cfg);

// build_rboss for configurations that carry a time budget.
EnsembleModel build_rboss_contracted(const LabeledDataset& train,
                                     const RbossConfig& cfg);

// Weighted sum of member one-hot votes, normalized. Lowest class wins ties.
Prediction predict_ensemble(const EnsembleModel& model,
                            std::span<const double> series);

}  // namespace rboss
