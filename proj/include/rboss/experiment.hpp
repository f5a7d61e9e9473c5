#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rboss/ensemble.hpp"
#include "rboss/synthetic.hpp"

namespace rboss {

// One classifier variant evaluated by an experiment.
struct ExperimentArm {
  std::string variant;
  bool grid = false;
  double grid_retention = kGridRetention;
  RbossConfig config;  // ignored for grid arms; seed is set per resample
};

// Named presets:
//   grid-boss             full parameter grid, 92% retention, majority vote
//   rboss                 k=100, no estimate, half-length windows
//   rboss-subsample       rboss with a 70% subsample per member
//   rboss-cawpe           k=100, leave-one-out estimates, CAWPE weights
//   rboss-filtered        k=250, s=50, leave-one-out filter
//   rboss-filtered-cawpe  rboss-filtered + CAWPE + 70% subsample
//   rboss-fast-estimate   rboss-filtered with 50 instances per class estimated
//   rboss-max-train       rboss-filtered with at most 500 train instances
//   rboss-contract        rboss with a time budget instead of k (set
//                         time_budget_seconds before use)
// Throws ConfigError for unknown names.
ExperimentArm variant_preset(std::string_view name);
const std::vector<std::string>& variant_names();

struct ExperimentConfig {
  std::optional<std::filesystem::path> data_path;
  std::optional<SyntheticSpec> synthetic;
  std::uint64_t synthetic_seed = 0;
  std::string dataset_name;  // defaults to the file stem or "synthetic"
  std::vector<ExperimentArm> arms;
  std::size_t resamples = 30;
  std::uint64_t base_seed = 0;
  double train_fraction = 0.5;
  std::filesystem::path out_dir = ".";
  // Per resample and variant the file "<path>.<variant>.r<index>" is used;
  // an existing file is resumed.
  std::optional<CheckpointSettings> checkpoint;
  // Called before each build; an exception thrown here is recorded as that
  // resample's failure.
  std::function<void(const ExperimentArm&, std::size_t resample)> before_build;

  void validate() const;
};

struct ResultRecord {
  std::string dataset;
  std::string variant;
  std::size_t resample = 0;
  double accuracy = 0.0;
  double build_seconds = 0.0;
  std::size_t ensemble_size = 0;
  std::size_t params_tried = 0;
  std::size_t peak_bags = 0;
  std::size_t test_correct = 0;
  std::size_t test_size = 0;
};

struct ExperimentError {
  std::string variant;
  std::size_t resample = 0;
  std::string message;
};

struct ExperimentResult {
  std::vector<ResultRecord> records;
  std::vector<ExperimentError> errors;
};

inline constexpr std::string_view kResultHeader =
    "dataset,variant,resample,accuracy,build_seconds,ensemble_size,"
    "params_tried,peak_bags";

std::string format_result_row(const ResultRecord& r);
// Inverse of format_result_row for the header's columns.
ResultRecord parse_result_row(std::string_view line);

// For each resample r the data is split with seed base_seed + r (shared by
// every arm) and each arm is built with that seed, evaluated on the test
// part and appended to results_<variant>.csv. Also writes summary.csv,
// splits.csv and errors.log into out_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace rboss
