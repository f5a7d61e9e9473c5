#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "rboss/dataset.hpp"
#include "rboss/sfa.hpp"

namespace rboss {

// Fitted breakpoints plus one histogram per training instance, classified
// by 1-nearest-neighbour under the BOSS distance.
struct BaseBossModel {
  SfaParameters params;
  Breakpoints breakpoints;
  std::vector<WordHistogram> train_bags;
  std::vector<int> train_labels;
  int class_count = 0;
  std::size_t series_length = 0;

  std::size_t size() const noexcept { return train_bags.size(); }
  bool operator==(const BaseBossModel&) const = default;
};

struct InstanceDistribution {
  std::size_t index = 0;
  std::vector<double> probabilities;
  bool operator==(const InstanceDistribution&) const = default;
};

struct TrainEstimate {
  double accuracy = 0.0;
  std::vector<InstanceDistribution> per_instance;
  std::size_t evaluated_count() const noexcept { return per_instance.size(); }
  bool operator==(const TrainEstimate&) const = default;
};

struct Prediction {
  int label = 0;
  std::vector<double> probabilities;
};

BaseBossModel build_base_boss(const LabeledDataset& train,
                              const SfaParameters& params);

// Sum over words u with a[u] > 0 of (a[u] - b[u])^2. Not symmetric.
double boss_distance(const WordHistogram& a, const WordHistogram& b);

// As boss_distance, but returns as soon as the partial sum exceeds `bound`.
// Whenever the true distance is <= bound the exact value is returned.
double boss_distance(const WordHistogram& a, const WordHistogram& b,
                     double bound);

// Query bag is the first distance argument. Ties go to the lowest train
// index; the returned distribution is one-hot.
Prediction predict_1nn(const BaseBossModel& model,
                       std::span<const double> series);
Prediction predict_1nn(const BaseBossModel& model, const WordHistogram& query);

// Leave-one-out over the stored bags. Breakpoints are not refitted per fold;
// only the held-out bag is removed from the neighbour pool.
TrainEstimate loocv_estimate(const BaseBossModel& model);

// Leave-one-out evaluated at min(per_class_cap, class size) seeded random
// instances per class, each against all other training bags.
TrainEstimate fast_loocv_estimate(const BaseBossModel& model,
                                  std::size_t per_class_cap,
                                  std::uint64_t seed);

}  // namespace rboss
