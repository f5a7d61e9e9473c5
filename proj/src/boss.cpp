#include "rboss/boss.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "rboss/error.hpp"

namespace rboss {

BaseBossModel build_base_boss(const LabeledDataset& train,
                              const SfaParameters& params) {
  params.validate(train.length());
  const std::size_t n = train.size();

  std::vector<std::vector<double>> rows(n);
  std::size_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    rows[i] = window_coefficients(train.series(i), params);
    total += rows[i].size();
  }
  std::vector<double> all;
  all.reserve(total);
  for (const auto& r : rows) all.insert(all.end(), r.begin(), r.end());

  BaseBossModel model;
  model.params = params;
  model.breakpoints =
      mcb_breakpoints(all, params.word_length, params.alphabet_size);
  model.train_bags.reserve(n);
  for (const auto& r : rows) {
    model.train_bags.push_back(
        histogram_from_coefficients(r, model.breakpoints));
  }
  model.train_labels = train.labels();
  model.class_count = train.class_count();
  model.series_length = train.length();
  return model;
}

double boss_distance(const WordHistogram& a, const WordHistogram& b,
                     double bound) {
  std::uint64_t sum = 0;
  auto ib = b.begin();
  for (const auto& [word, count] : a) {
    while (ib != b.end() && ib->first < word) ++ib;
    std::int64_t other = (ib != b.end() && ib->first == word) ? ib->second : 0;
    std::int64_t diff = static_cast<std::int64_t>(count) - other;
    sum += static_cast<std::uint64_t>(diff * diff);
    if (static_cast<double>(sum) > bound) return static_cast<double>(sum);
  }
  return static_cast<double>(sum);
}

double boss_distance(const WordHistogram& a, const WordHistogram& b) {
  return boss_distance(a, b, std::numeric_limits<double>::infinity());
}

namespace {

// Index of the nearest bag, skipping `exclude`. Lowest index wins ties.
std::size_t nearest(const BaseBossModel& model, const WordHistogram& query,
                    std::size_t exclude) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_idx = model.size();
  for (std::size_t j = 0; j < model.size(); ++j) {
    if (j == exclude) continue;
    double d = boss_distance(query, model.train_bags[j], best);
    if (d < best) {
      best = d;
      best_idx = j;
    }
  }
  return best_idx;
}

std::vector<double> one_hot(int label, int classes) {
  std::vector<double> p(static_cast<std::size_t>(classes), 0.0);
  p[static_cast<std::size_t>(label)] = 1.0;
  return p;
}

TrainEstimate estimate_at(const BaseBossModel& model,
                          const std::vector<std::size_t>& instances) {
  TrainEstimate est;
  est.per_instance.reserve(instances.size());
  std::size_t correct = 0;
  for (std::size_t i : instances) {
    std::size_t nn = nearest(model, model.train_bags[i], i);
    int label = model.train_labels[nn];
    if (label == model.train_labels[i]) ++correct;
    est.per_instance.push_back({i, one_hot(label, model.class_count)});
  }
  est.accuracy = instances.empty() ? 0.0
                                   : static_cast<double>(correct) /
                                         static_cast<double>(instances.size());
  return est;
}

void require_loocv(const BaseBossModel& model) {
  if (model.size() < 2) {
    throw EstimateError("leave-one-out needs at least 2 training instances");
  }
}

}  // namespace

Prediction predict_1nn(const BaseBossModel& model, const WordHistogram& query) {
  if (model.size() == 0) throw ParameterError("model has no training bags");
  std::size_t nn = nearest(model, query, model.size());
  int label = model.train_labels[nn];
  return {label, one_hot(label, model.class_count)};
}

Prediction predict_1nn(const BaseBossModel& model,
                       std::span<const double> series) {
  if (series.size() != model.series_length) {
    throw ParameterError("series length " + std::to_string(series.size()) +
                         " does not match training length " +
                         std::to_string(model.series_length));
  }
  return predict_1nn(model,
                     bag_of_words(series, model.params, model.breakpoints));
}

TrainEstimate loocv_estimate(const BaseBossModel& model) {
  require_loocv(model);
  std::vector<std::size_t> all(model.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return estimate_at(model, all);
}

TrainEstimate fast_loocv_estimate(const BaseBossModel& model,
                                  std::size_t per_class_cap,
                                  std::uint64_t seed) {
  require_loocv(model);
  if (per_class_cap < 1) throw EstimateError("per-class cap must be >= 1");

  std::vector<std::vector<std::size_t>> by_class(
      static_cast<std::size_t>(model.class_count));
  for (std::size_t i = 0; i < model.size(); ++i) {
    by_class[static_cast<std::size_t>(model.train_labels[i])].push_back(i);
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> chosen;
  for (auto& pool : by_class) {
    if (pool.size() > per_class_cap) {
      std::shuffle(pool.begin(), pool.end(), rng);
      pool.resize(per_class_cap);
    }
    chosen.insert(chosen.end(), pool.begin(), pool.end());
  }
  std::sort(chosen.begin(), chosen.end());
  return estimate_at(model, chosen);
}

}  // namespace rboss
