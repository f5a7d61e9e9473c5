#include "rboss/ensemble.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "rboss/error.hpp"

namespace rboss {

ParameterSpace enumerate_parameter_space(std::size_t series_length,
                                         double factor) {
  if (factor != 1.0 && factor != 0.5) {
    throw ParameterError("max window factor must be 1 or 0.5");
  }
  ParameterSpace space;
  space.series_length = series_length;
  space.max_window_factor = factor;
  if (series_length == 0) return space;

  const auto max_w = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::floor(static_cast<double>(series_length) * factor)));
  const std::size_t min_w = std::min<std::size_t>(10, max_w);
  const std::size_t count = std::max<std::size_t>(1, series_length / 4);

  std::vector<int> windows;
  for (std::size_t i = 0; i < count; ++i) {
    double v = count == 1
                   ? static_cast<double>(max_w)
                   : static_cast<double>(min_w) +
                         static_cast<double>(i) *
                             static_cast<double>(max_w - min_w) /
                             static_cast<double>(count - 1);
    int w = static_cast<int>(std::lround(v));
    if (windows.empty() || windows.back() != w) windows.push_back(w);
  }

  space.window_lengths = windows;
  for (int w : windows) {
    for (int l : {16, 14, 12, 10, 8}) {
      for (bool p : {true, false}) {
        if (l > w || (p && l > w - 2)) continue;
        space.combinations.push_back(SfaParameters{l, 4, w, p});
      }
    }
  }
  return space;
}

void RbossConfig::validate() const {
  if (ensemble_size.has_value() == time_budget_seconds.has_value()) {
    throw ConfigError(
        "exactly one of ensemble size and time budget must be set");
  }
  if (ensemble_size && *ensemble_size < 1) {
    throw ConfigError("ensemble size must be at least 1");
  }
  if (time_budget_seconds &&
      !(std::isfinite(*time_budget_seconds) && *time_budget_seconds >= 0.0)) {
    throw ConfigError("time budget must be a finite non-negative duration");
  }
  if (max_ensemble_size && *max_ensemble_size < 1) {
    throw ConfigError("max ensemble size must be at least 1");
  }
  if (max_ensemble_size && ensemble_size &&
      *max_ensemble_size > *ensemble_size) {
    throw ConfigError("max ensemble size exceeds ensemble size");
  }
  if (contract_member_cap < 1) {
    throw ConfigError("member cap must be at least 1");
  }
  if (!has_estimate()) {
    if (use_cawpe) {
      throw ConfigError("CAWPE weighting requires an accuracy estimate");
    }
    bool filtering = max_ensemble_size &&
                     (contracted() || *max_ensemble_size < *ensemble_size);
    if (filtering) {
      throw ConfigError(
          "a max ensemble size below the number of members built requires an "
          "accuracy estimate");
    }
  }
  if (!(cawpe_exponent > 0.0) || !std::isfinite(cawpe_exponent)) {
    throw ConfigError("CAWPE exponent must be positive");
  }
  if (const auto* fast = std::get_if<FastLoocv>(&estimate);
      fast && fast->per_class_cap < 1) {
    throw ConfigError("fast estimate per-class cap must be at least 1");
  }
  if (subsample_policy) {
    if (const auto* f = std::get_if<FractionPolicy>(&*subsample_policy)) {
      if (!(f->fraction > 0.0 && f->fraction <= 1.0)) {
        throw ConfigError("subsample fraction must lie in (0, 1]");
      }
    } else if (std::get<MaxTotalPolicy>(*subsample_policy).cap < 1) {
      throw ConfigError("max train size must be at least 1");
    }
  }
  if (checkpoint) {
    if (checkpoint->path.empty()) throw ConfigError("empty checkpoint path");
    if (checkpoint->every_members < 1) {
      throw ConfigError("checkpoint interval must be at least 1 member");
    }
  }
}

std::size_t EnsembleModel::stored_bags() const {
  std::size_t n = 0;
  for (const auto& m : members) n += m.model.size();
  return n;
}

std::size_t FilteredPool::lowest() const {
  std::size_t idx = 0;
  for (std::size_t i = 1; i < slots_.size(); ++i) {
    const auto& s = slots_[i];
    const auto& best = slots_[idx];
    if (s.accuracy < best.accuracy ||
        (s.accuracy == best.accuracy && s.ordinal > best.ordinal)) {
      idx = i;
    }
  }
  return idx;
}

FilteredPool::Placement FilteredPool::offer(double accuracy,
                                            std::uint64_t ordinal) {
  if (!full()) {
    slots_.push_back({accuracy, ordinal});
    return slots_.size() - 1;
  }
  std::size_t low = lowest();
  if (accuracy > slots_[low].accuracy) {
    slots_[low] = {accuracy, ordinal};
    return low;
  }
  return std::nullopt;
}

double cawpe_weight(double accuracy, double exponent) {
  return std::pow(std::max(accuracy, kCawpeWeightFloor), exponent);
}

double cawpe_weight(const TrainEstimate& estimate, double exponent) {
  return cawpe_weight(estimate.accuracy, exponent);
}

EnsembleModel build_grid_boss(const LabeledDataset& train, double retention) {
  if (!(retention > 0.0 && retention <= 1.0)) {
    throw ConfigError("retention must lie in (0, 1]");
  }
  const auto start = std::chrono::steady_clock::now();
  auto space = enumerate_parameter_space(train.length(), 1.0);
  if (space.empty()) {
    throw BuildError("no parameter combination fits series of length " +
                     std::to_string(train.length()));
  }

  // Members below the running threshold can never be retained, so they are
  // dropped as soon as a better best accuracy appears.
  std::vector<EnsembleMember> kept;
  double best = -1.0;
  std::size_t stored = 0;
  std::size_t peak = 0;
  for (std::size_t id = 0; id < space.size(); ++id) {
    auto model = build_base_boss(train, space.combinations[id]);
    double acc = loocv_estimate(model).accuracy;
    peak = std::max(peak, stored + model.size());
    if (acc > best) {
      best = acc;
      std::erase_if(kept, [&](const EnsembleMember& m) {
        return *m.train_accuracy < retention * best;
      });
    }
    if (acc >= retention * best) {
      EnsembleMember member;
      member.model = std::move(model);
      member.train_accuracy = acc;
      member.parameter_id = static_cast<std::uint32_t>(id);
      member.build_ordinal = id;
      kept.push_back(std::move(member));
    }
    stored = 0;
    for (const auto& m : kept) stored += m.model.size();
  }

  EnsembleModel out;
  out.members = std::move(kept);
  out.combiner = Combiner::MajorityVote;
  out.class_count = train.class_count();
  out.series_length = train.length();
  out.metadata.seed = 0;
  out.metadata.params_tried = space.size();
  out.metadata.peak_bags = peak;
  out.metadata.retention = retention;
  out.metadata.build_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return out;
}

EnsembleModel build_rboss_contracted(const LabeledDataset& train,
                                     const RbossConfig& cfg) {
  if (!cfg.contracted()) {
    throw ConfigError("contracted build needs a time budget");
  }
  return build_rboss(train, cfg);
}

Prediction predict_ensemble(const EnsembleModel& model,
                            std::span<const double> series) {
  if (series.size() != model.series_length) {
    throw ParameterError("series length " + std::to_string(series.size()) +
                         " does not match training length " +
                         std::to_string(model.series_length));
  }
  if (model.members.empty()) throw ParameterError("ensemble has no members");
  std::vector<double> combined(static_cast<std::size_t>(model.class_count),
                               0.0);
  for (const auto& m : model.members) {
    auto p = predict_1nn(m.model, series);
    for (std::size_t c = 0; c < combined.size(); ++c) {
      combined[c] += m.weight * p.probabilities[c];
    }
  }
  double sum = 0.0;
  for (double v : combined) sum += v;
  std::size_t best = 0;
  for (std::size_t c = 1; c < combined.size(); ++c) {
    if (combined[c] > combined[best]) best = c;
  }
  for (double& v : combined) v /= sum;
  return {static_cast<int>(best), std::move(combined)};
}

}  // namespace rboss
