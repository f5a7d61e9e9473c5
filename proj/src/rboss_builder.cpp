#include "rboss/rboss_builder.hpp"

#include <iostream>
#include <string>

#include "rboss/error.hpp"

namespace rboss {

namespace {

std::vector<std::uint32_t> all_ids(const ParameterSpace& space) {
  std::vector<std::uint32_t> ids(space.size());
  for (std::uint32_t i = 0; i < ids.size(); ++i) ids[i] = i;
  return ids;
}

}  // namespace

RbossBuilder::RbossBuilder(const LabeledDataset& train, RbossConfig cfg)
    : train_(train),
      cfg_(std::move(cfg)),
      pool_(cfg_.max_ensemble_size),
      started_(std::chrono::steady_clock::now()),
      last_save_(started_) {
  cfg_.validate();
  space_ = enumerate_parameter_space(train_.length(), cfg_.max_window_factor());
  rng_.seed(cfg_.seed);
  remaining_ = all_ids(space_);
}

RbossBuilder::RbossBuilder(const LabeledDataset& train,
                           BuildCheckpoint checkpoint)
    : train_(train),
      cfg_(std::move(checkpoint.config)),
      pool_(cfg_.max_ensemble_size),
      started_(std::chrono::steady_clock::now()),
      last_save_(started_) {
  if (DatasetFingerprint::of(train_) != checkpoint.dataset) {
    throw DatasetMismatchError(
        "checkpoint was written for a different dataset (n=" +
        std::to_string(checkpoint.dataset.size) +
        ", m=" + std::to_string(checkpoint.dataset.length) + ")");
  }
  checkpoint.validate();
  cfg_.validate();
  space_ = enumerate_parameter_space(train_.length(), cfg_.max_window_factor());
  rng_.seed(cfg_.seed);
  remaining_ = all_ids(space_);

  // Replaying the seeded draws reproduces the generator state exactly.
  for (std::uint32_t id : checkpoint.drawn_ids) {
    if (remaining_.empty() || draw() != id) {
      throw CheckpointError(
          "stored parameter draws do not follow from the stored seed");
    }
  }
  members_ = std::move(checkpoint.members);
  std::vector<FilteredPool::Slot> slots;
  for (const auto& m : members_) {
    slots.push_back({m.train_accuracy.value_or(0.0), m.build_ordinal});
  }
  pool_.restore(std::move(slots));
  peak_bags_ = checkpoint.peak_bags;
  prior_seconds_ = checkpoint.elapsed_seconds;
}

double RbossBuilder::elapsed_seconds() const {
  return prior_seconds_ + std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - started_)
                              .count();
}

bool RbossBuilder::done() const {
  if (remaining_.empty()) return true;
  if (members_built() >= cfg_.contract_member_cap) return true;
  if (cfg_.ensemble_size) return members_built() >= *cfg_.ensemble_size;
  return elapsed_seconds() >= *cfg_.time_budget_seconds;
}

std::uint32_t RbossBuilder::draw() {
  std::uniform_int_distribution<std::size_t> pick(0, remaining_.size() - 1);
  auto pos = pick(rng_);
  std::uint32_t id = remaining_[pos];
  remaining_.erase(remaining_.begin() + static_cast<std::ptrdiff_t>(pos));
  drawn_ids_.push_back(id);
  return id;
}

void RbossBuilder::step() {
  const std::uint64_t ordinal = members_built();
  const std::uint32_t id = draw();
  const std::uint64_t member_seed = cfg_.seed + ordinal;

  EnsembleMember member;
  member.parameter_id = id;
  member.build_ordinal = ordinal;
  const SfaParameters& params = space_.combinations[id];
  if (cfg_.subsample_policy) {
    auto sub = subsample(train_, *cfg_.subsample_policy, member_seed);
    member.model = build_base_boss(sub.data, params);
    member.subsample_indices = std::move(sub.indices);
  } else {
    member.model = build_base_boss(train_, params);
  }

  if (std::holds_alternative<FullLoocv>(cfg_.estimate)) {
    member.train_accuracy = loocv_estimate(member.model).accuracy;
  } else if (const auto* fast = std::get_if<FastLoocv>(&cfg_.estimate)) {
    member.train_accuracy =
        fast_loocv_estimate(member.model, fast->per_class_cap, member_seed)
            .accuracy;
  }
  if (cfg_.use_cawpe) {
    member.weight = cawpe_weight(*member.train_accuracy, cfg_.cawpe_exponent);
  }

  std::size_t stored = 0;
  for (const auto& m : members_) stored += m.model.size();
  peak_bags_ = std::max(peak_bags_, stored + member.model.size());

  if (auto slot = pool_.offer(member.train_accuracy.value_or(0.0), ordinal)) {
    if (*slot == members_.size()) {
      members_.push_back(std::move(member));
    } else {
      members_[*slot] = std::move(member);
    }
  }
  maybe_checkpoint();
}

void RbossBuilder::run() {
  while (!done()) step();
}

void RbossBuilder::maybe_checkpoint() {
  if (!cfg_.checkpoint) return;
  ++members_since_save_;
  const auto now = std::chrono::steady_clock::now();
  bool due = members_since_save_ >= cfg_.checkpoint->every_members;
  if (cfg_.checkpoint->every_seconds) {
    due = due || std::chrono::duration<double>(now - last_save_).count() >=
                     *cfg_.checkpoint->every_seconds;
  }
  if (!due) return;
  try {
    save_checkpoint(snapshot(), cfg_.checkpoint->path);
  } catch (const CheckpointError& e) {
    // Checkpointing is best effort; the build carries on.
    std::cerr << "rboss: checkpoint not written: " << e.what() << '\n';
  }
  members_since_save_ = 0;
  last_save_ = now;
}

BuildCheckpoint RbossBuilder::snapshot() const {
  BuildCheckpoint cp;
  cp.dataset = DatasetFingerprint::of(train_);
  cp.config = cfg_;
  cp.drawn_ids = drawn_ids_;
  cp.members = members_;
  cp.members_built = drawn_ids_.size();
  cp.elapsed_seconds = elapsed_seconds();
  cp.peak_bags = peak_bags_;
  return cp;
}

EnsembleModel RbossBuilder::finish() const {
  if (members_.empty()) throw BuildError("no members built");
  EnsembleModel out;
  out.members = members_;
  out.combiner =
      cfg_.use_cawpe ? Combiner::WeightedProbability : Combiner::MajorityVote;
  out.class_count = train_.class_count();
  out.series_length = train_.length();
  out.metadata.seed = cfg_.seed;
  out.metadata.build_seconds = elapsed_seconds();
  out.metadata.params_tried = members_built();
  out.metadata.peak_bags = peak_bags_;
  out.metadata.config = cfg_;
  return out;
}

EnsembleModel build_rboss(const LabeledDataset& train, const RbossConfig& cfg) {
  RbossBuilder builder(train, cfg);
  builder.run();
  return builder.finish();
}

EnsembleModel resume_build(const LabeledDataset& train,
                           BuildCheckpoint checkpoint,
                           std::optional<CheckpointSettings> settings) {
  RbossBuilder builder(train, std::move(checkpoint));
  if (settings) builder.set_checkpoint(std::move(settings));
  builder.run();
  return builder.finish();
}

}  // namespace rboss
