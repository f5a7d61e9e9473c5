#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "rboss/checkpoint.hpp"
#include "rboss/dataset.hpp"
#include "rboss/ensemble.hpp"

namespace rboss {

// Incremental randomised BOSS build. build_rboss() and resume_build() drive
// this to completion; callers may also step it member by member and take
// snapshots in between.
class RbossBuilder {
 public:
  RbossBuilder(const LabeledDataset& train, RbossConfig cfg);
  // Resumes from `checkpoint`. Throws DatasetMismatchError when `train` is
  // not the dataset the checkpoint was built on.
  RbossBuilder(const LabeledDataset& train, BuildCheckpoint checkpoint);

  // True once the ensemble size or time budget, the parameter space or the
  // member cap is exhausted.
  bool done() const;
  // Draws, builds and offers one member. Precondition: !done().
  void step();
  // Steps until done(), writing checkpoints when configured.
  void run();

  BuildCheckpoint snapshot() const;
  // Throws BuildError when no member was built.
  EnsembleModel finish() const;

  std::size_t members_built() const noexcept { return drawn_ids_.size(); }
  const RbossConfig& config() const noexcept { return cfg_; }
  double elapsed_seconds() const;

  // Replaces the checkpoint destination (path and cadence).
  void set_checkpoint(std::optional<CheckpointSettings> settings) {
    cfg_.checkpoint = std::move(settings);
  }

 private:
  std::uint32_t draw();
  void maybe_checkpoint();

  const LabeledDataset& train_;
  RbossConfig cfg_;
  ParameterSpace space_;
  std::mt19937_64 rng_;
  std::vector<std::uint32_t> remaining_;
  std::vector<std::uint32_t> drawn_ids_;
  std::vector<EnsembleMember> members_;
  FilteredPool pool_;
  std::size_t peak_bags_ = 0;
  double prior_seconds_ = 0.0;
  std::chrono::steady_clock::time_point started_;
  std::size_t members_since_save_ = 0;
  std::chrono::steady_clock::time_point last_save_;
};

}  // namespace rboss
