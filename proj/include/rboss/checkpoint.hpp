#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rboss/dataset.hpp"
#include "rboss/ensemble.hpp"

namespace rboss {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct DatasetFingerprint {
  std::uint64_t size = 0;
  std::uint64_t length = 0;
  std::uint64_t class_count = 0;
  std::uint64_t content_hash = 0;

  static DatasetFingerprint of(const LabeledDataset& data);
  bool operator==(const DatasetFingerprint&) const = default;
};

// Everything needed to continue an interrupted randomised build. The draw
// sequence is replayed from the seed on resume, so no RNG state is stored.
struct BuildCheckpoint {
  std::uint32_t format_version = kCheckpointVersion;
  DatasetFingerprint dataset;
  RbossConfig config;
  std::vector<std::uint32_t> drawn_ids;  // in draw order
  std::vector<EnsembleMember> members;   // current pool, slot order
  std::uint64_t members_built = 0;
  double elapsed_seconds = 0.0;
  std::uint64_t peak_bags = 0;

  // Throws CheckpointError when the structural invariants do not hold.
  void validate() const;
  bool operator==(const BuildCheckpoint&) const = default;
};

// Binary encoding; layout documented in docs/checkpoint_format.md.
std::string encode_checkpoint(const BuildCheckpoint& state);
BuildCheckpoint decode_checkpoint(std::string_view bytes);

// Writes to a sibling temporary file and renames it over `path`.
void save_checkpoint(const BuildCheckpoint& state,
                     const std::filesystem::path& path);
BuildCheckpoint load_checkpoint(const std::filesystem::path& path);

// Continues the build described by `checkpoint` on `train`, using the stored
// configuration. `settings` replaces the stored checkpoint destination when
// given.
EnsembleModel resume_build(
    const LabeledDataset& train, BuildCheckpoint checkpoint,
    std::optional<CheckpointSettings> settings = std::nullopt);

}  // namespace rboss
