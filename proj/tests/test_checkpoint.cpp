#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rboss/checkpoint.hpp"
#include "rboss/error.hpp"
#include "rboss/rboss_builder.hpp"
#include "rboss/synthetic.hpp"

using namespace rboss;
namespace fs = std::filesystem;

namespace {

LabeledDataset data(std::uint64_t seed = 1) {
  SyntheticSpec spec;
  spec.per_class = 6;
  spec.length = 48;
  spec.pattern_length = 8;
  spec.occurrences = {1, 3};
  return generate_synthetic(spec, seed);
}

RbossConfig filtered_config() {
  RbossConfig c;
  c.ensemble_size = 10;
  c.max_ensemble_size = 4;
  c.estimate = FullLoocv{};
  c.use_cawpe = true;
  c.subsample_policy = FractionPolicy{0.8};
  c.seed = 77;
  return c;
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "rboss_checkpoint_tests";
  fs::create_directories(dir);
  auto p = dir / name;
  fs::remove_all(p);
  fs::remove_all(p.string() + ".tmp");
  return p;
}

BuildCheckpoint partial(const LabeledDataset& d, std::size_t steps) {
  RbossBuilder b(d, filtered_config());
  for (std::size_t i = 0; i < steps; ++i) b.step();
  return b.snapshot();
}

std::vector<int> predictions(const EnsembleModel& e, const LabeledDataset& d) {
  std::vector<int> out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    out.push_back(predict_ensemble(e, d.series(i)).label);
  }
  return out;
}

}  // namespace

TEST(Checkpoint, EncodeDecodeRoundTrip) {
  auto d = data();
  auto cp = partial(d, 6);
  EXPECT_EQ(cp.members_built, 6u);
  EXPECT_EQ(cp.members.size(), 4u);
  auto back = decode_checkpoint(encode_checkpoint(cp));
  EXPECT_EQ(back, cp);
}

TEST(Checkpoint, RoundTripOtherConfigs) {
  auto d = data();
  RbossConfig c;
  c.time_budget_seconds = 30.0;
  c.contract_member_cap = 4;
  c.estimate = FastLoocv{3};
  c.subsample_policy = MaxTotalPolicy{9};
  c.checkpoint = CheckpointSettings{"/tmp/x", 2, 1.5};
  RbossBuilder b(d, c);
  b.step();
  b.step();
  auto cp = b.snapshot();
  EXPECT_EQ(decode_checkpoint(encode_checkpoint(cp)), cp);
}

TEST(Checkpoint, HeaderLayout) {
  auto bytes = encode_checkpoint(partial(data(), 1));
  ASSERT_GE(bytes.size(), 24u);
  EXPECT_EQ(bytes.substr(0, 4), "RBOS");
  std::uint32_t version;
  std::memcpy(&version, bytes.data() + 4, 4);
  EXPECT_EQ(version, kCheckpointVersion);
  std::uint64_t len;
  std::memcpy(&len, bytes.data() + 8, 8);
  EXPECT_EQ(len, bytes.size() - 24);
}

TEST(Checkpoint, VersionMismatchNamesBoth) {
  auto bytes = encode_checkpoint(partial(data(), 1));
  bytes[4] = 9;
  try {
    decode_checkpoint(bytes);
    FAIL() << "expected VersionError";
  } catch (const VersionError& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find('9'), std::string::npos);
    EXPECT_NE(msg.find('1'), std::string::npos);
  }
}

TEST(Checkpoint, CorruptionDetected) {
  auto bytes = encode_checkpoint(partial(data(), 2));
  auto flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x10;
  EXPECT_THROW(decode_checkpoint(flipped), CheckpointError);
  EXPECT_THROW(decode_checkpoint(bytes.substr(0, bytes.size() - 3)),
               CheckpointError);
  EXPECT_THROW(decode_checkpoint(bytes + "x"), CheckpointError);
  auto magic = bytes;
  magic[0] = 'X';
  EXPECT_THROW(decode_checkpoint(magic), CheckpointError);
  EXPECT_THROW(decode_checkpoint(""), CheckpointError);
}

TEST(Checkpoint, SaveLoadFile) {
  auto path = scratch("save_load.bin");
  auto cp = partial(data(), 3);
  save_checkpoint(cp, path);
  EXPECT_FALSE(fs::exists(path.string() + ".tmp"));
  EXPECT_EQ(load_checkpoint(path), cp);
  EXPECT_THROW(load_checkpoint(scratch("missing.bin")), NotFoundError);
}

TEST(Checkpoint, FailedWriteKeepsPreviousFile) {
  auto path = scratch("atomic.bin");
  auto first = partial(data(), 2);
  save_checkpoint(first, path);
  fs::create_directory(path.string() + ".tmp");
  EXPECT_THROW(save_checkpoint(partial(data(), 5), path), CheckpointError);
  EXPECT_EQ(load_checkpoint(path), first);
  fs::remove_all(path.string() + ".tmp");
}

TEST(Checkpoint, ResumeEqualsUninterrupted) {
  auto d = data(4);
  auto test = data(5);
  auto full = build_rboss(d, filtered_config());

  auto path = scratch("resume.bin");
  save_checkpoint(partial(d, 3), path);
  auto resumed = resume_build(d, load_checkpoint(path));
  EXPECT_EQ(resumed.members, full.members);
  EXPECT_EQ(resumed.metadata.params_tried, full.metadata.params_tried);
  EXPECT_EQ(resumed.metadata.peak_bags, full.metadata.peak_bags);
  EXPECT_EQ(predictions(resumed, test), predictions(full, test));
}

TEST(Checkpoint, ResumeEveryPrefix) {
  auto d = data(6);
  auto full = build_rboss(d, filtered_config());
  for (std::size_t k = 0; k <= 10; ++k) {
    auto cp = decode_checkpoint(encode_checkpoint(partial(d, k)));
    EXPECT_EQ(resume_build(d, cp).members, full.members) << k;
  }
}

TEST(Checkpoint, DatasetMismatch) {
  auto cp = partial(data(1), 2);
  EXPECT_THROW(resume_build(data(2), cp), DatasetMismatchError);
}

TEST(Checkpoint, TamperedDrawsRejected) {
  auto d = data();
  auto cp = partial(d, 3);
  std::swap(cp.drawn_ids[0], cp.drawn_ids[1]);
  EXPECT_THROW(resume_build(d, cp), CheckpointError);
}

TEST(Checkpoint, InvariantsChecked) {
  auto cp = partial(data(), 3);
  cp.members_built = 2;
  EXPECT_THROW(cp.validate(), CheckpointError);
  cp = partial(data(), 3);
  cp.format_version = 2;
  EXPECT_THROW(cp.validate(), CheckpointError);
}

TEST(Checkpoint, WrittenDuringBuild) {
  auto d = data();
  auto path = scratch("during.bin");
  auto cfg = filtered_config();
  cfg.checkpoint = CheckpointSettings{path, 4, std::nullopt};
  auto e = build_rboss(d, cfg);
  auto cp = load_checkpoint(path);
  // writes after members 4 and 8
  EXPECT_EQ(cp.members_built, 8u);
  auto resumed = resume_build(d, cp);
  EXPECT_EQ(resumed.members, e.members);
}

TEST(Checkpoint, FailedWriteDoesNotStopBuild) {
  auto d = data();
  auto path = scratch("unwritable.bin");
  fs::create_directory(path.string() + ".tmp");
  auto cfg = filtered_config();
  cfg.checkpoint = CheckpointSettings{path, 1, std::nullopt};
  testing::internal::CaptureStderr();
  auto e = build_rboss(d, cfg);
  auto err = testing::internal::GetCapturedStderr();
  EXPECT_EQ(e.metadata.params_tried, 10u);
  EXPECT_NE(err.find("checkpoint"), std::string::npos);
  fs::remove_all(path.string() + ".tmp");
}
