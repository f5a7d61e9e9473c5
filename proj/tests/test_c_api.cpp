#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <string>

#include "rboss/rboss.h"

namespace fs = std::filesystem;

namespace {

const char* kSpec = "n=8,m=40,pattern=8,counts=1:3,noise=0.3";

rboss_dataset* synthetic(uint64_t seed) {
  rboss_dataset* d = nullptr;
  EXPECT_EQ(rboss_dataset_synthetic(kSpec, seed, &d), RBOSS_OK);
  return d;
}

}  // namespace

TEST(CApi, StatusStrings) {
  EXPECT_NE(std::string(rboss_version()), "");
  EXPECT_STRNE(rboss_status_string(RBOSS_OK),
               rboss_status_string(RBOSS_ERR_FORMAT));
}

TEST(CApi, ParseErrors) {
  rboss_dataset* d = nullptr;
  const char* bad = "0,1,2\n1,1\n";
  EXPECT_EQ(rboss_dataset_parse(bad, std::strlen(bad), &d), RBOSS_ERR_FORMAT);
  EXPECT_EQ(d, nullptr);
  EXPECT_NE(std::string(rboss_last_error()).find('2'), std::string::npos);
  EXPECT_EQ(rboss_dataset_parse(nullptr, 4, &d), RBOSS_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(rboss_dataset_parse(nullptr, 0, &d), RBOSS_ERR_FORMAT);
  EXPECT_EQ(rboss_dataset_load("/no/such/file.csv", &d), RBOSS_ERR_FORMAT);
  EXPECT_EQ(rboss_dataset_load(nullptr, &d), RBOSS_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(rboss_dataset_synthetic("counts=1", 0, &d), RBOSS_ERR_SPEC);
}

TEST(CApi, DatasetAccessors) {
  const char* text = "a,1,2,3\nb,4,5,6\na,7,8,9\n";
  rboss_dataset* d = nullptr;
  ASSERT_EQ(rboss_dataset_parse(text, std::strlen(text), &d), RBOSS_OK);
  EXPECT_EQ(rboss_dataset_size(d), 3u);
  EXPECT_EQ(rboss_dataset_length(d), 3u);
  EXPECT_EQ(rboss_dataset_class_count(d), 2);
  const double* v = nullptr;
  int label = -1;
  ASSERT_EQ(rboss_dataset_instance(d, 1, &v, &label), RBOSS_OK);
  EXPECT_EQ(label, 1);
  EXPECT_EQ(v[2], 6.0);
  EXPECT_EQ(rboss_dataset_instance(d, 3, &v, &label),
            RBOSS_ERR_INVALID_ARGUMENT);
  rboss_dataset *tr = nullptr, *te = nullptr;
  EXPECT_EQ(rboss_dataset_resample(d, 0.5, 1, &tr, &te),
            RBOSS_ERR_STRATIFICATION);
  rboss_dataset_free(d);
}

TEST(CApi, BuildPredict) {
  rboss_dataset* d = synthetic(1);
  rboss_dataset *tr = nullptr, *te = nullptr;
  ASSERT_EQ(rboss_dataset_resample(d, 0.5, 3, &tr, &te), RBOSS_OK);
  EXPECT_EQ(rboss_dataset_size(tr), 8u);

  rboss_config cfg;
  ASSERT_EQ(rboss_config_preset("rboss-filtered-cawpe", &cfg), RBOSS_OK);
  cfg.ensemble_size = 8;
  cfg.max_ensemble_size = 3;
  cfg.seed = 5;
  rboss_ensemble* e = nullptr;
  ASSERT_EQ(rboss_build(tr, &cfg, &e), RBOSS_OK) << rboss_last_error();
  EXPECT_EQ(rboss_ensemble_member_count(e), 3u);
  EXPECT_EQ(rboss_ensemble_params_tried(e), 8u);
  EXPECT_GE(rboss_ensemble_build_seconds(e), 0.0);
  rboss_member_info info;
  ASSERT_EQ(rboss_ensemble_member(e, 0, &info), RBOSS_OK);
  EXPECT_EQ(info.alphabet_size, 4);
  EXPECT_TRUE(info.has_accuracy);
  EXPECT_EQ(rboss_ensemble_member(e, 3, &info), RBOSS_ERR_INVALID_ARGUMENT);

  const double* v = nullptr;
  int label = -1;
  ASSERT_EQ(rboss_dataset_instance(te, 0, &v, &label), RBOSS_OK);
  int pred = -1;
  double probs[2];
  ASSERT_EQ(rboss_predict(e, v, rboss_dataset_length(te), &pred, probs, 2),
            RBOSS_OK);
  EXPECT_NEAR(probs[0] + probs[1], 1.0, 1e-12);
  EXPECT_EQ(rboss_predict(e, v, 3, &pred, nullptr, 0), RBOSS_ERR_PARAMETER);
  EXPECT_EQ(rboss_predict(e, v, rboss_dataset_length(te), &pred, probs, 1),
            RBOSS_ERR_INVALID_ARGUMENT);

  rboss_ensemble* g = nullptr;
  ASSERT_EQ(rboss_build_grid(tr, 0.92, &g), RBOSS_OK);
  EXPECT_GE(rboss_ensemble_member_count(g), 1u);

  rboss_ensemble_free(g);
  rboss_ensemble_free(e);
  rboss_dataset_free(tr);
  rboss_dataset_free(te);
  rboss_dataset_free(d);
}

TEST(CApi, ConfigErrors) {
  rboss_config cfg;
  rboss_config_init(&cfg);
  EXPECT_EQ(cfg.ensemble_size, 100u);
  EXPECT_LT(cfg.time_budget_seconds, 0.0);
  EXPECT_EQ(rboss_config_preset("grid-boss", &cfg), RBOSS_ERR_CONFIG);
  EXPECT_EQ(rboss_config_preset("unknown", &cfg), RBOSS_ERR_CONFIG);
  EXPECT_TRUE(rboss_variant_is_grid("grid-boss"));
  EXPECT_FALSE(rboss_variant_is_grid("rboss"));
  EXPECT_EQ(rboss_variant_count(), 9u);
  EXPECT_EQ(rboss_variant_name(9), nullptr);

  rboss_dataset* d = synthetic(2);
  rboss_config_init(&cfg);
  cfg.use_cawpe = 1;
  rboss_ensemble* e = nullptr;
  EXPECT_EQ(rboss_build(d, &cfg, &e), RBOSS_ERR_CONFIG);
  EXPECT_EQ(e, nullptr);
  rboss_dataset_free(d);
}

TEST(CApi, CheckpointResume) {
  auto dir = fs::temp_directory_path() / "rboss_capi_tests";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto path = (dir / "cp.bin").string();

  rboss_dataset* d = synthetic(3);
  rboss_config cfg;
  rboss_config_init(&cfg);
  cfg.ensemble_size = 6;
  cfg.seed = 11;
  cfg.checkpoint_path = path.c_str();
  rboss_ensemble* e = nullptr;
  ASSERT_EQ(rboss_build(d, &cfg, &e), RBOSS_OK);
  ASSERT_TRUE(fs::exists(path));
  rboss_ensemble* r = nullptr;
  ASSERT_EQ(rboss_resume(d, path.c_str(), &r), RBOSS_OK);
  ASSERT_EQ(rboss_ensemble_member_count(r), rboss_ensemble_member_count(e));
  for (size_t i = 0; i < rboss_ensemble_member_count(e); ++i) {
    rboss_member_info a, b;
    rboss_ensemble_member(e, i, &a);
    rboss_ensemble_member(r, i, &b);
    EXPECT_EQ(a.parameter_id, b.parameter_id);
  }
  rboss_dataset* other = synthetic(4);
  rboss_ensemble* x = nullptr;
  EXPECT_EQ(rboss_resume(other, path.c_str(), &x), RBOSS_ERR_DATASET_MISMATCH);
  EXPECT_EQ(rboss_resume(d, (dir / "none").string().c_str(), &x),
            RBOSS_ERR_NOT_FOUND);

  rboss_ensemble_free(r);
  rboss_ensemble_free(e);
  rboss_dataset_free(other);
  rboss_dataset_free(d);
}

TEST(CApi, Experiment) {
  auto dir = fs::temp_directory_path() / "rboss_capi_experiment";
  fs::remove_all(dir);
  rboss_arm arms[2]{};
  arms[0].variant = "grid-boss";
  arms[0].grid = 1;
  arms[1].variant = "rboss";
  rboss_config_preset("rboss", &arms[1].config);
  arms[1].config.ensemble_size = 4;
  rboss_experiment exp{};
  exp.synthetic_spec = kSpec;
  exp.arms = arms;
  exp.arm_count = 2;
  exp.resamples = 2;
  exp.train_fraction = 0.5;
  std::string out = dir.string();
  exp.out_dir = out.c_str();
  rboss_experiment_report rep{};
  ASSERT_EQ(rboss_experiment_run(&exp, &rep), RBOSS_OK) << rboss_last_error();
  EXPECT_EQ(rep.records, 4u);
  EXPECT_EQ(rep.failures, 0u);
  EXPECT_TRUE(fs::exists(dir / "results_grid-boss.csv"));
  EXPECT_TRUE(fs::exists(dir / "summary.csv"));
}
