// Resampled train/test experiments over the BOSS ensemble variants.
//
//   rboss --data Coffee.csv --variant grid-boss,rboss-filtered-cawpe \
//         --resamples 30 --out results/

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rboss/rboss.h"

namespace {

std::vector<std::string> split_names(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& item : raw) {
    std::stringstream ss(item);
    std::string name;
    while (std::getline(ss, name, ',')) {
      if (!name.empty()) out.push_back(name);
    }
  }
  return out;
}

std::string known_variants() {
  std::string s;
  for (size_t i = 0; i < rboss_variant_count(); ++i) {
    if (i) s += ", ";
    s += rboss_variant_name(i);
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resampled accuracy and build-time experiments for BOSS and "
               "randomised BOSS ensembles"};
  app.set_version_flag("--version", std::string(rboss_version()));

  std::string data_path;
  std::string synthetic;
  uint64_t synthetic_seed = 0;
  std::vector<std::string> variant_args;
  std::optional<uint64_t> k;
  std::optional<uint64_t> max_ensemble;
  std::optional<double> contract_minutes;
  uint64_t member_cap = 500;
  std::optional<double> subsample_fraction;
  std::optional<uint64_t> max_train;
  std::optional<uint64_t> fast_per_class;
  double cawpe_exponent = 4.0;
  uint64_t resamples = 30;
  double train_fraction = 0.5;
  uint64_t seed = 0;
  std::string checkpoint;
  uint64_t checkpoint_every = 1;
  std::string out_dir = ".";
  std::string dataset_name;

  auto* data_opt =
      app.add_option("--data", data_path, "Dataset file (label,v1,v2,...)");
  auto* synth_opt = app.add_option(
      "--synthetic", synthetic,
      "Synthetic spec, e.g. n=30,m=128,pattern=16,counts=1:4,noise=0.5");
  data_opt->excludes(synth_opt);
  synth_opt->excludes(data_opt);
  app.add_option("--synthetic-seed", synthetic_seed,
                 "Seed for the synthetic generator");
  app.add_option("--name", dataset_name, "Dataset name used in the output");
  app.add_option("--variant", variant_args,
                 "Variant name(s), comma separated or repeated: " +
                     known_variants())
      ->required();
  app.add_option("--k", k, "Parameter sets to try per ensemble");
  app.add_option("--max-ensemble", max_ensemble, "Max ensemble size (s)");
  app.add_option("--contract-minutes", contract_minutes,
                 "Build time budget in minutes (replaces --k)");
  app.add_option("--member-cap", member_cap,
                 "Maximum members built under a contract")
      ->capture_default_str();
  app.add_option("--subsample-fraction", subsample_fraction,
                 "Per-member stratified train subsample fraction");
  app.add_option("--max-train", max_train,
                 "Per-member stratified train subsample cap");
  app.add_option("--fast-estimate-per-class", fast_per_class,
                 "Leave-one-out on this many instances per class");
  app.add_option("--cawpe-exponent", cawpe_exponent, "CAWPE exponent")
      ->capture_default_str();
  app.add_option("--resamples", resamples, "Number of resamples")
      ->capture_default_str();
  app.add_option("--train-fraction", train_fraction,
                 "Train share of each stratified resample")
      ->capture_default_str();
  app.add_option("--seed", seed, "Base seed; resample r uses seed + r")
      ->capture_default_str();
  auto* cp_opt = app.add_option(
      "--checkpoint", checkpoint,
      "Checkpoint path prefix; existing checkpoints are resumed");
  app.add_option("--checkpoint-every", checkpoint_every,
                 "Members between checkpoint writes")
      ->capture_default_str()
      ->needs(cp_opt);
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (data_path.empty() && synthetic.empty()) {
    std::fprintf(stderr, "one of --data and --synthetic is required\n");
    return 2;
  }
  if (subsample_fraction && max_train) {
    std::fprintf(stderr,
                 "--subsample-fraction and --max-train are exclusive\n");
    return 2;
  }
  if (k && contract_minutes) {
    std::fprintf(stderr, "--k and --contract-minutes are exclusive\n");
    return 2;
  }

  const auto names = split_names(variant_args);
  std::vector<rboss_arm> arms;
  for (const auto& name : names) {
    rboss_arm arm{};
    arm.variant = name.c_str();
    if (rboss_variant_is_grid(name.c_str())) {
      arm.grid = 1;
      arms.push_back(arm);
      continue;
    }
    if (rboss_config_preset(name.c_str(), &arm.config) != RBOSS_OK) {
      std::fprintf(stderr, "%s\nknown variants: %s\n", rboss_last_error(),
                   known_variants().c_str());
      return 2;
    }
    rboss_config& c = arm.config;
    if (k) {
      c.ensemble_size = *k;
      c.time_budget_seconds = -1.0;
    }
    if (contract_minutes) {
      c.time_budget_seconds = *contract_minutes * 60.0;
      c.ensemble_size = 0;
    } else if (name == "rboss-contract" && !k) {
      std::fprintf(stderr, "rboss-contract needs --contract-minutes\n");
      return 2;
    }
    if (max_ensemble) c.max_ensemble_size = *max_ensemble;
    c.member_cap = member_cap;
    if (subsample_fraction) {
      c.subsample_kind = RBOSS_SUBSAMPLE_FRACTION;
      c.subsample_fraction = *subsample_fraction;
    }
    if (max_train) {
      c.subsample_kind = RBOSS_SUBSAMPLE_MAX_TOTAL;
      c.subsample_max_total = *max_train;
    }
    if (fast_per_class) {
      c.estimate_kind = RBOSS_ESTIMATE_FAST_LOOCV;
      c.fast_per_class = *fast_per_class;
    }
    c.cawpe_exponent = cawpe_exponent;
    arms.push_back(arm);
  }

  rboss_experiment exp{};
  exp.data_path = data_path.empty() ? nullptr : data_path.c_str();
  exp.synthetic_spec = synthetic.empty() ? nullptr : synthetic.c_str();
  exp.synthetic_seed = synthetic_seed;
  exp.dataset_name = dataset_name.empty() ? nullptr : dataset_name.c_str();
  exp.arms = arms.data();
  exp.arm_count = arms.size();
  exp.resamples = resamples;
  exp.base_seed = seed;
  exp.train_fraction = train_fraction;
  exp.out_dir = out_dir.c_str();
  exp.checkpoint_path = checkpoint.empty() ? nullptr : checkpoint.c_str();
  exp.checkpoint_every = checkpoint_every;

  rboss_experiment_report report{};
  rboss_status st = rboss_experiment_run(&exp, &report);
  if (st != RBOSS_OK) {
    std::fprintf(stderr, "rboss: %s: %s\n", rboss_status_string(st),
                 rboss_last_error());
    return st == RBOSS_ERR_CONFIG || st == RBOSS_ERR_SPEC ? 2 : 1;
  }
  std::printf("%llu result rows, %llu failed builds; see %s/summary.csv\n",
              static_cast<unsigned long long>(report.records),
              static_cast<unsigned long long>(report.failures),
              out_dir.c_str());
  return report.failures == 0 ? 0 : 1;
}
