#include "rboss/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "rboss/checkpoint.hpp"
#include "rboss/error.hpp"
#include "rboss/rboss_builder.hpp"
#include "text_util.hpp"

namespace rboss {

namespace {

ExperimentArm rboss_arm(std::string name) {
  ExperimentArm arm;
  arm.variant = std::move(name);
  arm.config.ensemble_size = 100;
  return arm;
}

ExperimentArm filtered_arm(std::string name) {
  ExperimentArm arm;
  arm.variant = std::move(name);
  arm.config.ensemble_size = 250;
  arm.config.max_ensemble_size = 50;
  arm.config.estimate = FullLoocv{};
  return arm;
}

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', '_');
  std::replace(s.begin(), s.end(), '\n', '_');
  return s;
}

std::string join_indices(const std::vector<std::size_t>& idx) {
  std::string out;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(idx[i]);
  }
  return out;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + p.string());
  return out;
}

}  // namespace

const std::vector<std::string>& variant_names() {
  static const std::vector<std::string> names = {
      "grid-boss",           "rboss",          "rboss-subsample",
      "rboss-cawpe",         "rboss-filtered", "rboss-filtered-cawpe",
      "rboss-fast-estimate", "rboss-max-train", "rboss-contract"};
  return names;
}

ExperimentArm variant_preset(std::string_view name) {
  const std::string n(name);
  if (n == "grid-boss") {
    ExperimentArm arm;
    arm.variant = n;
    arm.grid = true;
    return arm;
  }
  if (n == "rboss") return rboss_arm(n);
  if (n == "rboss-subsample") {
    auto arm = rboss_arm(n);
    arm.config.subsample_policy = FractionPolicy{0.7};
    return arm;
  }
  if (n == "rboss-cawpe") {
    auto arm = rboss_arm(n);
    arm.config.estimate = FullLoocv{};
    arm.config.use_cawpe = true;
    return arm;
  }
  if (n == "rboss-filtered") return filtered_arm(n);
  if (n == "rboss-filtered-cawpe") {
    auto arm = filtered_arm(n);
    arm.config.use_cawpe = true;
    arm.config.subsample_policy = FractionPolicy{0.7};
    return arm;
  }
  if (n == "rboss-fast-estimate") {
    auto arm = filtered_arm(n);
    arm.config.estimate = FastLoocv{50};
    return arm;
  }
  if (n == "rboss-max-train") {
    auto arm = filtered_arm(n);
    arm.config.subsample_policy = MaxTotalPolicy{500};
    return arm;
  }
  if (n == "rboss-contract") {
    ExperimentArm arm;
    arm.variant = n;
    arm.config.time_budget_seconds = 600.0;
    return arm;
  }
  throw ConfigError("unknown variant '" + n + "'");
}

void ExperimentConfig::validate() const {
  if (data_path.has_value() == synthetic.has_value()) {
    throw ConfigError("exactly one of a data path and a synthetic spec");
  }
  if (resamples < 1) throw ConfigError("resample count must be at least 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train fraction must lie in (0, 1)");
  }
  if (arms.empty()) throw ConfigError("no variants to run");
  for (const auto& arm : arms) {
    if (arm.variant.empty()) throw ConfigError("variant without a name");
    if (!arm.grid) {
      RbossConfig probe = arm.config;
      probe.checkpoint.reset();
      probe.validate();
    }
  }
}

std::string format_result_row(const ResultRecord& r) {
  return sanitize(r.dataset) + ',' + sanitize(r.variant) + ',' +
         std::to_string(r.resample) + ',' + detail::format_double(r.accuracy) +
         ',' + detail::format_double(r.build_seconds) + ',' +
         std::to_string(r.ensemble_size) + ',' +
         std::to_string(r.params_tried) + ',' + std::to_string(r.peak_bags);
}

ResultRecord parse_result_row(std::string_view line) {
  std::vector<std::string_view> f;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    f.push_back(detail::trim(line.substr(
        start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (f.size() != 8) throw FormatError("result row needs 8 fields");
  auto num = [](std::string_view s) {
    double v = 0.0;
    if (!detail::parse_double(s, v)) {
      throw FormatError("bad number '" + std::string(s) + "'");
    }
    return v;
  };
  ResultRecord r;
  r.dataset = std::string(f[0]);
  r.variant = std::string(f[1]);
  r.resample = static_cast<std::size_t>(num(f[2]));
  r.accuracy = num(f[3]);
  r.build_seconds = num(f[4]);
  r.ensemble_size = static_cast<std::size_t>(num(f[5]));
  r.params_tried = static_cast<std::size_t>(num(f[6]));
  r.peak_bags = static_cast<std::size_t>(num(f[7]));
  return r;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const LabeledDataset data =
      cfg.data_path ? load_dataset(*cfg.data_path)
                    : generate_synthetic(*cfg.synthetic, cfg.synthetic_seed);
  std::string dataset = cfg.dataset_name;
  if (dataset.empty()) {
    dataset = cfg.data_path ? cfg.data_path->stem().string() : "synthetic";
  }

  std::filesystem::create_directories(cfg.out_dir);
  std::map<std::string, std::ofstream> results;
  for (const auto& arm : cfg.arms) {
    if (results.count(arm.variant)) {
      throw ConfigError("variant '" + arm.variant + "' listed twice");
    }
    auto& out = results[arm.variant] =
        open_out(cfg.out_dir / ("results_" + arm.variant + ".csv"));
    out << kResultHeader << '\n';
  }
  auto splits = open_out(cfg.out_dir / "splits.csv");
  splits << "resample,seed,train_indices,test_indices\n";
  auto errors = open_out(cfg.out_dir / "errors.log");

  ExperimentResult result;
  auto fail = [&](const std::string& variant, std::size_t r,
                  const std::string& msg) {
    result.errors.push_back({variant, r, msg});
    errors << "variant=" << variant << " resample=" << r << ": " << msg
           << std::endl;
  };

  for (std::size_t r = 0; r < cfg.resamples; ++r) {
    const std::uint64_t seed = cfg.base_seed + r;
    std::optional<ResampleSplit> split;
    try {
      split = stratified_resample(data, cfg.train_fraction, seed, r);
    } catch (const Error& e) {
      for (const auto& arm : cfg.arms) fail(arm.variant, r, e.what());
      continue;
    }
    splits << r << ',' << seed << ',' << join_indices(split->train_indices)
           << ',' << join_indices(split->test_indices) << '\n';
    splits.flush();

    for (const auto& arm : cfg.arms) {
      try {
        if (cfg.before_build) cfg.before_build(arm, r);
        EnsembleModel model;
        if (arm.grid) {
          model = build_grid_boss(split->train, arm.grid_retention);
        } else {
          RbossConfig rc = arm.config;
          rc.seed = seed;
          if (cfg.checkpoint) {
            CheckpointSettings cs = *cfg.checkpoint;
            cs.path = cs.path.string() + "." + arm.variant + ".r" +
                      std::to_string(r);
            rc.checkpoint = cs;
            if (std::filesystem::exists(cs.path)) {
              model = resume_build(split->train, load_checkpoint(cs.path), cs);
            } else {
              model = build_rboss(split->train, rc);
            }
          } else {
            model = build_rboss(split->train, rc);
          }
        }

        ResultRecord rec;
        rec.dataset = dataset;
        rec.variant = arm.variant;
        rec.resample = r;
        rec.test_size = split->test.size();
        for (std::size_t i = 0; i < split->test.size(); ++i) {
          if (predict_ensemble(model, split->test.series(i)).label ==
              split->test.label(i)) {
            ++rec.test_correct;
          }
        }
        rec.accuracy = static_cast<double>(rec.test_correct) /
                       static_cast<double>(rec.test_size);
        rec.build_seconds = model.metadata.build_seconds;
        rec.ensemble_size = model.members.size();
        rec.params_tried = model.metadata.params_tried;
        rec.peak_bags = model.metadata.peak_bags;
        auto& out = results[arm.variant];
        out << format_result_row(rec) << '\n';
        out.flush();
        result.records.push_back(std::move(rec));
      } catch (const std::exception& e) {
        fail(arm.variant, r, e.what());
      }
    }
  }

  auto summary = open_out(cfg.out_dir / "summary.csv");
  summary << "dataset,variant,resamples,mean_accuracy,stdev_accuracy,"
             "total_build_seconds,failed_resamples\n";
  for (const auto& arm : cfg.arms) {
    std::vector<double> acc;
    double build = 0.0;
    for (const auto& rec : result.records) {
      if (rec.variant != arm.variant) continue;
      acc.push_back(rec.accuracy);
      build += rec.build_seconds;
    }
    double mean = 0.0;
    for (double a : acc) mean += a;
    if (!acc.empty()) mean /= static_cast<double>(acc.size());
    double sd = 0.0;
    if (acc.size() > 1) {
      for (double a : acc) sd += (a - mean) * (a - mean);
      sd = std::sqrt(sd / static_cast<double>(acc.size() - 1));
    }
    auto failed = std::count_if(
        result.errors.begin(), result.errors.end(),
        [&](const ExperimentError& e) { return e.variant == arm.variant; });
    summary << sanitize(dataset) << ',' << arm.variant << ',' << acc.size()
            << ',' << detail::format_double(mean) << ','
            << detail::format_double(sd) << ','
            << detail::format_double(build) << ',' << failed << '\n';
  }
  return result;
}

}  // namespace rboss
