#include "rboss/rboss.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "rboss/checkpoint.hpp"
#include "rboss/dataset.hpp"
#include "rboss/ensemble.hpp"
#include "rboss/error.hpp"
#include "rboss/experiment.hpp"
#include "rboss/synthetic.hpp"

struct rboss_dataset {
  rboss::LabeledDataset data;
};

struct rboss_ensemble {
  rboss::EnsembleModel model;
};

namespace {

thread_local std::string last_error;

rboss_status fail(rboss_status status, const char* what) {
  last_error = what;
  return status;
}

// Runs `fn`, translating exceptions into status codes. Most derived first.
template <typename Fn>
rboss_status guarded(Fn&& fn) {
  try {
    fn();
    return RBOSS_OK;
  } catch (const rboss::FormatError& e) {
    return fail(RBOSS_ERR_FORMAT, e.what());
  } catch (const rboss::StratificationError& e) {
    return fail(RBOSS_ERR_STRATIFICATION, e.what());
  } catch (const rboss::PolicyError& e) {
    return fail(RBOSS_ERR_POLICY, e.what());
  } catch (const rboss::ParameterError& e) {
    return fail(RBOSS_ERR_PARAMETER, e.what());
  } catch (const rboss::EstimateError& e) {
    return fail(RBOSS_ERR_ESTIMATE, e.what());
  } catch (const rboss::BuildError& e) {
    return fail(RBOSS_ERR_BUILD, e.what());
  } catch (const rboss::ConfigError& e) {
    return fail(RBOSS_ERR_CONFIG, e.what());
  } catch (const rboss::SpecError& e) {
    return fail(RBOSS_ERR_SPEC, e.what());
  } catch (const rboss::NotFoundError& e) {
    return fail(RBOSS_ERR_NOT_FOUND, e.what());
  } catch (const rboss::VersionError& e) {
    return fail(RBOSS_ERR_VERSION, e.what());
  } catch (const rboss::DatasetMismatchError& e) {
    return fail(RBOSS_ERR_DATASET_MISMATCH, e.what());
  } catch (const rboss::CheckpointError& e) {
    return fail(RBOSS_ERR_CHECKPOINT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(RBOSS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(RBOSS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(RBOSS_ERR_INTERNAL, "unknown error");
  }
}

rboss::RbossConfig to_cpp(const rboss_config& c) {
  rboss::RbossConfig out;
  if (c.ensemble_size > 0) out.ensemble_size = c.ensemble_size;
  if (c.max_ensemble_size > 0) out.max_ensemble_size = c.max_ensemble_size;
  if (c.time_budget_seconds >= 0.0) {
    out.time_budget_seconds = c.time_budget_seconds;
  }
  out.contract_member_cap = c.member_cap;
  switch (c.subsample_kind) {
    case RBOSS_SUBSAMPLE_NONE: break;
    case RBOSS_SUBSAMPLE_FRACTION:
      out.subsample_policy = rboss::FractionPolicy{c.subsample_fraction};
      break;
    case RBOSS_SUBSAMPLE_MAX_TOTAL:
      out.subsample_policy = rboss::MaxTotalPolicy{c.subsample_max_total};
      break;
    default: throw rboss::ConfigError("unknown subsample kind");
  }
  out.use_cawpe = c.use_cawpe != 0;
  out.cawpe_exponent = c.cawpe_exponent;
  switch (c.estimate_kind) {
    case RBOSS_ESTIMATE_NONE: out.estimate = rboss::NoEstimate{}; break;
    case RBOSS_ESTIMATE_FULL_LOOCV: out.estimate = rboss::FullLoocv{}; break;
    case RBOSS_ESTIMATE_FAST_LOOCV:
      out.estimate = rboss::FastLoocv{c.fast_per_class};
      break;
    default: throw rboss::ConfigError("unknown estimate kind");
  }
  out.seed = c.seed;
  if (c.checkpoint_path != nullptr) {
    rboss::CheckpointSettings s;
    s.path = c.checkpoint_path;
    s.every_members = c.checkpoint_every;
    out.checkpoint = std::move(s);
  }
  return out;
}

void from_cpp(const rboss::RbossConfig& in, rboss_config* c) {
  rboss_config_init(c);
  c->ensemble_size = in.ensemble_size.value_or(0);
  c->max_ensemble_size = in.max_ensemble_size.value_or(0);
  c->time_budget_seconds = in.time_budget_seconds.value_or(-1.0);
  c->member_cap = in.contract_member_cap;
  if (in.subsample_policy) {
    if (const auto* f =
            std::get_if<rboss::FractionPolicy>(&*in.subsample_policy)) {
      c->subsample_kind = RBOSS_SUBSAMPLE_FRACTION;
      c->subsample_fraction = f->fraction;
    } else {
      c->subsample_kind = RBOSS_SUBSAMPLE_MAX_TOTAL;
      c->subsample_max_total =
          std::get<rboss::MaxTotalPolicy>(*in.subsample_policy).cap;
    }
  }
  c->use_cawpe = in.use_cawpe ? 1 : 0;
  c->cawpe_exponent = in.cawpe_exponent;
  if (std::holds_alternative<rboss::FullLoocv>(in.estimate)) {
    c->estimate_kind = RBOSS_ESTIMATE_FULL_LOOCV;
  } else if (const auto* fast = std::get_if<rboss::FastLoocv>(&in.estimate)) {
    c->estimate_kind = RBOSS_ESTIMATE_FAST_LOOCV;
    c->fast_per_class = fast->per_class_cap;
  }
  c->seed = in.seed;
}

#define RBOSS_REQUIRE(cond)                                        \
  do {                                                             \
    if (!(cond)) return fail(RBOSS_ERR_INVALID_ARGUMENT, #cond);   \
  } while (0)

}  // namespace

extern "C" {

const char* rboss_version(void) { return "1.0.0"; }

const char* rboss_status_string(rboss_status status) {
  switch (status) {
    case RBOSS_OK: return "ok";
    case RBOSS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case RBOSS_ERR_FORMAT: return "format error";
    case RBOSS_ERR_STRATIFICATION: return "stratification error";
    case RBOSS_ERR_POLICY: return "policy error";
    case RBOSS_ERR_PARAMETER: return "parameter error";
    case RBOSS_ERR_ESTIMATE: return "estimate error";
    case RBOSS_ERR_BUILD: return "build error";
    case RBOSS_ERR_CONFIG: return "config error";
    case RBOSS_ERR_SPEC: return "spec error";
    case RBOSS_ERR_CHECKPOINT: return "checkpoint error";
    case RBOSS_ERR_NOT_FOUND: return "not found";
    case RBOSS_ERR_VERSION: return "version error";
    case RBOSS_ERR_DATASET_MISMATCH: return "dataset mismatch";
    case RBOSS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* rboss_last_error(void) { return last_error.c_str(); }

rboss_status rboss_dataset_load(const char* path, rboss_dataset** out) {
  RBOSS_REQUIRE(path != nullptr && out != nullptr);
  return guarded([&] {
    *out = new rboss_dataset{rboss::load_dataset(path)};
  });
}

rboss_status rboss_dataset_parse(const char* text, size_t length,
                                 rboss_dataset** out) {
  RBOSS_REQUIRE((text != nullptr || length == 0) && out != nullptr);
  return guarded([&] {
    *out = new rboss_dataset{
        rboss::parse_dataset(std::string_view(text ? text : "", length))};
  });
}

rboss_status rboss_dataset_synthetic(const char* spec, uint64_t seed,
                                     rboss_dataset** out) {
  RBOSS_REQUIRE(spec != nullptr && out != nullptr);
  return guarded([&] {
    *out = new rboss_dataset{
        rboss::generate_synthetic(rboss::parse_synthetic_spec(spec), seed)};
  });
}

void rboss_dataset_free(rboss_dataset* data) { delete data; }

size_t rboss_dataset_size(const rboss_dataset* data) {
  return data ? data->data.size() : 0;
}

size_t rboss_dataset_length(const rboss_dataset* data) {
  return data ? data->data.length() : 0;
}

int rboss_dataset_class_count(const rboss_dataset* data) {
  return data ? data->data.class_count() : 0;
}

rboss_status rboss_dataset_instance(const rboss_dataset* data, size_t index,
                                    const double** values, int* label) {
  RBOSS_REQUIRE(data != nullptr && index < data->data.size());
  if (values) *values = data->data.series(index).data();
  if (label) *label = data->data.label(index);
  return RBOSS_OK;
}

rboss_status rboss_dataset_resample(const rboss_dataset* data,
                                    double train_fraction, uint64_t seed,
                                    rboss_dataset** train,
                                    rboss_dataset** test) {
  RBOSS_REQUIRE(data != nullptr && train != nullptr && test != nullptr);
  return guarded([&] {
    auto split = rboss::stratified_resample(data->data, train_fraction, seed);
    auto tr = std::make_unique<rboss_dataset>(rboss_dataset{split.train});
    auto te = std::make_unique<rboss_dataset>(rboss_dataset{split.test});
    *train = tr.release();
    *test = te.release();
  });
}

void rboss_config_init(rboss_config* cfg) {
  if (!cfg) return;
  std::memset(cfg, 0, sizeof(*cfg));
  cfg->ensemble_size = 100;
  cfg->time_budget_seconds = -1.0;
  cfg->member_cap = rboss::kDefaultContractMemberCap;
  cfg->subsample_fraction = 1.0;
  cfg->subsample_max_total = 500;
  cfg->cawpe_exponent = rboss::kDefaultCawpeExponent;
  cfg->fast_per_class = 50;
  cfg->checkpoint_every = 1;
}

rboss_status rboss_config_preset(const char* variant, rboss_config* cfg) {
  RBOSS_REQUIRE(variant != nullptr && cfg != nullptr);
  return guarded([&] {
    auto arm = rboss::variant_preset(variant);
    if (arm.grid) {
      throw rboss::ConfigError(std::string("'") + variant +
                               "' is not a randomised variant");
    }
    from_cpp(arm.config, cfg);
  });
}

int rboss_variant_is_grid(const char* variant) {
  if (!variant) return 0;
  try {
    return rboss::variant_preset(variant).grid ? 1 : 0;
  } catch (...) {
    return 0;
  }
}

size_t rboss_variant_count(void) { return rboss::variant_names().size(); }

const char* rboss_variant_name(size_t index) {
  const auto& names = rboss::variant_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

rboss_status rboss_build_grid(const rboss_dataset* train, double retention,
                              rboss_ensemble** out) {
  RBOSS_REQUIRE(train != nullptr && out != nullptr);
  return guarded([&] {
    *out = new rboss_ensemble{rboss::build_grid_boss(
        train->data, retention > 0.0 ? retention : rboss::kGridRetention)};
  });
}

rboss_status rboss_build(const rboss_dataset* train, const rboss_config* cfg,
                         rboss_ensemble** out) {
  RBOSS_REQUIRE(train != nullptr && cfg != nullptr && out != nullptr);
  return guarded([&] {
    *out = new rboss_ensemble{rboss::build_rboss(train->data, to_cpp(*cfg))};
  });
}

rboss_status rboss_resume(const rboss_dataset* train,
                          const char* checkpoint_path, rboss_ensemble** out) {
  RBOSS_REQUIRE(train != nullptr && checkpoint_path != nullptr &&
                out != nullptr);
  return guarded([&] {
    auto cp = rboss::load_checkpoint(checkpoint_path);
    *out = new rboss_ensemble{rboss::resume_build(train->data, std::move(cp))};
  });
}

void rboss_ensemble_free(rboss_ensemble* model) { delete model; }

size_t rboss_ensemble_member_count(const rboss_ensemble* model) {
  return model ? model->model.members.size() : 0;
}

rboss_status rboss_ensemble_member(const rboss_ensemble* model, size_t index,
                                   rboss_member_info* out) {
  RBOSS_REQUIRE(model != nullptr && out != nullptr &&
                index < model->model.members.size());
  const auto& m = model->model.members[index];
  out->word_length = m.params().word_length;
  out->alphabet_size = m.params().alphabet_size;
  out->window_length = m.params().window_length;
  out->normalize = m.params().normalize ? 1 : 0;
  out->has_accuracy = m.train_accuracy ? 1 : 0;
  out->train_accuracy = m.train_accuracy.value_or(0.0);
  out->weight = m.weight;
  out->train_size = m.model.size();
  out->parameter_id = m.parameter_id;
  out->build_ordinal = m.build_ordinal;
  return RBOSS_OK;
}

double rboss_ensemble_build_seconds(const rboss_ensemble* model) {
  return model ? model->model.metadata.build_seconds : 0.0;
}

size_t rboss_ensemble_params_tried(const rboss_ensemble* model) {
  return model ? model->model.metadata.params_tried : 0;
}

rboss_status rboss_predict(const rboss_ensemble* model, const double* series,
                           size_t length, int* label, double* probabilities,
                           size_t probabilities_length) {
  RBOSS_REQUIRE(model != nullptr && series != nullptr && label != nullptr);
  RBOSS_REQUIRE(probabilities == nullptr ||
                probabilities_length >=
                    static_cast<size_t>(model->model.class_count));
  return guarded([&] {
    auto p = rboss::predict_ensemble(model->model, {series, length});
    *label = p.label;
    if (probabilities) {
      std::copy(p.probabilities.begin(), p.probabilities.end(), probabilities);
    }
  });
}

rboss_status rboss_experiment_run(const rboss_experiment* exp,
                                  rboss_experiment_report* report) {
  RBOSS_REQUIRE(exp != nullptr && exp->out_dir != nullptr);
  RBOSS_REQUIRE(exp->arms != nullptr || exp->arm_count == 0);
  return guarded([&] {
    rboss::ExperimentConfig cfg;
    if (exp->data_path) cfg.data_path = exp->data_path;
    if (exp->synthetic_spec) {
      cfg.synthetic = rboss::parse_synthetic_spec(exp->synthetic_spec);
    }
    cfg.synthetic_seed = exp->synthetic_seed;
    if (exp->dataset_name) cfg.dataset_name = exp->dataset_name;
    for (size_t i = 0; i < exp->arm_count; ++i) {
      const auto& a = exp->arms[i];
      if (a.variant == nullptr) throw rboss::ConfigError("arm without a name");
      rboss::ExperimentArm arm;
      arm.variant = a.variant;
      arm.grid = a.grid != 0;
      arm.grid_retention =
          a.grid_retention > 0.0 ? a.grid_retention : rboss::kGridRetention;
      if (!arm.grid) {
        arm.config = to_cpp(a.config);
        arm.config.checkpoint.reset();
      }
      cfg.arms.push_back(std::move(arm));
    }
    cfg.resamples = exp->resamples;
    cfg.base_seed = exp->base_seed;
    cfg.train_fraction = exp->train_fraction;
    cfg.out_dir = exp->out_dir;
    if (exp->checkpoint_path) {
      rboss::CheckpointSettings s;
      s.path = exp->checkpoint_path;
      s.every_members = exp->checkpoint_every;
      cfg.checkpoint = std::move(s);
    }
    auto result = rboss::run_experiment(cfg);
    if (report) {
      report->records = result.records.size();
      report->failures = result.errors.size();
    }
  });
}

}  // extern "C"
