// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "reference.hpp"
#include "rboss/boss.hpp"
#include "rboss/checkpoint.hpp"
#include "rboss/dataset.hpp"
#include "rboss/ensemble.hpp"
#include "rboss/experiment.hpp"
#include "rboss/rboss_builder.hpp"
#include "rboss/sfa.hpp"
#include "rboss/synthetic.hpp"

using namespace rboss;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

LabeledDataset synthetic(std::size_t per_class, std::size_t m,
                         std::size_t pattern, std::vector<std::size_t> counts,
                         double noise, std::uint64_t seed) {
  SyntheticSpec s;
  s.per_class = per_class;
  s.length = m;
  s.pattern_length = pattern;
  s.occurrences = std::move(counts);
  s.noise_sigma = noise;
  return generate_synthetic(s, seed);
}

std::vector<int> predict_all(const EnsembleModel& e, const LabeledDataset& d) {
  std::vector<int> out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    out.push_back(predict_ensemble(e, d.series(i)).label);
  }
  return out;
}

double accuracy(const EnsembleModel& e, const LabeledDataset& d) {
  auto p = predict_all(e, d);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < d.size(); ++i) ok += p[i] == d.label(i);
  return static_cast<double>(ok) / static_cast<double>(d.size());
}

ref::Bag as_ref(const WordHistogram& h, int l, int alpha) {
  ref::Bag out;
  for (const auto& [w, c] : h) out[w.symbols(l, alpha)] = c;
  return out;
}

std::vector<std::uint32_t> parameter_ids(const EnsembleModel& e) {
  std::vector<std::uint32_t> ids;
  for (const auto& m : e.members) ids.push_back(m.parameter_id);
  return ids;
}

Outcome sfa_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20240601);
  std::normal_distribution<double> nd(0.0, 2.0);
  std::size_t matched = 0;
  const std::size_t cases = 200;
  for (std::size_t t = 0; t < cases; ++t) {
    std::size_t n = 1 + rng() % 10;
    std::size_t m = 12 + rng() % 53;
    bool norm = rng() % 2;
    int alpha = 2 + static_cast<int>(rng() % 5);
    int max_l = std::min<int>(16, static_cast<int>(m) - (norm ? 2 : 0));
    int l = 4 + 2 * static_cast<int>(rng() % ((max_l - 4) / 2 + 1));
    while (std::pow(static_cast<double>(alpha), l) > 1.8e19) l -= 2;
    int min_w = l + (norm ? 2 : 0);
    int w = min_w + static_cast<int>(rng() % (m - min_w + 1));
    SfaParameters p{l, alpha, w, norm};

    std::vector<std::vector<double>> series(n, std::vector<double>(m));
    std::vector<double> flat;
    for (auto& s : series) {
      // occasional flat stretches exercise the zero-deviation path
      bool flat_run = rng() % 4 == 0;
      for (std::size_t i = 0; i < m; ++i) {
        s[i] = flat_run && i < m / 2 ? 1.5 : nd(rng);
      }
      flat.insert(flat.end(), s.begin(), s.end());
    }
    LabeledDataset d(flat, m, std::vector<int>(n, 0), 1);
    auto bp = fit_mcb(d, p);

    std::vector<std::vector<std::vector<double>>> rows;
    std::vector<std::vector<double>> all;
    for (const auto& s : series) {
      rows.push_back(ref::windows_coeffs(s, w, l, norm));
      all.insert(all.end(), rows.back().begin(), rows.back().end());
    }
    auto rbp = ref::mcb(all, l, alpha);
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      ok = as_ref(bag_of_words(series[i], p, bp), l, alpha) ==
           ref::bag(rows[i], rbp);
    }
    matched += ok;
  }
  double secs = seconds_since(start);
  return {matched == cases && secs < 10.0,
          std::to_string(matched) + "/" + std::to_string(cases) +
              " cases match, " + fmt(secs, 2) + " s (limit 10 s)"};
}

Outcome distance_oracle() {
  std::mt19937_64 rng(77);
  std::size_t matched = 0;
  const std::size_t cases = 1000;
  for (std::size_t t = 0; t < cases; ++t) {
    auto make = [&] {
      std::vector<WordHistogram::Entry> e;
      std::size_t k = rng() % 40;
      for (std::size_t i = 0; i < k; ++i) {
        e.push_back({Word(rng() % 64), 1 + static_cast<std::uint32_t>(rng() % 20)});
      }
      return WordHistogram::from_entries(std::move(e));
    };
    auto a = make(), b = make();
    auto ra = as_ref(a, 3, 4), rb = as_ref(b, 3, 4);
    matched += boss_distance(a, b) == static_cast<double>(ref::distance(ra, rb));
  }
  auto a = WordHistogram::from_entries({{Word(1), 2}, {Word(2), 1}});
  auto b = WordHistogram::from_entries({{Word(1), 1}, {Word(3), 5}});
  double ab = boss_distance(a, b), ba = boss_distance(b, a);
  return {matched == cases && ab == 2.0 && ba == 26.0,
          std::to_string(matched) + "/" + std::to_string(cases) +
              " pairs exact; worked example " + fmt(ab, 0) + " and " +
              fmt(ba, 0)};
}

Outcome grid_retention() {
  const auto start = Clock::now();
  auto data = synthetic(10, 30, 6, {1, 4}, 0.5, 3);
  auto model = build_grid_boss(data);

  // oracle: every combination through the reference pipeline
  auto combos = ref::parameter_space(30, false);
  std::vector<double> acc;
  for (const auto& c : combos) {
    std::vector<std::vector<std::vector<double>>> rows;
    std::vector<std::vector<double>> all;
    for (std::size_t i = 0; i < data.size(); ++i) {
      auto s = data.series(i);
      rows.push_back(ref::windows_coeffs({s.begin(), s.end()}, c.w, c.l, c.p));
      all.insert(all.end(), rows.back().begin(), rows.back().end());
    }
    auto bp = ref::mcb(all, c.l, 4);
    std::vector<ref::Bag> bags;
    for (const auto& r : rows) bags.push_back(ref::bag(r, bp));
    acc.push_back(ref::loocv(bags, data.labels()));
  }
  double best = *std::max_element(acc.begin(), acc.end());
  std::vector<std::uint32_t> want;
  for (std::size_t i = 0; i < acc.size(); ++i) {
    if (acc[i] >= 0.92 * best) want.push_back(static_cast<std::uint32_t>(i));
  }
  bool all_above = true;
  for (const auto& m : model.members) {
    all_above = all_above && *m.train_accuracy >= 0.92 * best;
  }
  bool same = parameter_ids(model) == want;
  double secs = seconds_since(start);
  return {all_above && same && secs < 120.0,
          std::to_string(model.members.size()) + " of " +
              std::to_string(combos.size()) + " retained, best " +
              fmt(best) + ", oracle set " + (same ? "equal" : "DIFFERS") +
              ", " + fmt(secs, 1) + " s (limit 120 s)"};
}

Outcome filtered_policy() {
  std::mt19937_64 rng(5150);
  std::size_t matched = 0;
  const std::size_t cases = 500;
  for (std::size_t t = 0; t < cases; ++t) {
    std::size_t n = 1 + rng() % 60;
    std::size_t s = 1 + rng() % 15;
    // coarse grid of values so ties are common
    std::size_t levels = 2 + rng() % 10;
    std::vector<double> acc(n);
    for (auto& a : acc) {
      a = static_cast<double>(rng() % (levels + 1)) / static_cast<double>(levels);
    }
    FilteredPool pool(s);
    for (std::size_t i = 0; i < n; ++i) pool.offer(acc[i], i);
    std::vector<std::size_t> got;
    for (const auto& slot : pool.slots()) got.push_back(slot.ordinal);
    std::sort(got.begin(), got.end());
    matched += got == ref::top_s(acc, s);
  }
  return {matched == cases, std::to_string(matched) + "/" +
                                std::to_string(cases) + " sequences equal"};
}

Outcome determinism_resume() {
  const auto start = Clock::now();
  auto data = synthetic(30, 128, 16, {1, 4}, 0.5, 11);
  auto split = stratified_resample(data, 0.5, 5);

  std::vector<RbossConfig> configs(2);
  configs[0].ensemble_size = 10;
  configs[0].seed = 5;
  configs[1] = configs[0];
  configs[1].max_ensemble_size = 4;
  configs[1].estimate = FullLoocv{};
  configs[1].use_cawpe = true;
  configs[1].subsample_policy = FractionPolicy{0.7};

  auto path = std::filesystem::temp_directory_path() / "rboss_accept_cp.bin";
  bool ok = true;
  std::string detail;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    auto a = build_rboss(split.train, configs[c]);
    auto b = build_rboss(split.train, configs[c]);
    bool same_params = parameter_ids(a) == parameter_ids(b);
    auto pa = predict_all(a, split.test);
    bool same_preds = pa == predict_all(b, split.test);

    RbossBuilder partial(split.train, configs[c]);
    for (int i = 0; i < 3; ++i) partial.step();
    save_checkpoint(partial.snapshot(), path);
    auto resumed = resume_build(split.train, load_checkpoint(path));
    bool resume_same = predict_all(resumed, split.test) == pa &&
                       resumed.members == a.members;
    ok = ok && same_params && same_preds && resume_same;
    detail += (c ? "; " : "") + std::string(c ? "filtered+cawpe" : "plain") +
              ": params " + (same_params ? "equal" : "DIFFER") + ", preds " +
              (same_preds ? "equal" : "DIFFER") + ", resume " +
              (resume_same ? "equal" : "DIFFERS");
  }
  std::filesystem::remove(path);
  double secs = seconds_since(start);
  return {ok && secs < 60.0, detail + ", " + fmt(secs, 1) + " s (limit 60 s)"};
}

struct ContractRun {
  double wall;
  double max_member;
  std::size_t built;
  double accuracy;
};

ContractRun contract_build(const ResampleSplit& split, double budget,
                           std::uint64_t seed) {
  RbossConfig cfg;
  cfg.time_budget_seconds = budget;
  cfg.seed = seed;
  const auto start = Clock::now();
  RbossBuilder b(split.train, cfg);
  double max_member = 0.0;
  while (!b.done()) {
    const auto t = Clock::now();
    b.step();
    max_member = std::max(max_member, seconds_since(t));
  }
  auto model = b.finish();
  double wall = seconds_since(start);
  return {wall, max_member, b.members_built(), accuracy(model, split.test)};
}

Outcome contract_honor() {
  auto data = synthetic(100, 256, 16, {1, 4}, 0.5, 21);
  const std::vector<double> budgets{1, 2, 5, 10};
  const std::size_t seeds = 10;
  bool ok = true;
  std::string detail;

  auto split0 = stratified_resample(data, 0.5, 0);
  auto five = contract_build(split0, 5.0, 0);
  bool within = five.wall <= 5.0 + five.max_member;
  ok = within && five.built >= 1 && five.built <= kDefaultContractMemberCap;
  detail += "5 s budget: " + fmt(five.wall, 2) + " s wall (limit " +
            fmt(5.0 + five.max_member, 2) + "), " +
            std::to_string(five.built) + " members";

  std::vector<double> mean_acc(budgets.size(), 0.0);
  std::vector<double> mean_built(budgets.size(), 0.0);
  bool monotone = true;
  for (std::size_t s = 0; s < seeds; ++s) {
    auto split = stratified_resample(data, 0.5, s);
    std::size_t prev = 0;
    for (std::size_t b = 0; b < budgets.size(); ++b) {
      auto run = contract_build(split, budgets[b], s);
      monotone = monotone && run.built >= prev &&
                 run.built <= kDefaultContractMemberCap;
      prev = run.built;
      mean_acc[b] += run.accuracy / seeds;
      mean_built[b] += static_cast<double>(run.built) / seeds;
    }
  }
  bool acc_trend = true;
  for (std::size_t b = 1; b < budgets.size(); ++b) {
    acc_trend = acc_trend && mean_acc[b] >= mean_acc[b - 1] - 0.03;
  }
  ok = ok && monotone && acc_trend;
  detail += "; members by budget";
  for (double v : mean_built) detail += " " + fmt(v, 1);
  detail += monotone ? " (monotone)" : " (NOT monotone)";
  detail += "; mean accuracy";
  for (double v : mean_acc) detail += " " + fmt(v);
  return {ok, detail};
}

Outcome speed() {
  auto data = synthetic(30, 300, 16, {1, 4}, 0.5, 31);
  auto split = stratified_resample(data, 0.5, 1);
  RbossConfig cfg;
  cfg.ensemble_size = 20;
  cfg.seed = 1;
  std::vector<double> grid_t, rboss_t;
  for (int r = 0; r < 3; ++r) {
    auto t = Clock::now();
    auto g = build_grid_boss(split.train);
    grid_t.push_back(seconds_since(t));
    t = Clock::now();
    auto e = build_rboss(split.train, cfg);
    rboss_t.push_back(seconds_since(t));
  }
  std::sort(grid_t.begin(), grid_t.end());
  std::sort(rboss_t.begin(), rboss_t.end());
  double ratio = grid_t[1] / rboss_t[1];
  return {ratio >= 5.0, "grid " + fmt(grid_t[1], 2) + " s, rboss k=20 " +
                            fmt(rboss_t[1], 3) + " s, ratio " + fmt(ratio, 1) +
                            " (need >= 5)"};
}

Outcome classification() {
  const auto start = Clock::now();
  ExperimentConfig cfg;
  SyntheticSpec spec;
  spec.per_class = 60;
  spec.length = 128;
  spec.pattern_length = 16;
  spec.occurrences = {1, 4};
  spec.noise_sigma = 0.5;
  cfg.synthetic = spec;
  cfg.synthetic_seed = 8;
  cfg.resamples = 5;
  cfg.train_fraction = 0.5;
  cfg.out_dir = std::filesystem::temp_directory_path() / "rboss_accept_cls";
  cfg.arms = {variant_preset("rboss-filtered-cawpe"),
              variant_preset("grid-boss")};
  auto res = run_experiment(cfg);
  double mean[2] = {0, 0};
  std::size_t count[2] = {0, 0};
  for (const auto& r : res.records) {
    int a = r.variant == "grid-boss";
    mean[a] += r.accuracy;
    ++count[a];
  }
  for (int a = 0; a < 2; ++a) mean[a] /= std::max<std::size_t>(1, count[a]);
  double secs = seconds_since(start);
  bool ok = res.errors.empty() && count[0] == 5 && count[1] == 5 &&
            mean[0] >= 0.90 && mean[1] >= 0.90 && secs < 300.0;
  return {ok, "rboss-filtered-cawpe " + fmt(mean[0]) + ", grid-boss " +
                  fmt(mean[1]) + " (need >= 0.900 both), " + fmt(secs, 1) +
                  " s (limit 300 s)"};
}

Outcome cawpe_example() {
  auto data = synthetic(3, 32, 8, {1, 3}, 0.5, 1);
  auto base = build_base_boss(data, SfaParameters{8, 4, 12, true});
  EnsembleModel ens;
  ens.class_count = 2;
  ens.series_length = data.length();
  ens.combiner = Combiner::WeightedProbability;
  for (auto [label, acc] : {std::pair{0, 0.8}, {0, 0.8}, {1, 0.9}}) {
    EnsembleMember m;
    m.model = base;
    std::fill(m.model.train_labels.begin(), m.model.train_labels.end(), label);
    m.train_accuracy = acc;
    m.weight = cawpe_weight(acc, kDefaultCawpeExponent);
    ens.members.push_back(std::move(m));
  }
  auto p = predict_ensemble(ens, data.series(0));
  double want = 0.8192 / 1.4753;
  double err = std::abs(p.probabilities[0] - want);
  return {p.label == 0 && err <= 1e-9,
          "class " + std::to_string(p.label) + ", p = " +
              fmt(p.probabilities[0], 12) + ", |error| " +
              fmt(err * 1e12, 3) + "e-12"};
}

Outcome fast_estimate() {
  auto data = synthetic(200, 128, 16, {1, 4}, 0.5, 41);
  auto space = enumerate_parameter_space(data.length(), 1.0);
  std::mt19937_64 rng(99);
  std::size_t within = 0;
  std::string diffs;
  for (int t = 0; t < 10; ++t) {
    const auto& p = space.combinations[rng() % space.size()];
    auto model = build_base_boss(data, p);
    double full = loocv_estimate(model).accuracy;
    double fast = fast_loocv_estimate(model, 50, t).accuracy;
    double d = std::abs(full - fast);
    within += d <= 0.15;
    diffs += (t ? " " : "") + fmt(d, 2);
  }
  return {within >= 9, std::to_string(within) +
                           "/10 within 0.15 (need 9); |diff| " + diffs};
}

Outcome subsample_checks() {
  auto make = [](std::size_t per_class) {
    std::vector<double> v(per_class * 2 * 4);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
    std::vector<int> labels(per_class, 0);
    labels.insert(labels.end(), per_class, 1);
    return LabeledDataset(v, 4, labels, 2);
  };
  auto d100 = make(50);
  auto d500 = make(250);
  bool frac_id = subsample(d100, FractionPolicy{1.0}, 3).data == d100;
  bool cap_id = subsample(d500, MaxTotalPolicy{500}, 3).data == d500 &&
                subsample(d100, MaxTotalPolicy{500}, 3).data == d100;
  auto sizes = subsample(d100, FractionPolicy{0.7}, 3).data.class_sizes();
  bool counts = sizes == std::vector<std::size_t>{35, 35};
  return {frac_id && cap_id && counts,
          std::string("Fraction(1.0) ") + (frac_id ? "identity" : "NOT identity") +
              ", MaxTotal(500) " + (cap_id ? "identity" : "NOT identity") +
              ", Fraction(0.7) counts " + std::to_string(sizes[0]) + "/" +
              std::to_string(sizes[1])};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"SFA oracle equivalence", sfa_oracle},
      {"BOSS distance", distance_oracle},
      {"grid retention rule", grid_retention},
      {"filtered ensemble policy", filtered_policy},
      {"determinism and checkpoint resume", determinism_resume},
      {"contract honor", contract_honor},
      {"scaled speed", speed},
      {"classification sanity", classification},
      {"CAWPE combination", cawpe_example},
      {"fast estimate fidelity", fast_estimate},
      {"subsample invariance", subsample_checks},
  };
  std::set<std::size_t> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoul(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    if (!only.empty() && !only.count(i + 1)) continue;
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                checks[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
