#include "rboss/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include "rboss/error.hpp"
#include "text_util.hpp"

namespace rboss {

LabeledDataset::LabeledDataset(std::vector<double> values, std::size_t length,
                               std::vector<int> labels, int class_count,
                               std::vector<std::string> class_names)
    : values_(std::move(values)),
      length_(length),
      labels_(std::move(labels)),
      class_count_(class_count),
      class_names_(std::move(class_names)) {
  if (labels_.empty()) throw FormatError("dataset has no instances");
  if (length_ == 0) throw FormatError("series length must be at least 1");
  if (values_.size() != labels_.size() * length_) {
    throw FormatError("value count does not match instances x length");
  }
  if (class_count_ < 1) throw FormatError("class count must be positive");
  for (int y : labels_) {
    if (y < 0 || y >= class_count_) {
      throw FormatError("label " + std::to_string(y) + " outside [0, " +
                        std::to_string(class_count_) + ")");
    }
  }
  if (class_names_.empty()) {
    for (int c = 0; c < class_count_; ++c) {
      class_names_.push_back(std::to_string(c));
    }
  } else if (class_names_.size() != static_cast<std::size_t>(class_count_)) {
    throw FormatError("class name count does not match class count");
  }
}

std::vector<std::size_t> LabeledDataset::class_sizes() const {
  std::vector<std::size_t> sizes(class_count_, 0);
  for (int y : labels_) ++sizes[y];
  return sizes;
}

LabeledDataset LabeledDataset::subset(
    std::span<const std::size_t> indices) const {
  std::vector<double> values;
  values.reserve(indices.size() * length_);
  std::vector<int> labels;
  labels.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= size()) throw ParameterError("subset index out of range");
    auto s = series(i);
    values.insert(values.end(), s.begin(), s.end());
    labels.push_back(labels_[i]);
  }
  return LabeledDataset(std::move(values), length_, std::move(labels),
                        class_count_, class_names_);
}

LabeledDataset parse_dataset(std::istream& in) {
  std::vector<double> values;
  std::vector<int> labels;
  std::vector<std::string> names;
  std::unordered_map<std::string, int> ids;
  std::size_t length = 0;

  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;

    std::size_t field = 0;
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
      auto comma = text.find(',', start);
      auto token = detail::trim(text.substr(
          start, comma == std::string_view::npos ? comma : comma - start));
      if (field == 0) {
        if (token.empty()) throw FormatError(row, "empty class label");
        std::string key(token);
        auto [it, inserted] = ids.emplace(key, static_cast<int>(names.size()));
        if (inserted) names.push_back(key);
        labels.push_back(it->second);
      } else {
        double v = 0.0;
        if (!detail::parse_double(token, v)) {
          throw FormatError(row, "non-numeric token '" + std::string(token) +
                                     "'");
        }
        if (!std::isfinite(v)) throw FormatError(row, "non-finite value");
        values.push_back(v);
        ++count;
      }
      ++field;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (count == 0) throw FormatError(row, "row has no values");
    if (length == 0) {
      length = count;
    } else if (count != length) {
      throw FormatError(row, "expected " + std::to_string(length) +
                                 " values, found " + std::to_string(count));
    }
  }
  if (labels.empty()) throw FormatError("empty input");
  int classes = static_cast<int>(names.size());
  return LabeledDataset(std::move(values), length, std::move(labels), classes,
                        std::move(names));
}

LabeledDataset parse_dataset(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_dataset(in);
}

LabeledDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return parse_dataset(in);
}

std::string serialize_dataset(const LabeledDataset& data) {
  std::string out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    out += data.class_names()[data.label(i)];
    for (double v : data.series(i)) {
      out += ',';
      out += detail::format_double(v);
    }
    out += '\n';
  }
  return out;
}

void z_normalize_into(std::span<const double> series, std::span<double> out) {
  const auto n = static_cast<double>(series.size());
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : series) var += (v - mean) * (v - mean);
  double sd = std::sqrt(var / n);
  if (sd < kStdEpsilon) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    out[i] = (series[i] - mean) / sd;
  }
}

std::vector<double> z_normalize(std::span<const double> series) {
  std::vector<double> out(series.size());
  if (!series.empty()) z_normalize_into(series, out);
  return out;
}

std::vector<std::size_t> allocate_stratified(
    std::span<const std::size_t> class_sizes, double fraction,
    std::size_t total, std::size_t min_per_class, std::size_t keep_back) {
  const std::size_t k = class_sizes.size();
  std::vector<std::size_t> counts(k, 0);
  auto lower = [&](std::size_t c) {
    return std::min(min_per_class, class_sizes[c]);
  };
  auto upper = [&](std::size_t c) {
    return class_sizes[c] > keep_back ? class_sizes[c] - keep_back : 0;
  };
  for (std::size_t c = 0; c < k; ++c) {
    if (class_sizes[c] == 0) continue;
    auto want = static_cast<std::size_t>(
        std::floor(fraction * static_cast<double>(class_sizes[c]) + 0.5));
    counts[c] = std::clamp(want, lower(c), std::max(lower(c), upper(c)));
  }

  // Largest classes first, lowest id on ties.
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return class_sizes[a] > class_sizes[b];
  });

  std::size_t sum = std::accumulate(counts.begin(), counts.end(),
                                    std::size_t{0});
  while (sum != total) {
    bool moved = false;
    for (std::size_t c : order) {
      if (sum > total && counts[c] > lower(c)) {
        --counts[c];
        --sum;
        moved = true;
        break;
      }
      if (sum < total && counts[c] < upper(c)) {
        ++counts[c];
        ++sum;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  return counts;
}

namespace {

std::vector<std::vector<std::size_t>> indices_by_class(
    const LabeledDataset& data) {
  std::vector<std::vector<std::size_t>> by_class(data.class_count());
  for (std::size_t i = 0; i < data.size(); ++i) {
    by_class[data.label(i)].push_back(i);
  }
  return by_class;
}

std::size_t round_half_up(double x) {
  return static_cast<std::size_t>(std::floor(x + 0.5));
}

// Seeded per-class draw without replacement. Returns ascending indices.
std::vector<std::size_t> draw_stratified(
    const LabeledDataset& data, const std::vector<std::size_t>& counts,
    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto by_class = indices_by_class(data);
  std::vector<std::size_t> chosen;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& pool = by_class[c];
    std::shuffle(pool.begin(), pool.end(), rng);
    chosen.insert(chosen.end(), pool.begin(), pool.begin() + counts[c]);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace

ResampleSplit stratified_resample(const LabeledDataset& data,
                                  double train_fraction, std::uint64_t seed,
                                  std::size_t resample_index) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw StratificationError("train fraction must lie in (0, 1)");
  }
  auto sizes = data.class_sizes();
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    if (sizes[c] > 0 && sizes[c] < 2) {
      throw StratificationError("class '" + data.class_names()[c] +
                                "' has fewer than 2 instances");
    }
  }
  auto total = round_half_up(train_fraction * static_cast<double>(data.size()));
  auto counts = allocate_stratified(sizes, train_fraction, total, 1, 1);
  auto train_idx = draw_stratified(data, counts, seed);

  std::vector<std::size_t> test_idx;
  std::size_t t = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (t < train_idx.size() && train_idx[t] == i) {
      ++t;
    } else {
      test_idx.push_back(i);
    }
  }
  return ResampleSplit{data.subset(train_idx), data.subset(test_idx),
                       std::move(train_idx), std::move(test_idx), seed,
                       resample_index};
}

Subsample subsample(const LabeledDataset& data, const SubsamplePolicy& policy,
                    std::uint64_t seed) {
  const std::size_t n = data.size();
  auto sizes = data.class_sizes();
  auto present = static_cast<std::size_t>(
      std::count_if(sizes.begin(), sizes.end(), [](auto s) { return s > 0; }));

  auto identity = [&] {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    return Subsample{data, std::move(all)};
  };

  std::vector<std::size_t> counts;
  if (const auto* f = std::get_if<FractionPolicy>(&policy)) {
    if (!(f->fraction > 0.0 && f->fraction <= 1.0)) {
      throw PolicyError("subsample fraction must lie in (0, 1]");
    }
    if (f->fraction == 1.0) return identity();
    auto total = std::max(round_half_up(f->fraction * static_cast<double>(n)),
                          present);
    counts = allocate_stratified(sizes, f->fraction, total, 1, 0);
  } else {
    const auto& cap = std::get<MaxTotalPolicy>(policy);
    if (cap.cap < static_cast<std::size_t>(data.class_count())) {
      throw PolicyError("max-total cap " + std::to_string(cap.cap) +
                        " is below the class count");
    }
    if (n <= cap.cap) return identity();
    double fraction = static_cast<double>(cap.cap) / static_cast<double>(n);
    counts = allocate_stratified(sizes, fraction, cap.cap, 1, 0);
  }
  auto chosen = draw_stratified(data, counts, seed);
  return Subsample{data.subset(chosen), std::move(chosen)};
}

std::uint64_t content_hash(const LabeledDataset& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* p, std::size_t len) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  std::uint64_t shape[3] = {data.size(), data.length(),
                            static_cast<std::uint64_t>(data.class_count())};
  mix(shape, sizeof(shape));
  for (int y : data.labels()) {
    std::int32_t v = y;
    mix(&v, sizeof(v));
  }
  mix(data.values().data(), data.values().size() * sizeof(double));
  return h;
}

}  // namespace rboss
