#include "rboss/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "rboss/error.hpp"
#include "text_util.hpp"

namespace rboss {

void SyntheticSpec::validate() const {
  if (classes() < 2 || classes() > 3) {
    throw SpecError("synthetic data needs 2 or 3 classes");
  }
  if (per_class < 1) throw SpecError("need at least one instance per class");
  if (length < 1) throw SpecError("series length must be at least 1");
  if (pattern_length < 1) throw SpecError("pattern length must be >= 1");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw SpecError("noise sigma must be finite and non-negative");
  }
  if (!std::isfinite(amplitude)) throw SpecError("amplitude must be finite");
  for (std::size_t c = 0; c < classes(); ++c) {
    if (occurrences[c] * pattern_length > length) {
      throw SpecError("class " + std::to_string(c) + ": " +
                      std::to_string(occurrences[c]) + " patterns of length " +
                      std::to_string(pattern_length) + " do not fit in " +
                      std::to_string(length) + " points");
    }
  }
}

namespace {

std::size_t parse_count(std::string_view key, std::string_view value) {
  double v = 0.0;
  if (!detail::parse_double(value, v) || v < 0 || v != std::floor(v)) {
    throw SpecError("synthetic spec: '" + std::string(key) +
                    "' needs a non-negative integer, got '" +
                    std::string(value) + "'");
  }
  return static_cast<std::size_t>(v);
}

double parse_real(std::string_view key, std::string_view value) {
  double v = 0.0;
  if (!detail::parse_double(value, v)) {
    throw SpecError("synthetic spec: '" + std::string(key) +
                    "' needs a number, got '" + std::string(value) + "'");
  }
  return v;
}

}  // namespace

SyntheticSpec parse_synthetic_spec(std::string_view text) {
  SyntheticSpec spec;
  std::size_t declared_classes = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    auto item = detail::trim(text.substr(
        start, comma == std::string_view::npos ? comma : comma - start));
    start = comma == std::string_view::npos ? text.size() + 1 : comma + 1;
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw SpecError("synthetic spec: expected key=value, got '" +
                      std::string(item) + "'");
    }
    auto key = detail::trim(item.substr(0, eq));
    auto value = detail::trim(item.substr(eq + 1));
    if (key == "n") {
      spec.per_class = parse_count(key, value);
    } else if (key == "m") {
      spec.length = parse_count(key, value);
    } else if (key == "pattern") {
      spec.pattern_length = parse_count(key, value);
    } else if (key == "noise") {
      spec.noise_sigma = parse_real(key, value);
    } else if (key == "amplitude") {
      spec.amplitude = parse_real(key, value);
    } else if (key == "classes") {
      declared_classes = parse_count(key, value);
    } else if (key == "counts") {
      spec.occurrences.clear();
      std::size_t s = 0;
      while (s <= value.size()) {
        auto colon = value.find(':', s);
        spec.occurrences.push_back(parse_count(
            key, value.substr(s, colon == std::string_view::npos
                                     ? colon
                                     : colon - s)));
        s = colon == std::string_view::npos ? value.size() + 1 : colon + 1;
      }
    } else {
      throw SpecError("synthetic spec: unknown key '" + std::string(key) + "'");
    }
  }
  if (declared_classes != 0 && declared_classes != spec.classes()) {
    throw SpecError("synthetic spec: classes=" +
                    std::to_string(declared_classes) + " but counts lists " +
                    std::to_string(spec.classes()));
  }
  spec.validate();
  return spec;
}

LabeledDataset generate_synthetic(const SyntheticSpec& spec,
                                  std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  std::vector<double> pattern(spec.pattern_length);
  for (std::size_t t = 0; t < pattern.size(); ++t) {
    pattern[t] = spec.amplitude *
                 std::sin(2.0 * std::numbers::pi * static_cast<double>(t) /
                          static_cast<double>(spec.pattern_length));
  }

  const std::size_t m = spec.length;
  std::vector<double> values;
  values.reserve(spec.classes() * spec.per_class * m);
  std::vector<int> labels;
  for (std::size_t c = 0; c < spec.classes(); ++c) {
    const std::size_t count = spec.occurrences[c];
    const std::size_t slack = m - count * spec.pattern_length;
    for (std::size_t i = 0; i < spec.per_class; ++i) {
      std::vector<double> series(m);
      for (double& v : series) v = spec.noise_sigma * noise(rng);

      // Sorted gap draws spread `count` patterns over the free space.
      std::uniform_int_distribution<std::size_t> gap(0, slack);
      std::vector<std::size_t> gaps(count);
      for (auto& g : gaps) g = gap(rng);
      std::sort(gaps.begin(), gaps.end());
      for (std::size_t k = 0; k < count; ++k) {
        std::size_t offset = gaps[k] + k * spec.pattern_length;
        for (std::size_t t = 0; t < spec.pattern_length; ++t) {
          series[offset + t] += pattern[t];
        }
      }
      values.insert(values.end(), series.begin(), series.end());
      labels.push_back(static_cast<int>(c));
    }
  }
  return LabeledDataset(std::move(values), m, std::move(labels),
                        static_cast<int>(spec.classes()));
}

}  // namespace rboss
