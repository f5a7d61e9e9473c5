#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "rboss/dataset.hpp"

namespace rboss {

// Noise series with a fixed waveform (one sine period of `amplitude`)
// embedded a class-specific number of times at random non-overlapping
// offsets. Classes differ only in how often the pattern occurs.
struct SyntheticSpec {
  std::size_t per_class = 30;
  std::size_t length = 128;
  std::size_t pattern_length = 16;
  std::vector<std::size_t> occurrences = {1, 4};  // one entry per class
  double noise_sigma = 0.5;
  double amplitude = 1.0;

  std::size_t classes() const noexcept { return occurrences.size(); }
  // Throws SpecError.
  void validate() const;
};

// "key=value" pairs separated by commas, e.g.
// "n=30,m=128,pattern=16,counts=1:4,noise=0.5". Keys: n (per class),
// m, pattern, counts (colon separated, 2 or 3 classes), noise, amplitude,
// classes (must agree with counts).
SyntheticSpec parse_synthetic_spec(std::string_view text);

// Instances are grouped by class, class 0 first.
LabeledDataset generate_synthetic(const SyntheticSpec& spec,
                                  std::uint64_t seed);

}  // namespace rboss
