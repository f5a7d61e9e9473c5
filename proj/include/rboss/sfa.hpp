#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rboss/dataset.hpp"

namespace rboss {

// One base classifier configuration: word length, alphabet size, window
// length and whether each window is z-normalized (which also drops the DC
// coefficient).
struct SfaParameters {
  int word_length = 8;
  int alphabet_size = 4;
  int window_length = 10;
  bool normalize = true;

  // Throws ParameterError unless the configuration is usable on series of
  // length `series_length`.
  void validate(std::size_t series_length) const;

  auto operator<=>(const SfaParameters&) const = default;
};

// Interior thresholds of Multiple Coefficient Binning: one ascending row of
// alphabet_size - 1 values per Fourier coefficient position.
class Breakpoints {
 public:
  Breakpoints() = default;
  Breakpoints(int rows, int alphabet_size, std::vector<double> thresholds);

  int rows() const noexcept { return rows_; }
  int alphabet_size() const noexcept { return alphabet_; }
  std::span<const double> row(int c) const {
    const auto cols = static_cast<std::size_t>(alphabet_ - 1);
    return {thresholds_.data() + static_cast<std::size_t>(c) * cols, cols};
  }
  const std::vector<double>& thresholds() const noexcept { return thresholds_; }

  bool operator==(const Breakpoints&) const = default;

 private:
  int rows_ = 0;
  int alphabet_ = 2;
  std::vector<double> thresholds_;
};

// l symbols packed base alpha; symbol i is digit i (alpha^i place value).
// For alpha = 4 that is two bits per symbol.
class Word {
 public:
  constexpr Word() = default;
  constexpr explicit Word(std::uint64_t packed) : packed_(packed) {}

  static Word encode(std::span<const int> symbols, int alphabet_size);
  std::vector<int> symbols(int word_length, int alphabet_size) const;

  constexpr std::uint64_t packed() const noexcept { return packed_; }
  auto operator<=>(const Word&) const = default;

 private:
  std::uint64_t packed_ = 0;
};

// Sparse word -> count map, stored sorted by word. Zero counts never appear.
class WordHistogram {
 public:
  using Entry = std::pair<Word, std::uint32_t>;

  WordHistogram() = default;
  // Counts occurrences in an arbitrary word sequence.
  static WordHistogram from_words(std::vector<Word> words);
  // From explicit (word, count) pairs; duplicate words are summed.
  static WordHistogram from_entries(std::vector<Entry> entries);

  std::uint32_t count(Word w) const;
  std::uint64_t total() const;
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }

  bool operator==(const WordHistogram&) const = default;

 private:
  std::vector<Entry> entries_;
};

// Interleaved (Re, Im) of the first word_length / 2 Fourier coefficients of
// `window`, starting at the second coefficient when `drop_first` is set.
// Unnormalized forward DFT: X_k = sum_j x_j exp(-2 pi i j k / w).
std::vector<double> dft_truncated(std::span<const double> window,
                                  int word_length, bool drop_first);

std::vector<std::span<const double>> sliding_windows(
    std::span<const double> series, int window_length);

// Truncated DFT of every sliding window of `series`, normalized per
// params.normalize. Row-major (m - w + 1) x word_length.
std::vector<double> window_coefficients(std::span<const double> series,
                                        const SfaParameters& params);

// Equi-depth thresholds over the rows of a row-major coefficient matrix.
// Threshold k sits at the midpoint of the sorted values at ranks
// floor(k N / alpha) - 1 and floor(k N / alpha).
Breakpoints mcb_breakpoints(std::span<const double> coefficient_rows,
                            int word_length, int alphabet_size);

Breakpoints fit_mcb(const LabeledDataset& train, const SfaParameters& params);

// Bin index is the number of thresholds strictly below the value, so a value
// equal to a threshold lands in the lower bin.
Word sfa_word(std::span<const double> coefficients, const Breakpoints& bp);

// Words of consecutive rows with numerosity reduction applied.
WordHistogram histogram_from_coefficients(std::span<const double> rows,
                                          const Breakpoints& bp);

WordHistogram bag_of_words(std::span<const double> series,
                           const SfaParameters& params, const Breakpoints& bp);

}  // namespace rboss
