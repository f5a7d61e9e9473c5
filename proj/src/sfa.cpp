#include "rboss/sfa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "rboss/error.hpp"

namespace rboss {

namespace {

// Largest word length whose base-alpha packing still fits in 64 bits.
int max_packable_length(int alphabet_size) {
  long double limit = std::ldexp(1.0L, 64);
  long double value = 1.0L;
  int l = 0;
  while (value * alphabet_size <= limit) {
    value *= alphabet_size;
    ++l;
  }
  return l;
}

void check_dft_shape(std::size_t window_length, int word_length,
                     bool drop_first) {
  const auto w = static_cast<long>(window_length);
  if (word_length < 2 || word_length % 2 != 0) {
    throw ParameterError("word length must be even and at least 2, got " +
                         std::to_string(word_length));
  }
  if (word_length > w) {
    throw ParameterError("word length " + std::to_string(word_length) +
                         " exceeds window length " + std::to_string(w));
  }
  if (drop_first && word_length > w - 2) {
    throw ParameterError("word length " + std::to_string(word_length) +
                         " needs a window of at least " +
                         std::to_string(word_length + 2) +
                         " when the first coefficient is dropped");
  }
}

// Truncated DFT with twiddle tables for one (w, l, drop_first) shape.
class TruncatedDft {
 public:
  TruncatedDft(std::size_t window_length, int word_length, bool drop_first)
      : w_(window_length),
        first_(drop_first ? 1 : 0),
        count_(static_cast<std::size_t>(word_length / 2)),
        cos_(window_length),
        sin_(window_length) {
    for (std::size_t t = 0; t < w_; ++t) {
      double angle = 2.0 * std::numbers::pi * static_cast<double>(t) /
                     static_cast<double>(w_);
      cos_[t] = std::cos(angle);
      sin_[t] = std::sin(angle);
    }
  }

  void transform(std::span<const double> window, double* out) const {
    for (std::size_t c = 0; c < count_; ++c) {
      const std::size_t k = first_ + c;
      double re = 0.0;
      double im = 0.0;
      std::size_t idx = 0;
      for (std::size_t j = 0; j < w_; ++j) {
        re += window[j] * cos_[idx];
        im -= window[j] * sin_[idx];
        idx += k;
        if (idx >= w_) idx -= w_;
      }
      out[2 * c] = re;
      out[2 * c + 1] = im;
    }
  }

 private:
  std::size_t w_;
  std::size_t first_;
  std::size_t count_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

}  // namespace

void SfaParameters::validate(std::size_t series_length) const {
  if (word_length < 4 || word_length > 16 || word_length % 2 != 0) {
    throw ParameterError("word length must be even in [4, 16], got " +
                         std::to_string(word_length));
  }
  if (alphabet_size < 2 || alphabet_size > 26) {
    throw ParameterError("alphabet size must lie in [2, 26], got " +
                         std::to_string(alphabet_size));
  }
  if (word_length > max_packable_length(alphabet_size)) {
    throw ParameterError("word of " + std::to_string(word_length) +
                         " symbols over alphabet " +
                         std::to_string(alphabet_size) +
                         " does not fit in 64 bits");
  }
  if (window_length < 1 ||
      static_cast<std::size_t>(window_length) > series_length) {
    throw ParameterError("window length " + std::to_string(window_length) +
                         " outside [1, " + std::to_string(series_length) + "]");
  }
  check_dft_shape(static_cast<std::size_t>(window_length), word_length,
                  normalize);
}

Breakpoints::Breakpoints(int rows, int alphabet_size,
                         std::vector<double> thresholds)
    : rows_(rows), alphabet_(alphabet_size), thresholds_(std::move(thresholds)) {
  if (rows_ < 0 || alphabet_ < 2) {
    throw ParameterError("breakpoints need rows >= 0 and alphabet >= 2");
  }
  const auto cols = static_cast<std::size_t>(alphabet_ - 1);
  if (thresholds_.size() != static_cast<std::size_t>(rows_) * cols) {
    throw ParameterError("breakpoint matrix has the wrong size");
  }
  for (int c = 0; c < rows_; ++c) {
    auto r = row(c);
    if (!std::is_sorted(r.begin(), r.end())) {
      throw ParameterError("breakpoint row " + std::to_string(c) +
                           " is not ascending");
    }
  }
}

Word Word::encode(std::span<const int> symbols, int alphabet_size) {
  std::uint64_t packed = 0;
  std::uint64_t place = 1;
  for (int s : symbols) {
    if (s < 0 || s >= alphabet_size) {
      throw ParameterError("symbol " + std::to_string(s) + " outside [0, " +
                           std::to_string(alphabet_size) + ")");
    }
    packed += static_cast<std::uint64_t>(s) * place;
    place *= static_cast<std::uint64_t>(alphabet_size);
  }
  return Word(packed);
}

std::vector<int> Word::symbols(int word_length, int alphabet_size) const {
  std::vector<int> out(static_cast<std::size_t>(word_length));
  std::uint64_t rest = packed_;
  const auto a = static_cast<std::uint64_t>(alphabet_size);
  for (auto& s : out) {
    s = static_cast<int>(rest % a);
    rest /= a;
  }
  return out;
}

WordHistogram WordHistogram::from_words(std::vector<Word> words) {
  std::sort(words.begin(), words.end());
  WordHistogram h;
  for (Word w : words) {
    if (!h.entries_.empty() && h.entries_.back().first == w) {
      ++h.entries_.back().second;
    } else {
      h.entries_.emplace_back(w, 1);
    }
  }
  return h;
}

WordHistogram WordHistogram::from_entries(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  WordHistogram h;
  for (const auto& [w, c] : entries) {
    if (c == 0) continue;
    if (!h.entries_.empty() && h.entries_.back().first == w) {
      h.entries_.back().second += c;
    } else {
      h.entries_.emplace_back(w, c);
    }
  }
  return h;
}

std::uint32_t WordHistogram::count(Word w) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), w,
      [](const Entry& e, Word key) { return e.first < key; });
  return it != entries_.end() && it->first == w ? it->second : 0;
}

std::uint64_t WordHistogram::total() const {
  std::uint64_t sum = 0;
  for (const auto& e : entries_) sum += e.second;
  return sum;
}

std::vector<double> dft_truncated(std::span<const double> window,
                                  int word_length, bool drop_first) {
  check_dft_shape(window.size(), word_length, drop_first);
  std::vector<double> out(static_cast<std::size_t>(word_length));
  TruncatedDft(window.size(), word_length, drop_first)
      .transform(window, out.data());
  return out;
}

std::vector<std::span<const double>> sliding_windows(
    std::span<const double> series, int window_length) {
  if (window_length < 1 ||
      static_cast<std::size_t>(window_length) > series.size()) {
    throw ParameterError("window length " + std::to_string(window_length) +
                         " outside [1, " + std::to_string(series.size()) + "]");
  }
  const auto w = static_cast<std::size_t>(window_length);
  std::vector<std::span<const double>> out;
  out.reserve(series.size() - w + 1);
  for (std::size_t j = 0; j + w <= series.size(); ++j) {
    out.push_back(series.subspan(j, w));
  }
  return out;
}

std::vector<double> window_coefficients(std::span<const double> series,
                                        const SfaParameters& params) {
  params.validate(series.size());
  const auto w = static_cast<std::size_t>(params.window_length);
  const auto l = static_cast<std::size_t>(params.word_length);
  const std::size_t count = series.size() - w + 1;
  TruncatedDft dft(w, params.word_length, params.normalize);

  std::vector<double> rows(count * l);
  std::vector<double> scratch(w);
  for (std::size_t j = 0; j < count; ++j) {
    auto window = series.subspan(j, w);
    if (params.normalize) {
      z_normalize_into(window, scratch);
      dft.transform(scratch, rows.data() + j * l);
    } else {
      dft.transform(window, rows.data() + j * l);
    }
  }
  return rows;
}

Breakpoints mcb_breakpoints(std::span<const double> coefficient_rows,
                            int word_length, int alphabet_size) {
  const auto l = static_cast<std::size_t>(word_length);
  const std::size_t n = coefficient_rows.size() / l;
  if (n == 0) throw ParameterError("no coefficients to bin");
  const auto a = static_cast<std::size_t>(alphabet_size);

  std::vector<double> thresholds;
  thresholds.reserve(l * (a - 1));
  std::vector<double> column(n);
  for (std::size_t c = 0; c < l; ++c) {
    for (std::size_t r = 0; r < n; ++r) column[r] = coefficient_rows[r * l + c];
    std::sort(column.begin(), column.end());
    for (std::size_t k = 1; k < a; ++k) {
      std::size_t rank = k * n / a;
      std::size_t lo = rank == 0 ? 0 : rank - 1;
      std::size_t hi = std::min(rank, n - 1);
      thresholds.push_back(std::midpoint(column[lo], column[hi]));
    }
  }
  return Breakpoints(word_length, alphabet_size, std::move(thresholds));
}

Breakpoints fit_mcb(const LabeledDataset& train, const SfaParameters& params) {
  params.validate(train.length());
  std::vector<double> all;
  for (std::size_t i = 0; i < train.size(); ++i) {
    auto rows = window_coefficients(train.series(i), params);
    all.insert(all.end(), rows.begin(), rows.end());
  }
  return mcb_breakpoints(all, params.word_length, params.alphabet_size);
}

Word sfa_word(std::span<const double> coefficients, const Breakpoints& bp) {
  if (coefficients.size() != static_cast<std::size_t>(bp.rows())) {
    throw ParameterError("expected " + std::to_string(bp.rows()) +
                         " coefficients, got " +
                         std::to_string(coefficients.size()));
  }
  std::uint64_t packed = 0;
  std::uint64_t place = 1;
  const auto a = static_cast<std::uint64_t>(bp.alphabet_size());
  for (std::size_t c = 0; c < coefficients.size(); ++c) {
    std::uint64_t symbol = 0;
    for (double t : bp.row(static_cast<int>(c))) {
      if (t < coefficients[c]) ++symbol;
    }
    packed += symbol * place;
    place *= a;
  }
  return Word(packed);
}

WordHistogram histogram_from_coefficients(std::span<const double> rows,
                                          const Breakpoints& bp) {
  const auto l = static_cast<std::size_t>(bp.rows());
  std::vector<Word> words;
  bool have_previous = false;
  Word previous;
  for (std::size_t r = 0; r + l <= rows.size(); r += l) {
    Word w = sfa_word(rows.subspan(r, l), bp);
    if (!have_previous || w != previous) words.push_back(w);
    previous = w;
    have_previous = true;
  }
  return WordHistogram::from_words(std::move(words));
}

WordHistogram bag_of_words(std::span<const double> series,
                           const SfaParameters& params, const Breakpoints& bp) {
  if (bp.rows() != params.word_length ||
      bp.alphabet_size() != params.alphabet_size) {
    throw ParameterError("breakpoints were fitted for different parameters");
  }
  return histogram_from_coefficients(window_coefficients(series, params), bp);
}

}  // namespace rboss
