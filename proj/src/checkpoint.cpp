#include "rboss/checkpoint.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <bit>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "rboss/error.hpp"

namespace rboss {

namespace {

constexpr char kMagic[4] = {'R', 'B', 'O', 'S'};
constexpr std::size_t kHeaderSize = 24;

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) { le(v, 4); }
  void i32(std::int32_t v) { le(static_cast<std::uint32_t>(v), 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
  void flag(bool v) { u8(v ? 1 : 0); }
  void str(const std::string& s) {
    u64(s.size());
    out_ += s;
  }
  std::string take() { return std::move(out_); }

 private:
  void le(std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) {
      out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
  }
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::uint64_t u64() { return le(8); }
  double f64() { return std::bit_cast<double>(le(8)); }
  bool flag() {
    auto v = u8();
    if (v > 1) throw CheckpointError("corrupt checkpoint: bad flag byte");
    return v == 1;
  }
  std::string str() {
    auto n = count(1);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  // Element count that must fit in the remaining bytes.
  std::size_t count(std::size_t min_element_size) {
    auto n = u64();
    if (n > (in_.size() - pos_) / min_element_size) {
      throw CheckpointError("corrupt checkpoint: count exceeds payload");
    }
    return static_cast<std::size_t>(n);
  }
  bool at_end() const noexcept { return pos_ == in_.size(); }

 private:
  std::uint64_t le(std::size_t bytes) {
    if (in_.size() - pos_ < bytes) {
      throw CheckpointError("corrupt checkpoint: truncated payload");
    }
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < bytes; ++i) {
      v |= static_cast<std::uint64_t>(
               static_cast<unsigned char>(in_[pos_ + i]))
           << (8 * i);
    }
    pos_ += bytes;
    return v;
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

void write_config(Writer& w, const RbossConfig& c) {
  w.flag(c.ensemble_size.has_value());
  if (c.ensemble_size) w.u64(*c.ensemble_size);
  w.flag(c.max_ensemble_size.has_value());
  if (c.max_ensemble_size) w.u64(*c.max_ensemble_size);
  w.flag(c.time_budget_seconds.has_value());
  if (c.time_budget_seconds) w.f64(*c.time_budget_seconds);
  w.u64(c.contract_member_cap);
  if (!c.subsample_policy) {
    w.u8(0);
  } else if (const auto* f = std::get_if<FractionPolicy>(&*c.subsample_policy)) {
    w.u8(1);
    w.f64(f->fraction);
  } else {
    w.u8(2);
    w.u64(std::get<MaxTotalPolicy>(*c.subsample_policy).cap);
  }
  w.flag(c.use_cawpe);
  w.f64(c.cawpe_exponent);
  w.u8(static_cast<std::uint8_t>(c.estimate.index()));
  if (const auto* fast = std::get_if<FastLoocv>(&c.estimate)) {
    w.u64(fast->per_class_cap);
  }
  w.u64(c.seed);
  w.flag(c.checkpoint.has_value());
  if (c.checkpoint) {
    w.str(c.checkpoint->path.string());
    w.u64(c.checkpoint->every_members);
    w.flag(c.checkpoint->every_seconds.has_value());
    if (c.checkpoint->every_seconds) w.f64(*c.checkpoint->every_seconds);
  }
}

RbossConfig read_config(Reader& r) {
  RbossConfig c;
  if (r.flag()) c.ensemble_size = r.u64();
  if (r.flag()) c.max_ensemble_size = r.u64();
  if (r.flag()) c.time_budget_seconds = r.f64();
  c.contract_member_cap = r.u64();
  switch (r.u8()) {
    case 0: break;
    case 1: c.subsample_policy = FractionPolicy{r.f64()}; break;
    case 2: c.subsample_policy = MaxTotalPolicy{r.u64()}; break;
    default: throw CheckpointError("corrupt checkpoint: bad subsample kind");
  }
  c.use_cawpe = r.flag();
  c.cawpe_exponent = r.f64();
  switch (r.u8()) {
    case 0: c.estimate = NoEstimate{}; break;
    case 1: c.estimate = FullLoocv{}; break;
    case 2: c.estimate = FastLoocv{r.u64()}; break;
    default: throw CheckpointError("corrupt checkpoint: bad estimate kind");
  }
  c.seed = r.u64();
  if (r.flag()) {
    CheckpointSettings s;
    s.path = r.str();
    s.every_members = r.u64();
    if (r.flag()) s.every_seconds = r.f64();
    c.checkpoint = std::move(s);
  }
  return c;
}

void write_member(Writer& w, const EnsembleMember& m) {
  w.u64(m.build_ordinal);
  w.u32(m.parameter_id);
  w.flag(m.train_accuracy.has_value());
  if (m.train_accuracy) w.f64(*m.train_accuracy);
  w.f64(m.weight);
  w.flag(m.subsample_indices.has_value());
  if (m.subsample_indices) {
    w.u64(m.subsample_indices->size());
    for (auto i : *m.subsample_indices) w.u64(i);
  }
  const auto& model = m.model;
  w.i32(model.params.word_length);
  w.i32(model.params.alphabet_size);
  w.i32(model.params.window_length);
  w.flag(model.params.normalize);
  w.u64(model.series_length);
  w.i32(model.class_count);
  w.i32(model.breakpoints.rows());
  w.i32(model.breakpoints.alphabet_size());
  for (double t : model.breakpoints.thresholds()) w.f64(t);
  w.u64(model.train_bags.size());
  for (const auto& bag : model.train_bags) {
    w.u64(bag.size());
    for (const auto& [word, count] : bag) {
      w.u64(word.packed());
      w.u32(count);
    }
  }
  for (int y : model.train_labels) w.i32(y);
}

EnsembleMember read_member(Reader& r) {
  EnsembleMember m;
  m.build_ordinal = r.u64();
  m.parameter_id = r.u32();
  if (r.flag()) m.train_accuracy = r.f64();
  m.weight = r.f64();
  if (r.flag()) {
    std::vector<std::size_t> idx(r.count(8));
    for (auto& i : idx) i = r.u64();
    m.subsample_indices = std::move(idx);
  }
  auto& model = m.model;
  model.params.word_length = r.i32();
  model.params.alphabet_size = r.i32();
  model.params.window_length = r.i32();
  model.params.normalize = r.flag();
  model.series_length = r.u64();
  model.class_count = r.i32();
  int rows = r.i32();
  int alphabet = r.i32();
  if (rows < 0 || rows > 64 || alphabet < 2 || alphabet > 64) {
    throw CheckpointError("corrupt checkpoint: bad breakpoint shape");
  }
  std::vector<double> thresholds(static_cast<std::size_t>(rows) *
                                 static_cast<std::size_t>(alphabet - 1));
  for (double& t : thresholds) t = r.f64();
  try {
    model.breakpoints = Breakpoints(rows, alphabet, std::move(thresholds));
  } catch (const ParameterError& e) {
    throw CheckpointError(std::string("corrupt checkpoint: ") + e.what());
  }
  std::size_t bags = r.count(8);
  model.train_bags.reserve(bags);
  for (std::size_t b = 0; b < bags; ++b) {
    std::vector<WordHistogram::Entry> entries(r.count(12));
    for (auto& [word, count] : entries) {
      word = Word(r.u64());
      count = r.u32();
    }
    model.train_bags.push_back(WordHistogram::from_entries(std::move(entries)));
  }
  model.train_labels.resize(bags);
  for (int& y : model.train_labels) y = r.i32();
  return m;
}

}  // namespace

DatasetFingerprint DatasetFingerprint::of(const LabeledDataset& data) {
  return {data.size(), data.length(),
          static_cast<std::uint64_t>(data.class_count()), rboss::content_hash(data)};
}

void BuildCheckpoint::validate() const {
  if (format_version != kCheckpointVersion) {
    throw VersionError(format_version, kCheckpointVersion);
  }
  if (members_built != drawn_ids.size()) {
    throw CheckpointError("members built does not match the drawn id count");
  }
  std::set<std::uint32_t> distinct(drawn_ids.begin(), drawn_ids.end());
  if (distinct.size() != drawn_ids.size()) {
    throw CheckpointError("drawn parameter ids are not distinct");
  }
  std::set<std::uint64_t> ordinals;
  for (const auto& m : members) {
    if (m.build_ordinal >= drawn_ids.size() ||
        drawn_ids[m.build_ordinal] != m.parameter_id) {
      throw CheckpointError("member does not reference a drawn parameter id");
    }
    if (!ordinals.insert(m.build_ordinal).second) {
      throw CheckpointError("two members share a build ordinal");
    }
    const auto& model = m.model;
    if (model.train_bags.empty() ||
        model.train_bags.size() != model.train_labels.size()) {
      throw CheckpointError("member bags and labels disagree");
    }
    if (model.breakpoints.rows() != model.params.word_length ||
        model.breakpoints.alphabet_size() != model.params.alphabet_size) {
      throw CheckpointError("member breakpoints do not match its parameters");
    }
    for (int y : model.train_labels) {
      if (y < 0 || y >= model.class_count) {
        throw CheckpointError("member label out of range");
      }
    }
    if (!(m.weight > 0.0)) throw CheckpointError("member weight not positive");
  }
}

std::string encode_checkpoint(const BuildCheckpoint& state) {
  Writer w;
  w.u64(state.dataset.size);
  w.u64(state.dataset.length);
  w.u64(state.dataset.class_count);
  w.u64(state.dataset.content_hash);
  write_config(w, state.config);
  w.f64(state.elapsed_seconds);
  w.u64(state.members_built);
  w.u64(state.peak_bags);
  w.u64(state.drawn_ids.size());
  for (auto id : state.drawn_ids) w.u32(id);
  w.u64(state.members.size());
  for (const auto& m : state.members) write_member(w, m);
  std::string payload = w.take();

  Writer header;
  std::string out(kMagic, sizeof(kMagic));
  header.u32(state.format_version);
  header.u64(payload.size());
  header.u64(fnv1a(payload));
  out += header.take();
  out += payload;
  return out;
}

BuildCheckpoint decode_checkpoint(std::string_view bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw CheckpointError("not a checkpoint file (bad magic)");
  }
  Reader head(bytes.substr(4));
  std::uint32_t version = head.u32();
  if (version != kCheckpointVersion) {
    throw VersionError(version, kCheckpointVersion);
  }
  if (bytes.size() < kHeaderSize) {
    throw CheckpointError("corrupt checkpoint: truncated header");
  }
  std::uint64_t length = head.u64();
  std::uint64_t checksum = head.u64();
  std::string_view payload = bytes.substr(kHeaderSize);
  if (payload.size() != length) {
    throw CheckpointError("corrupt checkpoint: payload length mismatch");
  }
  if (fnv1a(payload) != checksum) {
    throw CheckpointError("corrupt checkpoint: checksum mismatch");
  }

  Reader r(payload);
  BuildCheckpoint cp;
  cp.format_version = version;
  cp.dataset.size = r.u64();
  cp.dataset.length = r.u64();
  cp.dataset.class_count = r.u64();
  cp.dataset.content_hash = r.u64();
  cp.config = read_config(r);
  cp.elapsed_seconds = r.f64();
  cp.members_built = r.u64();
  cp.peak_bags = r.u64();
  cp.drawn_ids.resize(r.count(4));
  for (auto& id : cp.drawn_ids) id = r.u32();
  std::size_t members = r.count(1);
  for (std::size_t i = 0; i < members; ++i) cp.members.push_back(read_member(r));
  if (!r.at_end()) throw CheckpointError("corrupt checkpoint: trailing bytes");
  cp.validate();
  return cp;
}

void save_checkpoint(const BuildCheckpoint& state,
                     const std::filesystem::path& path) {
  state.validate();
  const std::string bytes = encode_checkpoint(state);
  const std::filesystem::path tmp = path.string() + ".tmp";

  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) {
    throw CheckpointError("cannot create " + tmp.string() + ": " +
                          std::strerror(errno));
  }
  std::size_t written = 0;
  bool ok = true;
  while (written < bytes.size()) {
    auto n = ::write(fd, bytes.data() + written, bytes.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      ok = false;
      break;
    }
    written += static_cast<std::size_t>(n);
  }
  ok = ok && ::fsync(fd) == 0;
  int saved_errno = errno;
  ok = (::close(fd) == 0) && ok;
  if (!ok) {
    std::error_code ignore;
    std::filesystem::remove(tmp, ignore);
    throw CheckpointError("cannot write " + tmp.string() + ": " +
                          std::strerror(saved_errno));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw CheckpointError("cannot replace " + path.string() + ": " +
                          ec.message());
  }
}

BuildCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw NotFoundError("checkpoint not found: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open checkpoint: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace rboss
