#include "wsgeo/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wsgeo/error.hpp"

namespace wsgeo {

namespace {

constexpr char kCheckpointMagic[4] = {'W', 'S', 'N', 'C'};
constexpr char kPathMagic[4] = {'W', 'S', 'P', 'F'};

class Writer {
 public:
  void raw(const void* p, size_t len) { buf_.append(static_cast<const char*>(p), len); }
  void u8(uint8_t v) { raw(&v, 1); }
  void u32(uint32_t v) { raw(&v, 4); }   // host is little-endian; format is LE
  void u64(uint64_t v) { raw(&v, 8); }
  void f64(double v) { raw(&v, 8); }
  void str(const std::string& s) {
    u32(static_cast<uint32_t>(s.size()));
    raw(s.data(), s.size());
  }
  const std::string& bytes() const { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(std::string bytes, std::string file)
      : buf_(std::move(bytes)), file_(std::move(file)) {}

  void raw(void* p, size_t len) {
    if (pos_ + len > buf_.size())
      raise(ErrorKind::Format, "'" + file_ + "' truncated at byte offset " + std::to_string(pos_));
    std::memcpy(p, buf_.data() + pos_, len);
    pos_ += len;
  }
  uint8_t u8() {
    uint8_t v;
    raw(&v, 1);
    return v;
  }
  uint32_t u32() {
    uint32_t v;
    raw(&v, 4);
    return v;
  }
  uint64_t u64() {
    uint64_t v;
    raw(&v, 8);
    return v;
  }
  double f64() {
    double v;
    raw(&v, 8);
    return v;
  }
  std::string str() {
    const uint32_t len = u32();
    std::string s(len, '\0');
    raw(s.data(), len);
    return s;
  }
  void expect_done() const {
    if (pos_ != buf_.size())
      raise(ErrorKind::Format, "'" + file_ + "' has " + std::to_string(buf_.size() - pos_) +
                                   " trailing bytes (corrupt length)");
  }

 private:
  std::string buf_;
  std::string file_;
  size_t pos_ = 0;
};

void write_spec_block(Writer& w, const NetworkSpec& spec) {
  w.str(kFlattenOrderId);
  w.u32(static_cast<uint32_t>(spec.layer_sizes.size()));
  for (int s : spec.layer_sizes) w.u32(static_cast<uint32_t>(s));
  for (Activation a : spec.hidden_activations) w.u8(static_cast<uint8_t>(a));
  w.u8(static_cast<uint8_t>(spec.output_activation));
}

NetworkSpec read_spec_block(Reader& r, const std::string& file) {
  const std::string order = r.str();
  if (order != kFlattenOrderId)
    raise(ErrorKind::Format, "'" + file + "' uses unknown flattening order '" + order + "'");
  NetworkSpec spec;
  const uint32_t nl = r.u32();
  if (nl < 2 || nl > 1u << 16) raise(ErrorKind::Format, "'" + file + "' has corrupt layer count");
  spec.layer_sizes.resize(nl);
  for (auto& s : spec.layer_sizes) s = static_cast<int>(r.u32());
  spec.hidden_activations.resize(nl - 2);
  for (auto& a : spec.hidden_activations) {
    const uint8_t v = r.u8();
    if (v > 2) raise(ErrorKind::Format, "'" + file + "' has corrupt activation id");
    a = static_cast<Activation>(v);
  }
  const uint8_t out = r.u8();
  if (out > 1) raise(ErrorKind::Format, "'" + file + "' has corrupt output activation id");
  spec.output_activation = static_cast<OutputActivation>(out);
  spec.validate();
  return spec;
}

int64_t spec_block_size(const NetworkSpec& spec) {
  return 4 + static_cast<int64_t>(std::string(kFlattenOrderId).size()) + 4 +
         4 * static_cast<int64_t>(spec.layer_sizes.size()) +
         static_cast<int64_t>(spec.hidden_activations.size()) + 1;
}

}  // namespace

uint64_t spec_hash(const NetworkSpec& spec) {
  Writer w;
  write_spec_block(w, spec);
  uint64_t h = 1469598103934665603ULL;
  for (char c : w.bytes()) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

void save_checkpoint(const std::string& file, const NetworkSpec& spec, const Vector& w) {
  check_weights(spec, w);
  Writer out;
  out.raw(kCheckpointMagic, 4);
  out.u32(kCheckpointVersion);
  write_spec_block(out, spec);
  out.u64(static_cast<uint64_t>(w.size()));
  out.raw(w.data(), sizeof(double) * static_cast<size_t>(w.size()));
  atomic_write_file(file, out.bytes());
}

std::pair<NetworkSpec, Vector> load_checkpoint(const std::string& file) {
  Reader r(read_file(file), file);
  char magic[4];
  r.raw(magic, 4);
  if (std::memcmp(magic, kCheckpointMagic, 4) != 0)
    raise(ErrorKind::Format, "'" + file + "' is not a checkpoint file (bad magic)");
  const uint32_t version = r.u32();
  if (version != kCheckpointVersion)
    raise(ErrorKind::Format, "'" + file + "' has format version " + std::to_string(version) +
                                 ", expected " + std::to_string(kCheckpointVersion));
  NetworkSpec spec = read_spec_block(r, file);
  const uint64_t n = r.u64();
  if (n != static_cast<uint64_t>(spec.param_count()))
    raise(ErrorKind::Format, "'" + file + "' weight count does not match its spec");
  Vector w(static_cast<Eigen::Index>(n));
  r.raw(w.data(), sizeof(double) * n);
  r.expect_done();
  return {std::move(spec), std::move(w)};
}

void save_path(const std::string& file, const Path& path) {
  path.validate();
  Writer out;
  out.raw(kPathMagic, 4);
  out.u32(kPathVersion);
  write_spec_block(out, path.spec);
  out.u64(spec_hash(path.spec));
  out.u8(path.converged ? 1 : 0);
  out.u32(static_cast<uint32_t>(path.checkpoints.size()));
  for (size_t i = 0; i < path.checkpoints.size(); ++i) {
    const Vector& w = path.checkpoints[i];
    out.raw(w.data(), sizeof(double) * static_cast<size_t>(w.size()));
    const CheckpointRecord& rec = path.records[i];
    out.f64(rec.loss);
    out.f64(rec.accuracy);
    out.f64(rec.accuracy2);
    out.f64(rec.distance_to_goal);
  }
  for (size_t j = 0; j < path.step_energies.size(); ++j) {
    out.f64(path.step_energies[j]);
    out.f64(path.step_lengths[j]);
  }
  atomic_write_file(file, out.bytes());
}

Path load_path(const std::string& file) {
  Reader r(read_file(file), file);
  char magic[4];
  r.raw(magic, 4);
  if (std::memcmp(magic, kPathMagic, 4) != 0)
    raise(ErrorKind::Format, "'" + file + "' is not a path file (bad magic)");
  const uint32_t version = r.u32();
  if (version != kPathVersion)
    raise(ErrorKind::Format, "'" + file + "' has format version " + std::to_string(version) +
                                 ", expected " + std::to_string(kPathVersion));
  Path path;
  path.spec = read_spec_block(r, file);
  const uint64_t hash = r.u64();
  if (hash != spec_hash(path.spec))
    raise(ErrorKind::Format, "'" + file + "' spec hash mismatch (incompatible or corrupt)");
  path.converged = r.u8() != 0;
  const uint32_t count = r.u32();
  if (count == 0) raise(ErrorKind::Format, "'" + file + "' has no checkpoints");
  const Eigen::Index n = path.spec.param_count();
  path.checkpoints.reserve(count);
  path.records.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    Vector w(n);
    r.raw(w.data(), sizeof(double) * static_cast<size_t>(n));
    CheckpointRecord rec;
    rec.loss = r.f64();
    rec.accuracy = r.f64();
    rec.accuracy2 = r.f64();
    rec.distance_to_goal = r.f64();
    path.checkpoints.push_back(std::move(w));
    path.records.push_back(rec);
  }
  for (uint32_t j = 0; j + 1 < count; ++j) {
    const double e = r.f64();
    const double l = r.f64();
    path.step_energies.push_back(e);
    path.step_lengths.push_back(l);
    path.cumulative_energy += e;
    path.cumulative_length += l;
  }
  r.expect_done();
  return path;
}

int64_t path_file_size(const NetworkSpec& spec, int checkpoint_count) {
  const int64_t n = spec.param_count();
  return 4 + 4 + spec_block_size(spec) + 8 + 1 + 4 +
         static_cast<int64_t>(checkpoint_count) * (8 * n + 32) +
         static_cast<int64_t>(checkpoint_count - 1) * 16;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string path_csv(const Path& path) {
  bool dual = false;
  for (const auto& rec : path.records)
    if (!std::isnan(rec.accuracy2)) dual = true;

  std::ostringstream out;
  out << "index,t,loss,accuracy";
  if (dual) out << ",accuracy_task2";
  out << ",distance_to_goal,cumulative_energy,cumulative_length\n";
  double ce = 0.0, cl = 0.0;
  const int count = path.size();
  for (int i = 0; i < count; ++i) {
    if (i > 0) {
      ce += path.step_energies[static_cast<size_t>(i) - 1];
      cl += path.step_lengths[static_cast<size_t>(i) - 1];
    }
    const double t = count > 1 ? static_cast<double>(i) / (count - 1) : 0.0;
    const CheckpointRecord& rec = path.records[static_cast<size_t>(i)];
    out << i << ',' << format_double(t) << ',' << format_double(rec.loss) << ','
        << format_double(rec.accuracy);
    if (dual) out << ',' << format_double(rec.accuracy2);
    out << ',' << format_double(rec.distance_to_goal) << ',' << format_double(ce) << ','
        << format_double(cl) << '\n';
  }
  return out.str();
}

std::string train_history_csv(const std::vector<EpochRecord>& history) {
  std::ostringstream out;
  out << "epoch,loss,accuracy\n";
  for (const auto& rec : history)
    out << rec.epoch << ',' << format_double(rec.loss) << ',' << format_double(rec.accuracy)
        << '\n';
  return out.str();
}

void atomic_write_file(const std::string& file, const std::string& bytes) {
  namespace fs = std::filesystem;
  const fs::path target(file);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorKind::Io, "cannot open '" + tmp.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) raise(ErrorKind::Io, "short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) raise(ErrorKind::Io, "cannot rename '" + tmp.string() + "' to '" + file + "'");
}

std::string read_file(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) raise(ErrorKind::Io, "cannot open '" + file + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace wsgeo
