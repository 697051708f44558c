#include "wsgeo/idx.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "wsgeo/error.hpp"

namespace wsgeo {

namespace {

class BigEndianReader {
 public:
  explicit BigEndianReader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) raise(ErrorKind::Io, "cannot open '" + path + "'");
  }

  uint32_t read_u32() {
    uint8_t b[4];
    read_bytes(b, 4);
    return (static_cast<uint32_t>(b[0]) << 24) | (static_cast<uint32_t>(b[1]) << 16) |
           (static_cast<uint32_t>(b[2]) << 8) | static_cast<uint32_t>(b[3]);
  }

  void read_bytes(uint8_t* dst, size_t count) {
    in_.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(count));
    if (static_cast<size_t>(in_.gcount()) != count)
      raise(ErrorKind::Format, "'" + path_ + "' truncated at byte offset " +
                                   std::to_string(offset_ + static_cast<size_t>(in_.gcount())));
    offset_ += count;
  }

  size_t offset() const { return offset_; }

 private:
  std::string path_;
  std::ifstream in_;
  size_t offset_ = 0;
};

}  // namespace

IdxImages read_idx_images(const std::string& path) {
  BigEndianReader r(path);
  const uint32_t magic = r.read_u32();
  if (magic != kIdxImagesMagic)
    raise(ErrorKind::Format, "'" + path + "' bad image magic at byte offset 0 (got 0x" +
                                 [&] {
                                   char buf[16];
                                   std::snprintf(buf, sizeof buf, "%08x", magic);
                                   return std::string(buf);
                                 }() +
                                 ", want 0x00000803)");
  IdxImages img;
  img.count = static_cast<int>(r.read_u32());
  img.rows = static_cast<int>(r.read_u32());
  img.cols = static_cast<int>(r.read_u32());
  if (img.count <= 0 || img.rows <= 0 || img.cols <= 0)
    raise(ErrorKind::Format, "'" + path + "' has empty dimensions in header");
  img.pixels.resize(static_cast<size_t>(img.count) * img.rows * img.cols);
  r.read_bytes(img.pixels.data(), img.pixels.size());
  return img;
}

std::vector<uint8_t> read_idx_labels(const std::string& path) {
  BigEndianReader r(path);
  const uint32_t magic = r.read_u32();
  if (magic != kIdxLabelsMagic)
    raise(ErrorKind::Format, "'" + path + "' bad label magic at byte offset 0 (want 0x00000801)");
  const uint32_t count = r.read_u32();
  if (count == 0) raise(ErrorKind::Format, "'" + path + "' has zero labels");
  std::vector<uint8_t> labels(count);
  r.read_bytes(labels.data(), labels.size());
  return labels;
}

std::vector<double> downsample_image(const std::vector<double>& img, int rows, int cols,
                                     int target) {
  if (target == rows && target == cols) return img;
  if (target <= 0 || target > rows || target > cols)
    raise(ErrorKind::Config, "downsample target out of range");
  // center-crop to the largest multiple of the target, then average blocks
  const int block_r = rows / target;
  const int block_c = cols / target;
  const int crop_r = block_r * target;
  const int crop_c = block_c * target;
  const int off_r = (rows - crop_r) / 2;
  const int off_c = (cols - crop_c) / 2;
  std::vector<double> out(static_cast<size_t>(target) * target, 0.0);
  const double inv = 1.0 / (block_r * block_c);
  for (int i = 0; i < target; ++i)
    for (int j = 0; j < target; ++j) {
      double acc = 0.0;
      for (int di = 0; di < block_r; ++di)
        for (int dj = 0; dj < block_c; ++dj) {
          const int src_r = off_r + i * block_r + di;
          const int src_c = off_c + j * block_c + dj;
          acc += img[static_cast<size_t>(src_r) * cols + src_c];
        }
      out[static_cast<size_t>(i) * target + j] = acc * inv;
    }
  return out;
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 const IdxOptions& opts) {
  const IdxImages img = read_idx_images(images_path);
  const std::vector<uint8_t> labels = read_idx_labels(labels_path);
  if (static_cast<int>(labels.size()) != img.count)
    raise(ErrorKind::Format, "image/label count mismatch: " + std::to_string(img.count) +
                                 " images vs " + std::to_string(labels.size()) + " labels");

  int classes = 0;
  for (uint8_t l : labels) classes = std::max(classes, static_cast<int>(l) + 1);

  const int target = opts.downsample_to > 0 ? opts.downsample_to : img.rows;
  const int dim = target * target;
  Dataset ds;
  ds.inputs.resize(img.count, dim);
  ds.targets = Matrix::Zero(img.count, classes);

  std::vector<double> raw(static_cast<size_t>(img.rows) * img.cols);
  const double scale = opts.normalize ? 1.0 / 255.0 : 1.0;
  for (int i = 0; i < img.count; ++i) {
    const uint8_t* src = img.pixels.data() + static_cast<size_t>(i) * img.rows * img.cols;
    for (size_t p = 0; p < raw.size(); ++p) raw[p] = scale * src[p];
    const std::vector<double> ds_img = downsample_image(raw, img.rows, img.cols, target);
    for (int p = 0; p < dim; ++p) ds.inputs(i, p) = ds_img[static_cast<size_t>(p)];
    ds.targets(i, labels[static_cast<size_t>(i)]) = 1.0;
  }
  return ds;
}

}  // namespace wsgeo
