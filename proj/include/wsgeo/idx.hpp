#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wsgeo/dataset.hpp"

namespace wsgeo {

// IDX as published: big-endian sizes, magic 0x00000803 for image tensors and
// 0x00000801 for label vectors.
inline constexpr uint32_t kIdxImagesMagic = 0x00000803u;
inline constexpr uint32_t kIdxLabelsMagic = 0x00000801u;

struct IdxImages {
  int count = 0;
  int rows = 0;
  int cols = 0;
  std::vector<uint8_t> pixels;  // count*rows*cols, row-major per image
};

IdxImages read_idx_images(const std::string& path);
std::vector<uint8_t> read_idx_labels(const std::string& path);

struct IdxOptions {
  int downsample_to = 28;  // 8 | 14 | 28 (28 = no-op for MNIST-sized inputs)
  bool normalize = true;   // scale pixels to [0, 1]
};

// Loads an image/label pair into a Dataset with one-hot targets. Downsampling
// is 2-D block averaging; when the target does not divide the source size the
// image is first center-cropped to the largest multiple (28 -> 8 crops to 24
// and averages 3x3 blocks).
Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 const IdxOptions& opts = {});

// Block-average one image; exposed for the mean-preservation property tests.
std::vector<double> downsample_image(const std::vector<double>& img, int rows, int cols,
                                     int target);

}  // namespace wsgeo
