#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "advtrain/dataset.hpp"
#include "advtrain/error.hpp"

namespace advtrain {

// IDX binary format: big-endian magic + dimension sizes, then raw bytes.
// Magic 0x00000803 = unsigned-byte images (3 dims), 0x00000801 = labels.
namespace idx {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

namespace detail {

inline std::uint32_t read_be32(std::istream& in, const std::string& path,
                               std::streamoff offset) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    throw FormatError(path + ": truncated at offset " + std::to_string(offset));
  }
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

inline void write_be32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace detail

struct Images {
  std::size_t count = 0, height = 0, width = 0;
  std::vector<std::uint8_t> pixels;  // count * height * width
};

inline Images read_images(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open");
  const std::uint32_t magic = detail::read_be32(in, path.string(), 0);
  if (magic != kImagesMagic) {
    throw FormatError(path.string() + ": bad magic at offset 0 (expected " +
                      std::to_string(kImagesMagic) + ", got " +
                      std::to_string(magic) + ")");
  }
  Images im;
  im.count = detail::read_be32(in, path.string(), 4);
  im.height = detail::read_be32(in, path.string(), 8);
  im.width = detail::read_be32(in, path.string(), 12);
  const std::size_t total = im.count * im.height * im.width;
  im.pixels.resize(total);
  if (!in.read(reinterpret_cast<char*>(im.pixels.data()),
               static_cast<std::streamsize>(total))) {
    throw FormatError(path.string() + ": truncated pixel data at offset " +
                      std::to_string(16 + in.gcount()));
  }
  return im;
}

inline std::vector<std::uint8_t> read_labels(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open");
  const std::uint32_t magic = detail::read_be32(in, path.string(), 0);
  if (magic != kLabelsMagic) {
    throw FormatError(path.string() + ": bad magic at offset 0 (expected " +
                      std::to_string(kLabelsMagic) + ", got " +
                      std::to_string(magic) + ")");
  }
  const std::uint32_t count = detail::read_be32(in, path.string(), 4);
  std::vector<std::uint8_t> labels(count);
  if (!in.read(reinterpret_cast<char*>(labels.data()), count)) {
    throw FormatError(path.string() + ": truncated label data at offset " +
                      std::to_string(8 + in.gcount()));
  }
  return labels;
}

inline void write_images(const std::filesystem::path& path, const Images& im) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path.string() + ": cannot open for writing");
  detail::write_be32(out, kImagesMagic);
  detail::write_be32(out, static_cast<std::uint32_t>(im.count));
  detail::write_be32(out, static_cast<std::uint32_t>(im.height));
  detail::write_be32(out, static_cast<std::uint32_t>(im.width));
  out.write(reinterpret_cast<const char*>(im.pixels.data()),
            static_cast<std::streamsize>(im.pixels.size()));
}

inline void write_labels(const std::filesystem::path& path,
                         const std::vector<std::uint8_t>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path.string() + ": cannot open for writing");
  detail::write_be32(out, kLabelsMagic);
  detail::write_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.write(reinterpret_cast<const char*>(labels.data()),
            static_cast<std::streamsize>(labels.size()));
}

}  // namespace idx

// Loads an IDX image/label pair into a Dataset, pixels scaled to [0,1] by /255.
inline Dataset load_idx(const std::filesystem::path& images_path,
                        const std::filesystem::path& labels_path,
                        Split split = Split::Train) {
  idx::Images im = idx::read_images(images_path);
  std::vector<std::uint8_t> labels = idx::read_labels(labels_path);
  if (im.count != labels.size()) {
    throw FormatError(images_path.string() + ": " + std::to_string(im.count) +
                      " images but " + std::to_string(labels.size()) +
                      " labels in " + labels_path.string());
  }
  Dataset ds;
  ds.split = split;
  const std::size_t d = im.height * im.width;
  ds.x = Tensor({im.count, d});
  ds.y.resize(im.count);
  int max_label = 0;
  for (std::size_t i = 0; i < im.count; ++i) {
    ds.y[i] = static_cast<int>(labels[i]);
    max_label = std::max(max_label, ds.y[i]);
    for (std::size_t j = 0; j < d; ++j)
      ds.x[i * d + j] = static_cast<double>(im.pixels[i * d + j]) / 255.0;
  }
  ds.num_classes = static_cast<std::size_t>(max_label) + 1;
  ds.map_lo = 0.0;
  ds.map_hi = 255.0;
  return ds;
}

}  // namespace advtrain
