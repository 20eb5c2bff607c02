#include "nneten/mnist_io.hpp"

#include <zlib.h>

#include <cstdlib>
#include <fstream>
#include <iterator>

#include "nneten/error.hpp"

namespace nneten::mnist {
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kImageHeaderBytes = 16;
constexpr std::size_t kLabelHeaderBytes = 8;

std::uint32_t read_be32(ByteSpan bytes, std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t value) {
  out.push_back(static_cast<std::uint8_t>(value >> 24));
  out.push_back(static_cast<std::uint8_t>(value >> 16));
  out.push_back(static_cast<std::uint8_t>(value >> 8));
  out.push_back(static_cast<std::uint8_t>(value));
}

void check_magic(ByteSpan bytes, std::uint32_t expected, const char* what) {
  if (bytes.size() < 4) {
    throw Error(ErrorKind::Truncated, std::string(what) + ": buffer shorter than the magic number");
  }
  const auto magic = read_be32(bytes, 0);
  if (magic != expected) {
    throw Error(ErrorKind::WrongMagic, std::string(what) + ": magic " + std::to_string(magic) +
                                           ", expected " + std::to_string(expected));
  }
}

void check_length(std::size_t actual, std::size_t expected, const char* what) {
  if (actual < expected) {
    throw Error(ErrorKind::Truncated, std::string(what) + ": " + std::to_string(actual) +
                                          " bytes, header promises " + std::to_string(expected));
  }
  if (actual > expected) {
    throw Error(ErrorKind::Truncated, std::string(what) + ": " +
                                          std::to_string(actual - expected) +
                                          " trailing bytes after declared payload");
  }
}

ImageSet take_prefix(const ImageSet& set, std::optional<std::size_t> limit, const char* split) {
  if (!limit) return set;
  if (*limit > set.size()) {
    throw Error(ErrorKind::InvalidParam, std::string(split) + " limit " + std::to_string(*limit) +
                                             " exceeds split size " + std::to_string(set.size()));
  }
  return set.prefix(*limit);
}

}  // namespace

ImageSet::ImageSet(std::vector<std::uint8_t> pixels) : pixels_(std::move(pixels)) {
  if (pixels_.size() % kPixelsPerImage != 0) {
    throw Error(ErrorKind::DimensionMismatch, "pixel buffer is not a whole number of images");
  }
}

ImageSet ImageSet::prefix(std::size_t n) const {
  const auto count = std::min(n, size());
  return ImageSet(std::vector<std::uint8_t>(
      pixels_.begin(), pixels_.begin() + static_cast<std::ptrdiff_t>(count * kPixelsPerImage)));
}

ImageSet parse_idx_images(ByteSpan bytes) {
  check_magic(bytes, kImageMagic, "idx images");
  if (bytes.size() < kImageHeaderBytes) {
    throw Error(ErrorKind::Truncated, "idx images: header shorter than 16 bytes");
  }
  const std::size_t count = read_be32(bytes, 4);
  const auto rows = read_be32(bytes, 8);
  const auto cols = read_be32(bytes, 12);
  if (rows != kImageSide || cols != kImageSide) {
    throw Error(ErrorKind::DimensionMismatch, "idx images: " + std::to_string(rows) + "x" +
                                                  std::to_string(cols) + ", expected 28x28");
  }
  check_length(bytes.size(), kImageHeaderBytes + count * kPixelsPerImage, "idx images");
  return ImageSet(std::vector<std::uint8_t>(bytes.begin() + kImageHeaderBytes, bytes.end()));
}

LabelSet parse_idx_labels(ByteSpan bytes) {
  check_magic(bytes, kLabelMagic, "idx labels");
  if (bytes.size() < kLabelHeaderBytes) {
    throw Error(ErrorKind::Truncated, "idx labels: header shorter than 8 bytes");
  }
  const std::size_t count = read_be32(bytes, 4);
  check_length(bytes.size(), kLabelHeaderBytes + count, "idx labels");
  LabelSet labels(bytes.begin() + kLabelHeaderBytes, bytes.end());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= kClassCount) {
      throw Error(ErrorKind::LabelOutOfRange, "idx labels: label " + std::to_string(labels[i]) +
                                                  " at index " + std::to_string(i));
    }
  }
  return labels;
}

std::vector<std::uint8_t> to_idx_images(const ImageSet& images) {
  std::vector<std::uint8_t> out;
  out.reserve(kImageHeaderBytes + images.pixels().size());
  write_be32(out, kImageMagic);
  write_be32(out, static_cast<std::uint32_t>(images.size()));
  write_be32(out, kImageSide);
  write_be32(out, kImageSide);
  out.insert(out.end(), images.pixels().begin(), images.pixels().end());
  return out;
}

std::vector<std::uint8_t> to_idx_labels(const LabelSet& labels) {
  std::vector<std::uint8_t> out;
  out.reserve(kLabelHeaderBytes + labels.size());
  write_be32(out, kLabelMagic);
  write_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

bool is_gzip(ByteSpan bytes) noexcept {
  return bytes.size() >= 2 && bytes[0] == 0x1F && bytes[1] == 0x8B;
}

std::vector<std::uint8_t> gunzip(ByteSpan bytes) {
  z_stream stream{};
  // 16 + MAX_WBITS: expect a gzip wrapper.
  if (inflateInit2(&stream, 16 + MAX_WBITS) != Z_OK) {
    throw Error(ErrorKind::IoError, "gunzip: inflateInit2 failed");
  }
  stream.next_in = const_cast<Bytef*>(bytes.data());
  stream.avail_in = static_cast<uInt>(bytes.size());

  std::vector<std::uint8_t> out;
  std::array<std::uint8_t, 1 << 16> chunk{};
  int status = Z_OK;
  while (status != Z_STREAM_END) {
    stream.next_out = chunk.data();
    stream.avail_out = static_cast<uInt>(chunk.size());
    status = inflate(&stream, Z_NO_FLUSH);
    if (status != Z_OK && status != Z_STREAM_END) {
      inflateEnd(&stream);
      throw Error(ErrorKind::Truncated, "gunzip: corrupt or truncated gzip stream");
    }
    out.insert(out.end(), chunk.data(), chunk.data() + (chunk.size() - stream.avail_out));
    if (status == Z_OK && stream.avail_in == 0 && stream.avail_out != 0) {
      inflateEnd(&stream);
      throw Error(ErrorKind::Truncated, "gunzip: gzip stream ended early");
    }
  }
  inflateEnd(&stream);
  return out;
}

std::vector<std::uint8_t> gzip(ByteSpan bytes) {
  z_stream stream{};
  if (deflateInit2(&stream, Z_BEST_COMPRESSION, Z_DEFLATED, 16 + MAX_WBITS, 8,
                   Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error(ErrorKind::IoError, "gzip: deflateInit2 failed");
  }
  stream.next_in = const_cast<Bytef*>(bytes.data());
  stream.avail_in = static_cast<uInt>(bytes.size());
  std::vector<std::uint8_t> out(deflateBound(&stream, stream.avail_in));
  stream.next_out = out.data();
  stream.avail_out = static_cast<uInt>(out.size());
  const int status = deflate(&stream, Z_FINISH);
  deflateEnd(&stream);
  if (status != Z_STREAM_END) throw Error(ErrorKind::IoError, "gzip: deflate failed");
  out.resize(stream.total_out);
  return out;
}

std::vector<std::uint8_t> read_maybe_gzip(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingFile, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (is_gzip(bytes)) return gunzip(bytes);
  return bytes;
}

std::optional<fs::path> locate(const fs::path& directory, std::string_view name) {
  for (const auto& candidate :
       {directory / std::string(name), directory / (std::string(name) + ".gz")}) {
    std::error_code ec;
    if (fs::is_regular_file(candidate, ec)) return candidate;
  }
  return std::nullopt;
}

MnistDataset load_dataset(const fs::path& directory, std::optional<std::size_t> train_limit,
                          std::optional<std::size_t> test_limit) {
  std::array<fs::path, 4> paths;
  for (std::size_t i = 0; i < kFileNames.size(); ++i) {
    auto found = locate(directory, kFileNames[i]);
    if (!found) {
      throw Error(ErrorKind::MissingFile, "MNIST file " + std::string(kFileNames[i]) +
                                              " not found in " + directory.string());
    }
    paths[i] = *found;
  }

  auto train_images = parse_idx_images(read_maybe_gzip(paths[0]));
  auto train_labels = parse_idx_labels(read_maybe_gzip(paths[1]));
  auto test_images = parse_idx_images(read_maybe_gzip(paths[2]));
  auto test_labels = parse_idx_labels(read_maybe_gzip(paths[3]));
  if (train_images.size() != train_labels.size() || test_images.size() != test_labels.size()) {
    throw Error(ErrorKind::DimensionMismatch, "image and label counts differ in " +
                                                  directory.string());
  }

  MnistDataset data;
  data.train_images = take_prefix(train_images, train_limit, "train");
  data.test_images = take_prefix(test_images, test_limit, "test");
  data.train_labels.assign(train_labels.begin(),
                           train_labels.begin() + static_cast<std::ptrdiff_t>(data.train_images.size()));
  data.test_labels.assign(test_labels.begin(),
                          test_labels.begin() + static_cast<std::ptrdiff_t>(data.test_images.size()));
  return data;
}

std::optional<fs::path> default_directory() {
  const char* value = std::getenv(kDirEnvVar);
  if (value == nullptr || *value == '\0') return std::nullopt;
  return fs::path(value);
}

std::string default_base_url() {
  const char* value = std::getenv(kUrlEnvVar);
  if (value == nullptr || *value == '\0') return std::string(kDefaultBaseUrl);
  return value;
}

}  // namespace nneten::mnist
