#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nneten::mnist {

inline constexpr std::uint32_t kImageMagic = 0x00000803;  // 2051
inline constexpr std::uint32_t kLabelMagic = 0x00000801;  // 2049
inline constexpr std::size_t kImageSide = 28;
inline constexpr std::size_t kPixelsPerImage = kImageSide * kImageSide;
inline constexpr std::size_t kClassCount = 10;

inline constexpr std::size_t kFullTrainCount = 60000;
inline constexpr std::size_t kFullTestCount = 10000;

inline constexpr std::string_view kTrainImagesFile = "train-images-idx3-ubyte";
inline constexpr std::string_view kTrainLabelsFile = "train-labels-idx1-ubyte";
inline constexpr std::string_view kTestImagesFile = "t10k-images-idx3-ubyte";
inline constexpr std::string_view kTestLabelsFile = "t10k-labels-idx1-ubyte";
inline constexpr std::array<std::string_view, 4> kFileNames{
    kTrainImagesFile, kTrainLabelsFile, kTestImagesFile, kTestLabelsFile};

/// Environment variable consulted for the default dataset directory.
inline constexpr const char* kDirEnvVar = "NNETEN_MNIST_DIR";
/// Environment variable overriding the downloader's base URL.
inline constexpr const char* kUrlEnvVar = "NNETEN_MNIST_URL";
inline constexpr std::string_view kDefaultBaseUrl =
    "https://ossci-datasets.s3.amazonaws.com/mnist/";

using ByteSpan = std::span<const std::uint8_t>;
using Image = std::span<const std::uint8_t, kPixelsPerImage>;

/// Contiguous row-major storage of 28x28 grayscale images.
class ImageSet {
 public:
  ImageSet() = default;
  /// `pixels.size()` must be a multiple of 784.
  explicit ImageSet(std::vector<std::uint8_t> pixels);

  std::size_t size() const noexcept { return pixels_.size() / kPixelsPerImage; }
  bool empty() const noexcept { return pixels_.empty(); }

  Image operator[](std::size_t i) const {
    return Image(pixels_.data() + i * kPixelsPerImage, kPixelsPerImage);
  }

  const std::vector<std::uint8_t>& pixels() const noexcept { return pixels_; }

  /// First `n` images, in order.
  ImageSet prefix(std::size_t n) const;

  friend bool operator==(const ImageSet&, const ImageSet&) = default;

 private:
  std::vector<std::uint8_t> pixels_;
};

using LabelSet = std::vector<std::uint8_t>;

ImageSet parse_idx_images(ByteSpan bytes);
LabelSet parse_idx_labels(ByteSpan bytes);

std::vector<std::uint8_t> to_idx_images(const ImageSet& images);
std::vector<std::uint8_t> to_idx_labels(const LabelSet& labels);

bool is_gzip(ByteSpan bytes) noexcept;
std::vector<std::uint8_t> gunzip(ByteSpan bytes);
std::vector<std::uint8_t> gzip(ByteSpan bytes);

/// Reads a whole file, inflating it when it starts with the gzip magic.
std::vector<std::uint8_t> read_maybe_gzip(const std::filesystem::path& path);

struct MnistDataset {
  ImageSet train_images;
  LabelSet train_labels;
  ImageSet test_images;
  LabelSet test_labels;

  std::size_t train_count() const noexcept { return train_labels.size(); }
  std::size_t test_count() const noexcept { return test_labels.size(); }

  friend bool operator==(const MnistDataset&, const MnistDataset&) = default;
};

/// Looks for `name` and then `name.gz` inside `directory`.
std::optional<std::filesystem::path> locate(const std::filesystem::path& directory,
                                            std::string_view name);

/// Loads the four standard files. Limits keep a prefix of each split.
MnistDataset load_dataset(const std::filesystem::path& directory,
                          std::optional<std::size_t> train_limit = std::nullopt,
                          std::optional<std::size_t> test_limit = std::nullopt);

/// Value of NNETEN_MNIST_DIR, if set and non-empty.
std::optional<std::filesystem::path> default_directory();

/// Value of NNETEN_MNIST_URL, falling back to kDefaultBaseUrl.
std::string default_base_url();

/// Downloads any of the four files missing from `directory`, validating
/// every file before reporting success. Files that already parse are left
/// untouched. Returns the paths of all four files.
std::vector<std::filesystem::path> fetch_mnist(std::string_view base_url,
                                               const std::filesystem::path& directory);

}  // namespace nneten::mnist
