#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>

#include "nneten/error.hpp"
#include "nneten/mnist_io.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace nneten;
using namespace nneten::mnist;

namespace {

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected nneten::Error";
  return ErrorKind::InvalidParam;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("nneten_mnist_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write_dataset(const fs::path& dir, const MnistDataset& data, bool compress) {
  auto put = [&](std::string_view name, std::vector<std::uint8_t> bytes) {
    if (compress) {
      write_bytes(dir / (std::string(name) + ".gz"), gzip(bytes));
    } else {
      write_bytes(dir / std::string(name), bytes);
    }
  };
  put(kTrainImagesFile, to_idx_images(data.train_images));
  put(kTrainLabelsFile, to_idx_labels(data.train_labels));
  put(kTestImagesFile, to_idx_images(data.test_images));
  put(kTestLabelsFile, to_idx_labels(data.test_labels));
}

}  // namespace

TEST(IdxImages, RejectsLabelMagic) {
  auto bytes = to_idx_labels({1, 2, 3});
  EXPECT_EQ(kind_of([&] { parse_idx_images(bytes); }), ErrorKind::WrongMagic);
}

TEST(IdxImages, RejectsWrongDimensions) {
  auto bytes = to_idx_images(ImageSet(std::vector<std::uint8_t>(784, 7)));
  bytes[11] = 27;  // rows
  EXPECT_EQ(kind_of([&] { parse_idx_images(bytes); }), ErrorKind::DimensionMismatch);
}

TEST(IdxImages, HeaderPromisingMoreImagesIsTruncated) {
  auto bytes = to_idx_images(ImageSet(std::vector<std::uint8_t>(784, 1)));
  bytes[7] = 2;  // count = 2, but only 784 pixel bytes follow
  EXPECT_EQ(kind_of([&] { parse_idx_images(bytes); }), ErrorKind::Truncated);
}

TEST(IdxImages, TrailingBytesAreRejected) {
  auto bytes = to_idx_images(ImageSet(std::vector<std::uint8_t>(784, 1)));
  bytes.push_back(0);
  EXPECT_EQ(kind_of([&] { parse_idx_images(bytes); }), ErrorKind::Truncated);
}

TEST(IdxLabels, EmptyBufferIsTruncated) {
  EXPECT_EQ(kind_of([] { parse_idx_labels({}); }), ErrorKind::Truncated);
}

TEST(IdxLabels, LabelTenIsOutOfRange) {
  auto bytes = to_idx_labels({0, 9, 3});
  bytes[9] = 10;
  EXPECT_EQ(kind_of([&] { parse_idx_labels(bytes); }), ErrorKind::LabelOutOfRange);
}

TEST(IdxLabels, RejectsImageMagic) {
  auto bytes = to_idx_images(ImageSet(std::vector<std::uint8_t>(784, 0)));
  EXPECT_EQ(kind_of([&] { parse_idx_labels(bytes); }), ErrorKind::WrongMagic);
}

TEST(IdxFormat, SerializeParseRoundTripIsBitExact) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto data = nneten::testing::synthetic_dataset(rng() % 9, 1, rng());
    const auto image_bytes = to_idx_images(data.train_images);
    const auto label_bytes = to_idx_labels(data.train_labels);
    EXPECT_EQ(to_idx_images(parse_idx_images(image_bytes)), image_bytes);
    EXPECT_EQ(to_idx_labels(parse_idx_labels(label_bytes)), label_bytes);
  }
}

TEST(Gzip, InflatesWhatDeflateProduced) {
  const auto data = nneten::testing::synthetic_dataset(3, 1, 11);
  const auto raw = to_idx_images(data.train_images);
  const auto packed = gzip(raw);
  ASSERT_TRUE(is_gzip(packed));
  EXPECT_FALSE(is_gzip(raw));
  EXPECT_EQ(gunzip(packed), raw);
}

TEST(Gzip, TruncatedStreamIsReported) {
  auto packed = gzip(to_idx_labels({1, 2, 3, 4, 5, 6, 7, 8}));
  packed.resize(packed.size() / 2);
  EXPECT_EQ(kind_of([&] { gunzip(packed); }), ErrorKind::Truncated);
}

TEST(LoadDataset, ReadsRawAndGzipIdentically) {
  const auto data = nneten::testing::synthetic_dataset(12, 5, 3);
  TempDir raw_dir, gz_dir;
  write_dataset(raw_dir.path(), data, false);
  write_dataset(gz_dir.path(), data, true);
  EXPECT_EQ(load_dataset(raw_dir.path()), data);
  EXPECT_EQ(load_dataset(gz_dir.path()), data);
}

TEST(LoadDataset, LimitsKeepAPrefix) {
  const auto data = nneten::testing::synthetic_dataset(12, 5, 4);
  TempDir dir;
  write_dataset(dir.path(), data, false);
  const auto reduced = load_dataset(dir.path(), 7, 2);
  ASSERT_EQ(reduced.train_count(), 7u);
  ASSERT_EQ(reduced.test_count(), 2u);
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_TRUE(std::ranges::equal(reduced.train_images[i], data.train_images[i]));
    EXPECT_EQ(reduced.train_labels[i], data.train_labels[i]);
  }
  EXPECT_EQ(kind_of([&] { load_dataset(dir.path(), 13, std::nullopt); }), ErrorKind::InvalidParam);
}

TEST(LoadDataset, MissingLabelFile) {
  const auto data = nneten::testing::synthetic_dataset(2, 2, 5);
  TempDir dir;
  write_dataset(dir.path(), data, false);
  fs::remove(dir.path() / std::string(kTestLabelsFile));
  EXPECT_EQ(kind_of([&] { load_dataset(dir.path()); }), ErrorKind::MissingFile);
}

TEST(LoadDataset, CountMismatchBetweenImagesAndLabels) {
  auto data = nneten::testing::synthetic_dataset(4, 2, 6);
  data.train_labels.pop_back();
  TempDir dir;
  write_dataset(dir.path(), data, false);
  EXPECT_EQ(kind_of([&] { load_dataset(dir.path()); }), ErrorKind::DimensionMismatch);
}

// Reference facts below were computed by parsing the published files with an
// independent numpy reader (label histogram and pixel sums).
TEST(RealMnist, TestSplitMatchesPublishedFormat) {
  const auto* data = nneten::testing::dataset(std::nullopt, std::nullopt);
  NNETEN_REQUIRE_DATASET(data);
  ASSERT_EQ(data->test_count(), 10000u);
  ASSERT_EQ(data->train_count(), 60000u);
  EXPECT_EQ(data->test_images[0][0], 0);

  std::array<int, 10> histogram{};
  for (auto label : data->test_labels) ++histogram[label];
  EXPECT_EQ(histogram, (std::array<int, 10>{980, 1135, 1032, 1010, 982, 892, 958, 1028, 974, 1009}));
  std::array<int, 10> train_histogram{};
  for (auto label : data->train_labels) ++train_histogram[label];
  EXPECT_EQ(train_histogram,
            (std::array<int, 10>{5923, 6742, 5958, 6131, 5842, 5421, 5918, 6265, 5851, 5949}));

  const std::array<long, 3> pixel_sums{18454, 28850, 9871};
  for (std::size_t i = 0; i < 3; ++i) {
    long sum = 0;
    for (auto p : data->test_images[i]) sum += p;
    EXPECT_EQ(sum, pixel_sums[i]) << "image " << i;
  }
}

TEST(RealMnist, FilesRoundTripBitExact) {
  const auto dir = nneten::testing::mnist_dir();
  if (!dir || !locate(*dir, kTestImagesFile)) GTEST_SKIP() << "MNIST not available";
  const auto images = read_maybe_gzip(*locate(*dir, kTestImagesFile));
  const auto labels = read_maybe_gzip(*locate(*dir, kTestLabelsFile));
  EXPECT_EQ(to_idx_images(parse_idx_images(images)), images);
  EXPECT_EQ(to_idx_labels(parse_idx_labels(labels)), labels);
}

TEST(RealMnist, ReducedModeIsPrefixOfFullMode) {
  const auto* full = nneten::testing::dataset(std::nullopt, std::nullopt);
  const auto* reduced = nneten::testing::dataset(10000, 1000);
  NNETEN_REQUIRE_DATASET(full);
  ASSERT_EQ(reduced->train_count(), 10000u);
  ASSERT_EQ(reduced->test_count(), 1000u);
  EXPECT_EQ(reduced->train_images, full->train_images.prefix(10000));
  EXPECT_EQ(reduced->test_images, full->test_images.prefix(1000));
  EXPECT_TRUE(std::equal(reduced->test_labels.begin(), reduced->test_labels.end(), full->test_labels.begin()));
}
