#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "nneten/error.hpp"
#include "nneten/series_gen.hpp"

namespace fs = std::filesystem;
using namespace nneten;

namespace {

MapParams chaotic(MapKind kind, double r) {
  auto p = MapParams::defaults(kind);
  p.r = r;
  return p;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("nneten_series_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST(Generate, BinaryAlternatesStartingAtOne) {
  const auto s = generate(MapParams::defaults(MapKind::Binary), 6);
  EXPECT_EQ(s.values, (Eigen::VectorXd(6) << 1, 0, 1, 0, 1, 0).finished());
}

TEST(Generate, ConstantZero) {
  auto p = MapParams::defaults(MapKind::Constant);
  p.amplitude = 0.0;
  EXPECT_EQ(generate(p, 5).values, Eigen::VectorXd::Zero(5));
}

TEST(Generate, LogisticSettlesOnItsTwoCycle) {
  // The 2-cycle of x -> r x (1 - x) solves r^2 x^2 - r (r + 1) x + (r + 1) = 0.
  const double r = 3.2;
  const double root = std::sqrt((r - 3.0) * (r + 1.0));
  const double high = (r + 1.0 + root) / (2.0 * r);
  const double low = (r + 1.0 - root) / (2.0 * r);
  const auto s = generate(chaotic(MapKind::Logistic, r), 4);
  EXPECT_NEAR(s.values(0), high, 1e-9);
  EXPECT_NEAR(s.values(1), low, 1e-9);
  EXPECT_NEAR(s.values(2), high, 1e-9);
  EXPECT_NEAR(s.values(3), low, 1e-9);
  EXPECT_NEAR(high, 0.7995, 1e-4);
  EXPECT_NEAR(low, 0.5130, 1e-4);
}

TEST(Generate, HenonOutsideBoundedRangeDiverges) {
  try {
    generate(chaotic(MapKind::Henon, 2.0), 10);
    FAIL() << "expected Divergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Divergence);
  }
}

TEST(Generate, HenonClassicParametersStayBounded) {
  const auto s = generate(chaotic(MapKind::Henon, 1.4), 5000);
  EXPECT_LT(s.values.cwiseAbs().maxCoeff(), 2.0);
}

TEST(Generate, RejectsZeroLengthAndMissingR) {
  EXPECT_THROW(generate(MapParams::defaults(MapKind::Binary), 0), Error);
  try {
    generate(MapParams::defaults(MapKind::Logistic), 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidParam);
  }
}

TEST(Generate, DefaultsUseStandardInitialConditions) {
  EXPECT_EQ(MapParams::defaults(MapKind::Logistic).x0, 0.1);
  EXPECT_EQ(MapParams::defaults(MapKind::Sine).x0, 0.1);
  EXPECT_EQ(MapParams::defaults(MapKind::Planck).x0, 4.0);
  const auto henon = MapParams::defaults(MapKind::Henon);
  EXPECT_EQ(henon.x0, 0.1);
  EXPECT_EQ(henon.y0, 0.1);
  EXPECT_EQ(henon.r1, 0.3);
  EXPECT_EQ(henon.discard, 1000u);
  EXPECT_EQ(MapParams::defaults(MapKind::Random).discard, 0u);
  EXPECT_EQ(MapParams::defaults(MapKind::Binary).discard, 0u);
}

TEST(Generate, FirstStepsMatchTheRecurrences) {
  auto planck = chaotic(MapKind::Planck, 5.0);
  planck.discard = 0;
  EXPECT_DOUBLE_EQ(generate(planck, 1).values(0), 5.0 * 64.0 / (1.0 + std::exp(4.0)));

  auto sine = chaotic(MapKind::Sine, 1.5);
  sine.discard = 0;
  EXPECT_DOUBLE_EQ(generate(sine, 1).values(0), 1.5 * std::sin(std::numbers::pi * 0.1));

  auto henon = chaotic(MapKind::Henon, 1.4);
  henon.discard = 0;
  const auto h = generate(henon, 2).values;
  const double x1 = 1.0 - 1.4 * 0.01 + 0.1;
  EXPECT_DOUBLE_EQ(h(0), x1);
  EXPECT_DOUBLE_EQ(h(1), 1.0 - 1.4 * x1 * x1 + 0.3 * 0.1);
}

TEST(Generate, PeriodicPhaseStartsAtIndexOne) {
  auto p = MapParams::defaults(MapKind::Periodic);
  p.amplitude = 2.0;
  const auto s = generate(p, 19625);
  const double omega = 20.0 * std::numbers::pi / 19625.0;
  EXPECT_DOUBLE_EQ(s.values(0), 2.0 * std::sin(omega));
  EXPECT_DOUBLE_EQ(s.values(999), 2.0 * std::sin(1000.0 * omega));
  EXPECT_NEAR(s.values(19624), 0.0, 1e-12);  // 20 full periods
}

TEST(Generate, RandomIsSeededUniformOnCenteredUnitInterval) {
  auto p = MapParams::defaults(MapKind::Random);
  p.seed = 42;
  const auto a = generate(p, 20000);
  EXPECT_EQ(a.meta.seed, std::optional<std::uint64_t>(42));
  EXPECT_GE(a.values.minCoeff(), -0.5);
  EXPECT_LT(a.values.maxCoeff(), 0.5);
  EXPECT_NEAR(a.values.mean(), 0.0, 0.01);
  p.seed = 43;
  EXPECT_NE(generate(p, 10).values, a.values.head(10));

  EXPECT_EQ(centered_uniform(0), -0.5);
  EXPECT_LT(centered_uniform(std::numeric_limits<std::uint64_t>::max()), 0.5);
  // First mt19937_64 output for the default seed 5489 is fixed by the C++ standard.
  EXPECT_EQ(std::mt19937_64(5489)(), 14514284786278117030ULL);
}

TEST(Generate, PrefixPropertyAndDeterminismForEveryKind) {
  std::vector<MapParams> all{chaotic(MapKind::Logistic, 3.9), chaotic(MapKind::Sine, 1.7),
                             chaotic(MapKind::Planck, 5.5), chaotic(MapKind::Henon, 1.2),
                             MapParams::defaults(MapKind::Random), MapParams::defaults(MapKind::Periodic),
                             MapParams::defaults(MapKind::Binary), MapParams::defaults(MapKind::Constant)};
  for (const auto& p : all) {
    const auto short_run = generate(p, 500);
    const auto long_run = generate(p, 837);
    EXPECT_EQ(short_run.values, long_run.values.head(500)) << to_string(p.kind);
    EXPECT_EQ(generate(p, 500).values, short_run.values) << to_string(p.kind);
  }
}

TEST(Generate, LogisticStaysInUnitInterval) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> r_dist(1.0, 4.0), x_dist(0.001, 0.999);
  for (int trial = 0; trial < 200; ++trial) {
    auto p = chaotic(MapKind::Logistic, r_dist(rng));
    p.x0 = x_dist(rng);
    const auto s = generate(p, 2000);
    ASSERT_GE(s.values.minCoeff(), 0.0);
    ASSERT_LE(s.values.maxCoeff(), 1.0);
  }
}

TEST(SeriesText, ParsesNumbersAndComments) {
  EXPECT_EQ(parse_series("1\n2\n3\n").values, Eigen::Vector3d(1, 2, 3));
  EXPECT_EQ(parse_series("# comment\n0.5 0.25\n").values, Eigen::Vector2d(0.5, 0.25));
  EXPECT_EQ(parse_series("  +1e-3\t-2\r\n").values, Eigen::Vector2d(1e-3, -2));
}

TEST(SeriesText, ReportsLineOfBadToken) {
  for (auto [text, line] : {std::pair{"abc", 1}, std::pair{"1\n# x\n2 3x\n", 3}, std::pair{"nan\n", 1}}) {
    try {
      parse_series(text);
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::ParseError);
      EXPECT_NE(std::string(e.what()).find("line " + std::to_string(line)), std::string::npos) << e.what();
    }
  }
}

TEST(SeriesText, EmptyInput) {
  for (auto text : {"", "# only a comment\n", "\n \n"}) {
    try {
      parse_series(text);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::EmptySeries);
    }
  }
}

TEST(SeriesFile, WritesOneShortestValuePerLine) {
  TimeSeries s;
  s.values = Eigen::Vector2d(1, 0.5);
  const auto path = temp_file("simple.txt");
  write_series(s, path);
  EXPECT_EQ(slurp(path), "1\n0.5\n");
  fs::remove(path);
}

TEST(SeriesFile, LogisticRoundTripIsExact) {
  const auto s = generate(chaotic(MapKind::Logistic, 3.8), kStandardLength);
  const auto path = temp_file("logistic.txt");
  write_series(s, path);
  EXPECT_EQ(read_series(path).values, s.values);
  fs::remove(path);
}

TEST(SeriesFile, RoundTripOfArbitraryFiniteDoubles) {
  std::mt19937_64 rng(99);
  TimeSeries s;
  s.values.resize(2000);
  for (Eigen::Index i = 0; i < s.values.size(); ++i) {
    double v;
    do {
      const auto bits = rng();
      std::memcpy(&v, &bits, sizeof v);
    } while (!std::isfinite(v));
    s.values(i) = v;
  }
  EXPECT_EQ(parse_series(format_series(s)).values, s.values);
}

TEST(SeriesFile, UnwritablePath) {
  TimeSeries s;
  s.values = Eigen::Vector2d(1, 2);
  try {
    write_series(s, "/nonexistent-dir/x/y.txt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IoError);
  }
}
