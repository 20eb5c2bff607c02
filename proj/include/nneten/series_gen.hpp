#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace nneten {

/// Length that exactly fills the standard 25x785 reservoir.
inline constexpr std::size_t kStandardLength = 19625;
/// Iterates dropped from the chaotic maps before sampling starts.
inline constexpr std::size_t kChaoticDiscard = 1000;
/// Any state beyond this magnitude is reported as Divergence.
inline constexpr double kDivergenceBound = 1e10;

struct SeriesMeta {
  std::string source;
  std::optional<std::uint64_t> seed;
  std::size_t discard = 0;

  friend bool operator==(const SeriesMeta&, const SeriesMeta&) = default;
};

struct TimeSeries {
  Eigen::VectorXd values;
  SeriesMeta meta;

  Eigen::Index size() const noexcept { return values.size(); }
};

enum class MapKind { Logistic, Sine, Planck, Henon, Random, Periodic, Binary, Constant };

std::string_view to_string(MapKind kind) noexcept;
std::optional<MapKind> parse_map_kind(std::string_view name) noexcept;
/// True for the four iterated maps that take a control parameter r.
bool is_chaotic(MapKind kind) noexcept;

struct MapParams {
  MapKind kind = MapKind::Logistic;
  std::optional<double> r;  // required by the chaotic maps
  double r1 = 0.3;          // Henon y-coupling
  double amplitude = 1.0;   // periodic and constant maps
  std::uint64_t seed = 5489;
  double x0 = 0.1;
  double y0 = 0.1;
  std::size_t discard = 0;

  /// Standard initial conditions and transient length for `kind`.
  static MapParams defaults(MapKind kind);
};

/// Iterates the map, drops `params.discard` samples and returns the next `n`.
TimeSeries generate(const MapParams& params, std::size_t n);

/// Uniform draw in [-0.5, 0.5) from the 53 high bits of a 64-bit word.
double centered_uniform(std::uint64_t word) noexcept;

TimeSeries read_series(const std::filesystem::path& path);
TimeSeries parse_series(std::string_view text, std::string source = "text");
void write_series(const TimeSeries& series, const std::filesystem::path& path);
std::string format_series(const TimeSeries& series);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_real(double value);

/// First `n` samples (n <= size).
TimeSeries prefix(const TimeSeries& series, std::size_t n);

}  // namespace nneten
