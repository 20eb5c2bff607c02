#include "nneten/series_gen.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "nneten/error.hpp"

namespace nneten {
namespace fs = std::filesystem;

namespace {

void check_bounded(double value, std::size_t step, MapKind kind) {
  if (!std::isfinite(value) || std::abs(value) > kDivergenceBound) {
    throw Error(ErrorKind::Divergence, std::string(to_string(kind)) + " map diverged at iteration " +
                                           std::to_string(step));
  }
}

std::string describe(const MapParams& p) {
  std::ostringstream out;
  out << to_string(p.kind);
  switch (p.kind) {
    case MapKind::Logistic:
    case MapKind::Sine:
    case MapKind::Planck:
      out << " r=" << format_real(*p.r) << " x0=" << format_real(p.x0);
      break;
    case MapKind::Henon:
      out << " r=" << format_real(*p.r) << " r1=" << format_real(p.r1)
          << " x0=" << format_real(p.x0) << " y0=" << format_real(p.y0);
      break;
    case MapKind::Random:
      out << " seed=" << p.seed;
      break;
    case MapKind::Periodic:
    case MapKind::Constant:
      out << " A=" << format_real(p.amplitude);
      break;
    case MapKind::Binary:
      break;
  }
  out << " discard=" << p.discard;
  return out.str();
}

template <typename Step>
Eigen::VectorXd iterate(std::size_t discard, std::size_t n, Step&& step) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < discard + n; ++i) {
    const double x = step(i);
    if (i >= discard) out(static_cast<Eigen::Index>(i - discard)) = x;
  }
  return out;
}

}  // namespace

std::string_view to_string(MapKind kind) noexcept {
  switch (kind) {
    case MapKind::Logistic: return "logistic";
    case MapKind::Sine: return "sine";
    case MapKind::Planck: return "planck";
    case MapKind::Henon: return "henon";
    case MapKind::Random: return "random";
    case MapKind::Periodic: return "periodic";
    case MapKind::Binary: return "binary";
    case MapKind::Constant: return "constant";
  }
  return "unknown";
}

std::optional<MapKind> parse_map_kind(std::string_view name) noexcept {
  for (auto kind : {MapKind::Logistic, MapKind::Sine, MapKind::Planck, MapKind::Henon,
                    MapKind::Random, MapKind::Periodic, MapKind::Binary, MapKind::Constant}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

bool is_chaotic(MapKind kind) noexcept {
  return kind == MapKind::Logistic || kind == MapKind::Sine || kind == MapKind::Planck ||
         kind == MapKind::Henon;
}

MapParams MapParams::defaults(MapKind kind) {
  MapParams p;
  p.kind = kind;
  p.discard = is_chaotic(kind) ? kChaoticDiscard : 0;
  p.x0 = kind == MapKind::Planck ? 4.0 : 0.1;
  return p;
}

double centered_uniform(std::uint64_t word) noexcept {
  return static_cast<double>(word >> 11) * 0x1.0p-53 - 0.5;
}

TimeSeries generate(const MapParams& params, std::size_t n) {
  if (n < 1) throw Error(ErrorKind::InvalidParam, "series length must be at least 1");
  if (is_chaotic(params.kind) && !(params.r && std::isfinite(*params.r))) {
    throw Error(ErrorKind::InvalidParam,
                std::string(to_string(params.kind)) + " map requires a finite r");
  }
  if (!std::isfinite(params.x0) || !std::isfinite(params.y0) || !std::isfinite(params.r1) ||
      !std::isfinite(params.amplitude)) {
    throw Error(ErrorKind::InvalidParam, "map parameters must be finite");
  }

  TimeSeries series;
  series.meta.source = describe(params);
  series.meta.discard = params.discard;

  const double r = params.r.value_or(0.0);
  switch (params.kind) {
    case MapKind::Logistic: {
      double x = params.x0;
      series.values = iterate(params.discard, n, [&](std::size_t i) {
        x = r * x * (1.0 - x);
        check_bounded(x, i, params.kind);
        return x;
      });
      break;
    }
    case MapKind::Sine: {
      double x = params.x0;
      series.values = iterate(params.discard, n, [&](std::size_t i) {
        x = r * std::sin(std::numbers::pi * x);
        check_bounded(x, i, params.kind);
        return x;
      });
      break;
    }
    case MapKind::Planck: {
      double x = params.x0;
      series.values = iterate(params.discard, n, [&](std::size_t i) {
        x = r * x * x * x / (1.0 + std::exp(x));
        check_bounded(x, i, params.kind);
        return x;
      });
      break;
    }
    case MapKind::Henon: {
      double x = params.x0;
      double y = params.y0;
      series.values = iterate(params.discard, n, [&](std::size_t i) {
        const double next_x = 1.0 - r * x * x + y;
        y = params.r1 * x;
        x = next_x;
        check_bounded(x, i, params.kind);
        check_bounded(y, i, params.kind);
        return x;
      });
      break;
    }
    case MapKind::Random: {
      std::mt19937_64 engine(params.seed);
      series.values = iterate(params.discard, n, [&](std::size_t) { return centered_uniform(engine()); });
      series.meta.seed = params.seed;
      break;
    }
    case MapKind::Periodic: {
      // The 19625 is part of the phase, not a length.
      const double omega = 20.0 * std::numbers::pi / 19625.0;
      series.values = iterate(params.discard, n, [&](std::size_t i) {
        return params.amplitude * std::sin(static_cast<double>(i + 1) * omega);
      });
      break;
    }
    case MapKind::Binary:
      series.values = iterate(params.discard, n,
                              [](std::size_t i) { return static_cast<double>((i + 1) % 2); });
      break;
    case MapKind::Constant:
      series.values = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), params.amplitude);
      break;
  }
  return series;
}

std::string format_real(double value) {
  std::array<char, 32> buffer{};
  const auto result = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  return std::string(buffer.data(), result.ptr);
}

TimeSeries parse_series(std::string_view text, std::string source) {
  std::vector<double> values;
  std::size_t line_number = 0;
  while (!text.empty()) {
    ++line_number;
    const auto eol = text.find('\n');
    auto line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);

    const auto first = line.find_first_not_of(" \t\r\f\v");
    if (first == std::string_view::npos || line[first] == '#') continue;

    std::size_t pos = first;
    while (pos < line.size()) {
      const auto end = std::min(line.find_first_of(" \t\r\f\v", pos), line.size());
      const auto token = line.substr(pos, end - pos);
      // from_chars rejects a leading '+', which is common in exported data.
      const auto digits = token.front() == '+' ? token.substr(1) : token;
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
      if (ec != std::errc{} || ptr != digits.data() + digits.size() || !std::isfinite(value)) {
        throw Error(ErrorKind::ParseError, source + ": line " + std::to_string(line_number) +
                                               ": not a finite number: '" + std::string(token) + "'");
      }
      values.push_back(value);
      pos = line.find_first_not_of(" \t\r\f\v", end);
      if (pos == std::string_view::npos) break;
    }
  }
  if (values.empty()) throw Error(ErrorKind::EmptySeries, source + ": no values");

  TimeSeries series;
  series.values = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  series.meta.source = std::move(source);
  return series;
}

TimeSeries read_series(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_series(buffer.str(), "file:" + path.string());
}

std::string format_series(const TimeSeries& series) {
  std::string out;
  out.reserve(static_cast<std::size_t>(series.size()) * 20);
  for (Eigen::Index i = 0; i < series.size(); ++i) {
    out += format_real(series.values(i));
    out += '\n';
  }
  return out;
}

void write_series(const TimeSeries& series, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  const auto text = format_series(series);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path.string());
}

TimeSeries prefix(const TimeSeries& series, std::size_t n) {
  if (n < 1 || n > static_cast<std::size_t>(series.size())) {
    throw Error(ErrorKind::InvalidParam, "prefix length " + std::to_string(n) +
                                             " outside [1, " + std::to_string(series.size()) + "]");
  }
  TimeSeries out;
  out.values = series.values.head(static_cast<Eigen::Index>(n));
  out.meta = series.meta;
  out.meta.source += " n=" + std::to_string(n);
  return out;
}

}  // namespace nneten
