#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string_view>
#include <vector>

#include "nneten/error.hpp"

namespace nneten {

/// How the `rr` factor becomes a distance threshold.
enum class ToleranceMode {
  StdScaled,  // rr * population standard deviation
  Absolute,   // rr as given, in units of the series
};

enum class EstimateFlag { None, ZeroVariance, NoMatches };

struct Estimate {
  double value = 0.0;
  EstimateFlag flag = EstimateFlag::None;
};

std::string_view to_string(EstimateFlag flag) noexcept;

template <typename Derived>
double population_sd(const Eigen::MatrixBase<Derived>& x) {
  const double mean = x.mean();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) sum += (x(i) - mean) * (x(i) - mean);
  return std::sqrt(sum / static_cast<double>(x.size()));
}

namespace detail {

template <typename Derived>
double tolerance(const Eigen::MatrixBase<Derived>& x, double rr, ToleranceMode mode) {
  if (!(rr > 0.0) || !std::isfinite(rr)) throw Error(ErrorKind::InvalidParam, "rr must be positive");
  return mode == ToleranceMode::Absolute ? rr : rr * population_sd(x);
}

template <typename Derived>
void check_embedding(const Eigen::MatrixBase<Derived>& x, int m) {
  if (m < 1) throw Error(ErrorKind::InvalidParam, "embedding dimension m must be >= 1");
  if (x.size() <= m + 1) {
    throw Error(ErrorKind::TooShort, "series needs more than m + 1 samples");
  }
}

// Chebyshev distance between the length-m windows at i and j is <= tol.
template <typename Derived>
bool windows_match(const Eigen::MatrixBase<Derived>& x, Eigen::Index i, Eigen::Index j, int m, double tol) {
  for (int k = 0; k < m; ++k) {
    if (std::abs(x(i + k) - x(j + k)) > tol) return false;
  }
  return true;
}

}  // namespace detail

/// Approximate entropy, Phi^m - Phi^(m+1), self-matches counted.
template <typename Derived>
Estimate ap_en(const Eigen::MatrixBase<Derived>& x, int m, double rr,
               ToleranceMode mode = ToleranceMode::StdScaled) {
  detail::check_embedding(x, m);
  const double tol = detail::tolerance(x, rr, mode);
  if (tol == 0.0) return {0.0, EstimateFlag::ZeroVariance};

  const Eigen::Index n = x.size();
  const Eigen::Index short_windows = n - m + 1;
  const Eigen::Index long_windows = n - m;
  double phi_short = 0.0;
  double phi_long = 0.0;
  for (Eigen::Index i = 0; i < short_windows; ++i) {
    std::int64_t short_count = 0;
    std::int64_t long_count = 0;
    for (Eigen::Index j = 0; j < short_windows; ++j) {
      if (!detail::windows_match(x, i, j, m, tol)) continue;
      ++short_count;
      if (i < long_windows && j < long_windows && std::abs(x(i + m) - x(j + m)) <= tol) ++long_count;
    }
    phi_short += std::log(static_cast<double>(short_count) / static_cast<double>(short_windows));
    if (i < long_windows) {
      phi_long += std::log(static_cast<double>(long_count) / static_cast<double>(long_windows));
    }
  }
  phi_short /= static_cast<double>(short_windows);
  phi_long /= static_cast<double>(long_windows);
  return {phi_short - phi_long, EstimateFlag::None};
}

/// Sample entropy, -ln(A/B) over the first N - m templates, self-matches excluded.
template <typename Derived>
Estimate samp_en(const Eigen::MatrixBase<Derived>& x, int m, double rr,
                 ToleranceMode mode = ToleranceMode::StdScaled) {
  detail::check_embedding(x, m);
  const double tol = detail::tolerance(x, rr, mode);
  if (tol == 0.0) return {0.0, EstimateFlag::ZeroVariance};

  const Eigen::Index templates = x.size() - m;
  std::int64_t b = 0;
  std::int64_t a = 0;
  for (Eigen::Index i = 0; i < templates; ++i) {
    for (Eigen::Index j = i + 1; j < templates; ++j) {
      if (!detail::windows_match(x, i, j, m, tol)) continue;
      ++b;
      if (std::abs(x(i + m) - x(j + m)) <= tol) ++a;
    }
  }
  if (a == 0 || b == 0) return {std::numeric_limits<double>::infinity(), EstimateFlag::NoMatches};
  // + 0.0 turns -0.0 into 0.0.
  return {-std::log(static_cast<double>(a) / static_cast<double>(b)) + 0.0, EstimateFlag::None};
}

/// Ordinal pattern of the window starting at `start` as a Lehmer-code index
/// in [0, m!). Equal amplitudes rank the earlier sample lower.
template <typename Derived>
std::int64_t ordinal_pattern(const Eigen::MatrixBase<Derived>& x, Eigen::Index start, int m, int d) {
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return x(start + a * d) < x(start + b * d); });
  std::int64_t code = 0;
  for (int i = 0; i < m; ++i) {
    int smaller_after = 0;
    for (int j = i + 1; j < m; ++j) smaller_after += order[static_cast<std::size_t>(j)] < order[static_cast<std::size_t>(i)] ? 1 : 0;
    code = code * (m - i) + smaller_after;
  }
  return code;
}

/// Permutation entropy normalized by ln(m!) into [0, 1].
template <typename Derived>
Estimate perm_en(const Eigen::MatrixBase<Derived>& x, int m, int d = 1) {
  if (m < 2 || m > 10) throw Error(ErrorKind::InvalidParam, "permutation order m must be in [2, 10]");
  if (d < 1) throw Error(ErrorKind::InvalidParam, "delay d must be >= 1");
  const Eigen::Index span = static_cast<Eigen::Index>(m - 1) * d;
  if (x.size() <= span) throw Error(ErrorKind::TooShort, "series needs more than (m - 1) * d samples");

  std::int64_t factorial = 1;
  for (int k = 2; k <= m; ++k) factorial *= k;
  std::vector<std::int64_t> histogram(static_cast<std::size_t>(factorial), 0);
  const Eigen::Index windows = x.size() - span;
  for (Eigen::Index i = 0; i < windows; ++i) ++histogram[static_cast<std::size_t>(ordinal_pattern(x, i, m, d))];

  double entropy = 0.0;
  for (auto count : histogram) {
    if (count == 0) continue;
    const double p = static_cast<double>(count) / static_cast<double>(windows);
    entropy -= p * std::log(p);
  }
  return {entropy / std::log(static_cast<double>(factorial)) + 0.0, EstimateFlag::None};
}

}  // namespace nneten
