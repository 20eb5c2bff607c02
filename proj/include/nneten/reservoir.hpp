#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "nneten/error.hpp"
#include "nneten/mnist_io.hpp"

namespace nneten {

/// Hidden neurons (reservoir rows).
inline constexpr Eigen::Index kHiddenCount = 25;
/// Reservoir columns: one bias input followed by 784 pixels.
inline constexpr Eigen::Index kInputCount = 785;
/// Hidden vector as seen by the output layer: 25 activations plus a bias.
inline constexpr Eigen::Index kBiasedHiddenCount = kHiddenCount + 1;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct ReservoirMatrix {
  MatrixX<Scalar> weights;
  std::size_t series_length = 0;
  std::size_t zero_padded = 0;
  std::size_t ignored = 0;

  Eigen::Index rows() const noexcept { return weights.rows(); }
  Eigen::Index cols() const noexcept { return weights.cols(); }
};

/// Permutation of the 784 pixel positions: pixel i lands in input slot
/// `(*this)(i) + 1`. Identity unless a different traversal is supplied.
class PixelPattern {
 public:
  static PixelPattern identity() {
    PixelPattern p;
    p.order_.resize(mnist::kPixelsPerImage);
    for (std::size_t i = 0; i < p.order_.size(); ++i) p.order_[i] = static_cast<int>(i);
    p.id_ = "identity";
    return p;
  }

  static PixelPattern from_order(std::vector<int> order, std::string id) {
    if (order.size() != mnist::kPixelsPerImage) {
      throw Error(ErrorKind::InvalidParam, "pixel pattern must have 784 entries");
    }
    std::vector<bool> seen(order.size(), false);
    for (int slot : order) {
      if (slot < 0 || static_cast<std::size_t>(slot) >= order.size() || seen[static_cast<std::size_t>(slot)]) {
        throw Error(ErrorKind::InvalidParam, "pixel pattern is not a permutation of 0..783");
      }
      seen[static_cast<std::size_t>(slot)] = true;
    }
    PixelPattern p;
    p.order_ = std::move(order);
    p.id_ = std::move(id);
    return p;
  }

  int operator()(std::size_t pixel) const { return order_[pixel]; }
  const std::string& id() const noexcept { return id_; }

 private:
  PixelPattern() = default;
  std::vector<int> order_;
  std::string id_;
};

/// Column-by-column reservoir fill.
///
/// A series at least rows*cols long loses its leading surplus and tiles the
/// matrix exactly. A shorter series is copied down successive columns; when
/// it runs out mid-column the rest of that column is zero and the next
/// column restarts from the first sample.
template <typename Derived>
ReservoirMatrix<typename Derived::Scalar> fill_matrix(const Eigen::MatrixBase<Derived>& series,
                                                      Eigen::Index rows = kHiddenCount,
                                                      Eigen::Index cols = kInputCount) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = series.size();
  if (n < 1) throw Error(ErrorKind::EmptySeries, "cannot fill a reservoir from an empty series");
  if (rows < 1 || cols < 1) throw Error(ErrorKind::InvalidParam, "reservoir dimensions must be positive");

  ReservoirMatrix<Scalar> out;
  out.series_length = static_cast<std::size_t>(n);
  out.weights.resize(rows, cols);
  const Eigen::Index cells = rows * cols;

  if (n >= cells) {
    const Eigen::Index skip = n - cells;
    out.ignored = static_cast<std::size_t>(skip);
    for (Eigen::Index col = 0; col < cols; ++col) {
      out.weights.col(col) = series.derived().segment(skip + col * rows, rows);
    }
    return out;
  }

  Eigen::Index next = 0;
  for (Eigen::Index col = 0; col < cols; ++col) {
    for (Eigen::Index row = 0; row < rows; ++row) {
      if (next < n) {
        out.weights(row, col) = series(next++);
      } else {
        out.weights(row, col) = Scalar(0);
        ++out.zero_padded;
      }
    }
    if (next >= n) next = 0;
  }
  return out;
}

namespace detail {

template <typename Scalar>
void scatter_input(mnist::Image image, const PixelPattern& pattern, VectorX<Scalar>& y) {
  y.resize(kInputCount);
  y(0) = Scalar(1);
  for (std::size_t i = 0; i < mnist::kPixelsPerImage; ++i) {
    y(pattern(i) + 1) = static_cast<Scalar>(image[i]) / Scalar(255);
  }
}

inline void check_standard_shape(Eigen::Index rows, Eigen::Index cols) {
  if (cols != kInputCount) {
    throw Error(ErrorKind::DimensionMismatch,
                "reservoir has " + std::to_string(cols) + " columns, expected 785");
  }
  if (rows < 1) throw Error(ErrorKind::DimensionMismatch, "reservoir has no rows");
}

}  // namespace detail

/// Input vector Y: bias 1 followed by pixels/255 placed per `pattern`.
template <typename Scalar = double>
VectorX<Scalar> input_vector(mnist::Image image, const PixelPattern& pattern = PixelPattern::identity()) {
  VectorX<Scalar> y;
  detail::scatter_input(image, pattern, y);
  return y;
}

/// S_h = W1 * Y for one image.
template <typename Scalar>
VectorX<Scalar> raw_activations(const ReservoirMatrix<Scalar>& reservoir, mnist::Image image,
                                const PixelPattern& pattern) {
  detail::check_standard_shape(reservoir.rows(), reservoir.cols());
  return reservoir.weights * input_vector<Scalar>(image, pattern);
}

/// Raw activations of every image, one column per image. Each column is
/// computed exactly as `raw_activations` would compute it alone.
template <typename Scalar>
MatrixX<Scalar> compute_activations(const ReservoirMatrix<Scalar>& reservoir,
                                    const mnist::ImageSet& images, const PixelPattern& pattern) {
  detail::check_standard_shape(reservoir.rows(), reservoir.cols());
  MatrixX<Scalar> out(reservoir.rows(), static_cast<Eigen::Index>(images.size()));
  VectorX<Scalar> y;
  for (std::size_t i = 0; i < images.size(); ++i) {
    detail::scatter_input(images[i], pattern, y);
    out.col(static_cast<Eigen::Index>(i)).noalias() = reservoir.weights * y;
  }
  return out;
}

template <typename Scalar>
struct NormCoeffs {
  VectorX<Scalar> min;
  VectorX<Scalar> max;

  bool degenerate(Eigen::Index j) const { return !(max(j) > min(j)); }
  Eigen::Index degenerate_count() const {
    Eigen::Index count = 0;
    for (Eigen::Index j = 0; j < min.size(); ++j) count += degenerate(j) ? 1 : 0;
    return count;
  }
};

/// Per-neuron min and max over cached activations (one column per image).
template <typename Derived>
NormCoeffs<typename Derived::Scalar> compute_norm_coeffs(const Eigen::MatrixBase<Derived>& activations) {
  if (activations.cols() == 0) {
    throw Error(ErrorKind::InvalidParam, "normalization needs at least one training image");
  }
  return {activations.rowwise().minCoeff(), activations.rowwise().maxCoeff()};
}

template <typename Scalar>
NormCoeffs<Scalar> compute_norm_coeffs(const ReservoirMatrix<Scalar>& reservoir,
                                       const mnist::ImageSet& train_images,
                                       const PixelPattern& pattern) {
  return compute_norm_coeffs(compute_activations(reservoir, train_images, pattern));
}

/// (raw - min) / (max - min) per neuron; degenerate neurons map to 0. Not clamped.
template <typename Derived>
VectorX<typename Derived::Scalar> normalize(const Eigen::MatrixBase<Derived>& raw,
                                            const NormCoeffs<typename Derived::Scalar>& coeffs) {
  using Scalar = typename Derived::Scalar;
  if (raw.size() != coeffs.min.size()) {
    throw Error(ErrorKind::DimensionMismatch, "activation and coefficient sizes differ");
  }
  VectorX<Scalar> out(raw.size());
  for (Eigen::Index j = 0; j < raw.size(); ++j) {
    out(j) = coeffs.degenerate(j) ? Scalar(0)
                                  : (raw(j) - coeffs.min(j)) / (coeffs.max(j) - coeffs.min(j));
  }
  return out;
}

/// Normalizes every column and appends the constant hidden bias as the last row.
template <typename Derived>
MatrixX<typename Derived::Scalar> normalize_with_bias(const Eigen::MatrixBase<Derived>& raw,
                                                      const NormCoeffs<typename Derived::Scalar>& coeffs) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index hidden = raw.rows();
  MatrixX<Scalar> out(hidden + 1, raw.cols());
  for (Eigen::Index i = 0; i < raw.cols(); ++i) {
    out.col(i).head(hidden) = normalize(raw.col(i), coeffs);
    out(hidden, i) = Scalar(1);
  }
  return out;
}

}  // namespace nneten
