#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>

#include "nneten/error.hpp"
#include "nneten/reservoir.hpp"

namespace nneten {

inline constexpr Eigen::Index kClassCount = 10;
inline constexpr double kLearningRate = 0.2;
inline constexpr double kInitialWeight = 0.5;

/// W2: one row per digit class, one column per biased hidden input.
template <typename Scalar>
using OutputWeights = Eigen::Matrix<Scalar, kClassCount, kBiasedHiddenCount>;
template <typename Scalar>
using OutputVector = Eigen::Matrix<Scalar, kClassCount, 1>;

template <typename Scalar = double>
OutputWeights<Scalar> init_weights() {
  return OutputWeights<Scalar>::Constant(Scalar(kInitialWeight));
}

template <typename Scalar>
Scalar sigmoid(Scalar z) {
  return Scalar(1) / (Scalar(1) + std::exp(-z));
}

/// z_k = sum_i W2(k, i) * s_i, accumulated in ascending i for every k.
template <typename Scalar, typename Derived>
OutputVector<Scalar> pre_activations(const OutputWeights<Scalar>& weights,
                                     const Eigen::MatrixBase<Derived>& s) {
  OutputVector<Scalar> z = OutputVector<Scalar>::Zero();
  for (Eigen::Index i = 0; i < kBiasedHiddenCount; ++i) {
    const Scalar si = s(i);
    for (Eigen::Index k = 0; k < kClassCount; ++k) z(k) += weights(k, i) * si;
  }
  return z;
}

template <typename Scalar, typename Derived>
OutputVector<Scalar> forward(const OutputWeights<Scalar>& weights, const Eigen::MatrixBase<Derived>& s) {
  return pre_activations(weights, s).unaryExpr([](Scalar z) { return sigmoid(z); });
}

/// Per-sample loss 1/2 * sum_k (t_k - o_k)^2 with a one-hot target.
template <typename Scalar, typename Derived>
Scalar squared_error(const OutputWeights<Scalar>& weights, const Eigen::MatrixBase<Derived>& s,
                     std::uint8_t label) {
  const auto o = forward(weights, s);
  Scalar loss(0);
  for (Eigen::Index k = 0; k < kClassCount; ++k) {
    const Scalar t = k == label ? Scalar(1) : Scalar(0);
    loss += (t - o(k)) * (t - o(k));
  }
  return loss / Scalar(2);
}

/// Online delta rule on one sample:
/// W2(k, i) += lr * (t_k - o_k) * o_k * (1 - o_k) * s_i.
template <typename Scalar, typename Derived>
void train_sample(OutputWeights<Scalar>& weights, const Eigen::MatrixBase<Derived>& s,
                  std::uint8_t label, Scalar learning_rate) {
  const auto o = forward(weights, s);
  OutputVector<Scalar> step;
  for (Eigen::Index k = 0; k < kClassCount; ++k) {
    const Scalar t = k == label ? Scalar(1) : Scalar(0);
    step(k) = learning_rate * (t - o(k)) * o(k) * (Scalar(1) - o(k));
  }
  for (Eigen::Index i = 0; i < kBiasedHiddenCount; ++i) {
    const Scalar si = s(i);
    for (Eigen::Index k = 0; k < kClassCount; ++k) weights(k, i) += step(k) * si;
  }
}

namespace detail {

template <typename Derived>
void check_batch(const Eigen::MatrixBase<Derived>& hidden, std::span<const std::uint8_t> labels) {
  if (hidden.rows() != kBiasedHiddenCount) {
    throw Error(ErrorKind::DimensionMismatch, "hidden batch must have 26 rows");
  }
  if (static_cast<std::size_t>(hidden.cols()) != labels.size()) {
    throw Error(ErrorKind::DimensionMismatch, "hidden batch and label counts differ");
  }
}

}  // namespace detail

/// One pass over the training split in stored order. Sequential by nature.
template <typename Scalar, typename Derived>
void train_epoch(OutputWeights<Scalar>& weights, const Eigen::MatrixBase<Derived>& hidden,
                 std::span<const std::uint8_t> labels, Scalar learning_rate = Scalar(kLearningRate)) {
  detail::check_batch(hidden, labels);
  for (Eigen::Index n = 0; n < hidden.cols(); ++n) {
    train_sample(weights, hidden.col(n), labels[static_cast<std::size_t>(n)], learning_rate);
  }
}

/// Index of the largest component; ties resolve to the lowest index.
template <typename Derived>
Eigen::Index argmax(const Eigen::MatrixBase<Derived>& v) {
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < v.size(); ++k) {
    if (v(k) > v(best)) best = k;
  }
  return best;
}

/// Predicted class for one hidden vector. Uses pre-activations: the
/// sigmoid is monotone, and pre-activations never saturate into ties.
template <typename Scalar, typename Derived>
Eigen::Index predict(const OutputWeights<Scalar>& weights, const Eigen::MatrixBase<Derived>& s) {
  return argmax(pre_activations(weights, s));
}

template <typename Scalar, typename Derived>
std::size_t count_correct(const OutputWeights<Scalar>& weights, const Eigen::MatrixBase<Derived>& hidden,
                          std::span<const std::uint8_t> labels) {
  detail::check_batch(hidden, labels);
  std::size_t correct = 0;
  for (Eigen::Index n = 0; n < hidden.cols(); ++n) {
    if (predict(weights, hidden.col(n)) == labels[static_cast<std::size_t>(n)]) ++correct;
  }
  return correct;
}

/// Fraction of test samples classified correctly.
template <typename Scalar, typename Derived>
double evaluate(const OutputWeights<Scalar>& weights, const Eigen::MatrixBase<Derived>& hidden,
                std::span<const std::uint8_t> labels) {
  if (labels.empty()) throw Error(ErrorKind::InvalidParam, "test split is empty");
  return static_cast<double>(count_correct(weights, hidden, labels)) /
         static_cast<double>(labels.size());
}

}  // namespace nneten
