// Scoring and relative-position metrics: rank-1 accuracy, displacement
// variance of an ordering scatter, and the fitted conversions
// between perturbation scale and displacement variance.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "flockreid/simulate.hpp"

namespace flockreid {

/// Predicted Camera2 appearance orders, one per query. Entries may repeat:
/// predictions are scored as-is, with no de-duplication pass.
using PredictionVector = std::vector<Eigen::Index>;

/// Quadratic fit of displacement variance as a function of perturbation
/// scale, and the matching closed-form inverse. Constants kept verbatim.
inline constexpr double kVarianceFitQuadratic = 0.4827;
inline constexpr double kVarianceFitLinear = 0.01875;
inline constexpr double kVarianceFitConstant = -0.0275;
inline constexpr double kScaleFitOuterGain = 1.036;
inline constexpr double kScaleFitInnerOffset = 0.0534;
inline constexpr double kScaleFitInnerGain = 1.93;
inline constexpr double kScaleFitOuterOffset = -0.0194;

/// Fraction of queries whose prediction equals the true Camera2 order.
inline double rank1_accuracy(const CameraOrdering& truth, std::span<const Eigen::Index> predictions) {
  const Eigen::Index n = truth.size();
  if (std::cmp_not_equal(predictions.size(), n)) {
    throw std::invalid_argument("rank1_accuracy: got " + std::to_string(predictions.size()) +
                                " predictions for " + std::to_string(n) + " queries");
  }
  Eigen::Index hits = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (predictions[i] < 0 || predictions[i] >= n) {
      throw std::out_of_range("rank1_accuracy: prediction " + std::to_string(predictions[i]) +
                              " outside [0, " + std::to_string(n) + ")");
    }
    if (predictions[i] == truth.y[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

/// Mean squared distance of the order scatter (x_i, y_i) to the line y = x:
/// (1/2n) * sum (x_i - y_i)^2, with x_i = i.
inline double displacement_variance(const CameraOrdering& ordering) {
  const Eigen::Index n = ordering.size();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = static_cast<double>(i - ordering.y[i]);
    sum += d * d;
  }
  return sum / (2.0 * static_cast<double>(n));
}

/// Displacement variance predicted by the quadratic fit. Raw fit, no
/// clamping: near scale 0 it dips slightly negative, which delimits the
/// fit's validity interval.
inline double variance_from_scale_fit(double scale) {
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("variance_from_scale_fit: scale must be finite and >= 0");
  }
  return kVarianceFitQuadratic * scale * scale + kVarianceFitLinear * scale + kVarianceFitConstant;
}

/// Perturbation scale recovered from an observed displacement variance via
/// the closed-form inverse of the quadratic fit. Strictly increasing in var.
inline double scale_from_variance(double var) {
  if (!(var >= 0.0) || !std::isfinite(var)) {
    throw std::invalid_argument("scale_from_variance: variance must be finite and >= 0");
  }
  return kScaleFitOuterGain * std::sqrt(kScaleFitInnerOffset + kScaleFitInnerGain * var) +
         kScaleFitOuterOffset;
}

/// Mean of the diagonal over the mean of the off-diagonal of a square grid.
/// Requires order >= 2 (a 1x1 grid has no off-diagonal).
template <typename Derived>
double diagonal_dominance(const Eigen::MatrixBase<Derived>& grid) {
  if (grid.rows() != grid.cols()) {
    throw std::invalid_argument("diagonal_dominance: grid must be square, got " +
                                std::to_string(grid.rows()) + "x" + std::to_string(grid.cols()));
  }
  const Eigen::Index n = grid.rows();
  if (n < 2) {
    throw std::invalid_argument("diagonal_dominance: grid must have order >= 2");
  }
  const double diag_sum = static_cast<double>(grid.diagonal().sum());
  const double total = static_cast<double>(grid.sum());
  const double diag_mean = diag_sum / static_cast<double>(n);
  const double off_mean = (total - diag_sum) / static_cast<double>(n * n - n);
  return diag_mean / off_mean;
}

}  // namespace flockreid
