#pragma once

#include "light4d/types.hpp"

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace light4d {

struct TcaConfig {
  int radius = 2;
  double window_sigma = 1.0;
  double gamma = 0.7;
  bool normalize_weights = true;

  void validate() const;
};

// Row-wise softmax(Q K^T / sqrt(d)) V for a single frame. Rows are tokens.
template <typename DQ, typename DK, typename DV>
Eigen::Matrix<typename DQ::Scalar, Eigen::Dynamic, Eigen::Dynamic> attention(
    const Eigen::MatrixBase<DQ>& q, const Eigen::MatrixBase<DK>& k, const Eigen::MatrixBase<DV>& v) {
  using Scalar = typename DQ::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (q.cols() == 0) throw std::invalid_argument("attention: feature dimension is zero");
  if (q.cols() != k.cols() || k.rows() != v.rows()) {
    throw std::invalid_argument("attention: Q/K/V dimensions disagree");
  }
  Matrix scores = (q * k.transpose()) / std::sqrt(static_cast<Scalar>(q.cols()));
  // Subtracting the row max keeps exp() in range without changing the result.
  scores.colwise() -= scores.rowwise().maxCoeff();
  scores = scores.array().exp().matrix();
  scores.array().colwise() /= scores.array().rowwise().sum();
  return scores * v;
}

// Softmax weights alone, exposed for row-sum checks.
template <typename DQ, typename DK>
Eigen::Matrix<typename DQ::Scalar, Eigen::Dynamic, Eigen::Dynamic> attention_weights(
    const Eigen::MatrixBase<DQ>& q, const Eigen::MatrixBase<DK>& k) {
  using Scalar = typename DQ::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Matrix scores = (q * k.transpose()) / std::sqrt(static_cast<Scalar>(q.cols()));
  scores.colwise() -= scores.rowwise().maxCoeff();
  scores = scores.array().exp().matrix();
  scores.array().colwise() /= scores.array().rowwise().sum();
  return scores;
}

// Temporal window weights for frame f of a sequence of F frames: entry j is
// exp(-(f-j)^2 / (2 sigma^2)) for |f - j| <= radius, 0 elsewhere. Normalized
// to sum to one over the in-range frames when requested.
std::vector<double> temporal_window(int f, int frames, int radius, double sigma, bool normalize);

struct SmoothedContext {
  FeatureSequence keys;
  FeatureSequence values;
};

SmoothedContext smooth_context(const FeatureSequence& keys, const FeatureSequence& values,
                               const TcaConfig& cfg);

struct AttentionOutput {
  FeatureSequence out;
  FeatureSequence orig;
  FeatureSequence cons;
};

// Dual path: orig attends each frame's query to its own keys/values, cons to
// the temporally smoothed context; out = orig + gamma * (cons - orig).
AttentionOutput tca_forward(const FeatureSequence& queries, const FeatureSequence& keys,
                            const FeatureSequence& values, const TcaConfig& cfg);

}  // namespace light4d
