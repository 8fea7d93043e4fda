// Copyright 2026 The Active Annotation Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "al/error.hpp"

namespace al {

class Corpus;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Softmax-regression head: logits = weights * x + bias.
/// Row i of `weights` scores `label_order[i]`.
template <typename Scalar>
struct LinearHead {
  Mat<Scalar> weights;  // K x D
  Vec<Scalar> bias;     // K
  std::vector<std::string> label_order;

  static LinearHead zero(std::vector<std::string> labels, Eigen::Index dim) {
    if (labels.size() < 2) throw ValidationError("a linear head needs at least two classes");
    if (dim < 1) throw ValidationError("a linear head needs dimension at least 1");
    const auto k = static_cast<Eigen::Index>(labels.size());
    return {Mat<Scalar>::Zero(k, dim), Vec<Scalar>::Zero(k), std::move(labels)};
  }

  Eigen::Index num_classes() const { return weights.rows(); }
  Eigen::Index dim() const { return weights.cols(); }

  bool operator==(const LinearHead&) const = default;
};

using LinearHeadd = LinearHead<double>;

struct TrainConfig {
  double learning_rate = 0.5;
  int max_epochs = 500;
  double loss_tolerance = 1e-7;  // relative loss decrease
  double l2_lambda = 1e-3;

  void validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
      throw ValidationError("learning_rate must be positive");
    }
    if (max_epochs < 1) throw ValidationError("max_epochs must be positive");
    if (!(loss_tolerance > 0.0)) throw ValidationError("loss_tolerance must be positive");
    if (!(l2_lambda >= 0.0) || !std::isfinite(l2_lambda)) {
      throw ValidationError("l2_lambda must be non-negative");
    }
  }

  bool operator==(const TrainConfig&) const = default;
};

/// Shift-stable softmax of one logit vector.
template <typename Derived>
Vec<typename Derived::Scalar> softmax(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  Vec<Scalar> p = (logits.array() - logits.maxCoeff()).exp().matrix();
  return p / p.sum();
}

/// N x K logits, one row per row of `x`.
template <typename Scalar, typename Derived>
Mat<Scalar> predict_logits(const LinearHead<Scalar>& head, const Eigen::MatrixBase<Derived>& x) {
  if (x.rows() > 0 && x.cols() != head.dim()) {
    throw ValidationError("dimension mismatch: head expects " + std::to_string(head.dim()) +
                          ", input has " + std::to_string(x.cols()));
  }
  if (x.rows() == 0) return Mat<Scalar>(0, head.num_classes());
  return (x * head.weights.transpose()).rowwise() + head.bias.transpose();
}

/// Index of the largest entry; ties go to the lowest index.
template <typename Derived>
Eigen::Index argmax(const Eigen::DenseBase<Derived>& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = i;
  }
  return best;
}

template <typename Scalar>
struct LossAndGrad {
  Scalar loss;
  Mat<Scalar> grad_weights;
  Vec<Scalar> grad_bias;
};

/// Mean cross-entropy plus (l2_lambda / 2) * ||weights||_F^2. The bias is not
/// regularized.
template <typename Scalar, typename Derived>
LossAndGrad<Scalar> loss_and_grad(const LinearHead<Scalar>& head,
                                  const Eigen::MatrixBase<Derived>& x,
                                  std::span<const int> y, Scalar l2_lambda) {
  const Eigen::Index n = x.rows();
  const Eigen::Index k = head.num_classes();
  if (n < 1) throw ValidationError("loss_and_grad needs at least one example");
  if (static_cast<std::size_t>(n) != y.size()) {
    throw ValidationError("dimension mismatch: " + std::to_string(n) + " rows, " +
                          std::to_string(y.size()) + " labels");
  }
  if (head.bias.size() != k) throw ValidationError("dimension mismatch: bias length");

  Mat<Scalar> logits = predict_logits(head, x);
  Mat<Scalar> residual(n, k);  // softmax - one_hot
  Scalar data_loss(0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int label = y[static_cast<std::size_t>(i)];
    if (label < 0 || label >= k) throw ValidationError("label index out of range");
    const Scalar top = logits.row(i).maxCoeff();
    const auto shifted = (logits.row(i).array() - top).exp();
    const Scalar total = shifted.sum();
    data_loss += std::log(total) + top - logits(i, label);
    residual.row(i) = shifted / total;
    residual(i, label) -= Scalar(1);
  }
  const Scalar inv_n = Scalar(1) / static_cast<Scalar>(n);
  LossAndGrad<Scalar> out;
  out.loss = data_loss * inv_n + l2_lambda / Scalar(2) * head.weights.squaredNorm();
  out.grad_weights = residual.transpose() * x * inv_n + l2_lambda * head.weights;
  out.grad_bias = residual.colwise().sum().transpose() * inv_n;
  return out;
}

template <typename Scalar>
struct TrainResult {
  LinearHead<Scalar> head;
  std::vector<Scalar> loss_history;  // initial loss, then one entry per accepted step
};

/// Full-batch gradient descent from a zero head. A step that raises the loss
/// is halved and retried up to 30 times; the learning rate is restored at the
/// start of every epoch. Stops after max_epochs, when no halving lowers the
/// loss, or when the relative decrease drops below loss_tolerance.
template <typename Scalar, typename Derived>
TrainResult<Scalar> train_head_logged(const Eigen::MatrixBase<Derived>& x, std::span<const int> y,
                                      std::vector<std::string> label_order,
                                      const TrainConfig& config) {
  config.validate();
  if (x.rows() == 0) throw ValidationError("cannot train on an empty training set");
  constexpr int kMaxHalvings = 30;
  const auto l2 = static_cast<Scalar>(config.l2_lambda);

  TrainResult<Scalar> result{LinearHead<Scalar>::zero(std::move(label_order), x.cols()), {}};
  LossAndGrad<Scalar> current = loss_and_grad(result.head, x, y, l2);
  if (!std::isfinite(current.loss)) throw ValidationError("non-finite initial loss");
  result.loss_history.push_back(current.loss);

  LinearHead<Scalar> candidate = result.head;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    auto step = static_cast<Scalar>(config.learning_rate);
    bool accepted = false;
    LossAndGrad<Scalar> next;
    for (int attempt = 0; attempt <= kMaxHalvings; ++attempt) {
      candidate.weights = result.head.weights - step * current.grad_weights;
      candidate.bias = result.head.bias - step * current.grad_bias;
      next = loss_and_grad(candidate, x, y, l2);
      if (std::isfinite(next.loss) && next.loss <= current.loss) {
        accepted = true;
        break;
      }
      step /= Scalar(2);
    }
    if (!accepted) break;
    const Scalar decrease = current.loss - next.loss;
    const Scalar scale = std::max(std::abs(current.loss), std::numeric_limits<Scalar>::min());
    std::swap(result.head.weights, candidate.weights);
    std::swap(result.head.bias, candidate.bias);
    current = std::move(next);
    result.loss_history.push_back(current.loss);
    if (decrease / scale < static_cast<Scalar>(config.loss_tolerance)) break;
  }
  return result;
}

template <typename Scalar, typename Derived>
LinearHead<Scalar> train_head(const Eigen::MatrixBase<Derived>& x, std::span<const int> y,
                              std::vector<std::string> label_order, const TrainConfig& config) {
  return train_head_logged<Scalar>(x, y, std::move(label_order), config).head;
}

struct ClassMetrics {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long support = 0;
};

struct Metrics {
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  std::vector<ClassMetrics> per_class;
  Eigen::MatrixXi confusion;  // rows: gold, cols: predicted
};

/// Metrics from a K x K confusion matrix (rows gold, columns predicted).
/// Precision, recall and F1 are 0 when their denominators vanish.
Metrics metrics_from_confusion(const Eigen::MatrixXi& confusion,
                               const std::vector<std::string>& labels);

/// Argmax predictions of `head` on rows of `x`, scored against `gold`.
Metrics evaluate(const LinearHeadd& head, const Eigen::MatrixXd& x, std::span<const int> gold);

/// Evaluates on corpus documents by id, using their gold labels.
Metrics evaluate(const LinearHeadd& head, const Corpus& corpus, std::span<const std::string> ids);

}  // namespace al
