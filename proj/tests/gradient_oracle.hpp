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

// Test-only oracle for the softmax-regression objective: plain loops over
// std::vector, no Eigen expressions, plus central finite differences.

#include <algorithm>
#include <cmath>
#include <vector>

#include "al/classifier.hpp"
#include "al/rng.hpp"

namespace al::oracle {

struct Instance {
  LinearHeadd head;
  Eigen::MatrixXd x;
  std::vector<int> y;
  double l2 = 0.0;
};

inline Instance random_instance(Rng& rng, int n, int d, int k) {
  Instance inst;
  std::vector<std::string> labels;
  for (int c = 0; c < k; ++c) labels.push_back("c" + std::to_string(c));
  inst.head = LinearHeadd::zero(labels, d);
  for (int r = 0; r < k; ++r) {
    inst.head.bias[r] = standard_normal(rng);
    for (int c = 0; c < d; ++c) inst.head.weights(r, c) = standard_normal(rng);
  }
  inst.x.resize(n, d);
  for (int i = 0; i < n; ++i) {
    inst.y.push_back(static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(k))));
    for (int j = 0; j < d; ++j) inst.x(i, j) = standard_normal(rng);
  }
  inst.l2 = uniform_unit(rng) < 0.5 ? 0.0 : uniform_unit(rng);
  return inst;
}

inline double loss(const Instance& inst) {
  const auto& w = inst.head.weights;
  const auto& b = inst.head.bias;
  const int n = static_cast<int>(inst.x.rows());
  const int k = static_cast<int>(w.rows());
  const int d = static_cast<int>(w.cols());
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    std::vector<double> z(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
      double s = b[c];
      for (int j = 0; j < d; ++j) s += w(c, j) * inst.x(i, j);
      z[static_cast<std::size_t>(c)] = s;
    }
    const double m = *std::max_element(z.begin(), z.end());
    double se = 0.0;
    for (double v : z) se += std::exp(v - m);
    total += m + std::log(se) - z[static_cast<std::size_t>(inst.y[static_cast<std::size_t>(i)])];
  }
  double sq = 0.0;
  for (int c = 0; c < k; ++c) {
    for (int j = 0; j < d; ++j) sq += w(c, j) * w(c, j);
  }
  return total / n + 0.5 * inst.l2 * sq;
}

struct Gradient {
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;
};

inline Gradient central_difference(Instance inst, double h) {
  Gradient g{Eigen::MatrixXd::Zero(inst.head.weights.rows(), inst.head.weights.cols()),
             Eigen::VectorXd::Zero(inst.head.bias.size())};
  for (Eigen::Index r = 0; r < inst.head.weights.rows(); ++r) {
    for (Eigen::Index c = 0; c < inst.head.weights.cols(); ++c) {
      const double saved = inst.head.weights(r, c);
      inst.head.weights(r, c) = saved + h;
      const double up = loss(inst);
      inst.head.weights(r, c) = saved - h;
      const double down = loss(inst);
      inst.head.weights(r, c) = saved;
      g.weights(r, c) = (up - down) / (2 * h);
    }
  }
  for (Eigen::Index r = 0; r < inst.head.bias.size(); ++r) {
    const double saved = inst.head.bias[r];
    inst.head.bias[r] = saved + h;
    const double up = loss(inst);
    inst.head.bias[r] = saved - h;
    const double down = loss(inst);
    inst.head.bias[r] = saved;
    g.bias[r] = (up - down) / (2 * h);
  }
  return g;
}

/// ||analytic - numeric|| / max(||analytic||, ||numeric||, 1e-12) over all
/// parameters.
inline double relative_error(const LossAndGrad<double>& analytic, const Gradient& numeric) {
  const double diff = std::sqrt((analytic.grad_weights - numeric.weights).squaredNorm() +
                                (analytic.grad_bias - numeric.bias).squaredNorm());
  const double a = std::sqrt(analytic.grad_weights.squaredNorm() + analytic.grad_bias.squaredNorm());
  const double b = std::sqrt(numeric.weights.squaredNorm() + numeric.bias.squaredNorm());
  return diff / std::max({a, b, 1e-12});
}

}  // namespace al::oracle
