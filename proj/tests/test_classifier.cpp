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

#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"

#include "al/classifier.hpp"
#include "al/corpus.hpp"
#include "al/rng.hpp"
#include "gradient_oracle.hpp"

using namespace al;

TEST_CASE("softmax") {
  SUBCASE("uniform") {
    const auto p = softmax(Eigen::Vector3d::Zero());
    for (int i = 0; i < 3; ++i) CHECK(p[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("large logits do not overflow") {
    const auto p = softmax(Eigen::Vector2d(1000.0, 0.0));
    CHECK(p.allFinite());
    CHECK(p[0] == doctest::Approx(1.0));
    CHECK(p[1] < 1e-300);
  }
  SUBCASE("sums to one, positive, shift invariant") {
    Rng rng(11);
    for (int trial = 0; trial < 500; ++trial) {
      const auto k = 2 + static_cast<Eigen::Index>(uniform_below(rng, 6));
      Eigen::VectorXd x(k);
      for (Eigen::Index i = 0; i < k; ++i) x[i] = 10.0 * standard_normal(rng);
      const auto p = softmax(x);
      CHECK(std::abs(p.sum() - 1.0) <= 1e-12);
      CHECK((p.array() > 0.0).all());
      const auto q = softmax((x.array() + 7.0).matrix());
      CHECK((p - q).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
  SUBCASE("works for float") {
    const auto p = softmax(Eigen::Vector2f(0.0f, 0.0f));
    CHECK(p[0] == doctest::Approx(0.5f));
  }
}

TEST_CASE("predict_logits") {
  SUBCASE("zero head") {
    const auto head = LinearHeadd::zero({"a", "b", "c"}, 4);
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(5, 4);
    CHECK(predict_logits(head, x).isZero(0.0));
  }
  SUBCASE("identity head") {
    auto head = LinearHeadd::zero({"a", "b", "c"}, 3);
    head.weights.setIdentity();
    const Eigen::RowVector3d e2(0.0, 1.0, 0.0);
    const Eigen::MatrixXd logits = predict_logits(head, e2);
    CHECK(logits.row(0) == e2);
  }
  SUBCASE("empty input") {
    const auto head = LinearHeadd::zero({"a", "b"}, 3);
    const Eigen::MatrixXd logits = predict_logits(head, Eigen::MatrixXd(0, 3));
    CHECK(logits.rows() == 0);
    CHECK(logits.cols() == 2);
  }
  SUBCASE("dimension mismatch") {
    const auto head = LinearHeadd::zero({"a", "b"}, 3);
    CHECK_THROWS_AS(predict_logits(head, Eigen::MatrixXd::Zero(2, 4)), ValidationError);
  }
  CHECK_THROWS_AS(LinearHeadd::zero({"only"}, 3), ValidationError);
}

TEST_CASE("argmax ties go to the lowest index") {
  CHECK(argmax(Eigen::Vector3d(1.0, 1.0, 0.0)) == 0);
  CHECK(argmax(Eigen::Vector3d(0.0, 2.0, 2.0)) == 1);
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd x(4);
    for (int i = 0; i < 4; ++i) x[i] = static_cast<double>(uniform_below(rng, 3));
    CHECK(argmax(x) == argmax((x.array() + 123.0).matrix()));
  }
}

TEST_CASE("loss_and_grad") {
  SUBCASE("zero head gives ln K") {
    const auto head = LinearHeadd::zero({"a", "b", "c"}, 4);
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(6, 4);
    const std::vector<int> y = {0, 1, 2, 0, 1, 2};
    CHECK(loss_and_grad(head, x, y, 0.0).loss == doctest::Approx(std::log(3.0)).epsilon(1e-14));
    // The regularizer vanishes at zero weights.
    CHECK(loss_and_grad(head, x, y, 0.7).loss == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  }
  SUBCASE("matches the independent loop oracle and finite differences") {
    Rng rng(2024);
    for (int trial = 0; trial < 25; ++trial) {
      const auto inst = oracle::random_instance(rng, 5, 4, 3);
      const auto lg = loss_and_grad(inst.head, inst.x, inst.y, inst.l2);
      CHECK(lg.loss == doctest::Approx(oracle::loss(inst)).epsilon(1e-12));
      const auto fd = oracle::central_difference(inst, 1e-5);
      CHECK(oracle::relative_error(lg, fd) <= 1e-6);
    }
  }
  SUBCASE("errors") {
    const auto head = LinearHeadd::zero({"a", "b"}, 2);
    const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 2);
    const std::vector<int> short_y = {0};
    const std::vector<int> bad_y = {0, 2};
    CHECK_THROWS_AS(loss_and_grad(head, x, short_y, 0.0), ValidationError);
    CHECK_THROWS_AS(loss_and_grad(head, x, bad_y, 0.0), ValidationError);
    const std::vector<int> y = {0, 1};
    CHECK_THROWS_AS(loss_and_grad(head, Eigen::MatrixXd::Zero(2, 3), y, 0.0), ValidationError);
  }
}

TEST_CASE("train_head") {
  SUBCASE("separable toy reaches full training accuracy") {
    Eigen::MatrixXd x(4, 2);
    x << 1, 0, 1, 0, -1, 0, -1, 0;
    const std::vector<int> y = {0, 0, 1, 1};
    const auto head = train_head<double>(x, y, {"pos", "neg"}, TrainConfig{});
    const auto m = evaluate(head, x, y);
    CHECK(m.accuracy == 1.0);
    CHECK(m.macro_f1 == 1.0);
  }
  SUBCASE("deterministic, monotone, bounded by ln K") {
    Rng rng(99);
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::Index n = 20 + static_cast<Eigen::Index>(uniform_below(rng, 40));
      const Eigen::Index d = 2 + static_cast<Eigen::Index>(uniform_below(rng, 6));
      Eigen::MatrixXd x(n, d);
      std::vector<int> y(static_cast<std::size_t>(n));
      for (Eigen::Index i = 0; i < n; ++i) {
        y[static_cast<std::size_t>(i)] = static_cast<int>(uniform_below(rng, 3));
        for (Eigen::Index j = 0; j < d; ++j) x(i, j) = 5.0 * standard_normal(rng);
      }
      TrainConfig cfg;
      cfg.learning_rate = 4.0;  // large enough that halving must kick in
      cfg.max_epochs = 200;
      const auto a = train_head_logged<double>(x, y, {"a", "b", "c"}, cfg);
      const auto b = train_head_logged<double>(x, y, {"a", "b", "c"}, cfg);
      CHECK(a.head == b.head);
      CHECK(a.loss_history == b.loss_history);
      REQUIRE(!a.loss_history.empty());
      CHECK(a.loss_history.front() == doctest::Approx(std::log(3.0)));
      for (std::size_t i = 1; i < a.loss_history.size(); ++i) {
        CHECK(a.loss_history[i] <= a.loss_history[i - 1]);
      }
      CHECK(a.loss_history.back() <= std::log(3.0));
      CHECK(std::isfinite(a.loss_history.back()));
    }
  }
  SUBCASE("labels absent from the training set are allowed") {
    Eigen::MatrixXd x(2, 2);
    x << 1, 0, 0, 1;
    const std::vector<int> y = {0, 0};
    const auto head = train_head<double>(x, y, {"a", "b", "c"}, TrainConfig{});
    CHECK(head.num_classes() == 3);
    CHECK(head.weights.allFinite());
  }
  SUBCASE("errors") {
    const std::vector<int> none;
    CHECK_THROWS_AS(train_head<double>(Eigen::MatrixXd(0, 2), none, {"a", "b"}, TrainConfig{}),
                    ValidationError);
    TrainConfig bad;
    bad.learning_rate = -1.0;
    const std::vector<int> y = {0};
    CHECK_THROWS_AS(train_head<double>(Eigen::MatrixXd::Zero(1, 2), y, {"a", "b"}, bad),
                    ValidationError);
  }
}

TEST_CASE("evaluate") {
  auto head = LinearHeadd::zero({"A", "B"}, 2);
  head.weights.setIdentity();
  const auto row = [](int c) { return c == 0 ? Eigen::RowVector2d(1, 0) : Eigen::RowVector2d(0, 1); };

  SUBCASE("perfect predictions") {
    Eigen::MatrixXd x(4, 2);
    x << row(0), row(0), row(1), row(1);
    const std::vector<int> gold = {0, 0, 1, 1};
    const auto m = evaluate(head, x, gold);
    CHECK(m.macro_f1 == 1.0);
    CHECK(m.accuracy == 1.0);
  }
  SUBCASE("hand-computed F1") {
    // gold [A,A,B,B], predicted [A,B,B,B]: F1(A)=2/3, F1(B)=4/5.
    Eigen::MatrixXd x(4, 2);
    x << row(0), row(1), row(1), row(1);
    const std::vector<int> gold = {0, 0, 1, 1};
    const auto m = evaluate(head, x, gold);
    CHECK(m.per_class[0].f1 == doctest::Approx(2.0 / 3.0));
    CHECK(m.per_class[1].f1 == doctest::Approx(4.0 / 5.0));
    CHECK(m.macro_f1 == doctest::Approx(11.0 / 15.0));
    CHECK(m.accuracy == doctest::Approx(0.75));
    CHECK(m.confusion.sum() == 4);
  }
  SUBCASE("absent class scores zero and is still averaged") {
    auto head3 = LinearHeadd::zero({"A", "B", "C"}, 2);
    head3.weights.topRows(2).setIdentity();
    Eigen::MatrixXd x(2, 2);
    x << row(0), row(1);
    const std::vector<int> gold = {0, 1};
    const auto m = evaluate(head3, x, gold);
    CHECK(m.per_class[2].f1 == 0.0);
    CHECK(m.per_class[2].precision == 0.0);
    CHECK(m.per_class[2].recall == 0.0);
    CHECK(m.macro_f1 == doctest::Approx(2.0 / 3.0));
  }
  SUBCASE("ties predict the lowest label index") {
    const auto zero = LinearHeadd::zero({"A", "B"}, 2);
    const std::vector<int> gold = {1};
    const auto m = evaluate(zero, Eigen::MatrixXd::Ones(1, 2), gold);
    CHECK(m.confusion(1, 0) == 1);
  }
  SUBCASE("macro F1 equals mean F1 recomputed from the confusion matrix") {
    Rng rng(8);
    for (int trial = 0; trial < 50; ++trial) {
      auto h = LinearHeadd::zero({"a", "b", "c"}, 3);
      for (int i = 0; i < 9; ++i) h.weights(i / 3, i % 3) = standard_normal(rng);
      Eigen::MatrixXd x(30, 3);
      std::vector<int> gold(30);
      for (int i = 0; i < 30; ++i) {
        gold[static_cast<std::size_t>(i)] = static_cast<int>(uniform_below(rng, 3));
        for (int j = 0; j < 3; ++j) x(i, j) = standard_normal(rng);
      }
      const auto m = evaluate(h, x, gold);
      double sum = 0.0;
      for (int c = 0; c < 3; ++c) {
        const double tp = m.confusion(c, c);
        const double p = m.confusion.col(c).sum();
        const double r = m.confusion.row(c).sum();
        const double prec = p > 0 ? tp / p : 0.0;
        const double rec = r > 0 ? tp / r : 0.0;
        sum += prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
      }
      CHECK(m.macro_f1 == doctest::Approx(sum / 3.0).epsilon(1e-15));
      CHECK(m.confusion.sum() == 30);
    }
  }
  CHECK_THROWS_AS(evaluate(head, Eigen::MatrixXd(0, 2), std::vector<int>{}), ValidationError);
}
