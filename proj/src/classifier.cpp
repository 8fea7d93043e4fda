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

#include "al/classifier.hpp"

#include "al/corpus.hpp"

namespace al {

Metrics metrics_from_confusion(const Eigen::MatrixXi& confusion,
                               const std::vector<std::string>& labels) {
  const Eigen::Index k = confusion.rows();
  if (confusion.cols() != k || static_cast<std::size_t>(k) != labels.size()) {
    throw ValidationError("confusion matrix does not match label set");
  }
  Metrics m;
  m.confusion = confusion;
  const long total = confusion.cast<long>().sum();
  long correct = 0;
  double f1_sum = 0.0;
  for (Eigen::Index c = 0; c < k; ++c) {
    const long tp = confusion(c, c);
    const long predicted = confusion.col(c).cast<long>().sum();
    const long actual = confusion.row(c).cast<long>().sum();
    ClassMetrics cm;
    cm.label = labels[static_cast<std::size_t>(c)];
    cm.support = actual;
    cm.precision = predicted > 0 ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    cm.recall = actual > 0 ? static_cast<double>(tp) / static_cast<double>(actual) : 0.0;
    const double pr = cm.precision + cm.recall;
    cm.f1 = pr > 0.0 ? 2.0 * cm.precision * cm.recall / pr : 0.0;
    f1_sum += cm.f1;
    correct += tp;
    m.per_class.push_back(std::move(cm));
  }
  m.macro_f1 = k > 0 ? f1_sum / static_cast<double>(k) : 0.0;
  m.accuracy = total > 0 ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
  return m;
}

Metrics evaluate(const LinearHeadd& head, const Eigen::MatrixXd& x, std::span<const int> gold) {
  if (x.rows() == 0) throw ValidationError("cannot evaluate on an empty test set");
  if (static_cast<std::size_t>(x.rows()) != gold.size()) {
    throw ValidationError("dimension mismatch between test rows and gold labels");
  }
  const Eigen::Index k = head.num_classes();
  const Eigen::MatrixXd logits = predict_logits(head, x);
  Eigen::MatrixXi confusion = Eigen::MatrixXi::Zero(k, k);
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const int g = gold[static_cast<std::size_t>(i)];
    if (g < 0 || g >= k) throw ValidationError("gold label index out of range");
    ++confusion(g, argmax(logits.row(i)));
  }
  return metrics_from_confusion(confusion, head.label_order);
}

Metrics evaluate(const LinearHeadd& head, const Corpus& corpus, std::span<const std::string> ids) {
  if (ids.empty()) throw ValidationError("cannot evaluate on an empty test set");
  std::vector<int> gold;
  gold.reserve(ids.size());
  for (const auto& id : ids) {
    const Document& doc = corpus.at(id);
    if (!doc.gold_label) throw ValidationError("test document " + id + " has no gold label");
    const auto it = std::find(head.label_order.begin(), head.label_order.end(), *doc.gold_label);
    if (it == head.label_order.end()) {
      throw ValidationError("gold label " + *doc.gold_label + " not in head label order");
    }
    gold.push_back(static_cast<int>(it - head.label_order.begin()));
  }
  return evaluate(head, corpus.embedding_matrix(ids), gold);
}

}  // namespace al
