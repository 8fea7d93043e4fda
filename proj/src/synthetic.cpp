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

#include "al/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "al/error.hpp"
#include "al/rng.hpp"

namespace al {

Corpus make_synthetic_corpus(const SyntheticSpec& spec) {
  const std::size_t k = spec.labels.size();
  if (k < 2 || spec.proportions.size() != k) {
    throw ValidationError("synthetic spec needs one proportion per label (at least two)");
  }
  if (spec.dim < static_cast<Eigen::Index>(k)) {
    throw ValidationError("synthetic dimension must be at least the number of classes");
  }
  const double total = std::accumulate(spec.proportions.begin(), spec.proportions.end(), 0.0);
  if (!(total > 0.0)) throw ValidationError("proportions must sum to a positive value");

  // Largest-remainder apportionment of n_docs.
  std::vector<std::size_t> counts(k);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const double exact = static_cast<double>(spec.n_docs) * spec.proportions[c] / total;
    counts[c] = static_cast<std::size_t>(std::floor(exact));
    assigned += counts[c];
    remainders.emplace_back(-(exact - std::floor(exact)), c);
  }
  std::sort(remainders.begin(), remainders.end());
  for (std::size_t i = 0; assigned < spec.n_docs; ++i, ++assigned) ++counts[remainders[i % k].second];

  std::vector<std::size_t> classes;
  classes.reserve(spec.n_docs);
  for (std::size_t c = 0; c < k; ++c) classes.insert(classes.end(), counts[c], c);

  Rng rng(spec.seed);
  for (std::size_t i = 0; i + 1 < classes.size(); ++i) {
    std::swap(classes[i], classes[i + uniform_below(rng, classes.size() - i)]);
  }

  const int width = static_cast<int>(std::to_string(spec.n_docs).size());
  std::vector<Document> docs;
  docs.reserve(spec.n_docs);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    Document doc;
    char id[32];
    std::snprintf(id, sizeof id, "d%0*zu", width, i);
    doc.id = id;
    doc.text = "synthetic document " + std::to_string(i);
    Eigen::VectorXd x(spec.dim);
    for (Eigen::Index j = 0; j < spec.dim; ++j) x[j] = standard_normal(rng);
    x[static_cast<Eigen::Index>(classes[i])] += spec.separation;
    doc.embedding = std::move(x);
    doc.gold_label = spec.labels[classes[i]];
    docs.push_back(std::move(doc));
  }
  return Corpus(std::move(docs), spec.labels);
}

}  // namespace al
