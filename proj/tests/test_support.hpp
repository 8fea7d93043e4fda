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

#include <memory>
#include <string>
#include <vector>

#include "al/corpus.hpp"
#include "al/rng.hpp"

namespace al::testing {

// Gold-labeled corpus with embeddings drawn around one offset axis per class.
inline Corpus blob_corpus(std::size_t n, Eigen::Index dim, std::vector<std::string> labels,
                          std::uint64_t seed, double separation = 3.0) {
  Rng rng(seed);
  std::vector<Document> docs;
  for (std::size_t i = 0; i < n; ++i) {
    Document d;
    char id[32];
    std::snprintf(id, sizeof id, "doc%04zu", i);
    d.id = id;
    d.text = "text of " + d.id;
    const std::size_t c = i % labels.size();
    Eigen::VectorXd x(dim);
    for (Eigen::Index j = 0; j < dim; ++j) x[j] = standard_normal(rng);
    x[static_cast<Eigen::Index>(c) % dim] += separation;
    d.embedding = x;
    d.gold_label = labels[c];
    docs.push_back(std::move(d));
  }
  return Corpus(std::move(docs), std::move(labels));
}

inline std::shared_ptr<const Corpus> shared(Corpus c) {
  return std::make_shared<const Corpus>(std::move(c));
}

}  // namespace al::testing
