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

#include "al/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "al/corpus.hpp"
#include "al/error.hpp"

namespace al {

std::string_view to_string(QueryStrategy s) {
  switch (s) {
    case QueryStrategy::Margin:
      return "margin";
    case QueryStrategy::LeastConfidence:
      return "leastconf";
    case QueryStrategy::Entropy:
      return "entropy";
    case QueryStrategy::Random:
      return "random";
  }
  return "margin";
}

QueryStrategy parse_strategy(std::string_view name) {
  if (name == "margin") return QueryStrategy::Margin;
  if (name == "leastconf" || name == "least_confidence") return QueryStrategy::LeastConfidence;
  if (name == "entropy") return QueryStrategy::Entropy;
  if (name == "random") return QueryStrategy::Random;
  throw ValidationError("unknown strategy " + std::string(name));
}

std::vector<std::string> select_seed(std::span<const std::string> pool_ids, std::size_t n_seed,
                                     Rng& rng) {
  if (n_seed > pool_ids.size()) {
    throw ValidationError("seed size " + std::to_string(n_seed) + " exceeds pool size " +
                          std::to_string(pool_ids.size()));
  }
  std::vector<std::string> ids(pool_ids.begin(), pool_ids.end());
  const std::size_t n = ids.size();
  for (std::size_t i = 0; i < n_seed; ++i) {
    const std::size_t j = i + uniform_below(rng, n - i);
    std::swap(ids[i], ids[j]);
  }
  ids.resize(n_seed);
  return ids;
}

ScoreRecord score_logits(std::string doc_id, const Eigen::VectorXd& logits) {
  ScoreRecord r;
  r.doc_id = std::move(doc_id);
  r.logits = logits;
  r.probs = softmax(logits);
  if (logits.size() >= 2) {
    double first = -std::numeric_limits<double>::infinity();
    double second = first;
    for (double v : logits) {
      if (v > first) {
        second = first;
        first = v;
      } else if (v > second) {
        second = v;
      }
    }
    r.margin = first - second;
  }
  r.least_confidence = 1.0 - r.probs.maxCoeff();
  double h = 0.0;
  for (double p : r.probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  r.entropy = h;
  return r;
}

std::vector<ScoreRecord> score_documents(const LinearHeadd& head, const Corpus& corpus,
                                         std::span<const std::string> ids) {
  const Eigen::MatrixXd logits = predict_logits(head, corpus.embedding_matrix(ids));
  std::vector<ScoreRecord> out;
  out.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out.push_back(score_logits(ids[i], logits.row(static_cast<Eigen::Index>(i)).transpose()));
  }
  return out;
}

std::vector<std::string> select_query_batch(std::span<const ScoreRecord> scores, long k,
                                            QueryStrategy strategy, Rng& rng) {
  if (k <= 0) throw ValidationError("batch size must be positive");
  if (scores.empty()) throw ValidationError("no documents to query from");
  const std::size_t take = std::min(static_cast<std::size_t>(k), scores.size());

  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  if (strategy == QueryStrategy::Random) {
    for (std::size_t i = 0; i < take; ++i) {
      const std::size_t j = i + uniform_below(rng, order.size() - i);
      std::swap(order[i], order[j]);
    }
    std::vector<std::string> ids;
    ids.reserve(take);
    for (std::size_t i = 0; i < take; ++i) ids.push_back(scores[order[i]].doc_id);
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  // Ascending rank key: margin as-is, the others negated.
  const auto key = [strategy](const ScoreRecord& r) {
    switch (strategy) {
      case QueryStrategy::LeastConfidence:
        return -r.least_confidence;
      case QueryStrategy::Entropy:
        return -r.entropy;
      default:
        return r.margin;
    }
  };
  const auto before = [&](std::size_t a, std::size_t b) {
    const double ka = key(scores[a]);
    const double kb = key(scores[b]);
    if (ka != kb) return ka < kb;
    return scores[a].doc_id < scores[b].doc_id;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    before);
  std::vector<std::string> ids;
  ids.reserve(take);
  for (std::size_t i = 0; i < take; ++i) ids.push_back(scores[order[i]].doc_id);
  return ids;
}

}  // namespace al
