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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "al/classifier.hpp"
#include "al/rng.hpp"

namespace al {

class Corpus;

enum class QueryStrategy { Margin, LeastConfidence, Entropy, Random };

std::string_view to_string(QueryStrategy s);
/// Accepts "margin", "leastconf", "least_confidence", "entropy", "random".
QueryStrategy parse_strategy(std::string_view name);

struct ScoreRecord {
  std::string doc_id;
  Eigen::VectorXd logits;
  Eigen::VectorXd probs;
  double margin = 0.0;            // top-1 logit minus top-2 logit
  double least_confidence = 0.0;  // 1 - max prob
  double entropy = 0.0;           // natural log
};

/// Uniform sample of `n_seed` ids without replacement, in selection order.
std::vector<std::string> select_seed(std::span<const std::string> pool_ids, std::size_t n_seed,
                                     Rng& rng);

/// Scores one row of logits.
ScoreRecord score_logits(std::string doc_id, const Eigen::VectorXd& logits);

/// One record per id, in input order.
std::vector<ScoreRecord> score_documents(const LinearHeadd& head, const Corpus& corpus,
                                         std::span<const std::string> ids);

/// Picks up to k ids. Margin takes the smallest margins, LeastConfidence and
/// Entropy the largest scores, Random a seeded uniform sample. Ties are
/// broken by ascending id; the result is ordered by (rank key, id).
std::vector<std::string> select_query_batch(std::span<const ScoreRecord> scores, long k,
                                            QueryStrategy strategy, Rng& rng);

}  // namespace al
