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
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "al/rng.hpp"

namespace al {

struct Document {
  std::string id;
  std::string text;
  std::optional<Eigen::VectorXd> embedding;
  std::optional<std::string> gold_label;
  std::optional<std::string> assigned_label;
  std::optional<int> labeled_in_round;
};

/// An ingested document collection. Iteration order is ingestion order.
class Corpus {
 public:
  Corpus() = default;

  /// Builds a corpus from documents, checking id uniqueness and embedding
  /// dimensions. `label_set` is extended, in first-seen order, with any gold
  /// label it does not already contain.
  explicit Corpus(std::vector<Document> documents, std::vector<std::string> label_set = {});

  const std::vector<Document>& documents() const { return documents_; }
  const std::vector<std::string>& label_set() const { return label_set_; }
  /// Embedding dimension, 0 when no document carries an embedding.
  Eigen::Index dim() const { return dim_; }
  std::size_t size() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }

  bool contains(std::string_view id) const;
  const Document& at(std::string_view id) const;
  std::size_t index_of(std::string_view id) const;

  /// True when every document carries an embedding.
  bool fully_embedded() const;

  /// Rows are the embeddings of `ids`, in order.
  Eigen::MatrixXd embedding_matrix(std::span<const std::string> ids) const;

  /// Stable 64-bit fingerprint of ids, labels and embeddings.
  std::uint64_t fingerprint() const;

  /// Returns a copy where documents lacking an embedding get one from
  /// `embed(text)`.
  template <typename Embedder>
  Corpus with_embeddings(Embedder&& embed) const {
    std::vector<Document> docs = documents_;
    for (auto& doc : docs) {
      if (!doc.embedding) doc.embedding = embed(doc.text);
    }
    return Corpus(std::move(docs), label_set_);
  }

 private:
  std::vector<Document> documents_;
  std::vector<std::string> label_set_;
  std::unordered_map<std::string, std::size_t> index_;
  Eigen::Index dim_ = 0;
};

struct ClassCount {
  std::string label;
  std::size_t count = 0;
  double fraction = 0.0;
};

struct ClassDistribution {
  std::vector<ClassCount> classes;  // in label_set order
  std::size_t total = 0;
};

/// Parses one JSON object per line:
///   {"id": str, "text": str, "embedding": [number]?, "gold_label": str?}
/// Blank lines are skipped. Errors carry the 1-based line number.
Corpus ingest_corpus(std::istream& source);
Corpus ingest_corpus_file(const std::string& path);

/// Inverse of ingest_corpus; embeddings are written with round-trip precision.
std::string corpus_to_jsonl(const Corpus& corpus);

ClassDistribution corpus_stats(const Corpus& corpus);

struct PoolTestSplit {
  std::vector<std::string> pool_ids;
  std::vector<std::string> test_ids;
};

/// Seeded shuffle, first round(n * test_fraction) documents become the test
/// set. The pool keeps shuffled order.
PoolTestSplit split_pool_test(const Corpus& corpus, double test_fraction, Rng& rng);
PoolTestSplit split_pool_test(const Corpus& corpus, double test_fraction, std::uint64_t rng_seed);

/// Feature hashing of lowercased, whitespace-delimited tokens into `dim`
/// signed buckets, L2-normalized unless all-zero.
///
/// Token hash: FNV-1a-64 over the token's UTF-8 bytes, then the splitmix64
/// finalizer of (hash XOR salt). Bucket is mix % dim, sign is negative when
/// the top bit of mix is set.
Eigen::VectorXd hash_embed(std::string_view text, Eigen::Index dim, std::uint64_t salt = 0);

/// Tokenizer used by hash_embed: splits on Unicode White_Space, lowercases
/// ASCII, Latin-1, Greek and Cyrillic letters.
std::vector<std::string> hash_tokens(std::string_view text);

}  // namespace al
