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

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "al/classifier.hpp"
#include "al/corpus.hpp"
#include "al/strategies.hpp"

namespace al {

enum class Phase { AwaitingSeedLabels, AwaitingBatchLabels, Training, Done };

std::string_view to_string(Phase phase);

struct SessionConfig {
  std::vector<std::string> label_set;  // empty: take the corpus label set
  double test_fraction = 0.2;
  long n_seed = 160;
  long batch_size = 40;
  long max_rounds = 10;
  QueryStrategy strategy = QueryStrategy::Margin;
  std::uint64_t rng_seed = 0;
  TrainConfig train;
  std::optional<double> stop_f1_threshold;

  void validate() const;
  bool operator==(const SessionConfig&) const = default;
};

struct RoundRecord {
  int round = 0;
  long n_labeled = 0;
  /// Absent when the test set has no gold labels (live annotation).
  std::optional<Metrics> metrics;
  std::vector<std::string> queried_ids;  // the batch labeled in this round
  double minority_fraction_of_batch = 0.0;
  double wall_time_ms = 0.0;
};

struct SessionState {
  SessionConfig config;
  std::string corpus_id;
  std::uint64_t corpus_fingerprint = 0;

  Phase phase = Phase::AwaitingSeedLabels;
  int round = 0;  // 0 = seed round
  std::vector<std::string> pool_ids;
  std::vector<std::string> test_ids;
  std::vector<std::string> labeled_ids;    // labeling order
  std::vector<std::string> unlabeled_ids;  // pool order
  std::vector<std::string> pending_batch;
  std::map<std::string, std::string> pending_labels;  // partial submissions
  std::map<std::string, std::string> assigned_labels;
  std::map<std::string, int> labeled_in_round;

  std::optional<LinearHeadd> head;
  std::vector<RoundRecord> history;
  std::string rng_state;
  std::optional<std::string> minority_label;
  bool evaluable = false;  // every test document has a gold label
};

struct BatchItem {
  std::string id;
  std::string text;
};

struct Batch {
  int round = 0;
  std::vector<BatchItem> items;
};

struct StopDecision {
  bool stop = false;
  std::string reason;  // "max_rounds", "pool_exhausted" or "f1_threshold"
};

struct SubmitResult {
  bool round_completed = false;
  std::optional<RoundRecord> record;
};

/// Returns a description of the first broken partition invariant, if any.
std::optional<std::string> invariant_violation(const SessionState& state);

StopDecision should_stop(const SessionState& state);

/// One annotation session: a single-writer state machine over an immutable
/// corpus. Every mutating call either succeeds or leaves the state untouched.
class Session {
 public:
  /// Splits the corpus, draws the seed set and waits for its labels.
  static Session create(std::shared_ptr<const Corpus> corpus, SessionConfig config,
                        std::string corpus_id = {});

  /// Restores a session; the corpus must match the stored fingerprint.
  Session(std::shared_ptr<const Corpus> corpus, SessionState state);

  const SessionState& state() const { return state_; }
  const Corpus& corpus() const { return *corpus_; }
  const std::shared_ptr<const Corpus>& corpus_ptr() const { return corpus_; }

  /// The batch awaiting labels. Repeated calls return the same batch.
  Batch next_batch() const;

  /// Accepts labels for pending ids. Partial submissions accumulate; once the
  /// whole batch is labeled the head is retrained, evaluated and the next
  /// batch is selected (or the session finishes).
  SubmitResult submit_labels(const std::map<std::string, std::string>& labels);

  /// Copy of the corpus with assigned_label and labeled_in_round filled in.
  Corpus annotated_corpus() const;

 private:
  Session() = default;
  void complete_round(SessionState& next) const;

  std::shared_ptr<const Corpus> corpus_;
  SessionState state_;
};

/// Answers every query with gold labels until the session stops.
std::vector<RoundRecord> run_simulation(std::shared_ptr<const Corpus> corpus,
                                        const SessionConfig& config);

/// Trains on every pool document's gold label (same split as a session with
/// `config`) and evaluates on the test set: the full-pool reference.
Metrics full_pool_reference(const Corpus& corpus, const SessionConfig& config);

/// Labels used in the first round whose macro-F1 reaches `target`.
std::optional<long> labels_to_reach(const std::vector<RoundRecord>& history, double target);

/// Header `round,n_labeled,macro_f1,accuracy,f1_<label>...,minority_fraction`,
/// six decimals, one row per round.
std::string export_history(const std::vector<RoundRecord>& history,
                           const std::vector<std::string>& labels);

/// Single JSON document, "version": 1, with a checksum over the payload.
std::string save_session(const SessionState& state);
SessionState load_session(std::string_view bytes);

void save_session_file(const SessionState& state, const std::string& path);
SessionState load_session_file(const std::string& path);

}  // namespace al
