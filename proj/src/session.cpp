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

#include "al/session.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <set>
#include <unordered_set>

#include "al/error.hpp"

namespace al {
namespace {

std::size_t label_index(const std::vector<std::string>& labels, const std::string& label) {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw ValidationError("label " + label + " is not in the label set");
  return static_cast<std::size_t>(it - labels.begin());
}

// Least frequent label among `counts` entries that occur at all; ties go to
// the lowest label index.
std::optional<std::string> least_frequent(const std::vector<std::string>& labels,
                                          const std::vector<std::size_t>& counts) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (counts[i] == 0) continue;
    if (!best || counts[i] < counts[*best]) best = i;
  }
  if (!best) return std::nullopt;
  return labels[*best];
}

std::string csv_field(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::AwaitingSeedLabels:
      return "awaiting_seed_labels";
    case Phase::AwaitingBatchLabels:
      return "awaiting_batch_labels";
    case Phase::Training:
      return "training";
    case Phase::Done:
      return "done";
  }
  return "done";
}

void SessionConfig::validate() const {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ValidationError("test_fraction must lie in (0, 1)");
  }
  if (n_seed < 1) throw ValidationError("n_seed must be positive");
  if (batch_size < 1) throw ValidationError("batch_size must be positive");
  if (max_rounds < 0) throw ValidationError("max_rounds must be non-negative");
  if (stop_f1_threshold && !(*stop_f1_threshold > 0.0 && *stop_f1_threshold <= 1.0)) {
    throw ValidationError("stop_f1_threshold must lie in (0, 1]");
  }
  train.validate();
  std::set<std::string> seen;
  for (const auto& label : label_set) {
    if (!seen.insert(label).second) throw ValidationError("duplicate label " + label);
  }
}

std::optional<std::string> invariant_violation(const SessionState& s) {
  std::unordered_set<std::string> pool(s.pool_ids.begin(), s.pool_ids.end());
  if (pool.size() != s.pool_ids.size()) return "duplicate pool id";
  for (const auto& id : s.test_ids) {
    if (pool.contains(id)) return "test id " + id + " is also in the pool";
  }
  std::unordered_set<std::string> covered;
  const auto claim = [&](const std::vector<std::string>& ids,
                         const char* what) -> std::optional<std::string> {
    for (const auto& id : ids) {
      if (!pool.contains(id)) return std::string(what) + " id " + id + " is not in the pool";
      if (!covered.insert(id).second) return std::string(what) + " id " + id + " is not disjoint";
    }
    return std::nullopt;
  };
  if (auto v = claim(s.labeled_ids, "labeled")) return v;
  if (auto v = claim(s.unlabeled_ids, "unlabeled")) return v;
  if (auto v = claim(s.pending_batch, "pending")) return v;
  if (covered.size() != pool.size()) return "labeled, unlabeled and pending do not cover the pool";
  if (s.assigned_labels.size() != s.labeled_ids.size()) return "assigned labels out of sync";
  for (const auto& id : s.labeled_ids) {
    if (!s.assigned_labels.contains(id) || !s.labeled_in_round.contains(id)) {
      return "labeled id " + id + " has no assigned label";
    }
  }
  const std::unordered_set<std::string> pending(s.pending_batch.begin(), s.pending_batch.end());
  for (const auto& [id, label] : s.pending_labels) {
    if (!pending.contains(id)) return "draft label for non-pending id " + id;
  }
  for (std::size_t i = 1; i < s.history.size(); ++i) {
    if (s.history[i].n_labeled <= s.history[i - 1].n_labeled) {
      return "history n_labeled does not increase";
    }
  }
  const bool awaiting =
      s.phase == Phase::AwaitingSeedLabels || s.phase == Phase::AwaitingBatchLabels;
  if (awaiting && s.pending_batch.empty()) return "awaiting labels with an empty batch";
  if (s.phase == Phase::Done && !s.pending_batch.empty()) return "done with a pending batch";
  return std::nullopt;
}

StopDecision should_stop(const SessionState& s) {
  if (s.history.empty()) return {};
  if (s.round >= s.config.max_rounds) return {true, "max_rounds"};
  if (s.unlabeled_ids.empty()) return {true, "pool_exhausted"};
  const auto& latest = s.history.back();
  if (s.config.stop_f1_threshold && latest.metrics &&
      latest.metrics->macro_f1 >= *s.config.stop_f1_threshold) {
    return {true, "f1_threshold"};
  }
  return {};
}

Session Session::create(std::shared_ptr<const Corpus> corpus, SessionConfig config,
                        std::string corpus_id) {
  if (!corpus || corpus->empty()) throw ValidationError("session needs a non-empty corpus");
  if (config.label_set.empty()) config.label_set = corpus->label_set();
  config.validate();
  if (config.label_set.size() < 2) throw ValidationError("session needs at least two labels");
  for (const auto& label : corpus->label_set()) label_index(config.label_set, label);
  if (!corpus->fully_embedded()) {
    throw ValidationError("corpus has documents without embeddings");
  }

  Session session;
  session.corpus_ = std::move(corpus);
  SessionState& s = session.state_;
  s.config = std::move(config);
  s.corpus_id = std::move(corpus_id);
  s.corpus_fingerprint = session.corpus_->fingerprint();

  Rng rng(s.config.rng_seed);
  auto split = split_pool_test(*session.corpus_, s.config.test_fraction, rng);
  s.pool_ids = std::move(split.pool_ids);
  s.test_ids = std::move(split.test_ids);
  s.pending_batch = select_seed(s.pool_ids, static_cast<std::size_t>(s.config.n_seed), rng);
  s.rng_state = rng_state(rng);

  const std::unordered_set<std::string> seed(s.pending_batch.begin(), s.pending_batch.end());
  for (const auto& id : s.pool_ids) {
    if (!seed.contains(id)) s.unlabeled_ids.push_back(id);
  }

  s.evaluable = std::all_of(s.test_ids.begin(), s.test_ids.end(), [&](const std::string& id) {
    return session.corpus_->at(id).gold_label.has_value();
  });
  if (s.config.stop_f1_threshold && !s.evaluable) {
    throw ValidationError("stop_f1_threshold needs gold labels on every test document");
  }

  std::vector<std::size_t> counts(s.config.label_set.size(), 0);
  for (const auto& id : s.pool_ids) {
    const auto& gold = session.corpus_->at(id).gold_label;
    if (gold) ++counts[label_index(s.config.label_set, *gold)];
  }
  s.minority_label = least_frequent(s.config.label_set, counts);
  s.phase = Phase::AwaitingSeedLabels;
  return session;
}

Session::Session(std::shared_ptr<const Corpus> corpus, SessionState state)
    : corpus_(std::move(corpus)), state_(std::move(state)) {
  if (!corpus_) throw ValidationError("session needs a corpus");
  if (corpus_->fingerprint() != state_.corpus_fingerprint) {
    throw ValidationError("corpus does not match the session's corpus fingerprint");
  }
  if (auto v = invariant_violation(state_)) throw ValidationError("invalid session state: " + *v);
  for (const auto& id : state_.pool_ids) corpus_->index_of(id);
  for (const auto& id : state_.test_ids) corpus_->index_of(id);
  for (const auto& [id, label] : state_.assigned_labels) label_index(state_.config.label_set, label);
  if (state_.head && state_.head->label_order != state_.config.label_set) {
    throw ValidationError("head label order does not match the label set");
  }
}

Batch Session::next_batch() const {
  if (state_.phase != Phase::AwaitingSeedLabels && state_.phase != Phase::AwaitingBatchLabels) {
    throw ValidationError("no batch available in phase " + std::string(to_string(state_.phase)));
  }
  Batch batch{state_.round, {}};
  batch.items.reserve(state_.pending_batch.size());
  for (const auto& id : state_.pending_batch) batch.items.push_back({id, corpus_->at(id).text});
  return batch;
}

SubmitResult Session::submit_labels(const std::map<std::string, std::string>& labels) {
  if (state_.phase != Phase::AwaitingSeedLabels && state_.phase != Phase::AwaitingBatchLabels) {
    throw ValidationError("cannot accept labels in phase " + std::string(to_string(state_.phase)));
  }
  const std::unordered_set<std::string> pending(state_.pending_batch.begin(),
                                                state_.pending_batch.end());
  for (const auto& [id, label] : labels) {
    if (!corpus_->contains(id)) throw ValidationError("unknown id " + id);
    if (state_.assigned_labels.contains(id)) throw ValidationError("id " + id + " is already labeled");
    if (!pending.contains(id)) throw ValidationError("id " + id + " is not pending");
    label_index(state_.config.label_set, label);
    const auto draft = state_.pending_labels.find(id);
    if (draft != state_.pending_labels.end() && draft->second != label) {
      throw ValidationError("id " + id + " already has draft label " + draft->second);
    }
  }

  SessionState next = state_;
  for (const auto& [id, label] : labels) next.pending_labels[id] = label;
  SubmitResult result;
  if (next.pending_labels.size() == next.pending_batch.size()) {
    complete_round(next);
    result.round_completed = true;
    result.record = next.history.back();
  }
  state_ = std::move(next);
  return result;
}

void Session::complete_round(SessionState& s) const {
  const auto started = std::chrono::steady_clock::now();
  s.phase = Phase::Training;
  const auto& labels = s.config.label_set;

  RoundRecord record;
  record.round = s.round;
  record.queried_ids = s.pending_batch;
  for (const auto& id : s.pending_batch) {
    s.assigned_labels[id] = s.pending_labels.at(id);
    s.labeled_in_round[id] = s.round;
    s.labeled_ids.push_back(id);
  }
  s.pending_labels.clear();
  s.pending_batch.clear();

  std::vector<int> y;
  y.reserve(s.labeled_ids.size());
  for (const auto& id : s.labeled_ids) {
    y.push_back(static_cast<int>(label_index(labels, s.assigned_labels.at(id))));
  }
  s.head = train_head<double>(corpus_->embedding_matrix(s.labeled_ids), y, labels, s.config.train);

  record.n_labeled = static_cast<long>(s.labeled_ids.size());
  if (s.evaluable) record.metrics = evaluate(*s.head, *corpus_, s.test_ids);

  std::optional<std::string> minority = s.minority_label;
  if (!minority) {
    std::vector<std::size_t> counts(labels.size(), 0);
    for (const auto& [id, label] : s.assigned_labels) ++counts[label_index(labels, label)];
    minority = least_frequent(labels, counts);
  }
  if (minority && !record.queried_ids.empty()) {
    const auto hits = std::count_if(
        record.queried_ids.begin(), record.queried_ids.end(),
        [&](const std::string& id) { return s.assigned_labels.at(id) == *minority; });
    record.minority_fraction_of_batch =
        static_cast<double>(hits) / static_cast<double>(record.queried_ids.size());
  }

  s.history.push_back(record);
  if (should_stop(s).stop) {
    s.phase = Phase::Done;
  } else {
    Rng rng = rng_from_state(s.rng_state);
    const auto scores = score_documents(*s.head, *corpus_, s.unlabeled_ids);
    s.pending_batch = select_query_batch(scores, s.config.batch_size, s.config.strategy, rng);
    s.rng_state = rng_state(rng);
    const std::unordered_set<std::string> chosen(s.pending_batch.begin(), s.pending_batch.end());
    std::erase_if(s.unlabeled_ids, [&](const std::string& id) { return chosen.contains(id); });
    ++s.round;
    s.phase = Phase::AwaitingBatchLabels;
  }
  s.history.back().wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
}

Corpus Session::annotated_corpus() const {
  std::vector<Document> docs = corpus_->documents();
  for (auto& doc : docs) {
    if (const auto it = state_.assigned_labels.find(doc.id); it != state_.assigned_labels.end()) {
      doc.assigned_label = it->second;
      doc.labeled_in_round = state_.labeled_in_round.at(doc.id);
    }
  }
  return Corpus(std::move(docs), state_.config.label_set);
}

std::vector<RoundRecord> run_simulation(std::shared_ptr<const Corpus> corpus,
                                        const SessionConfig& config) {
  if (!corpus) throw ValidationError("simulation needs a corpus");
  for (const auto& doc : corpus->documents()) {
    if (!doc.gold_label) throw ValidationError("simulation needs gold labels; " + doc.id + " has none");
  }
  Session session = Session::create(std::move(corpus), config);
  while (session.state().phase != Phase::Done) {
    std::map<std::string, std::string> answers;
    for (const auto& item : session.next_batch().items) {
      answers.emplace(item.id, *session.corpus().at(item.id).gold_label);
    }
    session.submit_labels(answers);
  }
  return session.state().history;
}

Metrics full_pool_reference(const Corpus& corpus, const SessionConfig& config) {
  const std::vector<std::string> labels =
      config.label_set.empty() ? corpus.label_set() : config.label_set;
  config.validate();
  Rng rng(config.rng_seed);
  const auto split = split_pool_test(corpus, config.test_fraction, rng);
  std::vector<int> y;
  y.reserve(split.pool_ids.size());
  for (const auto& id : split.pool_ids) {
    const auto& gold = corpus.at(id).gold_label;
    if (!gold) throw ValidationError("reference run needs gold labels; " + id + " has none");
    y.push_back(static_cast<int>(label_index(labels, *gold)));
  }
  const auto head = train_head<double>(corpus.embedding_matrix(split.pool_ids), y, labels, config.train);
  return evaluate(head, corpus, split.test_ids);
}

std::optional<long> labels_to_reach(const std::vector<RoundRecord>& history, double target) {
  for (const auto& r : history) {
    if (r.metrics && r.metrics->macro_f1 >= target) return r.n_labeled;
  }
  return std::nullopt;
}

std::string export_history(const std::vector<RoundRecord>& history,
                           const std::vector<std::string>& labels) {
  if (history.empty()) throw ValidationError("cannot export an empty history");
  std::string out = "round,n_labeled,macro_f1,accuracy";
  for (const auto& label : labels) out += "," + csv_field("f1_" + label);
  out += ",minority_fraction\n";
  for (const auto& r : history) {
    out += std::to_string(r.round) + "," + std::to_string(r.n_labeled);
    if (r.metrics) {
      out += "," + fixed6(r.metrics->macro_f1) + "," + fixed6(r.metrics->accuracy);
      for (const auto& label : labels) {
        const auto it = std::find_if(r.metrics->per_class.begin(), r.metrics->per_class.end(),
                                     [&](const ClassMetrics& c) { return c.label == label; });
        out += "," + (it == r.metrics->per_class.end() ? std::string() : fixed6(it->f1));
      }
    } else {
      out += ",,";
      for (std::size_t i = 0; i < labels.size(); ++i) out += ",";
    }
    out += "," + fixed6(r.minority_fraction_of_batch) + "\n";
  }
  return out;
}

}  // namespace al
