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

#include "al/session_json.hpp"

#include <cstdio>
#include <set>

#include "al/error.hpp"
#include "al/io.hpp"

namespace al {
namespace {

using nlohmann::json;

constexpr int kSessionVersion = 1;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex64(const std::string& s) {
  if (s.size() != 16 || s.find_first_not_of("0123456789abcdef") != std::string::npos) {
    throw ValidationError("malformed 64-bit hex value");
  }
  return std::stoull(s, nullptr, 16);
}

std::uint64_t checksum(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Phase phase_from_string(const std::string& s) {
  for (Phase p : {Phase::AwaitingSeedLabels, Phase::AwaitingBatchLabels, Phase::Training,
                  Phase::Done}) {
    if (to_string(p) == s) return p;
  }
  throw ValidationError("unknown phase " + s);
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> known, const char* what) {
  if (!j.is_object()) throw ValidationError(std::string(what) + " must be an object");
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw ValidationError(std::string("unknown ") + what + " key " + key);
  }
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

json to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"max_epochs", c.max_epochs},
          {"loss_tolerance", c.loss_tolerance},
          {"l2_lambda", c.l2_lambda}};
}

TrainConfig train_config_from_json(const json& j) {
  reject_unknown_keys(j, {"learning_rate", "max_epochs", "loss_tolerance", "l2_lambda"}, "train");
  TrainConfig c;
  try {
    read_if(j, "learning_rate", c.learning_rate);
    read_if(j, "max_epochs", c.max_epochs);
    read_if(j, "loss_tolerance", c.loss_tolerance);
    read_if(j, "l2_lambda", c.l2_lambda);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad train config: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const SessionConfig& c) {
  json j = {{"label_set", c.label_set},
            {"test_fraction", c.test_fraction},
            {"n_seed", c.n_seed},
            {"batch_size", c.batch_size},
            {"max_rounds", c.max_rounds},
            {"strategy", std::string(to_string(c.strategy))},
            {"rng_seed", c.rng_seed},
            {"train", to_json(c.train)},
            {"stop_f1_threshold", nullptr}};
  if (c.stop_f1_threshold) j["stop_f1_threshold"] = *c.stop_f1_threshold;
  return j;
}

SessionConfig session_config_from_json(const json& j) {
  reject_unknown_keys(j,
                      {"label_set", "test_fraction", "n_seed", "batch_size", "max_rounds",
                       "strategy", "rng_seed", "train", "stop_f1_threshold"},
                      "config");
  SessionConfig c;
  try {
    read_if(j, "label_set", c.label_set);
    read_if(j, "test_fraction", c.test_fraction);
    read_if(j, "n_seed", c.n_seed);
    read_if(j, "batch_size", c.batch_size);
    read_if(j, "max_rounds", c.max_rounds);
    if (j.contains("strategy")) c.strategy = parse_strategy(j.at("strategy").get<std::string>());
    read_if(j, "rng_seed", c.rng_seed);
    if (j.contains("train")) c.train = train_config_from_json(j.at("train"));
    if (j.contains("stop_f1_threshold") && !j.at("stop_f1_threshold").is_null()) {
      c.stop_f1_threshold = j.at("stop_f1_threshold").get<double>();
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad session config: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const Metrics& m) {
  json per_class = json::object();
  for (const auto& c : m.per_class) {
    per_class[c.label] = {
        {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}, {"support", c.support}};
  }
  json confusion = json::array();
  for (Eigen::Index r = 0; r < m.confusion.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.confusion.cols(); ++c) row.push_back(m.confusion(r, c));
    confusion.push_back(std::move(row));
  }
  return {{"macro_f1", m.macro_f1},
          {"accuracy", m.accuracy},
          {"per_class", std::move(per_class)},
          {"confusion", std::move(confusion)}};
}

json to_json(const RoundRecord& r) {
  json j = {{"round", r.round},
            {"n_labeled", r.n_labeled},
            {"queried_ids", r.queried_ids},
            {"minority_fraction_of_batch", r.minority_fraction_of_batch},
            {"wall_time_ms", r.wall_time_ms},
            {"metrics", nullptr}};
  if (r.metrics) {
    j["metrics"] = to_json(*r.metrics);
    json f1 = json::object();
    for (const auto& c : r.metrics->per_class) f1[c.label] = c.f1;
    j["macro_f1"] = r.metrics->macro_f1;
    j["accuracy"] = r.metrics->accuracy;
    j["per_class_f1"] = std::move(f1);
  }
  return j;
}

RoundRecord round_record_from_json(const json& j, const std::vector<std::string>& labels) {
  RoundRecord r;
  r.round = j.at("round").get<int>();
  r.n_labeled = j.at("n_labeled").get<long>();
  r.queried_ids = j.at("queried_ids").get<std::vector<std::string>>();
  r.minority_fraction_of_batch = j.at("minority_fraction_of_batch").get<double>();
  r.wall_time_ms = j.at("wall_time_ms").get<double>();
  if (!j.at("metrics").is_null()) {
    // Metrics are rebuilt from the stored confusion matrix; the stored
    // summary values must agree exactly.
    const json& m = j.at("metrics");
    const json& rows = m.at("confusion");
    const auto k = static_cast<Eigen::Index>(labels.size());
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != k) {
      throw ValidationError("confusion matrix shape does not match the label set");
    }
    Eigen::MatrixXi confusion(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
      const json& row = rows.at(static_cast<std::size_t>(a));
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != k) {
        throw ValidationError("confusion matrix shape does not match the label set");
      }
      for (Eigen::Index b = 0; b < k; ++b) {
        confusion(a, b) = row.at(static_cast<std::size_t>(b)).get<int>();
      }
    }
    r.metrics = metrics_from_confusion(confusion, labels);
    if (r.metrics->macro_f1 != m.at("macro_f1").get<double>() ||
        r.metrics->accuracy != m.at("accuracy").get<double>()) {
      throw ValidationError("stored metrics disagree with the confusion matrix");
    }
  }
  return r;
}

json to_json(const LinearHeadd& head) {
  json weights = json::array();
  for (Eigen::Index r = 0; r < head.weights.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < head.weights.cols(); ++c) row.push_back(head.weights(r, c));
    weights.push_back(std::move(row));
  }
  return {{"label_order", head.label_order},
          {"weights", std::move(weights)},
          {"bias", std::vector<double>(head.bias.begin(), head.bias.end())}};
}

LinearHeadd linear_head_from_json(const json& j) {
  LinearHeadd head;
  head.label_order = j.at("label_order").get<std::vector<std::string>>();
  const auto rows = j.at("weights").get<std::vector<std::vector<double>>>();
  const auto bias = j.at("bias").get<std::vector<double>>();
  const auto k = static_cast<Eigen::Index>(head.label_order.size());
  if (k < 2 || static_cast<Eigen::Index>(rows.size()) != k ||
      static_cast<Eigen::Index>(bias.size()) != k || rows.front().empty()) {
    throw ValidationError("linear head shape is inconsistent");
  }
  const auto d = static_cast<Eigen::Index>(rows.front().size());
  head.weights.resize(k, d);
  head.bias.resize(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)].size()) != d) {
      throw ValidationError("linear head rows differ in length");
    }
    for (Eigen::Index c = 0; c < d; ++c) {
      head.weights(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
    head.bias[r] = bias[static_cast<std::size_t>(r)];
  }
  if (!head.weights.allFinite() || !head.bias.allFinite()) {
    throw ValidationError("linear head has non-finite entries");
  }
  return head;
}

std::string save_session(const SessionState& s) {
  json history = json::array();
  for (const auto& r : s.history) history.push_back(to_json(r));
  json payload = {{"config", to_json(s.config)},
                  {"corpus_id", s.corpus_id},
                  {"corpus_fingerprint", hex64(s.corpus_fingerprint)},
                  {"phase", std::string(to_string(s.phase))},
                  {"round", s.round},
                  {"pool_ids", s.pool_ids},
                  {"test_ids", s.test_ids},
                  {"labeled_ids", s.labeled_ids},
                  {"unlabeled_ids", s.unlabeled_ids},
                  {"pending_batch", s.pending_batch},
                  {"pending_labels", s.pending_labels},
                  {"assigned_labels", s.assigned_labels},
                  {"labeled_in_round", s.labeled_in_round},
                  {"head", s.head ? to_json(*s.head) : json(nullptr)},
                  {"history", std::move(history)},
                  {"rng_state", s.rng_state},
                  {"minority_label", s.minority_label ? json(*s.minority_label) : json(nullptr)},
                  {"evaluable", s.evaluable}};
  const std::string body = payload.dump();
  json doc = {{"version", kSessionVersion}, {"checksum", hex64(checksum(body))}, {"payload", payload}};
  return doc.dump();
}

SessionState load_session(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("corrupted session file: ") + e.what());
  }
  try {
    if (!doc.is_object() || !doc.contains("version")) {
      throw ValidationError("session file has no version");
    }
    if (doc.at("version") != kSessionVersion) {
      throw ValidationError("unsupported session file version " + doc.at("version").dump());
    }
    const json& p = doc.at("payload");
    if (parse_hex64(doc.at("checksum").get<std::string>()) != checksum(p.dump())) {
      throw ValidationError("session file checksum mismatch");
    }
    SessionState s;
    s.config = session_config_from_json(p.at("config"));
    s.corpus_id = p.at("corpus_id").get<std::string>();
    s.corpus_fingerprint = parse_hex64(p.at("corpus_fingerprint").get<std::string>());
    s.phase = phase_from_string(p.at("phase").get<std::string>());
    s.round = p.at("round").get<int>();
    s.pool_ids = p.at("pool_ids").get<std::vector<std::string>>();
    s.test_ids = p.at("test_ids").get<std::vector<std::string>>();
    s.labeled_ids = p.at("labeled_ids").get<std::vector<std::string>>();
    s.unlabeled_ids = p.at("unlabeled_ids").get<std::vector<std::string>>();
    s.pending_batch = p.at("pending_batch").get<std::vector<std::string>>();
    s.pending_labels = p.at("pending_labels").get<std::map<std::string, std::string>>();
    s.assigned_labels = p.at("assigned_labels").get<std::map<std::string, std::string>>();
    s.labeled_in_round = p.at("labeled_in_round").get<std::map<std::string, int>>();
    if (!p.at("head").is_null()) s.head = linear_head_from_json(p.at("head"));
    for (const auto& r : p.at("history")) {
      s.history.push_back(round_record_from_json(r, s.config.label_set));
    }
    s.rng_state = p.at("rng_state").get<std::string>();
    rng_from_state(s.rng_state);
    if (!p.at("minority_label").is_null()) s.minority_label = p.at("minority_label").get<std::string>();
    s.evaluable = p.at("evaluable").get<bool>();
    if (auto v = invariant_violation(s)) throw ValidationError("invalid session state: " + *v);
    return s;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("corrupted session file: ") + e.what());
  }
}

void save_session_file(const SessionState& state, const std::string& path) {
  write_file_atomic(path, save_session(state));
}

SessionState load_session_file(const std::string& path) { return load_session(read_file(path)); }

}  // namespace al
