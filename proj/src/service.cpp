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

#include "al/service.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "json.hpp"

#include "al/embed_spec.hpp"
#include "al/error.hpp"
#include "al/io.hpp"
#include "al/session_json.hpp"

namespace al {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class NotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Conflict : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void reply_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
  reply_json(res, status, json{{"error", message}});
}

// Runs a handler and maps exceptions onto status codes.
template <typename Handler>
httplib::Server::Handler guarded(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const NotFound& e) {
      reply_error(res, 404, e.what());
    } catch (const Conflict& e) {
      reply_error(res, 409, e.what());
    } catch (const ValidationError& e) {
      reply_error(res, 400, e.what());
    } catch (const json::exception& e) {
      reply_error(res, 400, std::string("malformed request: ") + e.what());
    } catch (const IoError& e) {
      reply_error(res, 500, e.what());
    } catch (const std::exception& e) {
      reply_error(res, 500, e.what());
    }
  };
}

json parse_body(const httplib::Request& req) {
  try {
    json body = json::parse(req.body);
    if (!body.is_object()) throw ValidationError("request body must be a JSON object");
    return body;
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON body: ") + e.what());
  }
}

bool awaiting_labels(Phase phase) {
  return phase == Phase::AwaitingSeedLabels || phase == Phase::AwaitingBatchLabels;
}

json session_summary(const std::string& id, const Session& session) {
  const auto& s = session.state();
  return {{"session_id", id},
          {"corpus_id", s.corpus_id},
          {"phase", std::string(to_string(s.phase))},
          {"round", s.round},
          {"n_labeled", s.labeled_ids.size()},
          {"n_unlabeled", s.unlabeled_ids.size()},
          {"n_pending", s.pending_batch.size()},
          {"n_pool", s.pool_ids.size()},
          {"n_test", s.test_ids.size()},
          {"label_set", s.config.label_set},
          {"strategy", std::string(to_string(s.config.strategy))}};
}

}  // namespace

void ServiceConfig::validate() const {
  if (port < 0 || port > 65535) throw ValidationError("port must lie in [1, 65535]");
  if (data_dir.empty()) throw ValidationError("data_dir is empty");
  if (max_body_bytes == 0) throw ValidationError("max_body_bytes must be positive");
}

ServiceConfig load_service_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed service config " + path + ": " + e.what());
  }
  ServiceConfig c;
  try {
    if (j.contains("host")) c.host = j.at("host").get<std::string>();
    if (j.contains("port")) c.port = j.at("port").get<int>();
    if (j.contains("data_dir")) c.data_dir = j.at("data_dir").get<std::string>();
    if (j.contains("backend_url") && !j.at("backend_url").is_null()) {
      c.backend_url = j.at("backend_url").get<std::string>();
    }
    if (j.contains("max_body_bytes")) c.max_body_bytes = j.at("max_body_bytes").get<std::size_t>();
  } catch (const json::exception& e) {
    throw ValidationError("bad service config " + path + ": " + e.what());
  }
  c.validate();
  return c;
}

Service::Service(ServiceConfig config) : config_(std::move(config)) {
  config_.validate();
  std::error_code ec;
  fs::create_directories(fs::path(config_.data_dir) / "sessions", ec);
  fs::create_directories(fs::path(config_.data_dir) / "corpora", ec);
  const std::string probe = (fs::path(config_.data_dir) / ".write-probe").string();
  write_file_atomic(probe, "ok");
  fs::remove(probe, ec);
  load_existing();
  server_.set_payload_max_length(config_.max_body_bytes);
  // No SO_REUSEPORT: a second instance on the same port must fail to bind.
  server_.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof yes);
  });
  install_routes();
}

Service::~Service() { stop(); }

int Service::bind() {
  int port = config_.port;
  if (port == 0) {
    port = server_.bind_to_any_port(config_.host);
    if (port < 0) throw IoError("cannot bind " + config_.host);
  } else if (!server_.bind_to_port(config_.host, port)) {
    throw IoError("cannot bind " + config_.host + ":" + std::to_string(port) + " (port busy?)");
  }
  return port;
}

void Service::listen() { server_.listen_after_bind(); }

void Service::stop() {
  if (server_.is_running()) server_.stop();
}

void Service::fault(std::string_view stage) const {
  if (fault_hook_) fault_hook_(stage);
}

std::string Service::session_path(const std::string& id) const {
  return (fs::path(config_.data_dir) / "sessions" / (id + ".json")).string();
}

std::string Service::corpus_path(const std::string& id) const {
  return (fs::path(config_.data_dir) / "corpora" / (id + ".jsonl")).string();
}

void Service::load_existing() {
  for (const auto& entry : fs::directory_iterator(fs::path(config_.data_dir) / "corpora")) {
    if (entry.path().extension() != ".jsonl") continue;
    corpora_[entry.path().stem().string()] =
        std::make_shared<const Corpus>(ingest_corpus_file(entry.path().string()));
  }
  for (const auto& entry : fs::directory_iterator(fs::path(config_.data_dir) / "sessions")) {
    if (entry.path().extension() != ".json") continue;
    const std::string id = entry.path().stem().string();
    try {
      SessionState state = load_session_file(entry.path().string());
      const auto corpus = corpora_.find(state.corpus_id);
      if (corpus == corpora_.end()) throw ValidationError("unknown corpus " + state.corpus_id);
      auto slot = std::make_shared<SessionSlot>();
      slot->session = std::make_unique<Session>(corpus->second, std::move(state));
      sessions_[id] = std::move(slot);
      if (id.size() > 1 && id[0] == 's') {
        next_session_ = std::max(next_session_, std::stol(id.substr(1)) + 1);
      }
    } catch (const std::exception& e) {
      std::cerr << "skipping session " << id << ": " << e.what() << "\n";
    }
  }
}

std::shared_ptr<const Corpus> Service::find_corpus(const std::string& id) const {
  std::shared_lock lock(registry_mutex_);
  const auto it = corpora_.find(id);
  if (it == corpora_.end()) throw NotFound("unknown corpus " + id);
  return it->second;
}

std::shared_ptr<Service::SessionSlot> Service::find_session(const std::string& id) const {
  std::shared_lock lock(registry_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFound("unknown session " + id);
  return it->second;
}

void Service::persist_all() {
  std::shared_lock lock(registry_mutex_);
  for (const auto& [id, slot] : sessions_) {
    std::shared_lock session_lock(slot->mutex);
    save_session_file(slot->session->state(), session_path(id));
  }
}

void Service::install_routes() {
  server_.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("ok", "text/plain");
  });

  server_.Post("/corpora", guarded([this](const httplib::Request& req, httplib::Response& res) {
    std::istringstream in(req.body);
    Corpus corpus = ingest_corpus(in);
    if (corpus.empty()) throw ValidationError("corpus upload is empty");
    if (req.has_param("embed")) {
      corpus = resolve_embeddings(corpus, parse_embed_spec(req.get_param_value("embed")));
    } else if (config_.backend_url && !corpus.fully_embedded()) {
      EmbedSpec spec;
      spec.kind = EmbedSpec::Kind::Backend;
      spec.url = *config_.backend_url;
      corpus = resolve_embeddings(corpus, spec);
    }
    char id[24];
    std::snprintf(id, sizeof id, "c%016llx", static_cast<unsigned long long>(corpus.fingerprint()));
    const auto n_docs = corpus.size();
    const auto dim = corpus.dim();
    {
      std::unique_lock lock(registry_mutex_);
      if (!corpora_.contains(id)) {
        write_file_atomic(corpus_path(id), corpus_to_jsonl(corpus));
        corpora_[id] = std::make_shared<const Corpus>(std::move(corpus));
      }
    }
    reply_json(res, 201, json{{"corpus_id", id}, {"n_docs", n_docs}, {"dim", dim}});
  }));

  server_.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    if (!body.contains("corpus_id") || !body["corpus_id"].is_string()) {
      throw ValidationError("missing corpus_id");
    }
    const std::string corpus_id = body["corpus_id"].get<std::string>();
    const SessionConfig config =
        session_config_from_json(body.contains("config") ? body["config"] : json::object());
    auto slot = std::make_shared<SessionSlot>();
    slot->session =
        std::make_unique<Session>(Session::create(find_corpus(corpus_id), config, corpus_id));
    fault("validated");
    std::string id;
    {
      std::unique_lock lock(registry_mutex_);
      char buf[24];
      std::snprintf(buf, sizeof buf, "s%06ld", next_session_);
      id = buf;
      save_session_file(slot->session->state(), session_path(id));
      ++next_session_;
      sessions_[id] = slot;
    }
    reply_json(res, 201, json{{"session_id", id}});
  }));

  server_.Get(R"(/sessions/([^/]+))",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const std::string id = req.matches[1];
                const auto slot = find_session(id);
                std::shared_lock lock(slot->mutex);
                reply_json(res, 200, session_summary(id, *slot->session));
              }));

  server_.Get(R"(/sessions/([^/]+)/next-batch)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const auto slot = find_session(req.matches[1]);
                std::shared_lock lock(slot->mutex);
                const Session& session = *slot->session;
                if (!awaiting_labels(session.state().phase)) {
                  throw Conflict("no batch available in phase " +
                                 std::string(to_string(session.state().phase)));
                }
                const Batch batch = session.next_batch();
                json items = json::array();
                for (const auto& item : batch.items) {
                  items.push_back({{"id", item.id}, {"text", item.text}});
                }
                reply_json(res, 200, json{{"round", batch.round}, {"items", std::move(items)}});
              }));

  server_.Post(R"(/sessions/([^/]+)/labels)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const std::string id = req.matches[1];
                 const json body = parse_body(req);
                 if (!body.contains("labels") || !body["labels"].is_object()) {
                   throw ValidationError("missing labels object");
                 }
                 std::map<std::string, std::string> labels;
                 for (const auto& [doc_id, label] : body["labels"].items()) {
                   if (!label.is_string()) throw ValidationError("label for " + doc_id + " is not a string");
                   labels[doc_id] = label.get<std::string>();
                 }
                 const auto slot = find_session(id);
                 std::unique_lock lock(slot->mutex);
                 if (!awaiting_labels(slot->session->state().phase)) {
                   throw Conflict("cannot accept labels in phase " +
                                  std::string(to_string(slot->session->state().phase)));
                 }
                 Session working = *slot->session;
                 const SubmitResult result = working.submit_labels(labels);
                 fault("validated");
                 save_session_file(working.state(), session_path(id));
                 *slot->session = std::move(working);

                 const auto& state = slot->session->state();
                 json reply = {{"phase", std::string(to_string(state.phase))},
                               {"round_completed", result.round_completed},
                               {"n_labeled", state.labeled_ids.size()}};
                 if (result.record) {
                   reply["round"] = result.record->round;
                   if (result.record->metrics) reply["metrics"] = to_json(*result.record->metrics);
                 }
                 reply_json(res, 200, reply);
               }));

  server_.Get(R"(/sessions/([^/]+)/history)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const auto slot = find_session(req.matches[1]);
                std::shared_lock lock(slot->mutex);
                json rounds = json::array();
                for (const auto& r : slot->session->state().history) rounds.push_back(to_json(r));
                reply_json(res, 200, json{{"rounds", std::move(rounds)}});
              }));

  server_.Get(R"(/sessions/([^/]+)/history\.csv)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const auto slot = find_session(req.matches[1]);
                std::shared_lock lock(slot->mutex);
                const auto& state = slot->session->state();
                if (state.history.empty()) throw Conflict("no completed rounds yet");
                res.set_content(export_history(state.history, state.config.label_set), "text/csv");
              }));
}

}  // namespace al
