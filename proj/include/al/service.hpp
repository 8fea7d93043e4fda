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
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

#include "al/session.hpp"

// After Eigen: httplib pulls in <resolv.h>, whose `_res` macro clashes with
// Eigen parameter names.
#include "httplib.h"

namespace al {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::string data_dir = "al-data";
  std::optional<std::string> backend_url;
  std::size_t max_body_bytes = 64u << 20;

  void validate() const;
};

/// Reads {"host", "port", "data_dir", "backend_url", "max_body_bytes"}.
ServiceConfig load_service_config(const std::string& path);

/// HTTP/JSON front end over sessions and corpora stored under data_dir.
///
///   POST /corpora                  JSONL body, optional ?embed=hash:<dim>
///   POST /sessions                 {corpus_id, config}
///   GET  /sessions/{id}
///   GET  /sessions/{id}/next-batch
///   POST /sessions/{id}/labels     {labels: {doc_id: label}}
///   GET  /sessions/{id}/history
///   GET  /sessions/{id}/history.csv
///   GET  /healthz
class Service {
 public:
  /// Called at named points of a mutation ("validated", "persisted"); a
  /// throwing hook aborts the request. Tests use it to inject failures.
  using FaultHook = std::function<void(std::string_view stage)>;

  explicit Service(ServiceConfig config);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds the listening socket. Returns the bound port.
  int bind();
  /// Serves until stop(); call bind() first.
  void listen();
  void stop();
  /// Rewrites every session file.
  void persist_all();

  void set_fault_hook(FaultHook hook) { fault_hook_ = std::move(hook); }
  const ServiceConfig& config() const { return config_; }

 private:
  struct SessionSlot {
    std::shared_mutex mutex;
    std::unique_ptr<Session> session;
  };

  void load_existing();
  void install_routes();
  std::shared_ptr<const Corpus> find_corpus(const std::string& id) const;
  std::shared_ptr<SessionSlot> find_session(const std::string& id) const;
  std::string session_path(const std::string& id) const;
  std::string corpus_path(const std::string& id) const;
  void fault(std::string_view stage) const;

  ServiceConfig config_;
  httplib::Server server_;
  FaultHook fault_hook_;

  mutable std::shared_mutex registry_mutex_;
  std::map<std::string, std::shared_ptr<const Corpus>> corpora_;
  std::map<std::string, std::shared_ptr<SessionSlot>> sessions_;
  long next_session_ = 1;
};

}  // namespace al
