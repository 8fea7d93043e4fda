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

#include "al/backend_client.hpp"

#include <thread>

#include <Eigen/Dense>
#include "httplib.h"
#include "json.hpp"

#include "al/error.hpp"

namespace al {

using nlohmann::json;

BackendClient::BackendClient(std::string base_url, std::chrono::milliseconds timeout,
                             int max_retries, std::size_t max_texts_per_request)
    : base_url_(std::move(base_url)),
      timeout_(timeout),
      max_retries_(max_retries),
      max_texts_(std::max<std::size_t>(1, max_texts_per_request)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  if (base_url_.empty()) throw ValidationError("backend URL is empty");
}

std::vector<Eigen::VectorXd> BackendClient::fetch_embeddings(const std::vector<std::string>& texts) {
  if (texts.empty()) throw ValidationError("fetch_embeddings needs at least one text");
  std::vector<Eigen::VectorXd> out;
  out.reserve(texts.size());
  for (std::size_t begin = 0; begin < texts.size(); begin += max_texts_) {
    const std::size_t end = std::min(texts.size(), begin + max_texts_);
    const std::vector<std::string> chunk(texts.begin() + static_cast<std::ptrdiff_t>(begin),
                                         texts.begin() + static_cast<std::ptrdiff_t>(end));
    for (auto& v : fetch_chunk(chunk)) out.push_back(std::move(v));
  }
  return out;
}

std::vector<Eigen::VectorXd> BackendClient::fetch_chunk(const std::vector<std::string>& texts) {
  httplib::Client client(base_url_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  const std::string body = json{{"texts", texts}}.dump();

  std::string last_error;
  for (int attempt = 0; attempt <= max_retries_; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(50 * attempt));
    auto res = client.Post("/embed", body, "application/json");
    if (!res) {
      last_error = "backend unreachable: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "backend error " + std::to_string(res->status) + ": " + res->body;
      continue;
    }
    if (res->status != 200) {
      std::string message = res->body;
      try {
        message = json::parse(res->body).at("error").get<std::string>();
      } catch (const json::exception&) {
      }
      throw ValidationError("backend rejected request (" + std::to_string(res->status) +
                            "): " + message);
    }
    json reply;
    try {
      reply = json::parse(res->body);
    } catch (const json::parse_error&) {
      throw ValidationError("backend returned malformed JSON");
    }
    if (!reply.is_object() || !reply.contains("embeddings") || !reply["embeddings"].is_array()) {
      throw ValidationError("backend response has no embeddings array");
    }
    const json& rows = reply["embeddings"];
    if (rows.size() != texts.size()) {
      throw ValidationError("count mismatch: sent " + std::to_string(texts.size()) +
                            " texts, received " + std::to_string(rows.size()) + " embeddings");
    }
    std::vector<Eigen::VectorXd> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
      if (!row.is_array() || row.empty()) throw ValidationError("backend embedding is not an array");
      Eigen::VectorXd v(static_cast<Eigen::Index>(row.size()));
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (!row[i].is_number()) throw ValidationError("backend embedding has a non-number");
        v[static_cast<Eigen::Index>(i)] = row[i].get<double>();
      }
      if (!v.allFinite()) throw ValidationError("backend embedding has non-finite values");
      if (!dim_) dim_ = v.size();
      if (v.size() != *dim_) {
        throw ValidationError("dimension drift: expected " + std::to_string(*dim_) + ", got " +
                              std::to_string(v.size()));
      }
      out.push_back(std::move(v));
    }
    return out;
  }
  throw IoError(last_error);
}

}  // namespace al
