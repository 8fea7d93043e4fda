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

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace al {

/// Client for the embedding backend:
///   POST {base}/embed {"texts": [str]} -> 200 {"embeddings": [[number]]}
///   errors: non-200 with {"error": str}
class BackendClient {
 public:
  explicit BackendClient(std::string base_url,
                         std::chrono::milliseconds timeout = std::chrono::seconds(30),
                         int max_retries = 3, std::size_t max_texts_per_request = 64);

  /// One vector per text, in order. Connection failures and 5xx responses are
  /// retried up to `max_retries` times; other failures are not.
  std::vector<Eigen::VectorXd> fetch_embeddings(const std::vector<std::string>& texts);

  /// Dimension fixed by the first successful response.
  std::optional<Eigen::Index> dim() const { return dim_; }
  const std::string& base_url() const { return base_url_; }

 private:
  std::vector<Eigen::VectorXd> fetch_chunk(const std::vector<std::string>& texts);

  std::string base_url_;
  std::chrono::milliseconds timeout_;
  int max_retries_;
  std::size_t max_texts_;
  std::optional<Eigen::Index> dim_;
};

}  // namespace al
