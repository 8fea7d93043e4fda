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

#include "json.hpp"

#include "al/session.hpp"

namespace al {

// JSON shapes shared by session files and the HTTP API.

nlohmann::json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SessionConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected.
SessionConfig session_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Metrics& metrics);
nlohmann::json to_json(const RoundRecord& record);
RoundRecord round_record_from_json(const nlohmann::json& j, const std::vector<std::string>& labels);

nlohmann::json to_json(const LinearHeadd& head);
LinearHeadd linear_head_from_json(const nlohmann::json& j);

}  // namespace al
