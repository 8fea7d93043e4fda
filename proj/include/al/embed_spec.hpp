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
#include <string>
#include <string_view>

#include "al/corpus.hpp"

namespace al {

/// How to fill in missing document embeddings: "hash:<dim>" or "backend:<url>".
struct EmbedSpec {
  enum class Kind { Hash, Backend } kind = Kind::Hash;
  Eigen::Index dim = 0;
  std::uint64_t salt = 0;
  std::string url;
};

EmbedSpec parse_embed_spec(std::string_view text);

/// Copy of `corpus` where every document lacking an embedding has one.
Corpus resolve_embeddings(const Corpus& corpus, const EmbedSpec& spec);

}  // namespace al
