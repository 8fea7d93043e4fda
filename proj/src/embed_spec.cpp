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

#include "al/embed_spec.hpp"

#include <charconv>

#include "al/backend_client.hpp"
#include "al/error.hpp"

namespace al {

EmbedSpec parse_embed_spec(std::string_view text) {
  EmbedSpec spec;
  if (text.starts_with("hash:")) {
    const std::string_view digits = text.substr(5);
    long dim = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), dim);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || dim < 1) {
      throw ValidationError("bad embed spec " + std::string(text) + ": dimension must be a positive integer");
    }
    spec.kind = EmbedSpec::Kind::Hash;
    spec.dim = dim;
    return spec;
  }
  if (text.starts_with("backend:") && text.size() > 8) {
    spec.kind = EmbedSpec::Kind::Backend;
    spec.url = std::string(text.substr(8));
    return spec;
  }
  throw ValidationError("bad embed spec " + std::string(text) + " (want hash:<dim> or backend:<url>)");
}

Corpus resolve_embeddings(const Corpus& corpus, const EmbedSpec& spec) {
  if (corpus.fully_embedded()) return corpus;
  if (spec.kind == EmbedSpec::Kind::Hash) {
    return corpus.with_embeddings(
        [&](const std::string& text) { return hash_embed(text, spec.dim, spec.salt); });
  }
  std::vector<std::string> texts;
  for (const auto& doc : corpus.documents()) {
    if (!doc.embedding) texts.push_back(doc.text);
  }
  BackendClient client(spec.url);
  auto vectors = client.fetch_embeddings(texts);
  std::size_t next = 0;
  return corpus.with_embeddings([&](const std::string&) { return std::move(vectors[next++]); });
}

}  // namespace al
