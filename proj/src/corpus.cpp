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

#include "al/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "al/error.hpp"

namespace al {
namespace {

using nlohmann::json;

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = kFnvOffset) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

std::uint64_t splitmix_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

bool is_unicode_space(char32_t cp) {
  return (cp >= 0x09 && cp <= 0x0d) || cp == 0x20 || cp == 0x85 || cp == 0xa0 ||
         cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200a) || cp == 0x2028 ||
         cp == 0x2029 || cp == 0x202f || cp == 0x205f || cp == 0x3000;
}

char32_t to_lower(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
  if (cp >= 0xc0 && cp <= 0xde && cp != 0xd7) return cp + 0x20;
  if (cp >= 0x391 && cp <= 0x3a9 && cp != 0x3a2) return cp + 0x20;
  if (cp >= 0x410 && cp <= 0x42f) return cp + 0x20;
  if (cp >= 0x400 && cp <= 0x40f) return cp + 0x50;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else {
    out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  }
}

// Decodes one code point starting at text[pos]. Malformed sequences yield the
// raw byte, copied through unchanged by the caller.
std::pair<char32_t, std::size_t> decode_utf8(std::string_view text, std::size_t pos, bool& valid) {
  const auto lead = static_cast<unsigned char>(text[pos]);
  valid = true;
  std::size_t len = 0;
  char32_t cp = 0;
  if (lead < 0x80) return {lead, 1};
  if ((lead & 0xe0) == 0xc0) {
    len = 2;
    cp = lead & 0x1f;
  } else if ((lead & 0xf0) == 0xe0) {
    len = 3;
    cp = lead & 0x0f;
  } else if ((lead & 0xf8) == 0xf0) {
    len = 4;
    cp = lead & 0x07;
  } else {
    valid = false;
    return {lead, 1};
  }
  if (pos + len > text.size()) {
    valid = false;
    return {lead, 1};
  }
  for (std::size_t i = 1; i < len; ++i) {
    const auto c = static_cast<unsigned char>(text[pos + i]);
    if ((c & 0xc0) != 0x80) {
      valid = false;
      return {lead, 1};
    }
    cp = (cp << 6) | (c & 0x3f);
  }
  return {cp, len};
}

}  // namespace

Corpus::Corpus(std::vector<Document> documents, std::vector<std::string> label_set)
    : documents_(std::move(documents)), label_set_(std::move(label_set)) {
  for (std::size_t i = 0; i < label_set_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (label_set_[i] == label_set_[j]) throw ValidationError("duplicate label " + label_set_[i]);
    }
  }
  index_.reserve(documents_.size());
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    const Document& doc = documents_[i];
    if (!index_.emplace(doc.id, i).second) throw ValidationError("duplicate id " + doc.id);
    if (doc.embedding) {
      if (doc.embedding->size() == 0) throw ValidationError("empty embedding for " + doc.id);
      if (dim_ == 0) dim_ = doc.embedding->size();
      if (doc.embedding->size() != dim_) {
        throw ValidationError("embedding dimension mismatch for " + doc.id + ": expected " +
                              std::to_string(dim_) + ", got " +
                              std::to_string(doc.embedding->size()));
      }
      if (!doc.embedding->allFinite()) throw ValidationError("non-finite embedding for " + doc.id);
    }
    if (doc.gold_label &&
        std::find(label_set_.begin(), label_set_.end(), *doc.gold_label) == label_set_.end()) {
      label_set_.push_back(*doc.gold_label);
    }
  }
}

bool Corpus::contains(std::string_view id) const { return index_.contains(std::string(id)); }

std::size_t Corpus::index_of(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) throw ValidationError("unknown id " + std::string(id));
  return it->second;
}

const Document& Corpus::at(std::string_view id) const { return documents_[index_of(id)]; }

bool Corpus::fully_embedded() const {
  return std::all_of(documents_.begin(), documents_.end(),
                     [](const Document& d) { return d.embedding.has_value(); });
}

Eigen::MatrixXd Corpus::embedding_matrix(std::span<const std::string> ids) const {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(ids.size()), dim_);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const Document& doc = at(ids[i]);
    if (!doc.embedding) throw ValidationError("missing embedding for " + doc.id);
    x.row(static_cast<Eigen::Index>(i)) = doc.embedding->transpose();
  }
  return x;
}

std::uint64_t Corpus::fingerprint() const {
  std::uint64_t h = kFnvOffset;
  const auto mix_in = [&h](std::string_view bytes) {
    h = fnv1a(bytes, h);
    h = fnv1a(std::string_view("\x1f", 1), h);
  };
  for (const auto& label : label_set_) mix_in(label);
  for (const auto& doc : documents_) {
    mix_in(doc.id);
    mix_in(doc.gold_label.value_or(""));
    if (doc.embedding) {
      for (double v : *doc.embedding) {
        mix_in(std::string_view(reinterpret_cast<const char*>(&v), sizeof v));
      }
    }
  }
  return h;
}

Corpus ingest_corpus(std::istream& source) {
  std::vector<Document> docs;
  std::unordered_map<std::string, std::size_t> first_line;
  std::string line;
  std::size_t line_no = 0;
  Eigen::Index dim = 0;
  const auto fail = [&line_no](const std::string& what) {
    throw ValidationError(what + " at line " + std::to_string(line_no));
  };
  while (std::getline(source, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error&) {
      fail("malformed JSON");
    } catch (const json::out_of_range&) {
      fail("non-finite number");  // literals such as 1e999
    }
    if (!record.is_object()) fail("record is not an object");
    if (!record.contains("id") || !record["id"].is_string()) fail("missing string id");

    Document doc;
    doc.id = record["id"].get<std::string>();
    if (doc.id.empty()) fail("empty id");
    if (!first_line.emplace(doc.id, line_no).second) fail("duplicate id " + doc.id);

    if (record.contains("text")) {
      if (!record["text"].is_string()) fail("text is not a string");
      doc.text = record["text"].get<std::string>();
    }
    if (record.contains("gold_label") && !record["gold_label"].is_null()) {
      if (!record["gold_label"].is_string()) fail("gold_label is not a string");
      doc.gold_label = record["gold_label"].get<std::string>();
    }
    if (record.contains("embedding") && !record["embedding"].is_null()) {
      const json& values = record["embedding"];
      if (!values.is_array() || values.empty()) fail("embedding is not a non-empty array");
      Eigen::VectorXd emb(static_cast<Eigen::Index>(values.size()));
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (!values[i].is_number()) fail("non-numeric embedding component");
        emb[static_cast<Eigen::Index>(i)] = values[i].get<double>();
      }
      if (!emb.allFinite()) fail("non-finite embedding component");
      if (dim == 0) dim = emb.size();
      if (emb.size() != dim) {
        fail("embedding dimension mismatch (expected " + std::to_string(dim) + ", got " +
             std::to_string(emb.size()) + ")");
      }
      doc.embedding = std::move(emb);
    }
    docs.push_back(std::move(doc));
  }
  if (source.bad()) throw IoError("read error while ingesting corpus");
  return Corpus(std::move(docs));
}

Corpus ingest_corpus_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return ingest_corpus(in);
}

std::string corpus_to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& doc : corpus.documents()) {
    json record = {{"id", doc.id}, {"text", doc.text}};
    if (doc.embedding) {
      record["embedding"] = std::vector<double>(doc.embedding->begin(), doc.embedding->end());
    }
    if (doc.gold_label) record["gold_label"] = *doc.gold_label;
    out += record.dump();
    out += '\n';
  }
  return out;
}

ClassDistribution corpus_stats(const Corpus& corpus) {
  ClassDistribution dist;
  for (const auto& label : corpus.label_set()) dist.classes.push_back({label, 0, 0.0});
  for (const auto& doc : corpus.documents()) {
    if (!doc.gold_label) continue;
    for (auto& c : dist.classes) {
      if (c.label == *doc.gold_label) {
        ++c.count;
        break;
      }
    }
    ++dist.total;
  }
  if (dist.total > 0) {
    for (auto& c : dist.classes) {
      c.fraction = static_cast<double>(c.count) / static_cast<double>(dist.total);
    }
  }
  return dist;
}

PoolTestSplit split_pool_test(const Corpus& corpus, double test_fraction, Rng& rng) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ValidationError("test_fraction must lie in (0, 1)");
  }
  const std::size_t n = corpus.size();
  const auto n_test = static_cast<std::size_t>(std::round(static_cast<double>(n) * test_fraction));
  if (n_test == 0 || n_test >= n) {
    throw ValidationError("split of " + std::to_string(n) + " documents leaves pool or test empty");
  }
  std::vector<std::string> ids;
  ids.reserve(n);
  for (const auto& doc : corpus.documents()) ids.push_back(doc.id);
  // Fisher-Yates, front to back.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t j = i + uniform_below(rng, n - i);
    std::swap(ids[i], ids[j]);
  }
  PoolTestSplit split;
  split.test_ids.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_test));
  split.pool_ids.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_test), ids.end());
  return split;
}

PoolTestSplit split_pool_test(const Corpus& corpus, double test_fraction, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  return split_pool_test(corpus, test_fraction, rng);
}

std::vector<std::string> hash_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t pos = 0;
  while (pos < text.size()) {
    bool valid = true;
    const auto [cp, len] = decode_utf8(text, pos, valid);
    if (!valid) {
      current.push_back(text[pos]);
    } else if (is_unicode_space(cp)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      append_utf8(current, to_lower(cp));
    }
    pos += len;
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Eigen::VectorXd hash_embed(std::string_view text, Eigen::Index dim, std::uint64_t salt) {
  if (dim < 1) throw ValidationError("hash_embed dimension must be at least 1");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  for (const auto& token : hash_tokens(text)) {
    const std::uint64_t mix = splitmix_finalize(fnv1a(token) ^ salt);
    const auto bucket = static_cast<Eigen::Index>(mix % static_cast<std::uint64_t>(dim));
    v[bucket] += (mix >> 63) ? -1.0 : 1.0;
  }
  const double norm = v.norm();
  if (norm > 0.0) v /= norm;
  return v;
}

}  // namespace al
