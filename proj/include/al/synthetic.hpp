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
#include <vector>

#include "al/corpus.hpp"

namespace al {

/// Seeded Gaussian-blob corpus: class c has mean `separation * e_c` and unit
/// isotropic variance. Class sizes follow `proportions` (largest remainder),
/// documents are shuffled, ids are zero-padded so lexical and numeric order
/// agree.
struct SyntheticSpec {
  std::size_t n_docs = 2458;
  Eigen::Index dim = 16;
  std::vector<std::string> labels = {"Political", "CrimePunishment", "Legality"};
  std::vector<double> proportions = {0.10, 0.29, 0.61};
  double separation = 2.0;
  std::uint64_t seed = 1;
};

Corpus make_synthetic_corpus(const SyntheticSpec& spec);

}  // namespace al
