// Copyright 2026 The qdcg Authors
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
#include <span>
#include <vector>

#include "qdcg/measure.hpp"

namespace qdcg::detail {

// compress_points for a cloud laid out as consecutive runs, each ascending in
// position. run_starts holds the first index of every run, starting at 0; a
// trailing points.size() is allowed.
DiscreteMeasure compress_sorted_runs(std::span<const Atom> points,
                                     std::span<const std::size_t> run_starts, unsigned n);

}  // namespace qdcg::detail
