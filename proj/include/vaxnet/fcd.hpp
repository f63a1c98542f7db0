/*
 * Copyright (C) 2026 The vaxnet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef VAXNET_FCD_HPP
#define VAXNET_FCD_HPP

#include <cstddef>
#include <cstdint>

#include "vaxnet/graph.hpp"
#include "vaxnet/rng.hpp"

namespace vaxnet
{

/// Fixed-choice observation: each respondent names at most k contacts.
struct TruncationParams {
    std::size_t k = 0;
    std::uint64_t rng_seed = 0;
};

/*!
 * Simulates a fixed-choice survey of g.
 *
 * Every undirected edge is read as two nominations. Each node keeps the
 * first min(degree, k) entries of a seeded Fisher-Yates shuffle of its
 * neighbor list, drawn from a per-node sub-stream of base. The observed
 * graph has edge {i, j} when i kept j or j kept i. Because each node's
 * shuffle does not depend on k, observations at k and k + 1 drawn from the
 * same base are nested.
 */
Graph truncate(Graph const& g, std::size_t k, rng::Stream const& base);

Graph truncate(Graph const& g, TruncationParams const& params);

} // namespace vaxnet

#endif
