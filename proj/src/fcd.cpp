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
#include "vaxnet/fcd.hpp"

#include <algorithm>
#include <vector>

namespace vaxnet
{

Graph truncate(Graph const& g, std::size_t k, rng::Stream const& base)
{
    std::vector<Edge> kept;
    std::vector<NodeIndex> nominations;
    for (NodeIndex v = 0; v < g.n_nodes(); ++v) {
        auto nb = g.neighbors(v);
        if (nb.empty() || k == 0)
            continue;
        if (nb.size() <= k) {
            for (auto w : nb)
                kept.emplace_back(std::min(v, w), std::max(v, w));
            continue;
        }
        nominations.assign(nb.begin(), nb.end());
        auto stream = base.split(rng::Label::Node, v);
        stream.shuffle(std::span{nominations});
        for (std::size_t i = 0; i < k; ++i) {
            auto w = nominations[i];
            kept.emplace_back(std::min(v, w), std::max(v, w));
        }
    }
    return Graph::from_edges(g.node_ids(), kept);
}

Graph truncate(Graph const& g, TruncationParams const& params)
{
    return truncate(g, params.k, rng::derive_stream({params.rng_seed, {}}));
}

} // namespace vaxnet
