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
#ifndef VAXNET_VACCINATE_HPP
#define VAXNET_VACCINATE_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vaxnet/graph.hpp"
#include "vaxnet/rng.hpp"

namespace vaxnet
{

enum class Strategy {
    None,
    Random,
    Nomination,
    HighDegree,     ///< interview at random, vaccinate if degree >= cutoff
    HighestDegree,  ///< top nodes by (observed) degree
    MostCentral,    ///< top nodes by (observed) betweenness
};

/// CLI spelling: none, random, nomination, high-degree, top-degree, top-betweenness.
std::string_view strategy_name(Strategy s);
std::optional<Strategy> strategy_from_name(std::string_view name);

struct VaccinationPlan {
    Strategy strategy = Strategy::None;
    std::vector<NodeIndex> selected;
    double target_coverage = 0;
    double achieved_coverage = 0;
    std::size_t quota = 0;
    std::size_t interviews_conducted = 0;
    std::optional<int> cutoff;
    /// FCD level of the graph used for selection; empty for the full network.
    std::optional<std::size_t> observation_k;
    /// HighDegree: vaccinees drawn from non-qualifying interviewees because
    /// too few nodes met the cutoff.
    std::size_t fallback_selected = 0;
    /// Nomination: egos that had no unselected contact to name.
    std::size_t failed_nominations = 0;
};

/// round(coverage * n); coverage must lie in (0, 1).
std::size_t vaccination_quota(double coverage, std::size_t n_nodes);

VaccinationPlan select_none(Graph const& g);

VaccinationPlan select_random(Graph const& g, double coverage, rng::Stream& stream);

/// Random egos each name one random contact not already selected.
VaccinationPlan select_nomination(Graph const& g, double coverage, rng::Stream& stream);

VaccinationPlan select_high_degree(Graph const& g, double coverage, int cutoff,
                                   rng::Stream& stream);

VaccinationPlan select_top_by_degree(Graph const& observed, double coverage,
                                     rng::Stream& stream,
                                     std::optional<std::size_t> observation_k = std::nullopt);

VaccinationPlan select_top_by_betweenness(Graph const& observed, double coverage,
                                          rng::Stream& stream,
                                          std::optional<std::size_t> observation_k = std::nullopt);

/*!
 * Top round(coverage * n) nodes by score, ties broken uniformly at random.
 *
 * Scores are compared after rounding to 1e-6 so that floating-point noise in
 * equal centralities does not masquerade as a ranking.
 */
VaccinationPlan select_top_by_score(Strategy strategy, std::span<double const> scores,
                                    double coverage, rng::Stream& stream,
                                    std::optional<std::size_t> observation_k = std::nullopt);

} // namespace vaxnet

#endif
