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
#include "vaxnet/vaccinate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "vaxnet/error.hpp"
#include "vaxnet/metrics.hpp"

namespace vaxnet
{
namespace
{
constexpr std::array<std::pair<Strategy, std::string_view>, 6> strategy_names{{
    {Strategy::None, "none"},
    {Strategy::Random, "random"},
    {Strategy::Nomination, "nomination"},
    {Strategy::HighDegree, "high-degree"},
    {Strategy::HighestDegree, "top-degree"},
    {Strategy::MostCentral, "top-betweenness"},
}};

void check_coverage(double coverage)
{
    if (!(coverage > 0.0 && coverage < 1.0))
        throw PreconditionError("coverage must lie strictly between 0 and 1");
}

VaccinationPlan start_plan(Strategy s, Graph const& g, double coverage)
{
    check_coverage(coverage);
    VaccinationPlan plan;
    plan.strategy = s;
    plan.target_coverage = coverage;
    plan.quota = vaccination_quota(coverage, g.n_nodes());
    return plan;
}

void finish(VaccinationPlan& plan, std::size_t n_nodes)
{
    plan.achieved_coverage = n_nodes == 0 ? 0.0
                                          : static_cast<double>(plan.selected.size())
                                                / static_cast<double>(n_nodes);
}
} // namespace

std::string_view strategy_name(Strategy s)
{
    for (auto const& [value, name] : strategy_names) {
        if (value == s)
            return name;
    }
    return "unknown";
}

std::optional<Strategy> strategy_from_name(std::string_view name)
{
    for (auto const& [value, text] : strategy_names) {
        if (text == name)
            return value;
    }
    return std::nullopt;
}

std::size_t vaccination_quota(double coverage, std::size_t n_nodes)
{
    check_coverage(coverage);
    return static_cast<std::size_t>(std::llround(coverage * static_cast<double>(n_nodes)));
}

VaccinationPlan select_none(Graph const&)
{
    return VaccinationPlan{};
}

VaccinationPlan select_random(Graph const& g, double coverage, rng::Stream& stream)
{
    auto plan = start_plan(Strategy::Random, g, coverage);
    if (plan.quota == 0)
        throw PreconditionError("coverage rounds to zero vaccinees");
    std::vector<NodeIndex> nodes(g.n_nodes());
    for (NodeIndex v = 0; v < nodes.size(); ++v)
        nodes[v] = v;
    stream.partial_shuffle(std::span{nodes}, plan.quota);
    plan.selected.assign(nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(plan.quota));
    plan.interviews_conducted = plan.quota;
    finish(plan, g.n_nodes());
    return plan;
}

VaccinationPlan select_nomination(Graph const& g, double coverage, rng::Stream& stream)
{
    auto plan = start_plan(Strategy::Nomination, g, coverage);
    std::vector<NodeIndex> egos(g.n_nodes());
    for (NodeIndex v = 0; v < egos.size(); ++v)
        egos[v] = v;
    // The partial shuffle also fixes the order in which egos are processed.
    stream.partial_shuffle(std::span{egos}, plan.quota);
    egos.resize(plan.quota);

    std::vector<std::uint8_t> chosen(g.n_nodes(), 0);
    std::vector<NodeIndex> open;
    for (auto ego : egos) {
        ++plan.interviews_conducted;
        open.clear();
        for (auto w : g.neighbors(ego)) {
            if (!chosen[w])
                open.push_back(w);
        }
        if (open.empty()) {
            ++plan.failed_nominations;
            continue;
        }
        auto pick = open[stream.uniform_below(open.size())];
        chosen[pick] = 1;
        plan.selected.push_back(pick);
    }
    finish(plan, g.n_nodes());
    return plan;
}

VaccinationPlan select_high_degree(Graph const& g, double coverage, int cutoff,
                                   rng::Stream& stream)
{
    if (cutoff < 0)
        throw PreconditionError("degree cutoff must be non-negative");
    auto plan = start_plan(Strategy::HighDegree, g, coverage);
    plan.cutoff = cutoff;
    auto order = rng::random_permutation(g.n_nodes(), stream);
    std::vector<NodeIndex> rejected;
    for (auto v : order) {
        if (plan.selected.size() >= plan.quota)
            break;
        ++plan.interviews_conducted;
        if (g.degree(v) >= static_cast<std::size_t>(cutoff))
            plan.selected.push_back(v);
        else
            rejected.push_back(v);
    }
    if (plan.selected.size() < plan.quota) {
        auto missing = plan.quota - plan.selected.size();
        stream.partial_shuffle(std::span{rejected}, missing);
        plan.selected.insert(plan.selected.end(), rejected.begin(),
                             rejected.begin() + static_cast<std::ptrdiff_t>(missing));
        plan.fallback_selected = missing;
    }
    finish(plan, g.n_nodes());
    return plan;
}

VaccinationPlan select_top_by_score(Strategy strategy, std::span<double const> scores,
                                    double coverage, rng::Stream& stream,
                                    std::optional<std::size_t> observation_k)
{
    check_coverage(coverage);
    VaccinationPlan plan;
    plan.strategy = strategy;
    plan.target_coverage = coverage;
    plan.quota = vaccination_quota(coverage, scores.size());
    plan.observation_k = observation_k;
    // Ranking needs the whole observed network: everybody is interviewed.
    plan.interviews_conducted = scores.size();

    std::vector<std::int64_t> key(scores.size());
    for (std::size_t v = 0; v < scores.size(); ++v)
        key[v] = std::llround(scores[v] * 1e6);
    auto order = rng::random_permutation(scores.size(), stream);
    std::stable_sort(order.begin(), order.end(),
                     [&](NodeIndex a, NodeIndex b) { return key[a] > key[b]; });
    plan.selected.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(plan.quota));
    finish(plan, scores.size());
    return plan;
}

VaccinationPlan select_top_by_degree(Graph const& observed, double coverage,
                                     rng::Stream& stream, std::optional<std::size_t> observation_k)
{
    std::vector<double> scores(observed.n_nodes());
    for (NodeIndex v = 0; v < scores.size(); ++v)
        scores[v] = static_cast<double>(observed.degree(v));
    return select_top_by_score(Strategy::HighestDegree, scores, coverage, stream, observation_k);
}

VaccinationPlan select_top_by_betweenness(Graph const& observed, double coverage,
                                          rng::Stream& stream,
                                          std::optional<std::size_t> observation_k)
{
    auto scores = betweenness_all(observed);
    return select_top_by_score(Strategy::MostCentral, scores, coverage, stream, observation_k);
}

} // namespace vaxnet
