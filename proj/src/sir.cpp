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
#include "vaxnet/sir.hpp"

#include <cmath>
#include <string>

#include "vaxnet/error.hpp"
#include "vaxnet/rng.hpp"

namespace vaxnet
{
namespace
{
enum State : std::uint8_t {
    susceptible,
    infectious,
    recovered,
    vaccinated_state,
    infected_this_step,
};

void check_params(SirParams const& p)
{
    if (!(p.beta >= 0 && p.beta <= 1))
        throw PreconditionError("beta must lie in [0, 1]");
    if (!(p.gamma >= 0 && p.gamma <= 1))
        throw PreconditionError("gamma must lie in [0, 1]");
    if (!(p.seed_fraction > 0 && p.seed_fraction <= 1))
        throw PreconditionError("seed fraction must lie in (0, 1]");
}
} // namespace

std::size_t seed_count(double seed_fraction, std::size_t n_nodes)
{
    return static_cast<std::size_t>(
        std::ceil(seed_fraction * static_cast<double>(n_nodes) - 1e-9));
}

SirOutcome run_sir(Graph const& g, SirParams const& params,
                   std::span<NodeIndex const> vaccinated, SirOptions const& options)
{
    check_params(params);
    auto n = g.n_nodes();
    std::vector<std::uint8_t> state(n, susceptible);
    std::size_t n_vaccinated = 0;
    for (auto v : vaccinated) {
        if (v >= n)
            throw PreconditionError("vaccinated node " + std::to_string(v) + " not in graph");
        if (state[v] != vaccinated_state) {
            state[v] = vaccinated_state;
            ++n_vaccinated;
        }
    }

    auto n_seeds = seed_count(params.seed_fraction, n);
    if (n_seeds == 0)
        throw PreconditionError("seed fraction yields no seeds");
    if (n_seeds > n - n_vaccinated)
        throw PreconditionError("more seeds than unvaccinated nodes");

    auto stream = rng::derive_stream({params.rng_seed, {}});
    std::vector<NodeIndex> pool;
    pool.reserve(n - n_vaccinated);
    for (NodeIndex v = 0; v < n; ++v) {
        if (state[v] == susceptible)
            pool.push_back(v);
    }
    stream.partial_shuffle(std::span{pool}, n_seeds);

    SirOutcome out;
    out.n_nodes = n;
    out.n_seeds = n_seeds;
    std::vector<NodeIndex> current(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_seeds));
    std::vector<std::uint8_t> is_seed(n, 0);
    for (auto s : current) {
        state[s] = infectious;
        is_seed[s] = 1;
    }
    if (options.record_transmissions)
        out.seeds = current;

    StepCounts counts{n - n_vaccinated - n_seeds, n_seeds, 0, n_vaccinated};
    if (options.record_steps)
        out.per_step_counts.push_back(counts);

    std::size_t ever = n_seeds;
    std::vector<NodeIndex> fresh;
    std::vector<NodeIndex> next;
    std::vector<NodeIndex> candidates;
    while (!current.empty()) {
        ++out.duration_steps;
        fresh.clear();

        // Infection phase: each infectious node contacts one uniformly chosen
        // neighbor (vaccinated nodes are gone from the graph) and the contact
        // transmits with probability beta if that neighbor is susceptible.
        // State is judged at the start of the step; a node hit twice counts
        // once, credited to the first attempt.
        for (auto v : current) {
            if (!stream.bernoulli(params.beta))
                continue;
            candidates.clear();
            for (auto w : g.neighbors(v)) {
                if (state[w] != vaccinated_state)
                    candidates.push_back(w);
            }
            if (candidates.empty())
                continue;
            auto target = candidates[stream.uniform_below(candidates.size())];
            if (state[target] != susceptible)
                continue;
            state[target] = infected_this_step;
            fresh.push_back(target);
            if (is_seed[v])
                ++out.seed_caused_infections;
            if (options.record_transmissions)
                out.transmissions.push_back({out.duration_steps, v, target});
        }

        // Recovery phase, only for nodes infectious at the start of the step.
        next.clear();
        std::size_t recovered_now = 0;
        for (auto v : current) {
            if (stream.bernoulli(params.gamma)) {
                state[v] = recovered;
                ++recovered_now;
            } else {
                next.push_back(v);
            }
        }
        for (auto v : fresh) {
            state[v] = infectious;
            next.push_back(v);
        }
        ever += fresh.size();
        counts.susceptible -= fresh.size();
        counts.recovered += recovered_now;
        counts.infectious = next.size();
        if (options.record_steps)
            out.per_step_counts.push_back(counts);
        current.swap(next);

        if (params.gamma == 0.0) {
            // Nobody recovers: stop once no susceptible node is reachable.
            bool can_spread = false;
            for (auto v : params.beta > 0 ? std::span<NodeIndex const>(current)
                                          : std::span<NodeIndex const>()) {
                for (auto w : g.neighbors(v)) {
                    if (state[w] == susceptible) {
                        can_spread = true;
                        break;
                    }
                }
                if (can_spread)
                    break;
            }
            if (!can_spread)
                break;
        }
    }

    out.n_ever_infected = ever;
    out.cumulative_incidence = static_cast<double>(ever) / static_cast<double>(n);
    return out;
}

double estimate_r0(std::span<SirOutcome const> outcomes)
{
    if (outcomes.empty())
        throw PreconditionError("R0 estimate needs at least one outcome");
    double sum = 0;
    for (auto const& o : outcomes) {
        if (o.n_seeds == 0)
            throw PreconditionError("R0 estimate needs seeded outcomes");
        sum += static_cast<double>(o.seed_caused_infections) / static_cast<double>(o.n_seeds);
    }
    return sum / static_cast<double>(outcomes.size());
}

} // namespace vaxnet
