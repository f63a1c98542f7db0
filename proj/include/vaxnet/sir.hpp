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
#ifndef VAXNET_SIR_HPP
#define VAXNET_SIR_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vaxnet/graph.hpp"

namespace vaxnet
{

struct SirParams {
    double beta = 0.25;  ///< per-step transmission probability of the single attempt
    double gamma = 0.1;  ///< per-step recovery probability
    double seed_fraction = 0.01;
    std::uint64_t rng_seed = 0;
};

struct StepCounts {
    std::size_t susceptible = 0;
    std::size_t infectious = 0;
    std::size_t recovered = 0;
    std::size_t vaccinated = 0;
};

struct Transmission {
    std::size_t step = 0;  ///< 1-based step in which the infection happened
    NodeIndex infector = 0;
    NodeIndex infectee = 0;
};

struct SirOptions {
    bool record_steps = false;
    bool record_transmissions = false;
};

struct SirOutcome {
    double cumulative_incidence = 0;  ///< ever infected / all nodes (vaccinated included)
    std::size_t n_nodes = 0;
    std::size_t n_seeds = 0;
    std::size_t n_ever_infected = 0;
    std::size_t seed_caused_infections = 0;
    std::size_t duration_steps = 0;
    /// Entry 0 is the state after seeding; entry t after step t.
    std::vector<StepCounts> per_step_counts;
    std::vector<NodeIndex> seeds;
    std::vector<Transmission> transmissions;
};

/// ceil(fraction * n), ignoring floating-point excess below 1e-9.
std::size_t seed_count(double seed_fraction, std::size_t n_nodes);

/*!
 * Runs one discrete-time SIR epidemic with unit infectivity.
 *
 * Vaccinated nodes are removed with their edges, then seed_count() seeds are
 * drawn from the remaining nodes. Each step, every infectious node contacts
 * one uniformly chosen remaining neighbor and infects it with probability
 * beta if it was susceptible at the start of the step, so contacts with
 * infectious or recovered neighbors are wasted. Afterwards every node that
 * was infectious at the start
 * of the step recovers with probability gamma. When two attempts hit the
 * same node in one step, the first in infectious-list order is credited.
 */
SirOutcome run_sir(Graph const& g, SirParams const& params,
                   std::span<NodeIndex const> vaccinated, SirOptions const& options = {});

/// Mean over outcomes of seed-caused infections per seed.
double estimate_r0(std::span<SirOutcome const> outcomes);

} // namespace vaxnet

#endif
