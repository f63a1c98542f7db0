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
#ifndef VAXNET_NETGEN_HPP
#define VAXNET_NETGEN_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vaxnet/graph.hpp"
#include "vaxnet/metrics.hpp"
#include "vaxnet/rng.hpp"

namespace vaxnet
{

/// Sum over unordered degree pairs of |a(i, j) - b(i, j)|.
double dmm_distance(DegreeMixingMatrix const& a, DegreeMixingMatrix const& b);

/// Proposal kernel of the Metropolis-Hastings chain.
enum class Proposal {
    /// Toggle a uniformly chosen node pair (symmetric proposal).
    UniformToggle,
    /// With probability 1/2 remove a uniform edge, else add a uniform
    /// non-edge; Hastings-corrected. Mixes far better on sparse graphs.
    TieNoTie,
    /// Tie/no-tie toggles mixed half and half with degree-preserving
    /// double-edge swaps (symmetric), which move edges between mixing cells
    /// without disturbing the degree sequence.
    TieNoTieSwap,
    /// Tie/no-tie toggles, double-edge swaps and endpoint rewires
    /// ({u, v} -> {u, w}) in equal parts. Rewires keep the edge count but
    /// move degree between nodes, so heavy tails can form without paying
    /// for intermediate edge counts. Swaps and rewires are symmetric.
    Mixed,
};

/// uniform-toggle, tie-no-tie, tie-no-tie-swap, mixed.
std::string_view proposal_name(Proposal p);
std::optional<Proposal> proposal_from_name(std::string_view name);

struct McmcParams {
    DegreeMixingMatrix target;
    std::size_t n_nodes = 0;
    double target_mean_degree = 0;
    std::size_t burn_in = 100000;
    std::size_t thinning = 1000;
    double concentration = 30000;
    std::uint64_t rng_seed = 0;
    Proposal proposal = Proposal::Mixed;
    /// Steps between trace entries; 0 means use thinning.
    std::size_t trace_interval = 0;
};

struct ConvergenceReport {
    std::vector<std::size_t> step_trace;
    std::vector<double> mean_degree_trace;
    std::vector<double> dmm_distance_trace;
    std::vector<double> accepted_trace;  ///< running accepted fraction
    double accepted_fraction = 0;
};

/*!
 * Metropolis-Hastings chain over simple graphs on a fixed node set.
 *
 * Stationary density is proportional to exp(-concentration * E(G)) with
 * E(G) = dmm_distance(DMM(G), target) + |m / m* - 1|, m the edge count and
 * m* the edge scale. A zero scale drops the second term. The normalised
 * distance alone cannot see the edge count or isolated nodes, so on large
 * sparse graphs it lets the chain inflate or shed edges freely.
 * Each step applies one move of the proposal kernel (a toggle, or a swap or
 * rewire built from toggles). Edge counts per degree cell are updated
 * incrementally: toggling {u, v} re-bins only the edges incident to u and v.
 */
class MetropolisChain
{
  public:
    MetropolisChain(DegreeMixingMatrix target, Graph const& initial, double concentration,
                    rng::Stream stream, Proposal proposal = Proposal::UniformToggle,
                    double edge_scale = 0.0);

    /// One proposal; returns whether it was accepted.
    bool step();

    /// Number of steps that proposed a swap or a rewire.
    std::size_t swap_proposals() const noexcept { return swap_proposals_; }

    /// Toggles {u, v} unconditionally (used by tests and initialisation).
    void force_toggle(NodeIndex u, NodeIndex v);

    /// Current energy E(G) (see class comment).
    double distance() const noexcept { return distance_; }
    /// dmm_distance(DMM(G), target), whatever the energy scale.
    double normalized_distance() const;
    double distance_if_toggled(NodeIndex u, NodeIndex v);
    std::size_t n_nodes() const noexcept { return adj_.size(); }
    std::size_t n_edges() const noexcept { return edge_list_.size(); }
    double mean_degree() const noexcept;
    bool has_edge(NodeIndex u, NodeIndex v) const noexcept;
    double concentration() const noexcept { return concentration_; }
    Proposal proposal() const noexcept { return proposal_; }

    /// Probability that the toggle part of the kernel proposes {u, v} from
    /// the current state, given that a toggle was drawn.
    double proposal_probability(NodeIndex u, NodeIndex v) const noexcept;

    std::map<DegreeMixingMatrix::Cell, std::size_t> cell_counts() const;
    DegreeMixingMatrix current_dmm() const;
    Graph snapshot() const;

  private:
    std::size_t cell_index(std::size_t a, std::size_t b) const noexcept;
    void ensure_degree_capacity(std::size_t d);
    void shift_cell(std::size_t a, std::size_t b, long delta);
    void apply_toggle(NodeIndex u, NodeIndex v);
    double compute_distance() const;
    double distance_at_scale(double scale) const;
    bool toggle_step();
    bool swap_step();
    bool rewire_step();
    bool metropolis_accept(double proposed, double log_hastings);
    double target_at(std::size_t a, std::size_t b) const noexcept;

    std::vector<double> target_dense_;
    std::size_t target_dim_ = 0;
    double target_total_ = 0;
    double concentration_;
    double edge_scale_;
    rng::Stream stream_;
    Proposal proposal_;

    std::vector<std::vector<NodeIndex>> adj_;
    std::vector<std::uint32_t> matrix_;  // n x n; edge slot + 1, 0 if absent
    std::vector<Edge> edge_list_;

    std::size_t dim_ = 0;             // degree capacity (exclusive)
    std::vector<long> counts_;        // dim_ x dim_, upper triangle used
    std::vector<std::size_t> active_; // cell indices with positive count
    std::vector<std::size_t> active_pos_;
    double distance_ = 0;
    std::size_t swap_proposals_ = 0;
};

/// Erdos-Renyi G(n, p) graph.
Graph erdos_renyi(std::size_t n_nodes, double edge_probability, rng::Stream& stream);

struct Ensemble {
    std::vector<Graph> samples;
    ConvergenceReport report;
};

/// ER start with p = mean / (n - 1), burn_in steps, then one sample every
/// thinning steps.
Ensemble sample_ensemble(McmcParams const& params, std::size_t n_samples);

struct ConvergenceTolerances {
    double mean_degree = 0.5;
    double dmm_distance = 0.15;
    /// Fraction of the trace (from the end) averaged by the check.
    double window_fraction = 0.25;
};

struct ConvergenceVerdict {
    bool passed = false;
    std::vector<std::string> reasons;
};

ConvergenceVerdict convergence_check(ConvergenceReport const& report, double target_mean_degree,
                                     ConvergenceTolerances const& tol = {});

} // namespace vaxnet

#endif
