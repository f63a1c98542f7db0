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
#include "vaxnet/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vaxnet/error.hpp"

namespace vaxnet
{

std::string_view proposal_name(Proposal p)
{
    switch (p) {
    case Proposal::UniformToggle: return "uniform-toggle";
    case Proposal::TieNoTie: return "tie-no-tie";
    case Proposal::TieNoTieSwap: return "tie-no-tie-swap";
    case Proposal::Mixed: return "mixed";
    }
    return "unknown";
}

std::optional<Proposal> proposal_from_name(std::string_view name)
{
    for (auto p : {Proposal::UniformToggle, Proposal::TieNoTie, Proposal::TieNoTieSwap,
                   Proposal::Mixed}) {
        if (proposal_name(p) == name)
            return p;
    }
    return std::nullopt;
}

double dmm_distance(DegreeMixingMatrix const& a, DegreeMixingMatrix const& b)
{
    double total = 0;
    auto ia = a.cells().begin();
    auto ib = b.cells().begin();
    auto ea = a.cells().end();
    auto eb = b.cells().end();
    while (ia != ea || ib != eb) {
        if (ib == eb || (ia != ea && ia->first < ib->first)) {
            total += std::abs(ia->second);
            ++ia;
        } else if (ia == ea || ib->first < ia->first) {
            total += std::abs(ib->second);
            ++ib;
        } else {
            total += std::abs(ia->second - ib->second);
            ++ia;
            ++ib;
        }
    }
    return total;
}

//---------------------------------------------------------------------------//
// MetropolisChain
//---------------------------------------------------------------------------//

MetropolisChain::MetropolisChain(DegreeMixingMatrix target, Graph const& initial,
                                 double concentration, rng::Stream stream, Proposal proposal,
                                 double edge_scale)
    : concentration_{concentration}, edge_scale_{edge_scale}, stream_{stream},
      proposal_{proposal}
{
    if (!(concentration > 0))
        throw PreconditionError("concentration must be positive");
    if (target.empty())
        throw PreconditionError("target degree mixing matrix is empty");
    if (edge_scale < 0)
        throw PreconditionError("edge scale must be non-negative");
    if (initial.n_nodes() < 2)
        throw PreconditionError("chain needs at least two nodes");

    target_dim_ = static_cast<std::size_t>(target.max_degree()) + 1;
    target_dense_.assign(target_dim_ * target_dim_, 0.0);
    for (auto const& [cell, frac] : target.cells()) {
        target_dense_[static_cast<std::size_t>(cell.first) * target_dim_
                      + static_cast<std::size_t>(cell.second)] = frac;
        target_total_ += frac;
    }

    auto n = initial.n_nodes();
    adj_.assign(n, {});
    matrix_.assign(n * n, 0);
    ensure_degree_capacity(16);
    for (auto [u, v] : initial.edges())
        apply_toggle(u, v);
    distance_ = compute_distance();
}

double MetropolisChain::target_at(std::size_t a, std::size_t b) const noexcept
{
    if (b >= target_dim_)
        return 0.0;
    return target_dense_[a * target_dim_ + b];
}

std::size_t MetropolisChain::cell_index(std::size_t a, std::size_t b) const noexcept
{
    return a <= b ? a * dim_ + b : b * dim_ + a;
}

void MetropolisChain::ensure_degree_capacity(std::size_t d)
{
    if (d < dim_)
        return;
    auto new_dim = std::max<std::size_t>(2 * dim_, d + 1);
    std::vector<long> counts(new_dim * new_dim, 0);
    std::vector<std::size_t> pos(new_dim * new_dim, 0);
    for (std::size_t i = 0; i < active_.size(); ++i) {
        auto a = active_[i] / dim_;
        auto b = active_[i] % dim_;
        auto idx = a * new_dim + b;
        counts[idx] = counts_[active_[i]];
        active_[i] = idx;
        pos[idx] = i;
    }
    dim_ = new_dim;
    counts_ = std::move(counts);
    active_pos_ = std::move(pos);
}

void MetropolisChain::shift_cell(std::size_t a, std::size_t b, long delta)
{
    auto idx = cell_index(a, b);
    auto before = counts_[idx];
    auto after = before + delta;
    counts_[idx] = after;
    if (before == 0 && after > 0) {
        active_pos_[idx] = active_.size();
        active_.push_back(idx);
    } else if (before > 0 && after == 0) {
        auto slot = active_pos_[idx];
        auto last = active_.back();
        active_[slot] = last;
        active_pos_[last] = slot;
        active_.pop_back();
    }
}

void MetropolisChain::apply_toggle(NodeIndex u, NodeIndex v)
{
    auto n = adj_.size();
    auto du = adj_[u].size();
    auto dv = adj_[v].size();
    bool present = matrix_[u * n + v] != 0;
    auto slot = matrix_[u * n + v];
    ensure_degree_capacity(std::max(du, dv) + 1);

    auto rebin = [&](NodeIndex hub, std::size_t from, std::size_t to) {
        for (auto x : adj_[hub]) {
            auto dx = adj_[x].size();
            shift_cell(from, dx, -1);
            shift_cell(to, dx, +1);
        }
    };
    auto erase = [](std::vector<NodeIndex>& list, NodeIndex x) {
        auto it = std::find(list.begin(), list.end(), x);
        *it = list.back();
        list.pop_back();
    };

    if (present) {
        shift_cell(du, dv, -1);
        erase(adj_[u], v);
        erase(adj_[v], u);
        rebin(u, du, du - 1);
        rebin(v, dv, dv - 1);
        // Swap-remove from the edge list, patching the moved edge's slot.
        auto moved = edge_list_.back();
        edge_list_[slot - 1] = moved;
        matrix_[moved.first * n + moved.second] = matrix_[moved.second * n + moved.first] = slot;
        edge_list_.pop_back();
        matrix_[u * n + v] = matrix_[v * n + u] = 0;
    } else {
        rebin(u, du, du + 1);
        rebin(v, dv, dv + 1);
        adj_[u].push_back(v);
        adj_[v].push_back(u);
        shift_cell(du + 1, dv + 1, +1);
        edge_list_.emplace_back(u, v);
        matrix_[u * n + v] = matrix_[v * n + u] = static_cast<std::uint32_t>(edge_list_.size());
    }
}

double MetropolisChain::compute_distance() const
{
    auto m = static_cast<double>(edge_list_.size());
    auto d = distance_at_scale(m);
    if (edge_scale_ > 0)
        d += std::abs(m / edge_scale_ - 1.0);
    return d;
}

double MetropolisChain::normalized_distance() const
{
    return distance_at_scale(static_cast<double>(edge_list_.size()));
}

double MetropolisChain::distance_at_scale(double m) const
{
    if (edge_list_.empty())
        return target_total_;
    double total = target_total_;
    for (auto idx : active_) {
        auto a = idx / dim_;
        auto b = idx % dim_;
        auto t = target_at(a, b);
        total += std::abs(static_cast<double>(counts_[idx]) / m - t) - t;
    }
    return std::max(total, 0.0);
}

void MetropolisChain::force_toggle(NodeIndex u, NodeIndex v)
{
    if (u == v || u >= adj_.size() || v >= adj_.size())
        throw PreconditionError("invalid node pair for toggle");
    apply_toggle(u, v);
    distance_ = compute_distance();
}

double MetropolisChain::distance_if_toggled(NodeIndex u, NodeIndex v)
{
    apply_toggle(u, v);
    auto d = compute_distance();
    apply_toggle(u, v);
    return d;
}

namespace
{
// Tie/no-tie kernel: P(add) for a state with m edges out of `pairs` slots.
double add_probability(std::size_t m, std::size_t pairs) noexcept
{
    if (m == 0)
        return 1.0;
    if (m == pairs)
        return 0.0;
    return 0.5;
}
} // namespace

double MetropolisChain::proposal_probability(NodeIndex u, NodeIndex v) const noexcept
{
    auto n = adj_.size();
    auto pairs = n * (n - 1) / 2;
    if (proposal_ == Proposal::UniformToggle)
        return 1.0 / static_cast<double>(pairs);
    // Toggle component only; swaps are symmetric and handled separately.
    auto m = edge_list_.size();
    auto p_add = add_probability(m, pairs);
    if (has_edge(u, v))
        return (1.0 - p_add) / static_cast<double>(m);
    return p_add / static_cast<double>(pairs - m);
}

bool MetropolisChain::metropolis_accept(double proposed, double log_hastings)
{
    auto log_ratio = -concentration_ * (proposed - distance_) + log_hastings;
    return log_ratio >= 0 || stream_.uniform_real() < std::exp(log_ratio);
}

bool MetropolisChain::step()
{
    // The move type is drawn independently of the state so that forward and
    // reverse proposals use the same mixture weights; moves that need more
    // edges than exist are rejected outright.
    if (proposal_ == Proposal::TieNoTieSwap && stream_.uniform_real() < 0.5) {
        ++swap_proposals_;
        return edge_list_.size() >= 2 && swap_step();
    }
    if (proposal_ == Proposal::Mixed) {
        switch (stream_.uniform_below(3)) {
        case 0:
            ++swap_proposals_;
            return edge_list_.size() >= 2 && swap_step();
        case 1:
            ++swap_proposals_;
            return !edge_list_.empty() && rewire_step();
        default:
            break;
        }
    }
    return toggle_step();
}

bool MetropolisChain::toggle_step()
{
    auto n = adj_.size();
    auto pairs = n * (n - 1) / 2;
    NodeIndex u = 0;
    NodeIndex v = 0;
    double log_hastings = 0;
    if (proposal_ == Proposal::UniformToggle) {
        u = static_cast<NodeIndex>(stream_.uniform_below(n));
        v = static_cast<NodeIndex>(stream_.uniform_below(n - 1));
        if (v >= u)
            ++v;
    } else {
        auto m = edge_list_.size();
        auto p_add = add_probability(m, pairs);
        bool add = p_add >= 1.0 || (p_add > 0.0 && stream_.uniform_real() < p_add);
        if (add) {
            do {
                u = static_cast<NodeIndex>(stream_.uniform_below(n));
                v = static_cast<NodeIndex>(stream_.uniform_below(n - 1));
                if (v >= u)
                    ++v;
            } while (has_edge(u, v));
            auto forward = p_add / static_cast<double>(pairs - m);
            auto backward = (1.0 - add_probability(m + 1, pairs)) / static_cast<double>(m + 1);
            log_hastings = std::log(backward / forward);
        } else {
            auto e = edge_list_[stream_.uniform_below(m)];
            u = e.first;
            v = e.second;
            auto forward = (1.0 - p_add) / static_cast<double>(m);
            auto backward = add_probability(m - 1, pairs) / static_cast<double>(pairs - m + 1);
            log_hastings = std::log(backward / forward);
        }
    }
    apply_toggle(u, v);
    auto proposed = compute_distance();
    bool accept = metropolis_accept(proposed, log_hastings);
    if (accept)
        distance_ = proposed;
    else
        apply_toggle(u, v);
    return accept;
}

bool MetropolisChain::swap_step()
{
    // {a, b}, {c, d} -> {a, d}, {c, b}; the proposal is its own reverse.
    auto m = edge_list_.size();
    auto i = stream_.uniform_below(m);
    auto j = stream_.uniform_below(m - 1);
    if (j >= i)
        ++j;
    auto [a, b] = edge_list_[i];
    auto [c, d] = edge_list_[j];
    if (stream_.uniform_real() < 0.5)
        std::swap(a, b);
    if (a == d || c == b || has_edge(a, d) || has_edge(c, b))
        return false;
    apply_toggle(a, b);
    apply_toggle(c, d);
    apply_toggle(a, d);
    apply_toggle(c, b);
    auto proposed = compute_distance();
    if (metropolis_accept(proposed, 0.0)) {
        distance_ = proposed;
        return true;
    }
    apply_toggle(c, b);
    apply_toggle(a, d);
    apply_toggle(c, d);
    apply_toggle(a, b);
    return false;
}

bool MetropolisChain::rewire_step()
{
    // {u, v} -> {u, w} with w uniform over the other n - 1 nodes; the
    // reverse move has the same probability, so no Hastings term.
    auto n = adj_.size();
    auto [u, v] = edge_list_[stream_.uniform_below(edge_list_.size())];
    if (stream_.uniform_real() < 0.5)
        std::swap(u, v);
    auto w = static_cast<NodeIndex>(stream_.uniform_below(n - 1));
    if (w >= u)
        ++w;
    if (w == v || has_edge(u, w))
        return false;
    apply_toggle(u, v);
    apply_toggle(u, w);
    auto proposed = compute_distance();
    if (metropolis_accept(proposed, 0.0)) {
        distance_ = proposed;
        return true;
    }
    apply_toggle(u, w);
    apply_toggle(u, v);
    return false;
}

double MetropolisChain::mean_degree() const noexcept
{
    return 2.0 * static_cast<double>(edge_list_.size()) / static_cast<double>(adj_.size());
}

bool MetropolisChain::has_edge(NodeIndex u, NodeIndex v) const noexcept
{
    return matrix_[u * adj_.size() + v] != 0;
}

std::map<DegreeMixingMatrix::Cell, std::size_t> MetropolisChain::cell_counts() const
{
    std::map<DegreeMixingMatrix::Cell, std::size_t> out;
    for (auto idx : active_) {
        out[{static_cast<int>(idx / dim_), static_cast<int>(idx % dim_)}] =
            static_cast<std::size_t>(counts_[idx]);
    }
    return out;
}

DegreeMixingMatrix MetropolisChain::current_dmm() const
{
    return DegreeMixingMatrix::from_counts(cell_counts());
}

Graph MetropolisChain::snapshot() const
{
    std::vector<Edge> edges;
    edges.reserve(edge_list_.size());
    for (NodeIndex u = 0; u < adj_.size(); ++u) {
        for (auto v : adj_[u]) {
            if (u < v)
                edges.emplace_back(u, v);
        }
    }
    return Graph::from_edges(adj_.size(), edges);
}

//---------------------------------------------------------------------------//
// Ensembles
//---------------------------------------------------------------------------//

Graph erdos_renyi(std::size_t n_nodes, double edge_probability, rng::Stream& stream)
{
    std::vector<Edge> edges;
    for (NodeIndex u = 0; u < n_nodes; ++u) {
        for (NodeIndex v = u + 1; v < n_nodes; ++v) {
            if (stream.bernoulli(edge_probability))
                edges.emplace_back(u, v);
        }
    }
    return Graph::from_edges(n_nodes, edges);
}

Ensemble sample_ensemble(McmcParams const& params, std::size_t n_samples)
{
    if (params.n_nodes < 3)
        throw PreconditionError("ensemble needs at least three nodes");
    if (params.target_mean_degree * static_cast<double>(params.n_nodes) / 2.0 < 1.0)
        throw PreconditionError("target mean degree implies no edges");
    if (params.thinning < 1)
        throw PreconditionError("thinning must be at least 1");
    if (!(params.concentration > 0))
        throw PreconditionError("concentration must be positive");
    if (params.target.empty())
        throw PreconditionError("target degree mixing matrix is empty");

    auto base = rng::derive_stream({params.rng_seed, {}});
    auto init_stream = base.split(rng::Label::Sample, 0);
    auto p = std::min(1.0, params.target_mean_degree / static_cast<double>(params.n_nodes - 1));
    auto start = erdos_renyi(params.n_nodes, p, init_stream);
    MetropolisChain chain(params.target, start, params.concentration,
                          base.split(rng::Label::Chain, 0), params.proposal,
                          params.target_mean_degree * static_cast<double>(params.n_nodes) / 2.0);

    auto interval = params.trace_interval == 0 ? params.thinning : params.trace_interval;
    Ensemble out;
    auto& rep = out.report;
    auto record = [&](std::size_t step, std::size_t accepted) {
        rep.step_trace.push_back(step);
        rep.mean_degree_trace.push_back(chain.mean_degree());
        rep.dmm_distance_trace.push_back(chain.normalized_distance());
        rep.accepted_trace.push_back(step == 0 ? 0.0
                                               : static_cast<double>(accepted)
                                                     / static_cast<double>(step));
    };

    std::size_t total = params.burn_in + params.thinning * n_samples;
    std::size_t accepted = 0;
    record(0, 0);
    for (std::size_t s = 1; s <= total; ++s) {
        if (chain.step())
            ++accepted;
        if (s % interval == 0)
            record(s, accepted);
        if (s > params.burn_in && (s - params.burn_in) % params.thinning == 0)
            out.samples.push_back(chain.snapshot());
    }
    rep.accepted_fraction = total == 0 ? 0.0
                                       : static_cast<double>(accepted) / static_cast<double>(total);
    return out;
}

ConvergenceVerdict convergence_check(ConvergenceReport const& report, double target_mean_degree,
                                     ConvergenceTolerances const& tol)
{
    ConvergenceVerdict verdict;
    auto len = report.mean_degree_trace.size();
    if (len == 0 || report.dmm_distance_trace.size() != len) {
        verdict.reasons.emplace_back("empty or mismatched traces");
        return verdict;
    }
    auto window = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(tol.window_fraction * static_cast<double>(len))));
    window = std::min(window, len);
    double mean_deg = 0, dist = 0;
    for (auto i = len - window; i < len; ++i) {
        mean_deg += report.mean_degree_trace[i];
        dist += report.dmm_distance_trace[i];
    }
    mean_deg /= static_cast<double>(window);
    dist /= static_cast<double>(window);

    if (std::abs(mean_deg - target_mean_degree) > tol.mean_degree) {
        std::ostringstream msg;
        msg << "mean degree " << mean_deg << " differs from target " << target_mean_degree
            << " by more than " << tol.mean_degree;
        verdict.reasons.push_back(msg.str());
    }
    if (dist > tol.dmm_distance) {
        std::ostringstream msg;
        msg << "dmm distance " << dist << " exceeds " << tol.dmm_distance;
        verdict.reasons.push_back(msg.str());
    }
    verdict.passed = verdict.reasons.empty();
    return verdict;
}

} // namespace vaxnet
