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
#include "vaxnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vaxnet/error.hpp"

namespace vaxnet
{

DegreeStats degree_stats(Graph const& g)
{
    auto n = g.n_nodes();
    if (n == 0)
        throw PreconditionError("degree statistics of an empty graph");
    auto deg = g.degrees();
    double sum = 0;
    for (auto d : deg)
        sum += static_cast<double>(d);
    DegreeStats s;
    s.mean = sum / static_cast<double>(n);
    double ss = 0;
    for (auto d : deg) {
        double diff = static_cast<double>(d) - s.mean;
        ss += diff * diff;
    }
    s.sd = std::sqrt(ss / static_cast<double>(n));
    std::sort(deg.begin(), deg.end());
    if (n % 2 == 1)
        s.median = static_cast<double>(deg[n / 2]);
    else
        s.median = 0.5 * static_cast<double>(deg[n / 2 - 1] + deg[n / 2]);
    return s;
}

double density(Graph const& g)
{
    auto n = static_cast<double>(g.n_nodes());
    if (g.n_nodes() < 2)
        throw PreconditionError("density needs at least two nodes");
    return 2.0 * static_cast<double>(g.n_edges()) / (n * (n - 1.0));
}

std::optional<double> assortativity(Graph const& g)
{
    if (g.n_edges() == 0)
        throw PreconditionError("assortativity of an edgeless graph");
    // Integer moments over both orientations of every edge; exact up to the
    // final division.
    __int128 stubs = 0, sum = 0, sum_sq = 0, sum_prod = 0;
    for (auto [u, v] : g.edges()) {
        __int128 a = static_cast<__int128>(g.degree(u));
        __int128 b = static_cast<__int128>(g.degree(v));
        stubs += 2;
        sum += a + b;
        sum_sq += a * a + b * b;
        sum_prod += 2 * a * b;
    }
    __int128 var = stubs * sum_sq - sum * sum;
    if (var == 0)
        return std::nullopt;
    __int128 cov = stubs * sum_prod - sum * sum;
    return static_cast<double>(static_cast<long double>(cov) / static_cast<long double>(var));
}

std::vector<double> betweenness_all(Graph const& g)
{
    auto n = g.n_nodes();
    std::vector<double> score(n, 0.0);
    std::vector<NodeIndex> order;
    std::vector<std::int64_t> dist(n);
    std::vector<double> sigma(n);
    std::vector<double> delta(n);
    std::vector<NodeIndex> queue;
    order.reserve(n);
    queue.reserve(n);

    for (NodeIndex s = 0; s < n; ++s) {
        if (g.degree(s) == 0)
            continue;
        std::fill(dist.begin(), dist.end(), -1);
        std::fill(sigma.begin(), sigma.end(), 0.0);
        order.clear();
        queue.clear();
        dist[s] = 0;
        sigma[s] = 1.0;
        queue.push_back(s);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            auto v = queue[head];
            order.push_back(v);
            for (auto w : g.neighbors(v)) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if (dist[w] == dist[v] + 1)
                    sigma[w] += sigma[v];
            }
        }
        // Dependency accumulation in order of non-increasing distance;
        // predecessors are recovered from the distance labels.
        for (auto v : order)
            delta[v] = 0.0;
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            auto w = *it;
            for (auto v : g.neighbors(w)) {
                if (dist[v] >= 0 && dist[v] + 1 == dist[w])
                    delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if (w != s)
                score[w] += delta[w];
        }
    }
    // Each unordered pair was visited from both endpoints.
    for (auto& x : score)
        x *= 0.5;
    return score;
}

//---------------------------------------------------------------------------//
// Degree mixing matrix
//---------------------------------------------------------------------------//

DegreeMixingMatrix DegreeMixingMatrix::from_counts(std::map<Cell, std::size_t> const& counts)
{
    DegreeMixingMatrix m;
    std::map<Cell, std::size_t> normalized;
    std::size_t total = 0;
    for (auto const& [cell, count] : counts) {
        if (count == 0)
            continue;
        Cell key{std::min(cell.first, cell.second), std::max(cell.first, cell.second)};
        normalized[key] += count;
        total += count;
    }
    for (auto const& [cell, count] : normalized) {
        m.cells_[cell] = static_cast<double>(count) / static_cast<double>(total);
        m.max_degree_ = std::max(m.max_degree_, cell.second);
    }
    return m;
}

double DegreeMixingMatrix::entry(int a, int b) const
{
    auto it = cells_.find({std::min(a, b), std::max(a, b)});
    return it == cells_.end() ? 0.0 : it->second;
}

std::map<int, double> DegreeMixingMatrix::edge_end_distribution() const
{
    std::map<int, double> out;
    for (auto const& [cell, frac] : cells_) {
        out[cell.first] += 0.5 * frac;
        out[cell.second] += 0.5 * frac;
    }
    return out;
}

DegreeMixingMatrix degree_mixing_matrix(Graph const& g)
{
    if (g.n_edges() == 0)
        throw PreconditionError("degree mixing matrix of an edgeless graph");
    std::map<DegreeMixingMatrix::Cell, std::size_t> counts;
    for (auto [u, v] : g.edges()) {
        auto a = static_cast<int>(g.degree(u));
        auto b = static_cast<int>(g.degree(v));
        ++counts[{std::min(a, b), std::max(a, b)}];
    }
    return DegreeMixingMatrix::from_counts(counts);
}

//---------------------------------------------------------------------------//
// Village characteristics
//---------------------------------------------------------------------------//

std::string_view characteristic_name(Characteristic c)
{
    switch (c) {
    case Characteristic::Density: return "density";
    case Characteristic::Size: return "size";
    case Characteristic::MeanDegree: return "mean_degree";
    case Characteristic::SdDegree: return "sd_degree";
    case Characteristic::Assortativity: return "assortativity";
    case Characteristic::LccProportion: return "lcc_fraction";
    case Characteristic::MeanBetweenness: return "mean_betweenness";
    }
    return "unknown";
}

std::optional<Characteristic> characteristic_from_name(std::string_view name)
{
    for (auto c : all_characteristics) {
        if (characteristic_name(c) == name)
            return c;
    }
    return std::nullopt;
}

std::optional<double> VillageCharacteristics::value(Characteristic c) const
{
    switch (c) {
    case Characteristic::Density: return density;
    case Characteristic::Size: return static_cast<double>(n_nodes);
    case Characteristic::MeanDegree: return mean_degree;
    case Characteristic::SdDegree: return sd_degree;
    case Characteristic::Assortativity: return assortativity;
    case Characteristic::LccProportion: return lcc_fraction;
    case Characteristic::MeanBetweenness: return mean_betweenness;
    }
    return std::nullopt;
}

namespace
{
double normalized_mean_betweenness(Graph const& g)
{
    auto n = static_cast<double>(g.n_nodes());
    if (g.n_nodes() < 3)
        return 0.0;
    auto scores = betweenness_all(g);
    double total = std::accumulate(scores.begin(), scores.end(), 0.0);
    return total / n / ((n - 1.0) * (n - 2.0) / 2.0);
}
} // namespace

VillageCharacteristics village_characteristics(Graph const& g)
{
    return village_characteristics(g, all_characteristics);
}

VillageCharacteristics village_characteristics(Graph const& g,
                                               std::span<Characteristic const> needed)
{
    if (g.n_nodes() < 2 || g.n_edges() == 0)
        throw PreconditionError("village characteristics need at least two nodes and one edge");
    auto wants = [&](Characteristic c) {
        return std::find(needed.begin(), needed.end(), c) != needed.end();
    };
    VillageCharacteristics vc;
    vc.n_nodes = g.n_nodes();
    auto stats = degree_stats(g);
    vc.mean_degree = stats.mean;
    vc.sd_degree = stats.sd;
    vc.median_degree = stats.median;
    vc.density = density(g);
    if (wants(Characteristic::Assortativity))
        vc.assortativity = assortativity(g);
    if (wants(Characteristic::MeanBetweenness))
        vc.mean_betweenness = normalized_mean_betweenness(g);
    if (wants(Characteristic::LccProportion))
        vc.lcc_fraction = largest_component_fraction(g);
    return vc;
}

//---------------------------------------------------------------------------//
// Correlations
//---------------------------------------------------------------------------//

std::optional<double> pearson(std::span<double const> x, std::span<double const> y)
{
    if (x.size() != y.size())
        throw PreconditionError("correlation of vectors with different lengths");
    if (x.size() < 2)
        throw PreconditionError("correlation needs at least two observations");
    auto n = static_cast<double>(x.size());
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx;
        double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0 || syy <= 0)
        return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

std::vector<double> average_ranks(std::span<double const> x)
{
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return x[a] < x[b]; });
    std::vector<double> rank(x.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]])
            ++j;
        double shared = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k)
            rank[idx[k]] = shared;
        i = j + 1;
    }
    return rank;
}

std::optional<double> rank_correlation(std::span<double const> x, std::span<double const> y)
{
    if (x.size() != y.size())
        throw PreconditionError("rank correlation of vectors with different lengths");
    auto rx = average_ranks(x);
    auto ry = average_ranks(y);
    return pearson(rx, ry);
}

CorrelationMatrix characteristic_correlations(std::span<VillageCharacteristics const> rows)
{
    if (rows.size() < 2)
        throw PreconditionError("characteristic correlations need at least two villages");
    CorrelationMatrix out{};
    for (std::size_t i = 0; i < all_characteristics.size(); ++i) {
        for (std::size_t j = i; j < all_characteristics.size(); ++j) {
            std::vector<double> xs, ys;
            for (auto const& r : rows) {
                auto a = r.value(all_characteristics[i]);
                auto b = r.value(all_characteristics[j]);
                if (a && b) {
                    xs.push_back(*a);
                    ys.push_back(*b);
                }
            }
            std::optional<double> c;
            if (xs.size() >= 2)
                c = pearson(xs, ys);
            out[i][j] = c;
            out[j][i] = c;
        }
    }
    return out;
}

} // namespace vaxnet
