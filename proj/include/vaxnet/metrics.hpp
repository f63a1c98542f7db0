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
#ifndef VAXNET_METRICS_HPP
#define VAXNET_METRICS_HPP

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "vaxnet/graph.hpp"

namespace vaxnet
{

struct DegreeStats {
    double mean = 0;
    double sd = 0;  ///< population SD
    double median = 0;
};

DegreeStats degree_stats(Graph const& g);

double density(Graph const& g);

/// Newman degree assortativity; nullopt when endpoint degrees have no variance.
std::optional<double> assortativity(Graph const& g);

/// Raw betweenness: sum over unordered pairs {s, t} not containing v of the
/// fraction of shortest s-t paths through v.
std::vector<double> betweenness_all(Graph const& g);

/*!
 * Fraction of edges joining a degree-a node to a degree-b node.
 *
 * Stored sparsely over unordered degree pairs a <= b; entry(a, b) and
 * entry(b, a) read the same cell, and the cells sum to one.
 */
class DegreeMixingMatrix
{
  public:
    using Cell = std::pair<int, int>;

    DegreeMixingMatrix() = default;

    /// From edge counts per unordered degree pair; keys are normalized to a <= b.
    static DegreeMixingMatrix from_counts(std::map<Cell, std::size_t> const& counts);

    double entry(int a, int b) const;
    std::map<Cell, double> const& cells() const noexcept { return cells_; }
    int max_degree() const noexcept { return max_degree_; }
    bool empty() const noexcept { return cells_.empty(); }

    /// Fraction of edge ends attached to nodes of each degree.
    std::map<int, double> edge_end_distribution() const;

  private:
    std::map<Cell, double> cells_;
    int max_degree_ = 0;
};

DegreeMixingMatrix degree_mixing_matrix(Graph const& g);

/// The seven village-level predictors, in regression-table column order.
enum class Characteristic {
    Density,
    Size,
    MeanDegree,
    SdDegree,
    Assortativity,
    LccProportion,
    MeanBetweenness,
};

inline constexpr std::array<Characteristic, 7> all_characteristics{
    Characteristic::Density,       Characteristic::Size,
    Characteristic::MeanDegree,    Characteristic::SdDegree,
    Characteristic::Assortativity, Characteristic::LccProportion,
    Characteristic::MeanBetweenness,
};

std::string_view characteristic_name(Characteristic c);
std::optional<Characteristic> characteristic_from_name(std::string_view name);

struct VillageCharacteristics {
    std::size_t n_nodes = 0;
    double mean_degree = 0;
    double sd_degree = 0;
    double median_degree = 0;
    double density = 0;
    std::optional<double> assortativity;
    double mean_betweenness = 0;  ///< mean raw score / ((n-1)(n-2)/2)
    double lcc_fraction = 0;

    std::optional<double> value(Characteristic c) const;
};

VillageCharacteristics village_characteristics(Graph const& g);

/// Computes only what the requested predictors need; other fields stay zero.
VillageCharacteristics village_characteristics(Graph const& g,
                                               std::span<Characteristic const> needed);

std::optional<double> pearson(std::span<double const> x, std::span<double const> y);

/// Average ranks (1-based), ties share the mean of their positions.
std::vector<double> average_ranks(std::span<double const> x);

/// Pearson correlation of average ranks.
std::optional<double> rank_correlation(std::span<double const> x, std::span<double const> y);

using CorrelationMatrix = std::array<std::array<std::optional<double>, 7>, 7>;

/// Pairwise correlations of the seven characteristics across villages,
/// indexed in all_characteristics order.
CorrelationMatrix characteristic_correlations(std::span<VillageCharacteristics const> rows);

} // namespace vaxnet

#endif
