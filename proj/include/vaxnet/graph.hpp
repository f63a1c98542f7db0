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
#ifndef VAXNET_GRAPH_HPP
#define VAXNET_GRAPH_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace vaxnet
{

using NodeIndex = std::uint32_t;
using Edge = std::pair<NodeIndex, NodeIndex>;

/*!
 * Undirected simple graph with opaque node identifiers.
 *
 * Node identifiers map to dense indices 0..n-1 in the order they were
 * supplied. Adjacency is stored in compressed sparse rows with each
 * neighbor list sorted. Immutable once built.
 */
class Graph
{
  public:
    Graph() = default;

    /// Builds a graph; duplicate edges are merged, self-loops and
    /// out-of-range endpoints throw PreconditionError.
    static Graph from_edges(std::vector<std::string> node_ids,
                            std::span<Edge const> edges);

    /// Same, with node ids "0".."n-1".
    static Graph from_edges(std::size_t n_nodes, std::span<Edge const> edges);

    std::size_t n_nodes() const noexcept { return ids_.size(); }
    std::size_t n_edges() const noexcept { return targets_.size() / 2; }

    std::span<NodeIndex const> neighbors(NodeIndex v) const noexcept
    {
        return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
    }
    std::size_t degree(NodeIndex v) const noexcept
    {
        return offsets_[v + 1] - offsets_[v];
    }
    std::vector<std::size_t> degrees() const;
    std::size_t max_degree() const noexcept;

    bool has_edge(NodeIndex u, NodeIndex v) const noexcept;

    /// Edges as (u, v) with u < v, in lexicographic order.
    std::vector<Edge> edges() const;

    std::string const& node_id(NodeIndex v) const { return ids_.at(v); }
    std::vector<std::string> const& node_ids() const noexcept { return ids_; }
    std::optional<NodeIndex> index_of(std::string_view id) const;

  private:
    std::vector<std::string> ids_;
    std::unordered_map<std::string, NodeIndex> index_;
    std::vector<std::size_t> offsets_{0};
    std::vector<NodeIndex> targets_;
};

struct MultiplexRecord {
    std::string node_a;
    std::string node_b;
    int multiplexity = 12;
};

/// Tie records of one village; each unordered pair appears once.
struct MultiplexEdgeList {
    /// Every node named in the input, in order of first appearance.
    std::vector<std::string> nodes;
    std::vector<MultiplexRecord> records;
};

inline constexpr int max_multiplexity = 12;

/*!
 * Parses the edge-list text format.
 *
 * Each non-comment line is `node_a node_b [multiplexity]`; the multiplexity
 * defaults to 12 and must lie in 1..12. Lines starting with '#' are comments,
 * except `#@node <id>`, which declares a node that may have no ties. Repeated
 * pairs keep the largest multiplexity. Self-loops are rejected.
 */
MultiplexEdgeList parse_edge_list(std::istream& in);
MultiplexEdgeList parse_edge_list_text(std::string_view text);
MultiplexEdgeList parse_edge_list(std::filesystem::path const& path);

Graph build_graph(MultiplexEdgeList const& edges, int min_multiplexity);

/// Convenience: parse a file and threshold it.
Graph load_graph(std::filesystem::path const& path, int min_multiplexity = 1);

/// Writes edges as `a b`, preceded by `#@node` lines for isolated nodes.
void write_edge_list(Graph const& g, std::ostream& out);
void write_edge_list(Graph const& g, std::filesystem::path const& path);

/// Village id of an edge-list file: its stem.
std::string village_id_from_path(std::filesystem::path const& path);

/// Component label per node; labels are 0..c-1 in order of lowest member.
std::vector<std::uint32_t> connected_components(Graph const& g);

double largest_component_fraction(Graph const& g);

class MultiplexityHistogram
{
  public:
    std::size_t& operator[](int level) { return counts_.at(level - 1); }
    std::size_t operator[](int level) const { return counts_.at(level - 1); }
    std::size_t total() const noexcept;

  private:
    std::array<std::size_t, max_multiplexity> counts_{};
};

MultiplexityHistogram multiplexity_histogram(MultiplexEdgeList const& edges);

} // namespace vaxnet

#endif
