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
#include "vaxnet/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "vaxnet/error.hpp"

namespace vaxnet
{
namespace
{
std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    auto is_space = [](char c) {
        return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f';
    };
    while (pos < line.size()) {
        while (pos < line.size() && is_space(line[pos]))
            ++pos;
        auto start = pos;
        while (pos < line.size() && !is_space(line[pos]))
            ++pos;
        if (pos > start)
            fields.push_back(line.substr(start, pos - start));
    }
    return fields;
}

std::string canonical_key(std::string const& a, std::string const& b)
{
    auto const& lo = a < b ? a : b;
    auto const& hi = a < b ? b : a;
    std::string key;
    key.reserve(lo.size() + hi.size() + 1);
    key.append(lo).push_back('\0');
    key.append(hi);
    return key;
}
} // namespace

//---------------------------------------------------------------------------//
// Graph
//---------------------------------------------------------------------------//

Graph Graph::from_edges(std::vector<std::string> node_ids, std::span<Edge const> edges)
{
    Graph g;
    auto n = node_ids.size();
    g.index_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!g.index_.emplace(node_ids[i], static_cast<NodeIndex>(i)).second)
            throw PreconditionError("duplicate node id '" + node_ids[i] + "'");
    }
    g.ids_ = std::move(node_ids);

    std::vector<std::vector<NodeIndex>> adj(n);
    for (auto [u, v] : edges) {
        if (u >= n || v >= n)
            throw PreconditionError("edge endpoint out of range");
        if (u == v)
            throw PreconditionError("self-loop on node '" + g.ids_[u] + "'");
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    g.offsets_.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) {
        auto& list = adj[v];
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
        g.offsets_[v + 1] = g.offsets_[v] + list.size();
    }
    g.targets_.reserve(g.offsets_[n]);
    for (auto const& list : adj)
        g.targets_.insert(g.targets_.end(), list.begin(), list.end());
    return g;
}

Graph Graph::from_edges(std::size_t n_nodes, std::span<Edge const> edges)
{
    std::vector<std::string> ids(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i)
        ids[i] = std::to_string(i);
    return from_edges(std::move(ids), edges);
}

std::vector<std::size_t> Graph::degrees() const
{
    std::vector<std::size_t> out(n_nodes());
    for (std::size_t v = 0; v < out.size(); ++v)
        out[v] = degree(static_cast<NodeIndex>(v));
    return out;
}

std::size_t Graph::max_degree() const noexcept
{
    std::size_t best = 0;
    for (std::size_t v = 0; v < n_nodes(); ++v)
        best = std::max(best, degree(static_cast<NodeIndex>(v)));
    return best;
}

bool Graph::has_edge(NodeIndex u, NodeIndex v) const noexcept
{
    if (u >= n_nodes() || v >= n_nodes())
        return false;
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edges() const
{
    std::vector<Edge> out;
    out.reserve(n_edges());
    for (NodeIndex u = 0; u < n_nodes(); ++u) {
        for (auto v : neighbors(u)) {
            if (u < v)
                out.emplace_back(u, v);
        }
    }
    return out;
}

std::optional<NodeIndex> Graph::index_of(std::string_view id) const
{
    auto it = index_.find(std::string{id});
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

//---------------------------------------------------------------------------//
// Edge-list I/O
//---------------------------------------------------------------------------//

MultiplexEdgeList parse_edge_list(std::istream& in)
{
    MultiplexEdgeList out;
    std::unordered_map<std::string, std::size_t> record_of_pair;
    std::unordered_map<std::string, bool> seen_node;
    auto note_node = [&](std::string const& id) {
        if (seen_node.emplace(id, true).second)
            out.nodes.push_back(id);
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = split_fields(line);
        if (fields.empty())
            continue;
        if (fields[0].front() == '#') {
            if (fields[0] == "#@node") {
                if (fields.size() != 2)
                    throw ParseError(line_no, "node declaration needs exactly one id");
                note_node(std::string{fields[1]});
            }
            continue;
        }
        if (fields.size() != 2 && fields.size() != 3) {
            throw ParseError(line_no, "expected 2 or 3 fields, found "
                                          + std::to_string(fields.size()));
        }
        int multiplexity = max_multiplexity;
        if (fields.size() == 3) {
            auto tok = fields[2];
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), multiplexity);
            if (ec != std::errc{} || ptr != tok.data() + tok.size())
                throw ParseError(line_no, "multiplexity '" + std::string{tok} + "' is not an integer");
            if (multiplexity < 1 || multiplexity > max_multiplexity)
                throw ParseError(line_no, "multiplexity " + std::to_string(multiplexity)
                                              + " outside 1..12");
        }
        std::string a{fields[0]};
        std::string b{fields[1]};
        if (a == b)
            throw ParseError(line_no, "self-loop on node '" + a + "'");
        note_node(a);
        note_node(b);
        auto key = canonical_key(a, b);
        auto [it, inserted] = record_of_pair.emplace(std::move(key), out.records.size());
        if (inserted) {
            out.records.push_back({std::move(a), std::move(b), multiplexity});
        } else {
            auto& rec = out.records[it->second];
            rec.multiplexity = std::max(rec.multiplexity, multiplexity);
        }
    }
    return out;
}

MultiplexEdgeList parse_edge_list_text(std::string_view text)
{
    std::istringstream in{std::string{text}};
    return parse_edge_list(in);
}

MultiplexEdgeList parse_edge_list(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open edge list '" + path.string() + "'");
    try {
        return parse_edge_list(in);
    } catch (ParseError const& e) {
        throw ParseError(e.line(), path.string() + ": " + e.what());
    }
}

Graph build_graph(MultiplexEdgeList const& edges, int min_multiplexity)
{
    if (min_multiplexity < 1 || min_multiplexity > max_multiplexity)
        throw PreconditionError("tie threshold must lie in 1..12");
    std::unordered_map<std::string, NodeIndex> index;
    index.reserve(edges.nodes.size());
    for (std::size_t i = 0; i < edges.nodes.size(); ++i)
        index.emplace(edges.nodes[i], static_cast<NodeIndex>(i));

    std::vector<Edge> kept;
    for (auto const& rec : edges.records) {
        if (rec.multiplexity < min_multiplexity)
            continue;
        auto a = index.find(rec.node_a);
        auto b = index.find(rec.node_b);
        if (a == index.end() || b == index.end())
            throw PreconditionError("record names a node missing from the node list");
        kept.emplace_back(a->second, b->second);
    }
    return Graph::from_edges(edges.nodes, kept);
}

Graph load_graph(std::filesystem::path const& path, int min_multiplexity)
{
    return build_graph(parse_edge_list(path), min_multiplexity);
}

void write_edge_list(Graph const& g, std::ostream& out)
{
    for (NodeIndex v = 0; v < g.n_nodes(); ++v) {
        if (g.degree(v) == 0)
            out << "#@node " << g.node_id(v) << '\n';
    }
    for (auto [u, v] : g.edges())
        out << g.node_id(u) << ' ' << g.node_id(v) << '\n';
}

void write_edge_list(Graph const& g, std::filesystem::path const& path)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write edge list '" + path.string() + "'");
    write_edge_list(g, out);
}

std::string village_id_from_path(std::filesystem::path const& path)
{
    return path.stem().string();
}

//---------------------------------------------------------------------------//
// Connectivity
//---------------------------------------------------------------------------//

std::vector<std::uint32_t> connected_components(Graph const& g)
{
    constexpr auto unset = static_cast<std::uint32_t>(-1);
    std::vector<std::uint32_t> label(g.n_nodes(), unset);
    std::vector<NodeIndex> stack;
    std::uint32_t next = 0;
    for (NodeIndex s = 0; s < g.n_nodes(); ++s) {
        if (label[s] != unset)
            continue;
        label[s] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            auto v = stack.back();
            stack.pop_back();
            for (auto w : g.neighbors(v)) {
                if (label[w] == unset) {
                    label[w] = next;
                    stack.push_back(w);
                }
            }
        }
        ++next;
    }
    return label;
}

double largest_component_fraction(Graph const& g)
{
    if (g.n_nodes() == 0)
        return 0.0;
    auto label = connected_components(g);
    std::vector<std::size_t> size(*std::max_element(label.begin(), label.end()) + 1, 0);
    for (auto l : label)
        ++size[l];
    return static_cast<double>(*std::max_element(size.begin(), size.end()))
           / static_cast<double>(g.n_nodes());
}

std::size_t MultiplexityHistogram::total() const noexcept
{
    std::size_t sum = 0;
    for (auto c : counts_)
        sum += c;
    return sum;
}

MultiplexityHistogram multiplexity_histogram(MultiplexEdgeList const& edges)
{
    MultiplexityHistogram h;
    for (auto const& rec : edges.records)
        ++h[rec.multiplexity];
    return h;
}

} // namespace vaxnet
