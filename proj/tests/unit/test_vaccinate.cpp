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
#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"

#include "vaxnet/error.hpp"
#include "vaxnet/fcd.hpp"
#include "vaxnet/metrics.hpp"
#include "vaxnet/netgen.hpp"
#include "vaxnet/rng.hpp"
#include "vaxnet/vaccinate.hpp"

using namespace vaxnet;

namespace
{
Graph star(std::size_t leaves)
{
    std::vector<Edge> e;
    for (NodeIndex i = 1; i <= leaves; ++i)
        e.emplace_back(0, i);
    return Graph::from_edges(leaves + 1, e);
}

Graph test_graph(std::uint64_t seed, std::size_t n = 100, double p = 0.06)
{
    auto s = rng::derive_stream({seed, {{rng::Label::User, 2}}});
    return erdos_renyi(n, p, s);
}

bool distinct(std::vector<NodeIndex> v)
{
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) == v.end();
}
} // namespace

TEST_CASE("strategy names round-trip")
{
    for (auto s : {Strategy::None, Strategy::Random, Strategy::Nomination, Strategy::HighDegree,
                   Strategy::HighestDegree, Strategy::MostCentral})
        CHECK(strategy_from_name(strategy_name(s)) == s);
    CHECK_FALSE(strategy_from_name("bogus").has_value());
}

TEST_CASE("quota rounds to nearest")
{
    CHECK(vaccination_quota(0.1, 100) == 10);
    CHECK(vaccination_quota(0.1, 904) == 90);
    CHECK(vaccination_quota(0.1, 905) == 91);
    CHECK_THROWS_AS(vaccination_quota(0.0, 10), PreconditionError);
    CHECK_THROWS_AS(vaccination_quota(1.0, 10), PreconditionError);
}

TEST_CASE("none selects nobody")
{
    auto p = select_none(test_graph(1));
    CHECK(p.selected.empty());
    CHECK(p.achieved_coverage == 0);
    CHECK(p.interviews_conducted == 0);
}

TEST_CASE("random selection")
{
    auto g = test_graph(2);
    auto s1 = rng::derive_stream({5, {}});
    auto s2 = rng::derive_stream({5, {}});
    auto a = select_random(g, 0.1, s1);
    auto b = select_random(g, 0.1, s2);
    CHECK(a.selected.size() == 10);
    CHECK(distinct(a.selected));
    CHECK(a.selected == b.selected);
    CHECK(a.interviews_conducted == 10);
    CHECK(a.achieved_coverage == doctest::Approx(0.1));
    auto tiny = Graph::from_edges(3, std::vector<Edge>{});
    CHECK_THROWS_AS(select_random(tiny, 0.1, s1), PreconditionError);
}

TEST_CASE("nomination")
{
    // A single leaf ego can only name the centre.
    auto g = star(4);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto s = rng::derive_stream({seed, {}});
        auto p = select_nomination(g, 0.2, s);  // quota 1
        REQUIRE(p.interviews_conducted == 1);
        if (!p.selected.empty() && p.selected[0] != 0)
            CHECK(p.selected.size() == 1);  // ego was the centre, named a leaf
        else
            CHECK(p.selected == std::vector<NodeIndex>{0});
    }
    auto isolated = Graph::from_edges(20, std::vector<Edge>{});
    auto s = rng::derive_stream({1, {}});
    auto p = select_nomination(isolated, 0.2, s);
    CHECK(p.selected.empty());
    CHECK(p.failed_nominations == 4);

    auto h = test_graph(3);
    auto q = select_nomination(h, 0.1, s);
    CHECK(distinct(q.selected));
    CHECK(q.selected.size() + q.failed_nominations == q.quota);
    CHECK(q.selected.size() <= vaccination_quota(0.1, h.n_nodes()));
    for (auto v : q.selected)
        CHECK(h.degree(v) > 0);
}

TEST_CASE("high degree")
{
    auto g = test_graph(4);
    auto s = rng::derive_stream({9, {}});
    auto p = select_high_degree(g, 0.1, 7, s);
    CHECK(p.selected.size() == 10);
    CHECK(distinct(p.selected));
    CHECK(p.cutoff == 7);
    CHECK(p.interviews_conducted >= 10);
    if (p.fallback_selected == 0) {
        for (auto v : p.selected)
            CHECK(g.degree(v) >= 7);
    }

    auto q = select_high_degree(g, 0.1, static_cast<int>(g.max_degree()) + 1, s);
    CHECK(q.selected.size() == 10);
    CHECK(q.fallback_selected == 10);
    CHECK(q.interviews_conducted == g.n_nodes());
    CHECK_THROWS_AS(select_high_degree(g, 0.1, -1, s), PreconditionError);
}

TEST_CASE("cutoff 0 draws the same distribution as random")
{
    // Chi-square over which node lands in a 1-of-6 selection.
    auto g = star(5);
    std::map<NodeIndex, int> a, b;
    int const trials = 30000;
    for (int t = 0; t < trials; ++t) {
        auto s1 = rng::derive_stream({1, {{rng::Label::Run, static_cast<std::uint64_t>(t)}}});
        auto s2 = rng::derive_stream({2, {{rng::Label::Run, static_cast<std::uint64_t>(t)}}});
        ++a[select_high_degree(g, 0.2, 0, s1).selected.at(0)];
        ++b[select_random(g, 0.2, s2).selected.at(0)];
    }
    double chi2 = 0;
    for (NodeIndex v = 0; v < 6; ++v) {
        double expected = (a[v] + b[v]) / 2.0;
        chi2 += (a[v] - expected) * (a[v] - expected) / expected
                + (b[v] - expected) * (b[v] - expected) / expected;
    }
    CHECK(chi2 < 20.5);  // 5 df, p = 0.001
}

TEST_CASE("top by degree and betweenness")
{
    // hub of degree 50 among a ring of degree-2 nodes
    std::vector<Edge> e;
    for (NodeIndex i = 1; i <= 50; ++i) {
        e.emplace_back(0, i);
        e.emplace_back(i, i == 50 ? 1 : i + 1);
    }
    auto g = Graph::from_edges(51, e);
    auto s = rng::derive_stream({3, {}});
    auto p = select_top_by_degree(g, 0.02, s);  // quota 1
    CHECK(p.selected == std::vector<NodeIndex>{0});

    std::vector<Edge> path5{{0, 1}, {1, 2}, {2, 3}, {3, 4}};
    auto pg = Graph::from_edges(5, path5);
    auto q = select_top_by_betweenness(pg, 0.2, s);
    CHECK(q.selected == std::vector<NodeIndex>{2});

    auto h = test_graph(5, 150, 0.05);
    auto r = select_top_by_degree(h, 0.1, s);
    std::set<NodeIndex> chosen(r.selected.begin(), r.selected.end());
    std::size_t min_in = h.max_degree(), max_out = 0;
    for (NodeIndex v = 0; v < h.n_nodes(); ++v) {
        if (chosen.count(v))
            min_in = std::min(min_in, h.degree(v));
        else
            max_out = std::max(max_out, h.degree(v));
    }
    CHECK(min_in >= max_out);
    CHECK(r.interviews_conducted == h.n_nodes());

    auto btw = betweenness_all(h);
    auto b = select_top_by_betweenness(h, 0.1, s, 4);
    CHECK(b.observation_k == 4u);
    std::set<NodeIndex> bset(b.selected.begin(), b.selected.end());
    double lo = 1e300, hi = -1;
    for (NodeIndex v = 0; v < h.n_nodes(); ++v) {
        if (bset.count(v))
            lo = std::min(lo, btw[v]);
        else
            hi = std::max(hi, btw[v]);
    }
    CHECK(lo >= hi - 1e-6);
}

TEST_CASE("K = 0 observation makes top selection uniform")
{
    auto g = test_graph(6, 10, 0.5);
    auto observed = truncate(g, TruncationParams{0, 1});
    std::vector<int> count(10, 0);
    for (std::uint64_t t = 0; t < 20000; ++t) {
        auto s = rng::derive_stream({t, {}});
        ++count[select_top_by_degree(observed, 0.1, s, 0).selected.at(0)];
    }
    double chi2 = 0;
    for (auto c : count)
        chi2 += (c - 2000.0) * (c - 2000.0) / 2000.0;
    CHECK(chi2 < 27.9);  // 9 df, p = 0.001
}

TEST_CASE("selection is deterministic in the seed")
{
    auto g = test_graph(7);
    for (auto strat : {Strategy::Random, Strategy::Nomination, Strategy::HighDegree,
                       Strategy::HighestDegree, Strategy::MostCentral}) {
        auto run = [&] {
            auto s = rng::derive_stream({11, {}});
            switch (strat) {
            case Strategy::Random: return select_random(g, 0.1, s).selected;
            case Strategy::Nomination: return select_nomination(g, 0.1, s).selected;
            case Strategy::HighDegree: return select_high_degree(g, 0.1, 6, s).selected;
            case Strategy::HighestDegree: return select_top_by_degree(g, 0.1, s).selected;
            default: return select_top_by_betweenness(g, 0.1, s).selected;
            }
        };
        auto a = run();
        CHECK(a == run());
        CHECK(distinct(a));
        CHECK(a.size() <= 10);
    }
}
