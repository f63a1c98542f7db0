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
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "chain_checks.hpp"
#include "oracles.hpp"
#include "vaxnet/error.hpp"
#include "vaxnet/metrics.hpp"
#include "vaxnet/netgen.hpp"
#include "vaxnet/rng.hpp"

using namespace vaxnet;

namespace
{
Graph path(std::size_t n)
{
    std::vector<Edge> e;
    for (NodeIndex i = 0; i + 1 < n; ++i)
        e.emplace_back(i, i + 1);
    return Graph::from_edges(n, e);
}

Graph triangle()
{
    std::vector<Edge> e{{0, 1}, {1, 2}, {0, 2}};
    return Graph::from_edges(3, e);
}

rng::Stream stream(std::uint64_t seed)
{
    return rng::derive_stream({seed, {{rng::Label::Chain, 0}}});
}

bool same_counts(MetropolisChain const& chain)
{
    return chain.cell_counts() == testing::dmm_counts(chain.snapshot());
}
} // namespace

TEST_CASE("dmm distance")
{
    auto p3 = degree_mixing_matrix(path(3));
    auto tri = degree_mixing_matrix(triangle());
    CHECK(dmm_distance(p3, p3) == 0.0);
    CHECK(dmm_distance(tri, tri) == 0.0);
    // path3 is all (1,2), triangle all (2,2): disjoint supports
    CHECK(dmm_distance(p3, tri) == doctest::Approx(2.0));
    CHECK(dmm_distance(tri, p3) == doctest::Approx(2.0));
    // path4: (1,2) 2/3, (2,2) 1/3
    auto p4 = degree_mixing_matrix(path(4));
    CHECK(dmm_distance(p4, p3) == doctest::Approx(2.0 / 3.0));
    CHECK(dmm_distance(p4, DegreeMixingMatrix{}) == doctest::Approx(1.0));
}

TEST_CASE("proposal names round-trip")
{
    for (auto p : {Proposal::UniformToggle, Proposal::TieNoTie, Proposal::TieNoTieSwap,
                   Proposal::Mixed})
        CHECK(proposal_from_name(proposal_name(p)) == p);
    CHECK_FALSE(proposal_from_name("gibbs").has_value());
}

TEST_CASE("incremental cell counts match recomputation")
{
    auto s = rng::derive_stream({5, {}});
    auto start = erdos_renyi(60, 0.1, s);
    auto target = degree_mixing_matrix(erdos_renyi(60, 0.1, s));

    SUBCASE("forced toggles")
    {
        MetropolisChain chain(target, start, 10.0, stream(1));
        for (int t = 0; t < 2000; ++t) {
            auto u = static_cast<NodeIndex>(s.uniform_below(60));
            auto v = static_cast<NodeIndex>(s.uniform_below(60));
            if (u != v)
                chain.force_toggle(u, v);
            if (t % 100 == 0)
                REQUIRE(same_counts(chain));
        }
        CHECK(same_counts(chain));
        CHECK(chain.normalized_distance()
              == doctest::Approx(dmm_distance(degree_mixing_matrix(chain.snapshot()), target)));
    }
    SUBCASE("chain steps, every kernel")
    {
        for (auto p : {Proposal::UniformToggle, Proposal::TieNoTie, Proposal::TieNoTieSwap,
                       Proposal::Mixed}) {
            MetropolisChain chain(target, start, 50.0, stream(2), p, 180.0);
            for (int t = 0; t < 5000; ++t) {
                chain.step();
                if (t % 250 == 0)
                    REQUIRE(same_counts(chain));
            }
            auto snap = chain.snapshot();
            CHECK(same_counts(chain));
            auto m = static_cast<double>(snap.n_edges());
            CHECK(chain.distance()
                  == doctest::Approx(dmm_distance(degree_mixing_matrix(snap), target)
                                     + std::abs(m / 180.0 - 1.0)));
        }
    }
}

TEST_CASE("distance_if_toggled leaves the state alone")
{
    auto s = rng::derive_stream({6, {}});
    auto target = degree_mixing_matrix(path(10));
    MetropolisChain chain(target, erdos_renyi(10, 0.3, s), 1.0, stream(3));
    auto before = chain.snapshot().edges();
    auto d = chain.distance();
    auto probe = chain.distance_if_toggled(2, 7);
    CHECK(chain.snapshot().edges() == before);
    CHECK(chain.distance() == d);
    chain.force_toggle(2, 7);
    CHECK(chain.distance() == doctest::Approx(probe));
}

TEST_CASE("near-zero concentration accepts almost everything")
{
    auto target = degree_mixing_matrix(path(20));
    MetropolisChain chain(target, path(20), 1e-9, stream(4), Proposal::UniformToggle);
    std::size_t accepted = 0;
    for (int t = 0; t < 1000; ++t)
        accepted += chain.step();
    CHECK(accepted >= 990);
}

TEST_CASE("large concentration moves towards the target")
{
    auto s = rng::derive_stream({7, {}});
    auto target = degree_mixing_matrix(erdos_renyi(20, 0.2, s));
    std::vector<double> initial, final;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto init_stream = rng::derive_stream({seed, {{rng::Label::Sample, 0}}});
        MetropolisChain chain(target, erdos_renyi(20, 0.5, init_stream), 200.0, stream(seed),
                              Proposal::UniformToggle);
        initial.push_back(chain.normalized_distance());
        for (int t = 0; t < 20000; ++t)
            chain.step();
        final.push_back(chain.normalized_distance());
    }
    std::sort(initial.begin(), initial.end());
    std::sort(final.begin(), final.end());
    CHECK(final[5] < initial[5]);
}

TEST_CASE("detailed balance on graphs with four nodes")
{
    for (auto p : {Proposal::UniformToggle, Proposal::TieNoTie, Proposal::TieNoTieSwap,
                   Proposal::Mixed}) {
        CAPTURE(proposal_name(p));
        auto r = testing::four_node_balance(p, 2.0, 3.0, 1000000, 11);
        CHECK(r.pairs_checked > 0);
        CHECK(r.max_pair_z <= 4.0);
        CHECK(r.occupancy_tv < 0.02);
    }
}

TEST_CASE("ensembles")
{
    auto s = rng::derive_stream({8, {}});
    auto ref = erdos_renyi(50, 0.12, s);
    McmcParams params;
    params.target = degree_mixing_matrix(ref);
    params.n_nodes = 50;
    params.target_mean_degree = 2.0 * static_cast<double>(ref.n_edges()) / 50.0;
    params.burn_in = 2000;
    params.thinning = 100;
    params.concentration = 100;
    params.rng_seed = 3;

    auto a = sample_ensemble(params, 5);
    auto b = sample_ensemble(params, 5);
    REQUIRE(a.samples.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(a.samples[i].n_nodes() == 50);
        CHECK(a.samples[i].edges() == b.samples[i].edges());
    }
    CHECK(a.report.step_trace.size() == a.report.dmm_distance_trace.size());
    CHECK(a.report.step_trace.back() == 2500);

    params.rng_seed = 4;
    auto c = sample_ensemble(params, 5);
    CHECK(c.samples.back().edges() != a.samples.back().edges());

    auto bad = params;
    bad.concentration = 0;
    CHECK_THROWS_AS(sample_ensemble(bad, 1), PreconditionError);
    bad = params;
    bad.thinning = 0;
    CHECK_THROWS_AS(sample_ensemble(bad, 1), PreconditionError);
    bad = params;
    bad.target = DegreeMixingMatrix{};
    CHECK_THROWS_AS(sample_ensemble(bad, 1), PreconditionError);
}

TEST_CASE("convergence check")
{
    ConvergenceReport rep;
    for (int i = 0; i < 8; ++i) {
        rep.step_trace.push_back(static_cast<std::size_t>(i));
        rep.mean_degree_trace.push_back(i < 6 ? 2.0 : 8.1);
        rep.dmm_distance_trace.push_back(i < 6 ? 1.0 : 0.1);
    }
    CHECK(convergence_check(rep, 8.0).passed);

    auto v = convergence_check(rep, 9.0);
    CHECK_FALSE(v.passed);
    REQUIRE(v.reasons.size() == 1);
    CHECK(v.reasons[0].find("mean degree") != std::string::npos);

    ConvergenceTolerances tight;
    tight.dmm_distance = 0.05;
    v = convergence_check(rep, 9.0, tight);
    CHECK(v.reasons.size() == 2);

    CHECK_FALSE(convergence_check(ConvergenceReport{}, 8.0).passed);
}
