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
#include <cmath>
#include <set>

#include "doctest.h"

#include "reference_village.hpp"
#include "vaxnet/error.hpp"
#include "vaxnet/netgen.hpp"
#include "vaxnet/rng.hpp"
#include "vaxnet/sir.hpp"

using namespace vaxnet;

namespace
{
Graph test_graph(std::uint64_t seed, std::size_t n = 200, double p = 0.03)
{
    auto s = rng::derive_stream({seed, {{rng::Label::User, 1}}});
    return erdos_renyi(n, p, s);
}

double mean_incidence(Graph const& g, SirParams p, std::size_t runs, double* se = nullptr)
{
    double sum = 0, sq = 0;
    for (std::size_t r = 0; r < runs; ++r) {
        p.rng_seed = 1000 + r;
        auto x = run_sir(g, p, {}).cumulative_incidence;
        sum += x;
        sq += x * x;
    }
    auto m = sum / static_cast<double>(runs);
    if (se)
        *se = std::sqrt((sq / static_cast<double>(runs) - m * m) / static_cast<double>(runs));
    return m;
}
} // namespace

TEST_CASE("seed count rounds up")
{
    CHECK(seed_count(0.01, 900) == 9);
    CHECK(seed_count(0.01, 100) == 1);
    CHECK(seed_count(0.01, 101) == 2);
    CHECK(seed_count(0.07, 100) == 7);
    CHECK(seed_count(1.0, 5) == 5);
}

TEST_CASE("no transmission on an edgeless graph or with beta = 0")
{
    auto empty = Graph::from_edges(50, std::vector<Edge>{});
    SirParams p;
    p.seed_fraction = 0.1;
    auto o = run_sir(empty, p, {});
    CHECK(o.cumulative_incidence == doctest::Approx(5.0 / 50.0));
    CHECK(o.duration_steps >= 1);

    auto g = test_graph(1);
    p.beta = 0;
    std::vector<SirOutcome> outs;
    for (std::uint64_t s = 0; s < 20; ++s) {
        p.rng_seed = s;
        outs.push_back(run_sir(g, p, {}));
        CHECK(outs.back().n_ever_infected == outs.back().n_seeds);
    }
    CHECK(estimate_r0(outs) == 0.0);
}

TEST_CASE("all non-seed nodes vaccinated")
{
    auto g = test_graph(2);
    SirParams p;
    p.seed_fraction = 0.05;
    auto seeds = seed_count(p.seed_fraction, g.n_nodes());
    std::vector<NodeIndex> vacc;
    for (NodeIndex v = 0; v < g.n_nodes() - seeds; ++v)
        vacc.push_back(v);
    for (std::uint64_t s = 0; s < 10; ++s) {
        p.rng_seed = s;
        auto o = run_sir(g, p, vacc);
        CHECK(o.n_ever_infected == seeds);
        CHECK(o.seed_caused_infections == 0);
        CHECK(o.cumulative_incidence == doctest::Approx(static_cast<double>(seeds) / g.n_nodes()));
    }
}

TEST_CASE("bookkeeping invariants")
{
    auto g = test_graph(3, 300, 0.02);
    SirOptions opt{true, true};
    std::vector<NodeIndex> vacc{1, 5, 9, 200};
    std::set<NodeIndex> vset(vacc.begin(), vacc.end());
    for (std::uint64_t s = 0; s < 30; ++s) {
        SirParams p;
        p.rng_seed = s;
        p.seed_fraction = 0.02;
        auto o = run_sir(g, p, vacc, opt);
        REQUIRE(o.per_step_counts.size() == o.duration_steps + 1);
        for (auto const& c : o.per_step_counts) {
            CHECK(c.susceptible + c.infectious + c.recovered + c.vaccinated == g.n_nodes());
            CHECK(c.vaccinated == vacc.size());
        }
        CHECK(o.per_step_counts.back().infectious == 0);
        CHECK(o.n_ever_infected == o.n_seeds + o.transmissions.size());
        CHECK(o.cumulative_incidence >= static_cast<double>(o.n_seeds) / g.n_nodes());

        std::set<NodeIndex> infected(o.seeds.begin(), o.seeds.end());
        std::size_t from_seeds = 0;
        std::set<NodeIndex> seeds(o.seeds.begin(), o.seeds.end());
        for (auto s : o.seeds)
            CHECK_FALSE(vset.count(s));
        for (auto const& t : o.transmissions) {
            CHECK(g.has_edge(t.infector, t.infectee));
            CHECK(infected.count(t.infector));
            CHECK_FALSE(infected.count(t.infectee));
            CHECK_FALSE(vset.count(t.infectee));
            infected.insert(t.infectee);
            from_seeds += seeds.count(t.infector);
        }
        CHECK(from_seeds == o.seed_caused_infections);
    }
}

TEST_CASE("runs are reproducible")
{
    auto g = test_graph(4);
    SirParams p;
    p.rng_seed = 99;
    SirOptions opt{true, true};
    auto a = run_sir(g, p, {}, opt);
    auto b = run_sir(g, p, {}, opt);
    CHECK(a.n_ever_infected == b.n_ever_infected);
    CHECK(a.duration_steps == b.duration_steps);
    CHECK(a.seeds == b.seeds);
    REQUIRE(a.transmissions.size() == b.transmissions.size());
    for (std::size_t i = 0; i < a.transmissions.size(); ++i)
        CHECK(a.transmissions[i].infectee == b.transmissions[i].infectee);
}

TEST_CASE("gamma = 0 still terminates")
{
    auto g = test_graph(5, 100, 0.05);
    SirParams p;
    p.gamma = 0;
    p.beta = 1;
    auto o = run_sir(g, p, {});
    CHECK(o.n_ever_infected <= g.n_nodes());
    CHECK(o.n_ever_infected > o.n_seeds);

    p.beta = 0;
    o = run_sir(g, p, {});
    CHECK(o.n_ever_infected == o.n_seeds);
    CHECK(o.duration_steps == 1);
}

TEST_CASE("incidence rises with beta and falls with gamma")
{
    auto g = test_graph(6, 300, 0.025);
    SirParams p;
    p.seed_fraction = 0.02;
    double prev = -1, prev_se = 0;
    for (double beta : {0.15, 0.3, 0.6}) {
        p.beta = beta;
        double se = 0;
        auto m = mean_incidence(g, p, 500, &se);
        CHECK(m + 2 * std::hypot(se, prev_se) >= prev);
        CHECK(m > prev);
        prev = m;
        prev_se = se;
    }
    p.beta = 0.25;
    prev = 2;
    prev_se = 0;
    for (double gamma : {0.05, 0.1, 0.2}) {
        p.gamma = gamma;
        double se = 0;
        auto m = mean_incidence(g, p, 500, &se);
        CHECK(m < prev);
        prev = m;
        prev_se = se;
    }
}

TEST_CASE("estimate_r0")
{
    SirOutcome o;
    o.n_seeds = 5;
    o.seed_caused_infections = 10;
    std::vector<SirOutcome> one{o};
    CHECK(estimate_r0(one) == 2.0);
    CHECK_THROWS_AS(estimate_r0(std::vector<SirOutcome>{}), PreconditionError);
}

TEST_CASE("precondition errors")
{
    auto g = test_graph(7, 50, 0.1);
    SirParams p;
    std::vector<NodeIndex> bad{50};
    CHECK_THROWS_AS(run_sir(g, p, bad), PreconditionError);
    p.seed_fraction = 0;
    CHECK_THROWS_AS(run_sir(g, p, {}), PreconditionError);
    p.seed_fraction = 0.5;
    std::vector<NodeIndex> most;
    for (NodeIndex v = 0; v < 40; ++v)
        most.push_back(v);
    CHECK_THROWS_AS(run_sir(g, p, most), PreconditionError);
}
