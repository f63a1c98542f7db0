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

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "vaxnet/error.hpp"
#include "vaxnet/netgen.hpp"
#include "vaxnet/regress.hpp"
#include "vaxnet/rng.hpp"

using namespace vaxnet;
using C = Characteristic;

namespace
{
// Characteristic j of network i is a smooth function plus noise; incidence is
// linear in mean degree and SD degree plus run-level noise.
RegressionDataset synthetic(std::size_t networks, std::size_t runs, double noise,
                            std::uint64_t seed = 1)
{
    auto s = rng::derive_stream({seed, {}});
    auto normal = [&] {
        double u1 = s.uniform_real(), u2 = s.uniform_real();
        return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
    };
    RegressionDataset d;
    for (std::size_t i = 0; i < networks; ++i) {
        RegressionRow base;
        for (auto& c : base.characteristics)
            c = 5.0 + normal();
        base.network_id = "net" + std::to_string(i);
        base.village_id = "v" + std::to_string(i % 4);
        for (std::size_t r = 0; r < runs; ++r) {
            auto row = base;
            row.incidence = 40.0 + 3.0 * row.characteristics[2] - 2.0 * row.characteristics[3]
                            + noise * normal();
            d.rows.push_back(row);
        }
    }
    return d;
}

RegressionDataset line(std::size_t n)
{
    RegressionDataset d;
    for (std::size_t i = 0; i < n; ++i) {
        RegressionRow r;
        r.characteristics[2] = static_cast<double>(i);
        r.incidence = 3.0 + 2.0 * static_cast<double>(i);
        r.network_id = std::to_string(i);
        d.rows.push_back(r);
    }
    return d;
}

// -2 log L + 2k for a Gaussian model at the MLE, k counting the variance.
double likelihood_aic(double rss, std::size_t n, std::size_t p)
{
    auto nn = static_cast<double>(n);
    auto sigma2 = rss / nn;
    return nn * std::log(2.0 * std::numbers::pi * sigma2) + nn + 2.0 * static_cast<double>(p + 2);
}
} // namespace

TEST_CASE("noiseless line is recovered")
{
    auto d = line(20);
    std::array<C, 1> p{C::MeanDegree};
    auto fit = fit_ols(d, p);
    REQUIRE(fit.coefficients.size() == 2);
    CHECK(fit.coefficients[0] == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(fit.coefficients[1] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(fit.rss < 1e-16);
    CHECK(fit.n_rows == 20);
    CHECK(cv_rmse(d, p, 5, rng::derive_stream({1, {}})) < 1e-8);
}

TEST_CASE("empty model is the mean")
{
    auto d = synthetic(10, 3, 1.0);
    auto fit = fit_ols(d, std::span<C const>{});
    double mean = 0;
    for (auto const& r : d.rows)
        mean += r.incidence;
    mean /= static_cast<double>(d.rows.size());
    REQUIRE(fit.coefficients.size() == 1);
    CHECK(fit.coefficients[0] == doctest::Approx(mean));
}

TEST_CASE("aic matches the gaussian likelihood up to a constant")
{
    auto d = synthetic(30, 4, 2.0);
    auto n = d.rows.size();
    auto offset = static_cast<double>(n) * (1.0 + std::log(2.0 * std::numbers::pi));
    std::vector<std::vector<C>> sets{{}, {C::MeanDegree}, {C::MeanDegree, C::SdDegree},
                                     {all_characteristics.begin(), all_characteristics.end()}};
    for (auto const& set : sets) {
        auto fit = fit_ols(d, set);
        CHECK(fit.aic + offset == doctest::Approx(likelihood_aic(fit.rss, n, set.size())));
    }
}

TEST_CASE("nested models never raise rss")
{
    auto d = synthetic(30, 4, 2.0);
    auto fits = subset_search(d, 3, 5, rng::derive_stream({2, {}}));
    CHECK(fits.size() == 65);
    std::map<std::vector<C>, double> rss;
    for (auto const& f : fits)
        rss[f.predictors] = f.rss;
    for (auto const& [set, r] : rss) {
        if (set.size() == 7) {
            for (auto const& [other, r2] : rss)
                CHECK(r <= r2 * (1 + 1e-12));
            continue;
        }
        for (std::size_t drop = 0; drop < set.size(); ++drop) {
            auto smaller = set;
            smaller.erase(smaller.begin() + static_cast<std::ptrdiff_t>(drop));
            REQUIRE(rss.count(smaller));
            CHECK(r <= rss[smaller] * (1 + 1e-12));
        }
    }
}

TEST_CASE("subset search numbering and ranking")
{
    auto d = synthetic(40, 5, 1.0);
    auto s = rng::derive_stream({3, {}});

    auto only = subset_search(d, 0, 5, s);
    REQUIRE(only.size() == 2);
    std::set<std::size_t> numbers;
    for (auto const& f : only)
        numbers.insert(f.model_number);
    CHECK(numbers == std::set<std::size_t>{1, 2});

    auto fits = subset_search(d, 3, 5, s);
    for (std::size_t i = 1; i < fits.size(); ++i)
        CHECK(*fits[i - 1].cv_rmse <= *fits[i].cv_rmse);
    for (auto const& f : fits) {
        if (f.model_number == 1)
            CHECK(f.predictors.size() == 7);
        if (f.model_number == 2)
            CHECK(f.predictors.empty());
        if (f.model_number == 3)
            CHECK(f.predictors == std::vector<C>{C::Density});
        if (f.model_number == 9)
            CHECK(f.predictors == std::vector<C>{C::MeanBetweenness});
        if (f.model_number == 10)
            CHECK(f.predictors == std::vector<C>{C::Density, C::Size});
    }
    // The true model wins.
    CHECK(fits.front().predictors == std::vector<C>{C::MeanDegree, C::SdDegree});

    CHECK_THROWS_AS(subset_search(d, 8, 5, s), PreconditionError);
}

TEST_CASE("constant columns are left out of the search")
{
    auto d = synthetic(30, 3, 1.0);
    for (auto& r : d.rows)
        r.characteristics[5] = 1.0;
    auto varying = varying_characteristics(d);
    CHECK(varying.size() == 6);
    CHECK(std::find(varying.begin(), varying.end(), C::LccProportion) == varying.end());
    CHECK_THROWS_AS(subset_search(standardize(d), 2, 5, rng::derive_stream({1, {}})),
                    PreconditionError);

    auto fits = subset_search(standardize(d, varying), 2, 5, rng::derive_stream({1, {}}), varying);
    CHECK(fits.size() == 2 + 6 + 15);
    for (auto const& f : fits) {
        if (f.model_number == 1)
            CHECK(f.predictors == varying);
    }

    std::array<C, 0> none{};
    auto empty = subset_search(d, 0, 5, rng::derive_stream({1, {}}), none);
    REQUIRE(empty.size() == 1);
    CHECK(empty[0].model_number == 2);
}

TEST_CASE("cross-validation keeps networks together")
{
    auto d = synthetic(12, 6, 1.0);
    std::array<C, 1> p{C::MeanDegree};
    auto s = rng::derive_stream({4, {}});
    CHECK(cv_rmse(d, p, 4, s) == cv_rmse(d, p, 4, s));
    CHECK_THROWS_AS(cv_rmse(d, p, 1, s), PreconditionError);
    CHECK_THROWS_AS(cv_rmse(d, p, 13, s), PreconditionError);
    // With one fold per network every held-out row is predicted without
    // its network; a leave-one-row-out split would do better.
    auto rmse = cv_rmse(d, p, 12, s);
    CHECK(rmse > 0);
}

TEST_CASE("standardization")
{
    auto d = synthetic(20, 2, 1.0);
    auto z = standardize(d);
    for (std::size_t j = 0; j < 7; ++j) {
        double mean = 0, ss = 0;
        for (auto const& r : z.rows)
            mean += r.characteristics[j];
        mean /= static_cast<double>(z.rows.size());
        for (auto const& r : z.rows)
            ss += (r.characteristics[j] - mean) * (r.characteristics[j] - mean);
        CHECK(std::abs(mean) < 1e-12);
        CHECK(ss / static_cast<double>(z.rows.size()) == doctest::Approx(1.0));
    }
    auto zz = standardize(z);
    for (std::size_t i = 0; i < z.rows.size(); ++i) {
        for (std::size_t j = 0; j < 7; ++j)
            CHECK(zz.rows[i].characteristics[j] == doctest::Approx(z.rows[i].characteristics[j]));
    }

    auto flat = d;
    for (auto& r : flat.rows)
        r.characteristics[0] = 0.25;
    CHECK_THROWS_WITH_AS(standardize(flat), "characteristic density has zero variance",
                         PreconditionError);
    std::array<C, 1> only{C::Size};
    CHECK_NOTHROW(standardize(flat, only));
    CHECK_THROWS_AS(standardize(RegressionDataset{}), PreconditionError);
}

TEST_CASE("coefficients map back to raw units")
{
    auto d = synthetic(30, 3, 0.5);
    std::array<C, 2> p{C::MeanDegree, C::SdDegree};
    auto raw = fit_ols(d, p);
    auto z = standardize(d);
    auto back = unstandardize_coefficients(fit_ols(z, p), z.stats);
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(back[i] == doctest::Approx(raw.coefficients[i]).epsilon(1e-9));
}

TEST_CASE("rows with undefined assortativity are excluded when needed")
{
    VillageCharacteristics c;
    c.n_nodes = 10;
    RegressionDataset d;
    d.add(30.0, c, "a", "v");
    CHECK(d.rows.empty());
    CHECK(d.excluded_rows == 1);
    std::array<C, 1> p{C::MeanDegree};
    d.add(30.0, c, "a", "v", p);
    CHECK(d.rows.size() == 1);
    CHECK_THROWS_AS(d.add(130.0, c, "a", "v", p), PreconditionError);
}

TEST_CASE("csv round trip")
{
    auto d = synthetic(5, 2, 1.0);
    std::stringstream buf;
    write_regression_csv(buf, d);
    auto back = read_regression_csv(buf);
    REQUIRE(back.rows.size() == d.rows.size());
    for (std::size_t i = 0; i < d.rows.size(); ++i) {
        CHECK(back.rows[i].incidence == d.rows[i].incidence);
        CHECK(back.rows[i].characteristics == d.rows[i].characteristics);
        CHECK(back.rows[i].network_id == d.rows[i].network_id);
        CHECK(back.rows[i].village_id == d.rows[i].village_id);
    }

    std::istringstream bad("incidence,density\n1,2\n");
    CHECK_THROWS_AS(read_regression_csv(bad), ParseError);
}

TEST_CASE("subset table has one line per model")
{
    auto d = synthetic(20, 2, 1.0);
    auto fits = subset_search(d, 1, 4, rng::derive_stream({5, {}}));
    std::ostringstream out;
    write_subset_table(out, fits);
    auto text = out.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 9);
    CHECK(text.rfind("model,", 0) == 0);
}

TEST_CASE("fcd sweep above the maximum degree matches the full network")
{
    FcdEnsemble ens;
    for (std::uint64_t j = 0; j < 12; ++j) {
        auto s = rng::derive_stream({j, {}});
        auto g = erdos_renyi(40, 0.05 + 0.01 * static_cast<double>(j), s);
        std::vector<double> inc;
        for (int r = 0; r < 3; ++r)
            inc.push_back(std::min(100.0, 5.0 * 2.0 * g.n_edges() / 40.0 + r));
        ens.graphs.push_back(g);
        ens.network_ids.push_back("n" + std::to_string(j));
        ens.village_ids.push_back("v");
        ens.incidences.push_back(inc);
    }
    std::array<std::optional<std::size_t>, 3> ks{std::nullopt, 1000, 1};
    std::array<C, 2> p{C::MeanDegree, C::SdDegree};
    auto rows = fcd_prediction_sweep(ens, ks, p, 4, rng::derive_stream({6, {}}));
    REQUIRE(rows.size() == 3);
    CHECK_FALSE(rows[0].k.has_value());
    CHECK(rows[1].k == 1000u);
    CHECK(*rows[1].fit.cv_rmse == doctest::Approx(*rows[0].fit.cv_rmse));
    CHECK(rows[1].fit.rss == doctest::Approx(rows[0].fit.rss));
    CHECK(rows[0].fit.n_rows == 36);
    CHECK(*rows[2].fit.cv_rmse > *rows[0].fit.cv_rmse);

    std::ostringstream out;
    write_fcd_sweep_table(out, rows);
    CHECK(out.str().find("full,") != std::string::npos);
}
