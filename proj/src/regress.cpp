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
#include "vaxnet/regress.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>

#include "vaxnet/error.hpp"
#include "vaxnet/fcd.hpp"
#include "parallel.hpp"

namespace vaxnet
{

namespace
{
std::size_t column_of(Characteristic c)
{
    return static_cast<std::size_t>(c);
}

std::vector<std::size_t> all_rows(RegressionDataset const& data)
{
    std::vector<std::size_t> idx(data.rows.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        idx[i] = i;
    return idx;
}

// Coefficients (intercept first) fitted on the given rows.
Eigen::VectorXd solve_rows(RegressionDataset const& data,
                           std::span<Characteristic const> predictors,
                           std::vector<std::size_t> const& rows)
{
    auto p = predictors.size();
    if (rows.size() <= p + 1) {
        throw PreconditionError("need more than " + std::to_string(p + 1)
                                + " rows to fit " + std::to_string(p) + " predictors");
    }
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(p + 1));
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        auto const& row = data.rows[rows[r]];
        auto ri = static_cast<Eigen::Index>(r);
        x(ri, 0) = 1.0;
        for (std::size_t j = 0; j < p; ++j)
            x(ri, static_cast<Eigen::Index>(j + 1)) = row.characteristics[column_of(predictors[j])];
        y(ri) = row.incidence;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (static_cast<std::size_t>(qr.rank()) < p + 1)
        throw PreconditionError("rank-deficient design matrix");
    return qr.solve(y);
}

double predict_with(Eigen::VectorXd const& coef, std::span<Characteristic const> predictors,
                    RegressionRow const& row)
{
    double v = coef(0);
    for (std::size_t j = 0; j < predictors.size(); ++j)
        v += coef(static_cast<Eigen::Index>(j + 1)) * row.characteristics[column_of(predictors[j])];
    return v;
}

std::vector<std::string> split_csv_line(std::string const& line)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ','))
        out.push_back(field);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

double parse_double(std::string const& s, std::size_t line)
{
    try {
        std::size_t used = 0;
        auto v = std::stod(s, &used);
        if (used != s.size())
            throw ParseError(line, "trailing characters in number '" + s + "'");
        return v;
    } catch (std::invalid_argument const&) {
        throw ParseError(line, "not a number: '" + s + "'");
    } catch (std::out_of_range const&) {
        throw ParseError(line, "number out of range: '" + s + "'");
    }
}
} // namespace

void RegressionDataset::add(double incidence_percent, VillageCharacteristics const& c,
                            std::string network_id, std::string village_id,
                            std::span<Characteristic const> needed)
{
    if (!(incidence_percent >= 0 && incidence_percent <= 100))
        throw PreconditionError("incidence must be a percentage in [0, 100]");
    RegressionRow row;
    row.incidence = incidence_percent;
    for (auto ch : needed) {
        auto v = c.value(ch);
        if (!v) {
            ++excluded_rows;
            return;
        }
        row.characteristics[column_of(ch)] = *v;
    }
    row.network_id = std::move(network_id);
    row.village_id = std::move(village_id);
    rows.push_back(std::move(row));
}

namespace
{
// Pooled mean and population SD of one column.
std::pair<double, double> column_moments(RegressionDataset const& data, std::size_t j)
{
    auto n = static_cast<double>(data.rows.size());
    double mean = 0;
    for (auto const& r : data.rows)
        mean += r.characteristics[j];
    mean /= n;
    double ss = 0;
    for (auto const& r : data.rows) {
        auto d = r.characteristics[j] - mean;
        ss += d * d;
    }
    return {mean, std::sqrt(ss / n)};
}

bool nonconstant(double mean, double sd)
{
    return sd > 1e-12 * std::max(1.0, std::abs(mean));
}
} // namespace

std::vector<Characteristic> varying_characteristics(RegressionDataset const& data,
                                                    std::span<Characteristic const> columns)
{
    std::vector<Characteristic> out;
    if (data.rows.empty())
        return out;
    for (auto ch : columns) {
        auto [mean, sd] = column_moments(data, column_of(ch));
        if (nonconstant(mean, sd))
            out.push_back(ch);
    }
    return out;
}

RegressionDataset standardize(RegressionDataset const& data,
                              std::span<Characteristic const> columns)
{
    if (data.rows.empty())
        throw PreconditionError("cannot standardize an empty dataset");
    RegressionDataset out = data;
    for (auto ch : columns) {
        auto j = column_of(ch);
        auto [mean, sd] = column_moments(data, j);
        if (!nonconstant(mean, sd)) {
            throw PreconditionError("characteristic " + std::string(characteristic_name(ch))
                                    + " has zero variance");
        }
        for (auto& r : out.rows)
            r.characteristics[j] = (r.characteristics[j] - mean) / sd;
        out.stats.mean[j] = mean;
        out.stats.sd[j] = sd;
    }
    return out;
}

double ModelFit::predict(RegressionRow const& row) const
{
    double v = coefficients.at(0);
    for (std::size_t j = 0; j < predictors.size(); ++j)
        v += coefficients.at(j + 1) * row.characteristics[column_of(predictors[j])];
    return v;
}

ModelFit fit_ols(RegressionDataset const& data, std::span<Characteristic const> predictors)
{
    auto rows = all_rows(data);
    auto coef = solve_rows(data, predictors, rows);
    ModelFit fit;
    fit.predictors.assign(predictors.begin(), predictors.end());
    fit.coefficients.assign(coef.data(), coef.data() + coef.size());
    for (auto const& r : data.rows) {
        auto e = r.incidence - predict_with(coef, predictors, r);
        fit.rss += e * e;
    }
    fit.n_rows = data.rows.size();
    auto n = static_cast<double>(fit.n_rows);
    fit.aic = n * std::log(fit.rss / n) + 2.0 * static_cast<double>(predictors.size() + 2);
    return fit;
}

std::vector<double> unstandardize_coefficients(ModelFit const& fit,
                                               StandardizationStats const& stats)
{
    std::vector<double> out = fit.coefficients;
    for (std::size_t j = 0; j < fit.predictors.size(); ++j) {
        auto c = column_of(fit.predictors[j]);
        if (stats.sd[c] == 0)
            continue;
        out[j + 1] = fit.coefficients[j + 1] / stats.sd[c];
        out[0] -= out[j + 1] * stats.mean[c];
    }
    return out;
}

double cv_rmse(RegressionDataset const& data, std::span<Characteristic const> predictors,
               std::size_t k_folds, rng::Stream const& stream)
{
    if (k_folds < 2)
        throw PreconditionError("cross-validation needs at least two folds");
    std::map<std::string, std::size_t> fold_of;
    for (auto const& r : data.rows)
        fold_of.emplace(r.network_id, 0);
    if (fold_of.size() < k_folds) {
        throw PreconditionError("only " + std::to_string(fold_of.size())
                                + " networks for " + std::to_string(k_folds) + " folds");
    }
    auto s = stream;
    auto perm = rng::random_permutation(fold_of.size(), s);
    std::vector<std::size_t> rank_fold(fold_of.size());
    for (std::size_t i = 0; i < perm.size(); ++i)
        rank_fold[perm[i]] = i % k_folds;
    std::size_t rank = 0;
    for (auto& [id, fold] : fold_of)
        fold = rank_fold[rank++];

    std::vector<std::size_t> row_fold(data.rows.size());
    for (std::size_t i = 0; i < data.rows.size(); ++i)
        row_fold[i] = fold_of[data.rows[i].network_id];

    double sse = 0;
    std::vector<std::size_t> train, test;
    for (std::size_t f = 0; f < k_folds; ++f) {
        train.clear();
        test.clear();
        for (std::size_t i = 0; i < data.rows.size(); ++i)
            (row_fold[i] == f ? test : train).push_back(i);
        if (test.empty())
            throw PreconditionError("fold " + std::to_string(f) + " has no rows");
        auto coef = solve_rows(data, predictors, train);
        for (auto i : test) {
            auto e = data.rows[i].incidence - predict_with(coef, predictors, data.rows[i]);
            sse += e * e;
        }
    }
    return std::sqrt(sse / static_cast<double>(data.rows.size()));
}

std::vector<ModelFit> subset_search(RegressionDataset const& data, std::size_t max_subset_size,
                                    std::size_t k_folds, rng::Stream const& stream,
                                    std::span<Characteristic const> candidates)
{
    auto c = candidates.size();
    if (max_subset_size > c)
        throw PreconditionError("subset size cannot exceed the " + std::to_string(c)
                                + " candidate predictors");

    // Model numbers are fixed before any candidate-free special case so the
    // empty model is always number 2.
    std::vector<std::vector<Characteristic>> sets;
    std::vector<std::size_t> numbers;
    if (c > 0) {
        sets.emplace_back(candidates.begin(), candidates.end());
        numbers.push_back(1);
    }
    sets.emplace_back();
    numbers.push_back(2);
    for (std::size_t size = 1; size <= std::min(max_subset_size, c - (c > 0)); ++size) {
        // Lexicographic combinations via a selection mask.
        std::vector<bool> mask(c, false);
        std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(size), true);
        do {
            std::vector<Characteristic> set;
            for (std::size_t j = 0; j < c; ++j) {
                if (mask[j])
                    set.push_back(candidates[j]);
            }
            sets.push_back(std::move(set));
            numbers.push_back(numbers.size() + 1);
        } while (std::prev_permutation(mask.begin(), mask.end()));
    }

    std::vector<ModelFit> fits(sets.size());
    detail::parallel_for(sets.size(), [&](std::size_t i) {
        fits[i] = fit_ols(data, sets[i]);
        fits[i].cv_rmse = cv_rmse(data, sets[i], k_folds, stream);
        fits[i].model_number = numbers[i];
    });
    std::stable_sort(fits.begin(), fits.end(), [](ModelFit const& a, ModelFit const& b) {
        return *a.cv_rmse < *b.cv_rmse;
    });
    return fits;
}

std::vector<FcdSweepRow> fcd_prediction_sweep(FcdEnsemble const& ensemble,
                                              std::span<std::optional<std::size_t> const> k_values,
                                              std::span<Characteristic const> predictors,
                                              std::size_t k_folds, rng::Stream const& stream)
{
    auto n = ensemble.graphs.size();
    if (ensemble.network_ids.size() != n || ensemble.village_ids.size() != n
        || ensemble.incidences.size() != n) {
        throw PreconditionError("ensemble fields have mismatched lengths");
    }
    std::vector<FcdSweepRow> out;
    for (auto k : k_values) {
        std::vector<VillageCharacteristics> chars(n);
        detail::parallel_for(n, [&](std::size_t j) {
            if (!k) {
                chars[j] = village_characteristics(ensemble.graphs[j], predictors);
                return;
            }
            auto base = stream.split(rng::Label::Truncation, *k).split(rng::Label::Sample, j);
            chars[j] = village_characteristics(truncate(ensemble.graphs[j], *k, base), predictors);
        });
        RegressionDataset data;
        for (std::size_t j = 0; j < n; ++j) {
            for (auto inc : ensemble.incidences[j])
                data.add(inc, chars[j], ensemble.network_ids[j], ensemble.village_ids[j], predictors);
        }
        auto z = standardize(data, predictors);
        FcdSweepRow row;
        row.k = k;
        row.fit = fit_ols(z, predictors);
        row.fit.cv_rmse = cv_rmse(z, predictors, k_folds, stream);
        row.excluded_rows = data.excluded_rows;
        out.push_back(std::move(row));
    }
    return out;
}

RegressionDataset read_regression_csv(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line))
        throw ParseError(1, "missing header");
    ++line_no;
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    auto header = split_csv_line(line);
    auto find = [&](std::string_view name) -> std::size_t {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw ParseError(1, "missing column '" + std::string(name) + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    auto inc_col = find("incidence");
    auto net_col = find("network_id");
    auto vil_col = find("village_id");
    std::array<std::size_t, 7> ch_col{};
    for (std::size_t j = 0; j < 7; ++j)
        ch_col[j] = find(characteristic_name(all_characteristics[j]));

    RegressionDataset data;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        auto f = split_csv_line(line);
        if (f.size() != header.size()) {
            throw ParseError(line_no, "expected " + std::to_string(header.size()) + " fields, got "
                                          + std::to_string(f.size()));
        }
        RegressionRow row;
        row.incidence = parse_double(f[inc_col], line_no);
        if (!(row.incidence >= 0 && row.incidence <= 100))
            throw ParseError(line_no, "incidence outside [0, 100]");
        bool missing = false;
        for (std::size_t j = 0; j < 7; ++j) {
            auto const& s = f[ch_col[j]];
            if (s.empty() || s == "NA") {
                missing = true;
                break;
            }
            row.characteristics[j] = parse_double(s, line_no);
        }
        if (missing) {
            ++data.excluded_rows;
            continue;
        }
        row.network_id = f[net_col];
        row.village_id = f[vil_col];
        data.rows.push_back(std::move(row));
    }
    return data;
}

void write_regression_csv(std::ostream& out, RegressionDataset const& data)
{
    auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
    out << "incidence";
    for (auto c : all_characteristics)
        out << ',' << characteristic_name(c);
    out << ",network_id,village_id\n";
    for (auto const& r : data.rows) {
        out << r.incidence;
        for (auto v : r.characteristics)
            out << ',' << v;
        out << ',' << r.network_id << ',' << r.village_id << '\n';
    }
    out.precision(old_precision);
}

void write_subset_table(std::ostream& out, std::span<ModelFit const> fits)
{
    std::optional<double> full_aic;
    for (auto const& f : fits) {
        if (f.model_number == 1)
            full_aic = f.aic;
    }
    out << "model";
    for (auto c : all_characteristics)
        out << ',' << characteristic_name(c);
    out << ",rmse,aic,aic_change\n";
    for (auto const& f : fits) {
        out << f.model_number;
        for (auto c : all_characteristics) {
            bool used = std::find(f.predictors.begin(), f.predictors.end(), c) != f.predictors.end();
            out << ',' << (used ? "X" : "");
        }
        out << ',';
        if (f.cv_rmse)
            out << *f.cv_rmse;
        out << ',' << f.aic << ',';
        if (full_aic)
            out << f.aic - *full_aic;
        out << '\n';
    }
}

void write_fcd_sweep_table(std::ostream& out, std::span<FcdSweepRow const> rows)
{
    out << "k,rmse,aic,n_rows,excluded_rows\n";
    for (auto const& r : rows) {
        if (r.k)
            out << *r.k;
        else
            out << "full";
        out << ',';
        if (r.fit.cv_rmse)
            out << *r.fit.cv_rmse;
        out << ',' << r.fit.aic << ',' << r.fit.n_rows << ',' << r.excluded_rows << '\n';
    }
}

} // namespace vaxnet
