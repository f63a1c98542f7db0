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
#ifndef VAXNET_REGRESS_HPP
#define VAXNET_REGRESS_HPP

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vaxnet/graph.hpp"
#include "vaxnet/metrics.hpp"
#include "vaxnet/rng.hpp"

namespace vaxnet
{

struct RegressionRow {
    double incidence = 0;  ///< percentage, 0-100
    /// Indexed in all_characteristics order.
    std::array<double, 7> characteristics{};
    std::string network_id;
    std::string village_id;
};

struct StandardizationStats {
    std::array<double, 7> mean{};
    std::array<double, 7> sd{};  ///< population SD; 0 for columns left alone
};

struct RegressionDataset {
    std::vector<RegressionRow> rows;
    StandardizationStats stats;
    /// Rows dropped because a characteristic (assortativity) was undefined.
    std::size_t excluded_rows = 0;

    /// Appends a row, or counts it as excluded if any of `needed` is undefined.
    void add(double incidence_percent, VillageCharacteristics const& c,
             std::string network_id, std::string village_id,
             std::span<Characteristic const> needed = all_characteristics);
};

/// Z-scores the given columns with pooled mean and population SD.
RegressionDataset standardize(RegressionDataset const& data,
                              std::span<Characteristic const> columns = all_characteristics);

struct ModelFit {
    std::vector<Characteristic> predictors;
    std::vector<double> coefficients;  ///< intercept first, then predictors in order
    double rss = 0;
    double aic = 0;
    std::optional<double> cv_rmse;
    std::size_t n_rows = 0;
    /// Full model 1, empty model 2, then subsets by size and lexicographic order.
    std::size_t model_number = 0;

    double predict(RegressionRow const& row) const;
};

/// Least squares by column-pivoted QR; aic = n ln(rss / n) + 2 (p + 2).
ModelFit fit_ols(RegressionDataset const& data, std::span<Characteristic const> predictors);

/// Maps coefficients fitted on standardized columns back to raw units.
std::vector<double> unstandardize_coefficients(ModelFit const& fit,
                                               StandardizationStats const& stats);

/*!
 * Grouped k-fold cross-validated RMSE.
 *
 * Distinct network ids, sorted, are shuffled with a copy of stream and dealt
 * round-robin into folds, so every row of a network lands in the same fold.
 */
double cv_rmse(RegressionDataset const& data, std::span<Characteristic const> predictors,
               std::size_t k_folds, rng::Stream const& stream);

/// Empty model, all subsets of 1..max_subset_size candidates and the model
/// with every candidate, each fitted and cross-validated on the same folds;
/// sorted by cv_rmse (ties keep model-number order).
std::vector<ModelFit> subset_search(RegressionDataset const& data, std::size_t max_subset_size,
                                    std::size_t k_folds, rng::Stream const& stream,
                                    std::span<Characteristic const> candidates
                                    = all_characteristics);

/// The given columns that are not constant over the rows (constant columns
/// cannot be standardized and are collinear with the intercept).
std::vector<Characteristic> varying_characteristics(
    RegressionDataset const& data, std::span<Characteristic const> columns = all_characteristics);

/// Graphs of a simulated ensemble with the SIR outcomes run on each.
struct FcdEnsemble {
    std::vector<Graph> graphs;
    std::vector<std::string> network_ids;
    std::vector<std::string> village_ids;
    /// Per graph, incidence (percent) of each SIR run on the full graph.
    std::vector<std::vector<double>> incidences;
};

struct FcdSweepRow {
    std::optional<std::size_t> k;  ///< empty for the full network
    ModelFit fit;
    std::size_t excluded_rows = 0;
};

/// For each K (nullopt = full network) truncates every graph once, recomputes
/// the predictors, standardizes and fits against the full-network incidence.
std::vector<FcdSweepRow> fcd_prediction_sweep(FcdEnsemble const& ensemble,
                                              std::span<std::optional<std::size_t> const> k_values,
                                              std::span<Characteristic const> predictors,
                                              std::size_t k_folds, rng::Stream const& stream);

/// CSV with columns incidence, the seven characteristic names, network_id,
/// village_id (header required, any column order).
RegressionDataset read_regression_csv(std::istream& in);
void write_regression_csv(std::ostream& out, RegressionDataset const& data);

/// One line per model: predictor flags (X), rmse, aic, aic change vs
/// model 1.
void write_subset_table(std::ostream& out, std::span<ModelFit const> fits);

void write_fcd_sweep_table(std::ostream& out, std::span<FcdSweepRow const> rows);

} // namespace vaxnet

#endif
