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
#ifndef VAXNET_EXPERIMENT_HPP
#define VAXNET_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vaxnet/graph.hpp"
#include "vaxnet/netgen.hpp"
#include "vaxnet/regress.hpp"
#include "vaxnet/sir.hpp"
#include "vaxnet/vaccinate.hpp"

namespace vaxnet
{

struct Village {
    std::string id;
    Graph graph;
};

/// Loads edge lists at a tie threshold, sorted by id; ids must be unique.
std::vector<Village> load_villages(std::span<std::filesystem::path const> paths, int tie_threshold);

struct StrategySpec {
    Strategy strategy = Strategy::None;
    /// HighDegree only; empty means the pooled median degree over villages.
    std::optional<int> cutoff;
    /// Observe the network through a fixed-choice survey of this size.
    std::optional<std::size_t> fcd_k;

    /// e.g. "top-degree@k3", "high-degree>=6".
    std::string label() const;
};

struct CampaignConfig {
    std::vector<std::filesystem::path> villages;
    int tie_threshold = 1;
    std::vector<StrategySpec> strategies;
    double coverage = 0.1;
    SirParams sir;
    std::size_t runs_per_cell = 500;
    std::uint64_t master_seed = 0;
    std::filesystem::path output_dir;
    /// One truncation per (village, K) instead of a fresh one per run.
    bool freeze_truncation = false;
};

/// JSON object with the CampaignConfig field names; relative village and
/// output paths resolve against base_dir. Unknown keys are errors.
CampaignConfig parse_campaign_config(std::string_view json_text,
                                     std::filesystem::path const& base_dir = {});
CampaignConfig load_campaign_config(std::filesystem::path const& path);

struct RunRecord {
    std::string village_id;
    std::string cell;  ///< StrategySpec::label() with the cutoff resolved
    Strategy strategy = Strategy::None;
    std::optional<int> cutoff;
    std::optional<std::size_t> fcd_k;
    std::size_t run = 0;
    double incidence = 0;  ///< percent of all nodes
    std::size_t n_vaccinated = 0;
    std::size_t n_ever_infected = 0;
    std::size_t seed_caused_infections = 0;
    std::size_t n_seeds = 0;
    std::size_t duration_steps = 0;
    std::size_t fallback_selected = 0;
    std::size_t failed_nominations = 0;
};

struct SummaryRow {
    std::string cell;
    Strategy strategy = Strategy::None;
    std::optional<int> cutoff;
    std::optional<std::size_t> fcd_k;
    double mean_incidence = 0;  ///< mean over villages of village means, percent
    double ci_low = 0;
    double ci_high = 0;
    double min_village_mean = 0;
    double max_village_mean = 0;
    std::size_t n_villages = 0;
    /// Set when the CI is degenerate because only one village contributed.
    bool ci_flagged = false;
};

struct CampaignResult {
    std::vector<RunRecord> runs;  ///< by village, then strategy order, then run
    std::vector<SummaryRow> summary;
    std::vector<StrategySpec> resolved;  ///< strategies with cutoffs filled in
};

/// Village means per cell, then mean +- 1.96 SD / sqrt(villages). Rows come
/// in order of first appearance of each cell.
std::vector<SummaryRow> summarize(std::span<RunRecord const> runs);

/*!
 * Runs every (village, strategy, run) cell on a worker pool.
 *
 * Each run draws from a stream keyed by the master seed, village id,
 * strategy, its variant (cutoff or K) and the run index, so results do not
 * depend on scheduling. Writes runs.csv, summary.csv and metadata.json when
 * output_dir is set.
 */
CampaignResult run_campaign(CampaignConfig const& config);
/// As above on already-built graphs; config.villages is ignored.
CampaignResult run_campaign(CampaignConfig const& config, std::span<Village const> villages);

void write_runs_csv(std::ostream& out, std::span<RunRecord const> runs);
void write_summary_csv(std::ostream& out, std::span<SummaryRow const> rows);

struct PipelineConfig {
    std::vector<std::filesystem::path> villages;
    int tie_threshold = 1;
    std::size_t samples_per_village = 100;
    std::size_t runs_per_sample = 500;
    SirParams sir;
    std::size_t burn_in = 100000;
    std::size_t thinning = 1000;
    double concentration = 30000;
    Proposal proposal = Proposal::Mixed;
    ConvergenceTolerances tolerances;
    /// Truncation levels for the FCD sweep; nullopt is the full network.
    std::vector<std::optional<std::size_t>> k_values{std::nullopt, 1, 2, 3, 4, 5, 10};
    std::vector<Characteristic> sweep_predictors{Characteristic::MeanDegree,
                                                 Characteristic::SdDegree};
    std::size_t max_subset_size = 3;
    std::size_t folds = 10;
    std::uint64_t master_seed = 0;
    std::filesystem::path output_dir;
};

PipelineConfig parse_pipeline_config(std::string_view json_text,
                                     std::filesystem::path const& base_dir = {});
PipelineConfig load_pipeline_config(std::filesystem::path const& path);

struct VillageReport {
    std::string id;
    std::size_t n_nodes = 0;
    double target_mean_degree = 0;
    bool included = false;
    std::vector<std::string> reasons;  ///< convergence failures
    double accepted_fraction = 0;
    double final_mean_degree = 0;
    double final_dmm_distance = 0;
};

struct PipelineResult {
    std::vector<VillageReport> villages;
    RegressionDataset dataset;  ///< raw characteristics, one row per SIR run
    std::vector<ModelFit> subsets;
    /// Characteristics constant over the dataset, left out of subsets.
    std::vector<Characteristic> constant_characteristics;
    std::vector<FcdSweepRow> sweep;
    double mean_incidence = 0;  ///< percent, over all runs
    double ci_half_width = 0;   ///< 1.96 SD of network means / sqrt(networks)
};

/*!
 * Village-level pipeline: sample a DMM-matched ensemble per village, run SIR
 * on every sample, regress incidence on network characteristics and sweep
 * FCD levels. Villages whose chain fails convergence_check are excluded with
 * their reasons. Writes dataset.csv, subsets.csv, fcd_sweep.csv,
 * villages.csv and metadata.json when output_dir is set.
 */
PipelineResult run_village_pipeline(PipelineConfig const& config);
PipelineResult run_village_pipeline(PipelineConfig const& config,
                                    std::span<Village const> villages);

} // namespace vaxnet

#endif
