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
#include "vaxnet/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "vaxnet/error.hpp"
#include "vaxnet/fcd.hpp"
#include "vaxnet/metrics.hpp"
#include "vaxnet/rng.hpp"
#include "parallel.hpp"

namespace vaxnet
{

using nlohmann::json;

namespace
{
//---------------------------------------------------------------------------//
// Config parsing helpers
//---------------------------------------------------------------------------//

void check_keys(json const& obj, std::string_view where, std::set<std::string> const& allowed)
{
    if (!obj.is_object())
        throw Error(std::string(where) + ": expected an object");
    for (auto const& [key, value] : obj.items()) {
        if (!allowed.count(key))
            throw Error(std::string(where) + ": unknown key '" + key + "'");
    }
}

template<class T>
T get_or(json const& obj, char const* key, T fallback)
{
    auto it = obj.find(key);
    if (it == obj.end())
        return fallback;
    try {
        return it->get<T>();
    } catch (json::exception const& e) {
        throw Error(std::string("config key '") + key + "': " + e.what());
    }
}

json parse_json(std::string_view text)
{
    try {
        return json::parse(text);
    } catch (json::parse_error const& e) {
        throw Error(std::string("config is not valid JSON: ") + e.what());
    }
}

std::filesystem::path resolve(std::filesystem::path const& base, std::string const& p)
{
    std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

std::vector<std::filesystem::path> parse_village_list(json const& root,
                                                      std::filesystem::path const& base)
{
    auto it = root.find("villages");
    if (it == root.end() || !it->is_array() || it->empty())
        throw Error("config: 'villages' must be a non-empty list of edge-list paths");
    std::vector<std::filesystem::path> out;
    for (auto const& v : *it) {
        if (!v.is_string())
            throw Error("config: village entries must be strings");
        out.push_back(resolve(base, v.get<std::string>()));
    }
    return out;
}

SirParams parse_sir(json const& root)
{
    SirParams p;
    auto it = root.find("sir");
    if (it == root.end())
        return p;
    check_keys(*it, "sir", {"beta", "gamma", "seed_fraction"});
    p.beta = get_or(*it, "beta", p.beta);
    p.gamma = get_or(*it, "gamma", p.gamma);
    p.seed_fraction = get_or(*it, "seed_fraction", p.seed_fraction);
    return p;
}

void validate_sir(SirParams const& p)
{
    if (!(p.beta >= 0 && p.beta <= 1))
        throw PreconditionError("beta must lie in [0, 1]");
    if (!(p.gamma >= 0 && p.gamma <= 1))
        throw PreconditionError("gamma must lie in [0, 1]");
    if (!(p.seed_fraction > 0 && p.seed_fraction <= 1))
        throw PreconditionError("seed fraction must lie in (0, 1]");
}

void validate_threshold(int t)
{
    if (t < 1 || t > 12)
        throw PreconditionError("tie threshold must lie in 1..12");
}

json sir_to_json(SirParams const& p)
{
    return {{"beta", p.beta}, {"gamma", p.gamma}, {"seed_fraction", p.seed_fraction}};
}

std::string read_file(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::ofstream open_output(std::filesystem::path const& path)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path.string());
    return out;
}

//---------------------------------------------------------------------------//
// Campaign helpers
//---------------------------------------------------------------------------//

// Pooled median node degree over villages, rounded up to an integer cutoff.
int pooled_median_cutoff(std::span<Village const> villages)
{
    std::vector<std::size_t> degrees;
    for (auto const& v : villages) {
        auto d = v.graph.degrees();
        degrees.insert(degrees.end(), d.begin(), d.end());
    }
    if (degrees.empty())
        throw PreconditionError("no nodes to take a median degree over");
    std::sort(degrees.begin(), degrees.end());
    auto n = degrees.size();
    double median = n % 2 ? static_cast<double>(degrees[n / 2])
                          : 0.5 * static_cast<double>(degrees[n / 2 - 1] + degrees[n / 2]);
    return static_cast<int>(std::ceil(median));
}

std::uint64_t variant_code(StrategySpec const& s)
{
    std::uint64_t code = 0;
    if (s.fcd_k)
        code |= static_cast<std::uint64_t>(*s.fcd_k) + 1;
    if (s.cutoff)
        code |= (static_cast<std::uint64_t>(*s.cutoff) + 1) << 32;
    return code;
}

void validate_campaign(CampaignConfig const& c, std::size_t n_villages)
{
    if (n_villages == 0)
        throw PreconditionError("campaign has no villages");
    if (c.strategies.empty())
        throw PreconditionError("campaign has no strategies");
    if (c.runs_per_cell < 1)
        throw PreconditionError("runs_per_cell must be at least 1");
    if (!(c.coverage > 0 && c.coverage < 1))
        throw PreconditionError("coverage must lie in (0, 1)");
    validate_sir(c.sir);
    for (auto const& s : c.strategies) {
        if (s.cutoff && s.strategy != Strategy::HighDegree)
            throw PreconditionError("cutoff given for strategy " + s.label());
        if (s.cutoff && *s.cutoff < 0)
            throw PreconditionError("cutoff must be non-negative");
    }
}

std::string format_double(double v)
{
    std::ostringstream ss;
    ss.precision(std::numeric_limits<double>::max_digits10);
    ss << v;
    return ss.str();
}

template<class T>
std::string optional_field(std::optional<T> const& v)
{
    return v ? std::to_string(*v) : std::string();
}
} // namespace

//---------------------------------------------------------------------------//
// Villages and configs
//---------------------------------------------------------------------------//

std::vector<Village> load_villages(std::span<std::filesystem::path const> paths, int tie_threshold)
{
    validate_threshold(tie_threshold);
    std::vector<Village> out;
    for (auto const& p : paths) {
        auto id = village_id_from_path(p);
        try {
            out.push_back({id, load_graph(p, tie_threshold)});
        } catch (std::exception const& e) {
            throw Error("village " + id + " (" + p.string() + "): " + e.what());
        }
    }
    std::sort(out.begin(), out.end(),
              [](Village const& a, Village const& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i].id == out[i - 1].id)
            throw Error("duplicate village id " + out[i].id);
    }
    return out;
}

std::string StrategySpec::label() const
{
    std::string s(strategy_name(strategy));
    if (cutoff)
        s += ">=" + std::to_string(*cutoff);
    if (fcd_k)
        s += "@k" + std::to_string(*fcd_k);
    return s;
}

CampaignConfig parse_campaign_config(std::string_view json_text,
                                     std::filesystem::path const& base_dir)
{
    auto root = parse_json(json_text);
    check_keys(root, "campaign config",
               {"villages", "tie_threshold", "strategies", "coverage", "sir", "runs_per_cell",
                "master_seed", "output_dir", "freeze_truncation"});
    CampaignConfig c;
    c.villages = parse_village_list(root, base_dir);
    c.tie_threshold = get_or(root, "tie_threshold", c.tie_threshold);
    c.coverage = get_or(root, "coverage", c.coverage);
    c.sir = parse_sir(root);
    c.runs_per_cell = get_or(root, "runs_per_cell", c.runs_per_cell);
    c.master_seed = get_or(root, "master_seed", c.master_seed);
    c.freeze_truncation = get_or(root, "freeze_truncation", c.freeze_truncation);
    if (auto out = get_or<std::string>(root, "output_dir", ""); !out.empty())
        c.output_dir = resolve(base_dir, out);

    auto it = root.find("strategies");
    if (it == root.end() || !it->is_array() || it->empty())
        throw Error("config: 'strategies' must be a non-empty list");
    for (auto const& entry : *it) {
        check_keys(entry, "strategy entry", {"strategy", "cutoff", "fcd_k"});
        auto name = get_or<std::string>(entry, "strategy", "");
        auto strategy = strategy_from_name(name);
        if (!strategy)
            throw Error("config: unknown strategy '" + name + "'");
        StrategySpec spec;
        spec.strategy = *strategy;
        if (entry.contains("cutoff"))
            spec.cutoff = get_or<int>(entry, "cutoff", 0);
        if (entry.contains("fcd_k"))
            spec.fcd_k = get_or<std::size_t>(entry, "fcd_k", 0);
        c.strategies.push_back(spec);
    }
    validate_threshold(c.tie_threshold);
    validate_campaign(c, c.villages.size());
    return c;
}

CampaignConfig load_campaign_config(std::filesystem::path const& path)
{
    return parse_campaign_config(read_file(path), path.parent_path());
}

//---------------------------------------------------------------------------//
// Campaign
//---------------------------------------------------------------------------//

std::vector<SummaryRow> summarize(std::span<RunRecord const> runs)
{
    struct Acc {
        SummaryRow row;
        std::vector<std::string> village_order;
        std::map<std::string, std::pair<double, std::size_t>> villages;
    };
    std::vector<Acc> cells;
    std::map<std::string, std::size_t> index;
    for (auto const& r : runs) {
        auto [it, fresh] = index.emplace(r.cell, cells.size());
        if (fresh) {
            Acc acc;
            acc.row.cell = r.cell;
            acc.row.strategy = r.strategy;
            acc.row.cutoff = r.cutoff;
            acc.row.fcd_k = r.fcd_k;
            cells.push_back(std::move(acc));
        }
        auto& acc = cells[it->second];
        auto [vit, vfresh] = acc.villages.emplace(r.village_id, std::pair<double, std::size_t>{});
        if (vfresh)
            acc.village_order.push_back(r.village_id);
        vit->second.first += r.incidence;
        ++vit->second.second;
    }

    std::vector<SummaryRow> out;
    for (auto& acc : cells) {
        std::vector<double> means;
        for (auto const& id : acc.village_order) {
            auto [sum, count] = acc.villages[id];
            means.push_back(sum / static_cast<double>(count));
        }
        auto v = static_cast<double>(means.size());
        double mean = 0;
        for (auto m : means)
            mean += m;
        mean /= v;
        auto& row = acc.row;
        row.mean_incidence = mean;
        row.n_villages = means.size();
        row.min_village_mean = *std::min_element(means.begin(), means.end());
        row.max_village_mean = *std::max_element(means.begin(), means.end());
        if (means.size() < 2) {
            row.ci_low = row.ci_high = mean;
            row.ci_flagged = true;
        } else {
            double ss = 0;
            for (auto m : means)
                ss += (m - mean) * (m - mean);
            auto half = 1.96 * std::sqrt(ss / (v - 1)) / std::sqrt(v);
            row.ci_low = mean - half;
            row.ci_high = mean + half;
        }
        out.push_back(row);
    }
    return out;
}

CampaignResult run_campaign(CampaignConfig const& config)
{
    validate_campaign(config, config.villages.size());
    auto villages = load_villages(config.villages, config.tie_threshold);
    return run_campaign(config, villages);
}

CampaignResult run_campaign(CampaignConfig const& config, std::span<Village const> villages)
{
    validate_campaign(config, villages.size());
    for (auto const& v : villages) {
        if (v.graph.n_nodes() == 0)
            throw PreconditionError("village " + v.id + " has no nodes");
    }

    CampaignResult result;
    result.resolved = config.strategies;
    std::optional<int> pooled;
    for (auto& s : result.resolved) {
        if (s.strategy == Strategy::HighDegree && !s.cutoff) {
            if (!pooled)
                pooled = pooled_median_cutoff(villages);
            s.cutoff = pooled;
        }
    }
    auto const& strategies = result.resolved;
    auto n_v = villages.size();
    auto n_s = strategies.size();
    auto n_r = config.runs_per_cell;

    std::vector<std::uint64_t> village_hash(n_v);
    for (std::size_t v = 0; v < n_v; ++v)
        village_hash[v] = rng::hash_string(villages[v].id);

    // Full-network betweenness is the same for every run; compute it once.
    bool need_full_btw = std::any_of(strategies.begin(), strategies.end(), [](auto const& s) {
        return s.strategy == Strategy::MostCentral && !s.fcd_k;
    });
    std::vector<std::vector<double>> full_btw(n_v);
    if (need_full_btw) {
        detail::parallel_for(n_v, [&](std::size_t v) {
            full_btw[v] = betweenness_all(villages[v].graph);
        });
    }

    // Frozen mode: one observed graph (and its betweenness) per (village, K).
    std::map<std::pair<std::size_t, std::size_t>, std::pair<Graph, std::vector<double>>> frozen;
    if (config.freeze_truncation) {
        std::vector<std::pair<std::size_t, std::size_t>> keys;
        for (std::size_t v = 0; v < n_v; ++v) {
            for (auto const& s : strategies) {
                if (s.fcd_k && !frozen.count({v, *s.fcd_k})) {
                    frozen[{v, *s.fcd_k}] = {};
                    keys.emplace_back(v, *s.fcd_k);
                }
            }
        }
        std::vector<std::pair<Graph, std::vector<double>>> built(keys.size());
        detail::parallel_for(keys.size(), [&](std::size_t i) {
            auto [v, k] = keys[i];
            auto base = rng::derive_stream(
                {config.master_seed,
                 {{rng::Label::Village, village_hash[v]}, {rng::Label::Truncation, k}}});
            built[i].first = truncate(villages[v].graph, k, base);
            built[i].second = betweenness_all(built[i].first);
        });
        for (std::size_t i = 0; i < keys.size(); ++i)
            frozen[keys[i]] = std::move(built[i]);
    }

    result.runs.resize(n_v * n_s * n_r);
    detail::parallel_for(result.runs.size(), [&](std::size_t item) {
        auto v = item / (n_s * n_r);
        auto s = (item / n_r) % n_s;
        auto r = item % n_r;
        auto const& spec = strategies[s];
        auto const& truth = villages[v].graph;
        auto stream = rng::derive_stream(
            {config.master_seed,
             {{rng::Label::Village, village_hash[v]},
              {rng::Label::Strategy, static_cast<std::uint64_t>(spec.strategy)},
              {rng::Label::Variant, variant_code(spec)},
              {rng::Label::Run, r}}});

        Graph const* observed = &truth;
        std::vector<double> const* btw = need_full_btw ? &full_btw[v] : nullptr;
        Graph local;
        std::vector<double> local_btw;
        if (spec.fcd_k) {
            if (config.freeze_truncation) {
                auto const& f = frozen.at({v, *spec.fcd_k});
                observed = &f.first;
                btw = &f.second;
            } else {
                local = truncate(truth, *spec.fcd_k, stream.split(rng::Label::Truncation, 0));
                observed = &local;
                btw = nullptr;
            }
        }

        auto sel = stream.split(rng::Label::Selection, 0);
        VaccinationPlan plan;
        switch (spec.strategy) {
        case Strategy::None:
            plan = select_none(*observed);
            break;
        case Strategy::Random:
            plan = select_random(*observed, config.coverage, sel);
            break;
        case Strategy::Nomination:
            plan = select_nomination(*observed, config.coverage, sel);
            break;
        case Strategy::HighDegree:
            plan = select_high_degree(*observed, config.coverage, *spec.cutoff, sel);
            break;
        case Strategy::HighestDegree:
            plan = select_top_by_degree(*observed, config.coverage, sel, spec.fcd_k);
            break;
        case Strategy::MostCentral:
            if (!btw) {
                local_btw = betweenness_all(*observed);
                btw = &local_btw;
            }
            plan = select_top_by_score(Strategy::MostCentral, *btw, config.coverage, sel,
                                       spec.fcd_k);
            break;
        }

        auto sir = config.sir;
        sir.rng_seed = stream.split(rng::Label::Epidemic, 0).digest();
        auto outcome = run_sir(truth, sir, plan.selected);

        auto& rec = result.runs[item];
        rec.village_id = villages[v].id;
        rec.cell = spec.label();
        rec.strategy = spec.strategy;
        rec.cutoff = spec.cutoff;
        rec.fcd_k = spec.fcd_k;
        rec.run = r;
        rec.incidence = 100.0 * outcome.cumulative_incidence;
        rec.n_vaccinated = plan.selected.size();
        rec.n_ever_infected = outcome.n_ever_infected;
        rec.seed_caused_infections = outcome.seed_caused_infections;
        rec.n_seeds = outcome.n_seeds;
        rec.duration_steps = outcome.duration_steps;
        rec.fallback_selected = plan.fallback_selected;
        rec.failed_nominations = plan.failed_nominations;
    });
    result.summary = summarize(result.runs);

    if (!config.output_dir.empty()) {
        std::filesystem::create_directories(config.output_dir);
        auto runs = open_output(config.output_dir / "runs.csv");
        write_runs_csv(runs, result.runs);
        auto summary = open_output(config.output_dir / "summary.csv");
        write_summary_csv(summary, result.summary);

        json meta;
        meta["kind"] = "campaign";
        meta["master_seed"] = config.master_seed;
        meta["tie_threshold"] = config.tie_threshold;
        meta["coverage"] = config.coverage;
        meta["runs_per_cell"] = config.runs_per_cell;
        meta["freeze_truncation"] = config.freeze_truncation;
        meta["sir"] = sir_to_json(config.sir);
        meta["villages"] = json::array();
        for (auto const& v : villages) {
            meta["villages"].push_back({{"id", v.id},
                                        {"n_nodes", v.graph.n_nodes()},
                                        {"n_edges", v.graph.n_edges()}});
        }
        meta["strategies"] = json::array();
        for (auto const& s : strategies) {
            json js{{"strategy", strategy_name(s.strategy)}, {"label", s.label()}};
            if (s.cutoff)
                js["cutoff"] = *s.cutoff;
            if (s.fcd_k)
                js["fcd_k"] = *s.fcd_k;
            meta["strategies"].push_back(js);
        }
        auto out = open_output(config.output_dir / "metadata.json");
        out << meta.dump(2) << '\n';
    }
    return result;
}

void write_runs_csv(std::ostream& out, std::span<RunRecord const> runs)
{
    out << "village_id,cell,strategy,cutoff,fcd_k,run,incidence,n_vaccinated,n_ever_infected,"
           "n_seeds,seed_caused_infections,duration_steps,fallback_selected,failed_nominations\n";
    for (auto const& r : runs) {
        out << r.village_id << ',' << r.cell << ',' << strategy_name(r.strategy) << ','
            << optional_field(r.cutoff) << ',' << optional_field(r.fcd_k) << ',' << r.run << ','
            << format_double(r.incidence) << ',' << r.n_vaccinated << ',' << r.n_ever_infected
            << ',' << r.n_seeds << ',' << r.seed_caused_infections << ',' << r.duration_steps
            << ',' << r.fallback_selected << ',' << r.failed_nominations << '\n';
    }
}

void write_summary_csv(std::ostream& out, std::span<SummaryRow const> rows)
{
    out << "cell,strategy,cutoff,fcd_k,mean_incidence,ci_low,ci_high,min_village_mean,"
           "max_village_mean,n_villages,ci_flagged\n";
    for (auto const& r : rows) {
        out << r.cell << ',' << strategy_name(r.strategy) << ',' << optional_field(r.cutoff) << ','
            << optional_field(r.fcd_k) << ',' << format_double(r.mean_incidence) << ','
            << format_double(r.ci_low) << ',' << format_double(r.ci_high) << ','
            << format_double(r.min_village_mean) << ',' << format_double(r.max_village_mean)
            << ',' << r.n_villages << ',' << (r.ci_flagged ? 1 : 0) << '\n';
    }
}

//---------------------------------------------------------------------------//
// Village pipeline
//---------------------------------------------------------------------------//

PipelineConfig parse_pipeline_config(std::string_view json_text,
                                     std::filesystem::path const& base_dir)
{
    auto root = parse_json(json_text);
    check_keys(root, "pipeline config",
               {"villages", "tie_threshold", "samples_per_village", "runs_per_sample", "sir",
                "netgen", "convergence", "k_values", "sweep_predictors", "max_subset_size",
                "folds", "master_seed", "output_dir"});
    PipelineConfig c;
    c.villages = parse_village_list(root, base_dir);
    c.tie_threshold = get_or(root, "tie_threshold", c.tie_threshold);
    c.samples_per_village = get_or(root, "samples_per_village", c.samples_per_village);
    c.runs_per_sample = get_or(root, "runs_per_sample", c.runs_per_sample);
    c.sir = parse_sir(root);
    c.max_subset_size = get_or(root, "max_subset_size", c.max_subset_size);
    c.folds = get_or(root, "folds", c.folds);
    c.master_seed = get_or(root, "master_seed", c.master_seed);
    if (auto out = get_or<std::string>(root, "output_dir", ""); !out.empty())
        c.output_dir = resolve(base_dir, out);

    if (auto it = root.find("netgen"); it != root.end()) {
        check_keys(*it, "netgen", {"burn_in", "thinning", "concentration", "proposal"});
        c.burn_in = get_or(*it, "burn_in", c.burn_in);
        c.thinning = get_or(*it, "thinning", c.thinning);
        c.concentration = get_or(*it, "concentration", c.concentration);
        if (it->contains("proposal")) {
            auto name = get_or<std::string>(*it, "proposal", "");
            auto p = proposal_from_name(name);
            if (!p)
                throw Error("config: unknown proposal '" + name + "'");
            c.proposal = *p;
        }
    }
    if (auto it = root.find("convergence"); it != root.end()) {
        check_keys(*it, "convergence", {"mean_degree", "dmm_distance", "window_fraction"});
        c.tolerances.mean_degree = get_or(*it, "mean_degree", c.tolerances.mean_degree);
        c.tolerances.dmm_distance = get_or(*it, "dmm_distance", c.tolerances.dmm_distance);
        c.tolerances.window_fraction = get_or(*it, "window_fraction", c.tolerances.window_fraction);
    }
    if (auto it = root.find("k_values"); it != root.end()) {
        if (!it->is_array())
            throw Error("config: 'k_values' must be a list");
        c.k_values.clear();
        for (auto const& k : *it) {
            if (k.is_string() && k.get<std::string>() == "full")
                c.k_values.push_back(std::nullopt);
            else if (k.is_number_unsigned())
                c.k_values.push_back(k.get<std::size_t>());
            else
                throw Error("config: k_values entries must be non-negative integers or \"full\"");
        }
    }
    if (auto it = root.find("sweep_predictors"); it != root.end()) {
        if (!it->is_array())
            throw Error("config: 'sweep_predictors' must be a list");
        c.sweep_predictors.clear();
        for (auto const& p : *it) {
            auto name = p.is_string() ? p.get<std::string>() : std::string();
            auto ch = characteristic_from_name(name);
            if (!ch)
                throw Error("config: unknown characteristic '" + name + "'");
            c.sweep_predictors.push_back(*ch);
        }
    }
    validate_threshold(c.tie_threshold);
    return c;
}

PipelineConfig load_pipeline_config(std::filesystem::path const& path)
{
    return parse_pipeline_config(read_file(path), path.parent_path());
}

PipelineResult run_village_pipeline(PipelineConfig const& config)
{
    auto villages = load_villages(config.villages, config.tie_threshold);
    return run_village_pipeline(config, villages);
}

PipelineResult run_village_pipeline(PipelineConfig const& config,
                                    std::span<Village const> villages)
{
    if (villages.empty())
        throw PreconditionError("pipeline has no villages");
    if (config.samples_per_village < 1 || config.runs_per_sample < 1)
        throw PreconditionError("samples_per_village and runs_per_sample must be at least 1");
    if (config.sweep_predictors.empty())
        throw PreconditionError("sweep needs at least one predictor");
    validate_sir(config.sir);

    auto n_v = villages.size();
    std::vector<std::uint64_t> village_hash(n_v);
    for (std::size_t v = 0; v < n_v; ++v)
        village_hash[v] = rng::hash_string(villages[v].id);

    PipelineResult result;
    result.villages.resize(n_v);
    std::vector<std::vector<Graph>> samples(n_v);
    detail::parallel_for(n_v, [&](std::size_t v) {
        auto const& g = villages[v].graph;
        auto& rep = result.villages[v];
        rep.id = villages[v].id;
        rep.n_nodes = g.n_nodes();
        McmcParams mp;
        mp.target = degree_mixing_matrix(g);
        mp.n_nodes = g.n_nodes();
        mp.target_mean_degree = degree_stats(g).mean;
        mp.burn_in = config.burn_in;
        mp.thinning = config.thinning;
        mp.concentration = config.concentration;
        mp.proposal = config.proposal;
        mp.rng_seed = rng::derive_stream({config.master_seed,
                                          {{rng::Label::Village, village_hash[v]},
                                           {rng::Label::Chain, 0}}})
                          .digest();
        rep.target_mean_degree = mp.target_mean_degree;
        auto ens = sample_ensemble(mp, config.samples_per_village);
        auto verdict = convergence_check(ens.report, mp.target_mean_degree, config.tolerances);
        rep.included = verdict.passed;
        rep.reasons = verdict.reasons;
        rep.accepted_fraction = ens.report.accepted_fraction;
        rep.final_mean_degree = ens.report.mean_degree_trace.back();
        rep.final_dmm_distance = ens.report.dmm_distance_trace.back();
        if (verdict.passed)
            samples[v] = std::move(ens.samples);
    });

    FcdEnsemble ensemble;
    std::vector<std::uint64_t> sample_village_hash;
    for (std::size_t v = 0; v < n_v; ++v) {
        for (std::size_t j = 0; j < samples[v].size(); ++j) {
            ensemble.graphs.push_back(std::move(samples[v][j]));
            ensemble.network_ids.push_back(villages[v].id + "/" + std::to_string(j));
            ensemble.village_ids.push_back(villages[v].id);
            sample_village_hash.push_back(village_hash[v]);
        }
    }
    auto n_g = ensemble.graphs.size();
    if (n_g == 0)
        throw Error("no village passed the convergence check");

    ensemble.incidences.assign(n_g, std::vector<double>(config.runs_per_sample));
    std::vector<VillageCharacteristics> chars(n_g);
    detail::parallel_for(n_g, [&](std::size_t i) {
        auto sample = i % config.samples_per_village;
        auto base = rng::derive_stream({config.master_seed,
                                        {{rng::Label::Village, sample_village_hash[i]},
                                         {rng::Label::Sample, sample}}});
        for (std::size_t r = 0; r < config.runs_per_sample; ++r) {
            auto sir = config.sir;
            sir.rng_seed = base.split(rng::Label::Epidemic, r).digest();
            ensemble.incidences[i][r] =
                100.0 * run_sir(ensemble.graphs[i], sir, {}).cumulative_incidence;
        }
        chars[i] = village_characteristics(ensemble.graphs[i]);
    });

    std::vector<double> network_means;
    double total = 0;
    for (std::size_t i = 0; i < n_g; ++i) {
        double sum = 0;
        for (auto inc : ensemble.incidences[i]) {
            result.dataset.add(inc, chars[i], ensemble.network_ids[i], ensemble.village_ids[i]);
            sum += inc;
        }
        total += sum;
        network_means.push_back(sum / static_cast<double>(config.runs_per_sample));
    }
    result.mean_incidence = total / static_cast<double>(n_g * config.runs_per_sample);
    if (n_g > 1) {
        double mean = result.mean_incidence, ss = 0;
        for (auto m : network_means)
            ss += (m - mean) * (m - mean);
        result.ci_half_width = 1.96 * std::sqrt(ss / static_cast<double>(n_g - 1))
                               / std::sqrt(static_cast<double>(n_g));
    }

    auto fold_stream = rng::derive_stream({config.master_seed, {{rng::Label::Fold, 0}}});
    // Samples are often all connected; constant columns are left out.
    auto varying = varying_characteristics(result.dataset);
    for (auto c : all_characteristics) {
        if (std::find(varying.begin(), varying.end(), c) == varying.end())
            result.constant_characteristics.push_back(c);
    }
    result.subsets = subset_search(standardize(result.dataset, varying),
                                   std::min(config.max_subset_size, varying.size()), config.folds,
                                   fold_stream, varying);
    result.sweep = fcd_prediction_sweep(ensemble, config.k_values, config.sweep_predictors,
                                        config.folds, fold_stream);

    if (!config.output_dir.empty()) {
        std::filesystem::create_directories(config.output_dir);
        auto ds = open_output(config.output_dir / "dataset.csv");
        write_regression_csv(ds, result.dataset);
        auto st = open_output(config.output_dir / "subsets.csv");
        write_subset_table(st, result.subsets);
        auto sw = open_output(config.output_dir / "fcd_sweep.csv");
        write_fcd_sweep_table(sw, result.sweep);
        auto vc = open_output(config.output_dir / "villages.csv");
        vc << "village_id,n_nodes,target_mean_degree,included,accepted_fraction,"
              "final_mean_degree,final_dmm_distance,reasons\n";
        for (auto const& r : result.villages) {
            std::string reasons;
            for (auto const& why : r.reasons)
                reasons += (reasons.empty() ? "" : "; ") + why;
            vc << r.id << ',' << r.n_nodes << ',' << format_double(r.target_mean_degree) << ','
               << (r.included ? 1 : 0) << ',' << format_double(r.accepted_fraction) << ','
               << format_double(r.final_mean_degree) << ',' << format_double(r.final_dmm_distance)
               << ",\"" << reasons << "\"\n";
        }

        json meta;
        meta["kind"] = "village-pipeline";
        meta["master_seed"] = config.master_seed;
        meta["tie_threshold"] = config.tie_threshold;
        meta["samples_per_village"] = config.samples_per_village;
        meta["runs_per_sample"] = config.runs_per_sample;
        meta["sir"] = sir_to_json(config.sir);
        meta["netgen"] = {{"burn_in", config.burn_in},
                          {"thinning", config.thinning},
                          {"concentration", config.concentration},
                          {"proposal", proposal_name(config.proposal)}};
        meta["convergence"] = {{"mean_degree", config.tolerances.mean_degree},
                               {"dmm_distance", config.tolerances.dmm_distance},
                               {"window_fraction", config.tolerances.window_fraction}};
        meta["folds"] = config.folds;
        meta["max_subset_size"] = config.max_subset_size;
        meta["excluded_rows"] = result.dataset.excluded_rows;
        meta["constant_characteristics"] = json::array();
        for (auto c : result.constant_characteristics)
            meta["constant_characteristics"].push_back(characteristic_name(c));
        meta["mean_incidence"] = result.mean_incidence;
        meta["ci_half_width"] = result.ci_half_width;
        auto out = open_output(config.output_dir / "metadata.json");
        out << meta.dump(2) << '\n';
    }
    return result;
}

} // namespace vaxnet
