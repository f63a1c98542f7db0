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
// vaxnet command-line interface.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "vaxnet/error.hpp"
#include "vaxnet/experiment.hpp"
#include "vaxnet/fcd.hpp"
#include "vaxnet/graph.hpp"
#include "vaxnet/metrics.hpp"
#include "vaxnet/netgen.hpp"
#include "vaxnet/regress.hpp"
#include "vaxnet/rng.hpp"
#include "vaxnet/sir.hpp"
#include "vaxnet/vaccinate.hpp"

namespace fs = std::filesystem;
using namespace vaxnet;

namespace
{

std::string fmt(double v)
{
    std::ostringstream ss;
    ss.precision(std::numeric_limits<double>::max_digits10);
    ss << v;
    return ss.str();
}

// Writes to the named file, or stdout when the name is empty or "-".
template<class Fn>
void with_output(std::string const& path, Fn&& fn)
{
    if (path.empty() || path == "-") {
        fn(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path);
    fn(out);
}

std::vector<NodeIndex> read_node_list(Graph const& g, std::string const& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path);
    std::vector<NodeIndex> out;
    std::string id;
    std::size_t line = 0;
    while (std::getline(in, id)) {
        ++line;
        while (!id.empty() && (id.back() == '\r' || id.back() == ' ' || id.back() == '\t'))
            id.pop_back();
        if (id.empty() || id.front() == '#')
            continue;
        auto idx = g.index_of(id);
        if (!idx)
            throw ParseError(line, "node '" + id + "' is not in the graph");
        out.push_back(*idx);
    }
    return out;
}

//---------------------------------------------------------------------------//

void run_metrics(std::vector<std::string> const& files, int threshold, std::string const& out)
{
    with_output(out, [&](std::ostream& os) {
        os << "village_id,network_members,mean_degree,median_degree,sd_degree,density,"
              "assortativity,mean_betweenness,lcc_percentage\n";
        for (auto const& f : files) {
            auto g = load_graph(f, threshold);
            auto c = village_characteristics(g);
            os << village_id_from_path(f) << ',' << c.n_nodes << ',' << fmt(c.mean_degree) << ','
               << fmt(c.median_degree) << ',' << fmt(c.sd_degree) << ',' << fmt(c.density) << ','
               << (c.assortativity ? fmt(*c.assortativity) : "NA") << ','
               << fmt(c.mean_betweenness) << ',' << fmt(100.0 * c.lcc_fraction) << '\n';
        }
    });
}

struct SimulateArgs {
    std::string file;
    int threshold = 1;
    SirParams sir;
    std::size_t runs = 1;
    std::uint64_t seed = 0;
    std::string vaccinated;
    std::string out;
};

void run_simulate(SimulateArgs const& a)
{
    auto g = load_graph(a.file, a.threshold);
    std::vector<NodeIndex> vacc;
    if (!a.vaccinated.empty())
        vacc = read_node_list(g, a.vaccinated);
    auto id = village_id_from_path(a.file);
    with_output(a.out, [&](std::ostream& os) {
        os << "village_id,run,cumulative_incidence,n_seeds,seed_caused_infections,duration_steps\n";
        for (std::size_t r = 0; r < a.runs; ++r) {
            auto p = a.sir;
            p.rng_seed = rng::derive_stream({a.seed, {{rng::Label::Run, r}}}).digest();
            auto o = run_sir(g, p, vacc);
            os << id << ',' << r << ',' << fmt(o.cumulative_incidence) << ',' << o.n_seeds << ','
               << o.seed_caused_infections << ',' << o.duration_steps << '\n';
        }
    });
}

struct VaccinateArgs {
    std::string file;
    int threshold = 1;
    std::string strategy = "random";
    double coverage = 0.1;
    std::optional<int> cutoff;
    std::optional<std::size_t> fcd_k;
    std::uint64_t seed = 0;
    std::string out;
};

void run_vaccinate(VaccinateArgs const& a)
{
    auto strategy = strategy_from_name(a.strategy);
    if (!strategy)
        throw Error("unknown strategy '" + a.strategy + "'");
    auto truth = load_graph(a.file, a.threshold);
    auto stream = rng::derive_stream({a.seed, {}});
    Graph observed = a.fcd_k ? truncate(truth, *a.fcd_k, stream.split(rng::Label::Truncation, 0))
                             : truth;
    auto sel = stream.split(rng::Label::Selection, 0);
    VaccinationPlan plan;
    switch (*strategy) {
    case Strategy::None: plan = select_none(observed); break;
    case Strategy::Random: plan = select_random(observed, a.coverage, sel); break;
    case Strategy::Nomination: plan = select_nomination(observed, a.coverage, sel); break;
    case Strategy::HighDegree:
        if (!a.cutoff)
            throw Error("high-degree needs --cutoff");
        plan = select_high_degree(observed, a.coverage, *a.cutoff, sel);
        break;
    case Strategy::HighestDegree:
        plan = select_top_by_degree(observed, a.coverage, sel, a.fcd_k);
        break;
    case Strategy::MostCentral:
        plan = select_top_by_betweenness(observed, a.coverage, sel, a.fcd_k);
        break;
    }
    with_output(a.out, [&](std::ostream& os) {
        os << "# strategy=" << strategy_name(plan.strategy) << " target_coverage="
           << plan.target_coverage << " achieved_coverage=" << plan.achieved_coverage
           << " quota=" << plan.quota << " interviews=" << plan.interviews_conducted;
        if (plan.cutoff)
            os << " cutoff=" << *plan.cutoff;
        if (plan.observation_k)
            os << " fcd_k=" << *plan.observation_k;
        os << " fallback_selected=" << plan.fallback_selected
           << " failed_nominations=" << plan.failed_nominations << '\n';
        os << "order,node_id\n";
        for (std::size_t i = 0; i < plan.selected.size(); ++i)
            os << i << ',' << truth.node_id(plan.selected[i]) << '\n';
    });
}

struct NetgenArgs {
    std::string target;
    int threshold = 1;
    std::size_t n_samples = 10;
    McmcParams params;
    std::string proposal = "mixed";
    std::string out_dir = "netgen_out";
};

int run_netgen(NetgenArgs a)
{
    auto p = proposal_from_name(a.proposal);
    if (!p)
        throw Error("unknown proposal '" + a.proposal + "'");
    auto g = load_graph(a.target, a.threshold);
    a.params.proposal = *p;
    a.params.target = degree_mixing_matrix(g);
    a.params.n_nodes = g.n_nodes();
    a.params.target_mean_degree = degree_stats(g).mean;
    auto ens = sample_ensemble(a.params, a.n_samples);

    fs::create_directories(a.out_dir);
    auto width = std::to_string(std::max<std::size_t>(a.n_samples, 1) - 1).size();
    auto stem = village_id_from_path(a.target);
    for (std::size_t i = 0; i < ens.samples.size(); ++i) {
        std::ostringstream name;
        name << stem << '_' << std::setw(static_cast<int>(width)) << std::setfill('0') << i
             << ".txt";
        write_edge_list(ens.samples[i], fs::path(a.out_dir) / name.str());
    }
    std::ofstream conv(fs::path(a.out_dir) / "convergence.csv");
    conv << "step,mean_degree,dmm_distance,accepted\n";
    auto const& r = ens.report;
    for (std::size_t i = 0; i < r.step_trace.size(); ++i) {
        conv << r.step_trace[i] << ',' << fmt(r.mean_degree_trace[i]) << ','
             << fmt(r.dmm_distance_trace[i]) << ',' << fmt(r.accepted_trace[i]) << '\n';
    }
    auto verdict = convergence_check(r, a.params.target_mean_degree);
    std::cout << "samples: " << ens.samples.size() << "\naccepted fraction: "
              << r.accepted_fraction << "\nconvergence: " << (verdict.passed ? "passed" : "failed")
              << '\n';
    for (auto const& why : verdict.reasons)
        std::cout << "  " << why << '\n';
    return 0;
}

int run_regress(std::string const& file, std::size_t max_subset, std::size_t folds,
                std::uint64_t seed, std::string const& out)
{
    std::ifstream in(file);
    if (!in)
        throw Error("cannot open " + file);
    auto data = read_regression_csv(in);
    if (data.excluded_rows)
        std::cerr << "excluded " << data.excluded_rows << " rows with missing values\n";
    auto varying = varying_characteristics(data);
    for (auto c : all_characteristics) {
        if (std::find(varying.begin(), varying.end(), c) == varying.end())
            std::cerr << "dropping constant column " << characteristic_name(c) << '\n';
    }
    auto fits = subset_search(standardize(data, varying), std::min(max_subset, varying.size()),
                              folds, rng::derive_stream({seed, {{rng::Label::Fold, 0}}}), varying);
    with_output(out, [&](std::ostream& os) { write_subset_table(os, fits); });
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Network vaccination strategy simulator"};
    app.require_subcommand(1);

    std::vector<std::string> metric_files;
    int threshold = 1;
    std::string out;
    auto* metrics = app.add_subcommand("metrics", "Village network characteristics as CSV");
    metrics->add_option("files", metric_files, "Edge-list files")->required()->check(CLI::ExistingFile);
    metrics->add_option("--threshold", threshold, "Minimum multiplexity for a tie")->check(CLI::Range(1, 12));
    metrics->add_option("-o,--output", out, "Output file (default stdout)");

    std::string trunc_in;
    std::size_t trunc_k = 0;
    std::uint64_t trunc_seed = 0;
    auto* trunc = app.add_subcommand("truncate", "Simulate a fixed-choice survey");
    trunc->add_option("file", trunc_in, "Edge-list file")->required()->check(CLI::ExistingFile);
    trunc->add_option("--k", trunc_k, "Maximum nominations per respondent")->required();
    trunc->add_option("--seed", trunc_seed, "Random seed");
    trunc->add_option("--threshold", threshold, "Minimum multiplexity for a tie")->check(CLI::Range(1, 12));
    trunc->add_option("-o,--output", out, "Output edge list (default stdout)");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Run SIR epidemics on one network");
    simulate->add_option("file", sim.file, "Edge-list file")->required()->check(CLI::ExistingFile);
    simulate->add_option("--threshold", sim.threshold, "Minimum multiplexity for a tie")->check(CLI::Range(1, 12));
    simulate->add_option("--beta", sim.sir.beta, "Transmission probability")->check(CLI::Range(0.0, 1.0));
    simulate->add_option("--gamma", sim.sir.gamma, "Recovery probability")->check(CLI::Range(0.0, 1.0));
    simulate->add_option("--seed-fraction", sim.sir.seed_fraction, "Fraction initially infected");
    simulate->add_option("--runs", sim.runs, "Number of epidemics");
    simulate->add_option("--seed", sim.seed, "Random seed");
    simulate->add_option("--vaccinated", sim.vaccinated, "File of vaccinated node ids, one per line");
    simulate->add_option("-o,--output", sim.out, "Output CSV (default stdout)");

    VaccinateArgs vac;
    auto* vaccinate = app.add_subcommand("vaccinate", "Select nodes to vaccinate");
    vaccinate->add_option("file", vac.file, "Edge-list file")->required()->check(CLI::ExistingFile);
    vaccinate->add_option("--threshold", vac.threshold, "Minimum multiplexity for a tie")->check(CLI::Range(1, 12));
    vaccinate->add_option("--strategy", vac.strategy,
                          "none, random, nomination, high-degree, top-degree or top-betweenness");
    vaccinate->add_option("--coverage", vac.coverage, "Fraction of nodes to vaccinate");
    vaccinate->add_option("--cutoff", vac.cutoff, "Degree cutoff for high-degree");
    vaccinate->add_option("--fcd-k", vac.fcd_k, "Observe through a fixed-choice survey of size k");
    vaccinate->add_option("--seed", vac.seed, "Random seed");
    vaccinate->add_option("-o,--output", vac.out, "Output CSV (default stdout)");

    NetgenArgs ng;
    auto* netgen = app.add_subcommand("netgen", "Sample networks matching a degree mixing matrix");
    netgen->add_option("--target", ng.target, "Reference edge list")->required()->check(CLI::ExistingFile);
    netgen->add_option("--threshold", ng.threshold, "Minimum multiplexity for a tie")->check(CLI::Range(1, 12));
    netgen->add_option("--n-samples", ng.n_samples, "Samples to keep");
    netgen->add_option("--burn-in", ng.params.burn_in, "Steps before the first sample");
    netgen->add_option("--thinning", ng.params.thinning, "Steps between samples")->check(CLI::PositiveNumber);
    netgen->add_option("--concentration", ng.params.concentration, "Weight on the DMM distance")->check(CLI::PositiveNumber);
    netgen->add_option("--proposal", ng.proposal, "uniform-toggle, tie-no-tie, tie-no-tie-swap or mixed");
    netgen->add_option("--seed", ng.params.rng_seed, "Random seed");
    netgen->add_option("--out-dir", ng.out_dir, "Directory for samples and convergence.csv");

    std::string reg_file;
    std::size_t max_subset = 3, folds = 10;
    std::uint64_t reg_seed = 0;
    auto* regress = app.add_subcommand("regress", "Predictor subset search on a dataset CSV");
    regress->add_option("file", reg_file, "Dataset CSV")->required()->check(CLI::ExistingFile);
    regress->add_option("--max-subset", max_subset, "Largest predictor subset")->check(CLI::Range(0, 7));
    regress->add_option("--folds", folds, "Cross-validation folds");
    regress->add_option("--seed", reg_seed, "Fold assignment seed");
    regress->add_option("-o,--output", out, "Output CSV (default stdout)");

    std::string config;
    auto* campaign = app.add_subcommand("campaign", "Compare vaccination strategies across villages");
    campaign->add_option("--config", config, "JSON config file")->required()->check(CLI::ExistingFile);
    auto* pipeline = app.add_subcommand("village-pipeline", "Village-level prediction pipeline");
    pipeline->add_option("--config", config, "JSON config file")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (metrics->parsed()) {
            run_metrics(metric_files, threshold, out);
        } else if (trunc->parsed()) {
            auto g = load_graph(trunc_in, threshold);
            auto t = truncate(g, TruncationParams{trunc_k, trunc_seed});
            with_output(out, [&](std::ostream& os) { write_edge_list(t, os); });
        } else if (simulate->parsed()) {
            run_simulate(sim);
        } else if (vaccinate->parsed()) {
            run_vaccinate(vac);
        } else if (netgen->parsed()) {
            return run_netgen(ng);
        } else if (regress->parsed()) {
            return run_regress(reg_file, max_subset, folds, reg_seed, out);
        } else if (campaign->parsed()) {
            auto cfg = load_campaign_config(config);
            auto result = run_campaign(cfg);
            if (cfg.output_dir.empty())
                write_summary_csv(std::cout, result.summary);
            else
                std::cout << "wrote " << result.runs.size() << " runs to " << cfg.output_dir.string() << '\n';
        } else if (pipeline->parsed()) {
            auto cfg = load_pipeline_config(config);
            auto result = run_village_pipeline(cfg);
            for (auto const& v : result.villages) {
                if (!v.included) {
                    std::cerr << "excluded village " << v.id << ':';
                    for (auto const& why : v.reasons)
                        std::cerr << ' ' << why << ';';
                    std::cerr << '\n';
                }
            }
            std::cout << "mean incidence " << result.mean_incidence << "% (+/- "
                      << result.ci_half_width << ")\n";
            write_subset_table(std::cout, std::span<ModelFit const>(result.subsets).first(
                                              std::min<std::size_t>(5, result.subsets.size())));
        }
    } catch (std::exception const& e) {
        std::cerr << "vaxnet: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
