// svnet — statistically validated trade-timing networks.
//
// Subcommands:
//   generate  synthetic transaction data with planted ground truth
//   infer     state encoding -> link validation -> networks -> clusters
//   analyze   persistence, cross-security, mature overlap, expression
//   report    plot-ready FDR curves from stored validation reports

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "svnet/common.hpp"
#include "svnet/pipeline.hpp"
#include "svnet/synthetic.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;

struct CommonFlags {
    std::string config_path;
    std::optional<double> theta;
    std::optional<int> min_days;
    std::optional<double> alpha;
    std::optional<std::string> fdr_mode;
    std::optional<std::string> universe;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::optional<std::string> out;
    std::optional<std::string> transactions;
    std::optional<std::string> attributes;
    std::optional<std::string> calendar;
    std::optional<std::string> analysis_end;
    std::vector<std::string> mature;
    std::optional<bool> export_states;
    std::optional<int> min_display;
};

void add_pipeline_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file; flags override its values");
    cmd->add_option("--transactions", f.transactions, "transactions CSV");
    cmd->add_option("--attributes", f.attributes, "investor attributes CSV");
    cmd->add_option("--calendar", f.calendar, "security calendar CSV");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--theta", f.theta, "state threshold in (0,1)");
    cmd->add_option("--min-days", f.min_days, "minimum active days per investor");
    cmd->add_option("--alpha", f.alpha, "FDR level");
    cmd->add_option("--fdr-mode", f.fdr_mode, "step_up or literal");
    cmd->add_option("--universe", f.universe, "intersection or full_window");
    cmd->add_option("--trials", f.trials, "community detection restarts");
    cmd->add_option("--seed", f.seed, "root random seed");
    cmd->add_option("--jobs", f.jobs, "worker pool size");
    cmd->add_option("--analysis-end", f.analysis_end,
                    "last date of the analysis period; windows past it are discarded");
    cmd->add_option("--mature", f.mature, "mature benchmark security ids (analyze)");
    cmd->add_option("--export-states", f.export_states, "write state matrix CSVs");
    cmd->add_option("--min-display", f.min_display,
                    "clusters below this size are marked greyed in partition exports");
}

svn::PipelineConfig resolve_config(const CommonFlags& f) {
    svn::PipelineConfig cfg;
    if (!f.config_path.empty()) cfg = svn::load_pipeline_config(f.config_path);
    if (f.transactions) cfg.transactions_path = *f.transactions;
    if (f.attributes) cfg.attributes_path = *f.attributes;
    if (f.calendar) cfg.calendar_path = *f.calendar;
    if (f.out) cfg.output_dir = *f.out;
    if (f.theta) cfg.theta = *f.theta;
    if (f.min_days) cfg.min_active_days = *f.min_days;
    if (f.alpha) cfg.alpha = *f.alpha;
    if (f.fdr_mode) cfg.fdr_mode = svn::parse_fdr_mode(*f.fdr_mode);
    if (f.universe) cfg.universe = svn::parse_universe_mode(*f.universe);
    if (f.trials) cfg.trials = *f.trials;
    if (f.seed) cfg.seed = *f.seed;
    if (f.jobs) cfg.jobs = *f.jobs;
    if (f.export_states) cfg.export_states = *f.export_states;
    if (f.min_display) cfg.min_display_size = *f.min_display;
    if (!f.mature.empty()) cfg.mature_ids = f.mature;
    if (f.analysis_end) {
        auto d = svn::Date::parse(*f.analysis_end);
        if (!d) throw svn::ConfigError("bad --analysis-end date '" + *f.analysis_end + "'");
        cfg.analysis_end = *d;
    }
    return cfg;
}

int run_generate(const std::string& scenario_path, const std::string& out_dir) {
    std::ifstream in(scenario_path);
    if (!in) throw svn::ConfigError("cannot open scenario file " + scenario_path);
    const svn::ScenarioConfig scenario = svn::parse_scenario(in);
    const svn::SyntheticData data = svn::generate(scenario);

    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    auto open = [&](const char* name) {
        std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
        if (!out) throw svn::DataError(std::string("cannot write ") + name);
        return out;
    };
    {
        auto out = open("transactions.csv");
        svn::write_transactions_csv(data.transactions, out);
    }
    {
        auto out = open("attributes.csv");
        svn::write_attributes_csv(data.attributes, out);
    }
    {
        auto out = open("calendar.csv");
        svn::write_calendar_csv(data.calendar, out);
    }
    {
        auto out = open("ground_truth.json");
        svn::write_ground_truth_json(data.truth, out);
    }
    std::cout << "generated " << data.transactions.size() << " transactions for "
              << data.calendar.size() << " securities into " << out_dir << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"statistically validated trade-timing networks"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string generate_out = ".";
    CLI::App* generate = app.add_subcommand("generate", "synthesize a dataset with ground truth");
    generate->add_option("scenario", scenario_path, "scenario JSON")->required();
    generate->add_option("--out", generate_out, "output directory");

    CommonFlags infer_flags;
    CLI::App* infer = app.add_subcommand("infer", "infer validated networks and clusters");
    add_pipeline_flags(infer, infer_flags);

    CommonFlags analyze_flags;
    CLI::App* analyze = app.add_subcommand("analyze", "persistence, overlap and expression analysis");
    add_pipeline_flags(analyze, analyze_flags);

    CommonFlags report_flags;
    CLI::App* report = app.add_subcommand("report", "emit plot-ready FDR curves");
    add_pipeline_flags(report, report_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (generate->parsed()) return run_generate(scenario_path, generate_out);
        if (infer->parsed()) {
            const svn::PipelineConfig cfg = resolve_config(infer_flags);
            const svn::InferSummary summary = svn::run_infer(cfg);
            std::cout << "inferred networks for " << summary.securities.size()
                      << " securities";
            if (!summary.skipped.empty())
                std::cout << " (" << summary.skipped.size() << " skipped)";
            std::cout << " -> " << cfg.output_dir << "\n";
            for (const auto& [id, reason] : summary.skipped)
                std::cerr << "skipped " << id << ": " << reason << "\n";
            return kExitOk;
        }
        if (analyze->parsed()) {
            const svn::PipelineConfig cfg = resolve_config(analyze_flags);
            svn::run_analyze(cfg);
            std::cout << "analysis written to " << cfg.output_dir << "\n";
            return kExitOk;
        }
        if (report->parsed()) {
            const svn::PipelineConfig cfg = resolve_config(report_flags);
            svn::run_report(cfg);
            std::cout << "FDR curves written to " << cfg.output_dir << "\n";
            return kExitOk;
        }
    } catch (const svn::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const svn::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitConfig;
}
