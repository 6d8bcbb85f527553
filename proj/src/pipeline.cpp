#include "svnet/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "svnet/attribute_expression.hpp"
#include "svnet/cluster_similarity.hpp"
#include "svnet/common.hpp"
#include "svnet/community.hpp"
#include "svnet/csv.hpp"
#include "svnet/ingest.hpp"
#include "svnet/network.hpp"
#include "svnet/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace svn {
namespace {

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::string sanitize(const std::string& id) {
    std::string out = id;
    for (char& c : out)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') c = '_';
    return out;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open output file " + path.string());
    return out;
}

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open input file " + path.string());
    return in;
}

ordered_json window_summary_json(const WindowSummary& w) {
    ordered_json j;
    j["window"] = w.window_label;
    j["investors"] = w.investors;
    j["active"] = w.active;
    j["trading_days"] = w.trading_days;
    j["observed"] = w.observed;
    j["validated"] = w.validated;
    j["nodes"] = w.nodes;
    j["edges"] = w.edges;
    j["clusters"] = w.clusters;
    if (w.nodes > 0)
        j["codelength"] = w.codelength;
    else
        j["codelength"] = nullptr;
    return j;
}

// Per-security-window artifacts produced by one infer task.
struct SecurityOutcome {
    SecuritySummary summary;
    bool skipped = false;
    std::string skip_reason;
};

void write_report_json(const ValidationReport& report, const fs::path& path) {
    ordered_json j;
    j["security_id"] = report.security_id;
    j["window"] = report.window_label;
    j["observed"] = report.observed;
    j["validated"] = report.validated;
    j["alpha"] = report.alpha;
    j["threshold_slope"] = report.threshold_slope;
    j["sorted_pvalues"] = report.sorted_pvalues;
    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

void write_partition_files(const ValidatedNetwork& net, const Partition* partition,
                           int min_display_size, const fs::path& csv_path,
                           const fs::path& json_path) {
    {
        auto out = open_output(csv_path);
        out << "investor_id,cluster_id\n";
        if (partition) {
            for (std::uint32_t v = 0; v < net.nodes.size(); ++v)
                out << net.nodes[v] << ',' << partition->module_of[v] << '\n';
        }
    }
    ordered_json j;
    j["security_id"] = net.security_id;
    j["window"] = net.window_label;
    if (partition) {
        j["codelength"] = partition->codelength;
        std::vector<std::size_t> sizes(partition->module_count, 0);
        for (std::uint32_t m : partition->module_of) sizes[m]++;
        j["cluster_sizes"] = sizes;
        // display-only flag: clusters this small are greyed in figures but
        // stay in every downstream statistic
        std::vector<std::size_t> small;
        for (std::size_t c = 0; c < sizes.size(); ++c)
            if (sizes[c] < static_cast<std::size_t>(min_display_size)) small.push_back(c);
        j["display"] = ordered_json{{"min_size", min_display_size},
                                    {"greyed_clusters", small}};
    } else {
        j["codelength"] = nullptr;
        j["cluster_sizes"] = std::vector<std::size_t>{};
        j["display"] = ordered_json{{"min_size", min_display_size},
                                    {"greyed_clusters", std::vector<std::size_t>{}}};
    }
    auto out = open_output(json_path);
    out << j.dump(2) << '\n';
}

struct WindowArtifacts {
    StateMatrix matrix;
    ValidationOutcome validation;
    ValidatedNetwork network;
    std::optional<Partition> partition;
};

// Shared by run_infer and the mature-alignment pass of run_analyze.
WindowArtifacts process_window(const StateMatrix& filtered, const PipelineConfig& cfg,
                               std::uint64_t detector_seed) {
    WindowArtifacts art;
    art.matrix = filtered;
    art.validation = validate_security_window(filtered, {cfg.alpha, cfg.fdr_mode}, cfg.universe);
    art.network = assemble(art.validation.links, filtered.security_id,
                           filtered.window.label());
    if (!art.network.empty()) {
        DetectorConfig det;
        det.trials = cfg.trials;
        det.seed = detector_seed;
        art.partition = detect(art.network, det);
    }
    return art;
}

std::map<std::string, std::vector<DailyNetVolume>> group_by_security(
    std::vector<DailyNetVolume> daily) {
    std::map<std::string, std::vector<DailyNetVolume>> by_security;
    for (auto& rec : daily) by_security[rec.security_id].push_back(std::move(rec));
    return by_security;
}

std::size_t count_active(const StateMatrix& m, int min_days) {
    std::size_t n = 0;
    for (const auto& row : m.rows) n += row.activity_days() >= min_days;
    return n;
}

}  // namespace

void PipelineConfig::validate() const {
    if (transactions_path.empty()) throw ConfigError("transactions path is required");
    if (calendar_path.empty()) throw ConfigError("calendar path is required");
    if (output_dir.empty()) throw ConfigError("output directory is required");
    EncoderConfig{theta, min_active_days}.validate();
    FdrConfig{alpha, fdr_mode}.validate();
    DetectorConfig det;
    det.trials = trials;
    det.validate();
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    if (min_display_size < 1) throw ConfigError("min_display_size must be >= 1");
}

PipelineConfig load_pipeline_config(const std::string& path) {
    auto in = open_input(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + path + ": bad JSON: " + e.what());
    }
    PipelineConfig cfg;
    try {
        cfg.transactions_path = j.value("transactions", "");
        cfg.attributes_path = j.value("attributes", "");
        cfg.calendar_path = j.value("calendar", "");
        cfg.output_dir = j.value("out", "");
        cfg.theta = j.value("theta", cfg.theta);
        cfg.min_active_days = j.value("min_days", cfg.min_active_days);
        cfg.alpha = j.value("alpha", cfg.alpha);
        if (j.contains("fdr_mode")) cfg.fdr_mode = parse_fdr_mode(j.at("fdr_mode").get<std::string>());
        if (j.contains("universe")) cfg.universe = parse_universe_mode(j.at("universe").get<std::string>());
        cfg.trials = j.value("trials", cfg.trials);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.jobs = j.value("jobs", cfg.jobs);
        cfg.exclude_nominee = j.value("exclude_nominee", cfg.exclude_nominee);
        cfg.export_states = j.value("export_states", cfg.export_states);
        cfg.min_display_size = j.value("min_display_size", cfg.min_display_size);
        if (j.contains("analysis_end")) {
            auto d = Date::parse(j.at("analysis_end").get<std::string>());
            if (!d) throw ConfigError("config: bad analysis_end date");
            cfg.analysis_end = *d;
        }
        if (j.contains("mature")) cfg.mature_ids = j.at("mature").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
    return cfg;
}

InferSummary run_infer(const PipelineConfig& cfg) {
    cfg.validate();
    fs::create_directories(cfg.output_dir);
    const fs::path out_dir(cfg.output_dir);

    auto txn_in = open_input(cfg.transactions_path);
    std::vector<Transaction> txns = parse_transactions(txn_in);
    txns = filter_universe(std::move(txns), cfg.exclude_nominee);
    const auto by_security = group_by_security(aggregate_daily(txns));

    auto cal_in = open_input(cfg.calendar_path);
    std::vector<CalendarEntry> calendar = parse_calendar(cal_in);
    std::sort(calendar.begin(), calendar.end(),
              [](const CalendarEntry& a, const CalendarEntry& b) {
                  return a.security_id < b.security_id;
              });
    for (std::size_t i = 1; i < calendar.size(); ++i)
        if (calendar[i].security_id == calendar[i - 1].security_id)
            throw DataError("calendar lists security '" + calendar[i].security_id +
                            "' more than once");

    const Rng root(cfg.seed);
    const EncoderConfig enc{cfg.theta, cfg.min_active_days};
    std::vector<SecurityOutcome> outcomes(calendar.size());

    parallel_for(calendar.size(), cfg.jobs, [&](std::size_t i) {
        const CalendarEntry& entry = calendar[i];
        SecurityOutcome& outcome = outcomes[i];
        outcome.summary.security_id = entry.security_id;
        outcome.summary.ipo_date = entry.ipo_date;

        std::pair<Window, Window> windows;
        try {
            windows = build_windows(entry.ipo_date, cfg.analysis_end);
        } catch (const DataError& e) {
            outcome.skipped = true;
            outcome.skip_reason = e.what();
            return;
        }

        auto found = by_security.find(entry.security_id);
        const std::vector<DailyNetVolume> empty;
        const std::vector<DailyNetVolume>& daily =
            found == by_security.end() ? empty : found->second;

        const SecurityCalendar sec_cal =
            build_security_calendar(daily, entry.security_id, entry.ipo_date);
        StateMatrix m1 = encode(daily, enc, windows.first, sec_cal);
        StateMatrix m2 = encode(daily, enc, windows.second, sec_cal);

        const std::size_t investors_y1 = m1.rows.size();
        const std::size_t investors_y2 = m2.rows.size();
        const std::size_t active_y1 = count_active(m1, cfg.min_active_days);
        const std::size_t active_y2 = count_active(m2, cfg.min_active_days);
        std::size_t active_both = 0;
        for (const auto& row : m1.rows) {
            if (row.activity_days() < cfg.min_active_days) continue;
            const StateMatrix::Row* other = m2.find(row.investor_id);
            if (other && other->activity_days() >= cfg.min_active_days) ++active_both;
        }
        outcome.summary.active_both = active_both;

        auto [f1, f2] = filter_active(m1, m2, cfg.min_active_days);
        const std::string tag = sanitize(entry.security_id);
        const StateMatrix* matrices[2] = {&f1, &f2};
        const std::size_t raw_investors[2] = {investors_y1, investors_y2};
        const std::size_t raw_active[2] = {active_y1, active_y2};

        for (int w = 0; w < 2; ++w) {
            const StateMatrix& filtered = *matrices[w];
            const std::string win = filtered.window.label();
            if (cfg.export_states) {
                auto out = open_output(out_dir / ("states_" + tag + "_" + win + ".csv"));
                write_state_matrix_csv(filtered, out);
            }

            Rng seed_rng = root.fork(0x10000 + i * 2 + static_cast<std::size_t>(w));
            WindowArtifacts art = process_window(filtered, cfg, seed_rng.next());

            {
                auto out = open_output(out_dir / ("links_" + tag + "_" + win + ".csv"));
                write_links_csv(art.validation.links, entry.security_id, win, out);
            }
            write_report_json(art.validation.report,
                              out_dir / ("report_" + tag + "_" + win + ".json"));
            {
                auto out = open_output(out_dir / ("network_" + tag + "_" + win + ".edges"));
                write_edge_list(art.network, out);
            }
            {
                const NetworkStats stats = network_stats(art.network);
                ordered_json j;
                j["security_id"] = entry.security_id;
                j["window"] = win;
                j["nodes"] = stats.node_count;
                j["edges"] = stats.edge_count;
                j["weight_histogram"] = stats.weight_histogram;
                j["component_sizes"] = stats.component_sizes;
                auto out = open_output(out_dir / ("network_" + tag + "_" + win + ".json"));
                out << j.dump(2) << '\n';
            }
            write_partition_files(art.network, art.partition ? &*art.partition : nullptr,
                                  cfg.min_display_size,
                                  out_dir / ("partition_" + tag + "_" + win + ".csv"),
                                  out_dir / ("partition_" + tag + "_" + win + ".json"));

            WindowSummary ws;
            ws.window_label = win;
            ws.investors = raw_investors[w];
            ws.active = raw_active[w];
            ws.trading_days = filtered.trading_days.size();
            ws.observed = art.validation.report.observed;
            ws.validated = art.validation.report.validated;
            ws.nodes = art.network.nodes.size();
            ws.edges = art.network.edges.size();
            ws.clusters = art.partition ? art.partition->module_count : 0;
            ws.codelength = art.partition ? art.partition->codelength : 0.0;
            outcome.summary.windows.push_back(std::move(ws));
        }
    });

    InferSummary summary;
    for (const SecurityOutcome& outcome : outcomes) {
        if (outcome.skipped)
            summary.skipped.emplace_back(outcome.summary.security_id, outcome.skip_reason);
        else
            summary.securities.push_back(outcome.summary);
    }

    ordered_json j;
    j["theta"] = cfg.theta;
    j["min_active_days"] = cfg.min_active_days;
    j["alpha"] = cfg.alpha;
    j["fdr_mode"] = to_string(cfg.fdr_mode);
    j["universe"] = to_string(cfg.universe);
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["securities"] = ordered_json::array();
    for (const SecuritySummary& s : summary.securities) {
        ordered_json js;
        js["security_id"] = s.security_id;
        js["ipo_date"] = s.ipo_date.iso();
        js["active_both"] = s.active_both;
        js["windows"] = ordered_json::array();
        for (const WindowSummary& w : s.windows) js["windows"].push_back(window_summary_json(w));
        j["securities"].push_back(std::move(js));
    }
    j["skipped"] = ordered_json::array();
    for (const auto& [id, reason] : summary.skipped)
        j["skipped"].push_back(ordered_json{{"security_id", id}, {"reason", reason}});
    auto out = open_output(out_dir / "infer_summary.json");
    out << j.dump(2) << '\n';
    return summary;
}

namespace {

ClusterSet load_cluster_set(const fs::path& csv_path, const std::string& network_id) {
    auto in = open_input(csv_path);
    CsvReader reader(in);
    reader.expect_header({"investor_id", "cluster_id"});
    std::map<std::uint32_t, std::vector<std::string>> clusters;
    std::vector<std::string> f;
    while (reader.next(f)) {
        if (f.size() != 2)
            throw DataError(csv_path.string() + " line " + std::to_string(reader.line_number()) +
                            ": expected 2 fields");
        std::uint32_t cluster_id = 0;
        auto res = std::from_chars(f[1].data(), f[1].data() + f[1].size(), cluster_id);
        if (res.ec != std::errc() || res.ptr != f[1].data() + f[1].size())
            throw DataError(csv_path.string() + " line " + std::to_string(reader.line_number()) +
                            ": bad cluster id '" + f[1] + "'");
        clusters[cluster_id].push_back(f[0]);
    }
    ClusterSet cs;
    cs.network_id = network_id;
    for (auto& [id, members] : clusters) {
        std::sort(members.begin(), members.end());
        cs.clusters.push_back(std::move(members));
    }
    return cs;
}

struct AnalyzeInputs {
    std::vector<std::string> security_ids;  // processed, sorted
    std::map<std::string, Date> ipo_dates;
    // security -> {Y1, Y2} cluster sets
    std::map<std::string, std::array<ClusterSet, 2>> cluster_sets;
    ordered_json infer_summary;
};

AnalyzeInputs load_analyze_inputs(const PipelineConfig& cfg) {
    const fs::path out_dir(cfg.output_dir);
    AnalyzeInputs in;
    auto summary_in = open_input(out_dir / "infer_summary.json");
    try {
        in.infer_summary = ordered_json::parse(summary_in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("infer_summary.json: " + std::string(e.what()));
    }
    for (const auto& js : in.infer_summary.at("securities")) {
        const std::string id = js.at("security_id").get<std::string>();
        in.security_ids.push_back(id);
        auto ipo = Date::parse(js.at("ipo_date").get<std::string>());
        if (!ipo) throw DataError("infer_summary.json: bad ipo_date for " + id);
        in.ipo_dates[id] = *ipo;
        const std::string tag = sanitize(id);
        in.cluster_sets[id] = {
            load_cluster_set(out_dir / ("partition_" + tag + "_Y1.csv"), id + ":Y1"),
            load_cluster_set(out_dir / ("partition_" + tag + "_Y2.csv"), id + ":Y2")};
    }
    std::sort(in.security_ids.begin(), in.security_ids.end());
    return in;
}

std::size_t median_cluster_size(const ClusterSet& cs) {
    if (cs.clusters.empty()) return 0;
    std::vector<std::size_t> sizes;
    sizes.reserve(cs.clusters.size());
    for (const auto& c : cs.clusters) sizes.push_back(c.size());
    std::sort(sizes.begin(), sizes.end());
    return sizes[(sizes.size() - 1) / 2];
}

struct PersistCounts {
    std::size_t y1 = 0;
    std::size_t y2 = 0;
};

PersistCounts persisting_counts(const SimilarityResult& r) {
    std::set<std::uint32_t> a, b;
    for (const OverlapTest& t : r.tests) {
        if (!t.validated) continue;
        a.insert(t.cluster_a);
        b.insert(t.cluster_b);
    }
    return {a.size(), b.size()};
}

std::string format_pct(double ratio) {
    std::ostringstream os;
    os << static_cast<int>(ratio * 100.0 + 0.5) << "%";
    return os.str();
}

}  // namespace

void run_analyze(const PipelineConfig& cfg) {
    cfg.validate();
    const fs::path out_dir(cfg.output_dir);
    AnalyzeInputs inputs = load_analyze_inputs(cfg);
    const FdrConfig fdr{cfg.alpha, cfg.fdr_mode};

    for (const std::string& m : cfg.mature_ids)
        if (!inputs.cluster_sets.count(m))
            throw ConfigError("mature security '" + m + "' was not processed by infer");

    std::vector<std::string> ipo_ids;
    for (const std::string& id : inputs.security_ids)
        if (std::find(cfg.mature_ids.begin(), cfg.mature_ids.end(), id) ==
            cfg.mature_ids.end())
            ipo_ids.push_back(id);

    ordered_json summary;
    std::vector<std::string> notices;

    // --- persistence per IPO security -------------------------------------
    std::map<std::string, SimilarityResult> persistence_results;
    for (const std::string& id : ipo_ids) {
        const auto& sets = inputs.cluster_sets.at(id);
        SimilarityResult r = persistence(sets[0], sets[1], fdr);
        auto out = open_output(out_dir / ("persistence_" + sanitize(id) + ".csv"));
        write_similarity_csv(r, out);
        persistence_results.emplace(id, std::move(r));
    }

    // --- cross-security per year ------------------------------------------
    std::vector<SimilarityResult> cross_results;
    std::map<std::string, std::array<std::size_t, 2>> asset_specific;
    for (const std::string& id : ipo_ids)
        asset_specific[id] = {inputs.cluster_sets.at(id)[0].clusters.size(),
                              inputs.cluster_sets.at(id)[1].clusters.size()};
    if (ipo_ids.size() >= 2) {
        for (int w = 0; w < 2; ++w) {
            std::vector<ClusterSet> year_sets;
            for (const std::string& id : ipo_ids)
                year_sets.push_back(inputs.cluster_sets.at(id)[static_cast<std::size_t>(w)]);
            SimilarityResult r = cross_security(year_sets, fdr);
            auto out = open_output(out_dir /
                                   ("cross_security_Y" + std::to_string(w + 1) + ".csv"));
            write_similarity_csv(r, out);
            for (std::size_t s = 0; s < ipo_ids.size(); ++s) {
                asset_specific[ipo_ids[s]][static_cast<std::size_t>(w)] =
                    unmatched_clusters(r, year_sets[s]).size();
            }
            cross_results.push_back(std::move(r));
        }
    } else {
        notices.push_back("cross-security analysis skipped: fewer than two IPO securities");
    }

    // --- Table-3-shaped summary --------------------------------------------
    {
        auto out = open_output(out_dir / "table3.csv");
        out << "security_id,clusters_y1,clusters_y2,asset_specific_y1,asset_specific_y2,"
               "persisting_y1,persisting_y2,investors_y1,active_y1,investors_y2,active_y2,"
               "active_both,median_cluster_size_y1,median_cluster_size_y2\n";
        ordered_json table3 = ordered_json::array();
        for (const auto& js : inputs.infer_summary.at("securities")) {
            const std::string id = js.at("security_id").get<std::string>();
            if (std::find(ipo_ids.begin(), ipo_ids.end(), id) == ipo_ids.end()) continue;
            const auto& sets = inputs.cluster_sets.at(id);
            const PersistCounts pc = persisting_counts(persistence_results.at(id));
            const auto& windows = js.at("windows");
            out << id << ',' << sets[0].clusters.size() << ',' << sets[1].clusters.size()
                << ',' << asset_specific.at(id)[0] << ',' << asset_specific.at(id)[1] << ','
                << pc.y1 << ',' << pc.y2 << ','
                << windows.at(0).at("investors").get<std::size_t>() << ','
                << windows.at(0).at("active").get<std::size_t>() << ','
                << windows.at(1).at("investors").get<std::size_t>() << ','
                << windows.at(1).at("active").get<std::size_t>() << ','
                << js.at("active_both").get<std::size_t>() << ','
                << median_cluster_size(sets[0]) << ',' << median_cluster_size(sets[1])
                << '\n';
            ordered_json row;
            row["security_id"] = id;
            row["clusters_y1"] = sets[0].clusters.size();
            row["clusters_y2"] = sets[1].clusters.size();
            row["asset_specific_y1"] = asset_specific.at(id)[0];
            row["asset_specific_y2"] = asset_specific.at(id)[1];
            row["persisting_y1"] = pc.y1;
            row["persisting_y2"] = pc.y2;
            row["investors_y1"] = windows.at(0).at("investors").get<std::size_t>();
            row["active_y1"] = windows.at(0).at("active").get<std::size_t>();
            row["investors_y2"] = windows.at(1).at("investors").get<std::size_t>();
            row["active_y2"] = windows.at(1).at("active").get<std::size_t>();
            row["active_both"] = js.at("active_both").get<std::size_t>();
            row["median_cluster_size_y1"] = median_cluster_size(sets[0]);
            row["median_cluster_size_y2"] = median_cluster_size(sets[1]);
            table3.push_back(std::move(row));
        }
        summary["table3"] = std::move(table3);
    }

    // --- IPO vs mature ------------------------------------------------------
    if (!cfg.mature_ids.empty()) {
        auto txn_in = open_input(cfg.transactions_path);
        std::vector<Transaction> txns = parse_transactions(txn_in);
        txns = filter_universe(std::move(txns), cfg.exclude_nominee);
        const auto by_security = group_by_security(aggregate_daily(txns));
        const EncoderConfig enc{cfg.theta, cfg.min_active_days};
        const Rng root(cfg.seed);

        auto table4 = open_output(out_dir / "table4.csv");
        table4 << "security_id,window,mature_id,ipo_overlapping,mature_overlapping,"
                  "mature_total,formatted\n";
        std::vector<std::string> unique_rows;
        std::array<std::vector<double>, 2> unique_pcts;

        // aligned mature networks per (ipo, mature, window), computed in
        // parallel into indexed slots
        struct AlignedSets {
            std::array<std::vector<ClusterSet>, 2> per_window;
        };
        std::vector<AlignedSets> aligned(ipo_ids.size());
        for (auto& a : aligned)
            for (auto& v : a.per_window)
                v.resize(cfg.mature_ids.size());

        const std::size_t tasks = ipo_ids.size() * cfg.mature_ids.size();
        parallel_for(tasks, cfg.jobs, [&](std::size_t task) {
            const std::size_t ipo_idx = task / cfg.mature_ids.size();
            const std::size_t mat_idx = task % cfg.mature_ids.size();
            const std::string& ipo_id = ipo_ids[ipo_idx];
            const std::string& mature_id = cfg.mature_ids[mat_idx];
            const Date anchor = inputs.ipo_dates.at(ipo_id);
            auto [y1, y2] = build_windows(anchor);

            auto found = by_security.find(mature_id);
            const std::vector<DailyNetVolume> empty;
            const std::vector<DailyNetVolume>& daily =
                found == by_security.end() ? empty : found->second;
            const SecurityCalendar cal = build_security_calendar(daily, mature_id, anchor);
            StateMatrix m1 = encode(daily, enc, y1, cal);
            StateMatrix m2 = encode(daily, enc, y2, cal);
            auto [f1, f2] = filter_active(m1, m2, cfg.min_active_days);
            const StateMatrix* matrices[2] = {&f1, &f2};
            for (int w = 0; w < 2; ++w) {
                Rng seed_rng = root.fork(0x20000 + task * 2 + static_cast<std::size_t>(w));
                WindowArtifacts art = process_window(*matrices[w], cfg, seed_rng.next());
                ClusterSet cs;
                if (art.partition)
                    cs = make_cluster_set(art.network, *art.partition);
                else
                    cs.network_id = mature_id + ":" + matrices[w]->window.label();
                aligned[ipo_idx].per_window[static_cast<std::size_t>(w)][mat_idx] =
                    std::move(cs);
            }
        });

        ordered_json table4_json = ordered_json::array();
        for (std::size_t ipo_idx = 0; ipo_idx < ipo_ids.size(); ++ipo_idx) {
            const std::string& ipo_id = ipo_ids[ipo_idx];
            for (int w = 0; w < 2; ++w) {
                const ClusterSet& ipo_set =
                    inputs.cluster_sets.at(ipo_id)[static_cast<std::size_t>(w)];
                const auto& matures = aligned[ipo_idx].per_window[static_cast<std::size_t>(w)];
                SimilarityResult r = ipo_vs_mature(ipo_set, matures, fdr);
                {
                    auto out = open_output(out_dir / ("ipo_vs_mature_" + sanitize(ipo_id) +
                                                      "_Y" + std::to_string(w + 1) + ".csv"));
                    write_similarity_csv(r, out);
                }
                ordered_json row;
                row["security_id"] = ipo_id;
                row["window"] = "Y" + std::to_string(w + 1);
                row["overlaps"] = ordered_json::array();
                const auto rows = summarize_vs_mature(r, matures);
                for (std::size_t m = 0; m < rows.size(); ++m) {
                    const MatureOverlapSummary& s = rows[m];
                    std::ostringstream formatted;
                    formatted << s.ipo_clusters << " (" << s.mature_clusters << ") {"
                              << s.mature_total << "}";
                    table4 << ipo_id << ",Y" << (w + 1) << ',' << cfg.mature_ids[m] << ','
                           << s.ipo_clusters << ',' << s.mature_clusters << ','
                           << s.mature_total << ',' << formatted.str() << '\n';
                    row["overlaps"].push_back(
                        ordered_json{{"mature_id", cfg.mature_ids[m]},
                                     {"ipo_overlapping", s.ipo_clusters},
                                     {"mature_overlapping", s.mature_clusters},
                                     {"mature_total", s.mature_total},
                                     {"formatted", formatted.str()}});
                }
                const std::size_t unique = unmatched_clusters(r, ipo_set).size();
                const std::size_t total = ipo_set.clusters.size();
                const double pct = total == 0 ? 0.0
                                              : static_cast<double>(unique) /
                                                    static_cast<double>(total);
                if (total > 0) unique_pcts[static_cast<std::size_t>(w)].push_back(pct);
                std::ostringstream urow;
                urow << ipo_id << ",Y" << (w + 1) << ',' << unique << ',' << total << ','
                     << format_double(pct) << ',' << unique << '/' << total << " ("
                     << format_pct(pct) << ")";
                unique_rows.push_back(urow.str());
                row["unique_clusters"] = unique;
                row["total_clusters"] = total;
                row["unique_ratio"] = pct;
                table4_json.push_back(std::move(row));
            }
        }
        summary["table4"] = std::move(table4_json);

        ordered_json mature_summary;
        std::vector<std::string> stat_rows;
        for (int w = 0; w < 2; ++w) {
            auto& pcts = unique_pcts[static_cast<std::size_t>(w)];
            std::sort(pcts.begin(), pcts.end());
            ordered_json stats;
            if (pcts.empty()) {
                stats["median_unique_ratio"] = nullptr;
                stats["average_unique_ratio"] = nullptr;
            } else {
                const std::size_t n = pcts.size();
                const double median =
                    n % 2 ? pcts[n / 2] : 0.5 * (pcts[n / 2 - 1] + pcts[n / 2]);
                double avg = 0.0;
                for (double p : pcts) avg += p;
                avg /= static_cast<double>(n);
                stats["median_unique_ratio"] = median;
                stats["average_unique_ratio"] = avg;
                const std::string win = "Y" + std::to_string(w + 1);
                stat_rows.push_back("Median," + win + ",,," + format_double(median) + "," +
                                    format_pct(median));
                stat_rows.push_back("Average," + win + ",,," + format_double(avg) + "," +
                                    format_pct(avg));
            }
            mature_summary["Y" + std::to_string(w + 1)] = std::move(stats);
        }
        {
            auto out = open_output(out_dir / "table4_unique.csv");
            out << "security_id,window,unique_clusters,total_clusters,unique_ratio,"
                   "formatted\n";
            for (const std::string& row : unique_rows) out << row << '\n';
            for (const std::string& row : stat_rows) out << row << '\n';
        }
        summary["mature_overlap"] = std::move(mature_summary);
    }

    // --- attribute expression -----------------------------------------------
    std::vector<ExpressionProfile> profiles;
    if (!cfg.attributes_path.empty()) {
        auto attr_in = open_input(cfg.attributes_path);
        std::vector<InvestorAttributes> attrs = parse_attributes(attr_in);
        std::set<std::string> known;
        for (const auto& a : attrs) known.insert(a.investor_id);
        // investors without a record get sentinel attributes
        for (const std::string& id : ipo_ids) {
            for (const auto& cs : inputs.cluster_sets.at(id)) {
                for (const auto& cluster : cs.clusters) {
                    for (const std::string& member : cluster) {
                        if (known.insert(member).second)
                            attrs.push_back({member, SectorCode::unknown,
                                             std::string(kNoRegion), Gender::no_gender,
                                             std::string(kNoAge)});
                    }
                }
            }
        }
        for (const std::string& id : ipo_ids) {
            for (int w = 0; w < 2; ++w) {
                const ClusterSet& cs = inputs.cluster_sets.at(id)[static_cast<std::size_t>(w)];
                ExpressionProfile profile = profile_network(cs, attrs, fdr);
                auto out = open_output(out_dir / ("expression_" + sanitize(id) + "_Y" +
                                                  std::to_string(w + 1) + ".csv"));
                write_expression_csv(profile, out);
                profiles.push_back(std::move(profile));
            }
        }
    } else {
        notices.push_back("expression analysis skipped: no attributes file");
    }

    // --- grouped expressed clusters ------------------------------------------
    {
        std::vector<SimilarityResult> sims;
        for (auto& [id, r] : persistence_results) sims.push_back(r);
        for (auto& r : cross_results) sims.push_back(r);
        for (Direction dir : {Direction::over, Direction::under}) {
            const auto groups = group_expressed_clusters(sims, profiles, dir);
            ordered_json jg = ordered_json::array();
            for (std::size_t g = 0; g < groups.size(); ++g) {
                const ExpressionGroup& group = groups[g];
                ordered_json j;
                j["group"] = g + 1;
                j["securities"] = group.securities;
                j["clusters"] = group.clusters;
                j["spans_years"] = group.spans_years;
                j["members"] = ordered_json::array();
                for (const auto& member : group.members) {
                    j["members"].push_back(ordered_json{{"network", member.network_id},
                                                        {"cluster", member.cluster}});
                }
                j["attributes"] = ordered_json::array();
                for (const auto& tally : group.tallies) {
                    j["attributes"].push_back(
                        ordered_json{{"class", std::string(to_string(tally.attr_class))},
                                     {"value", tally.attr_value},
                                     {"securities", tally.securities},
                                     {"clusters", tally.clusters},
                                     {"formatted", std::to_string(tally.securities) + " (" +
                                                       std::to_string(tally.clusters) + ")"}});
                }
                jg.push_back(std::move(j));
            }
            const char* name = dir == Direction::over ? "expression_groups_over.json"
                                                      : "expression_groups_under.json";
            auto out = open_output(out_dir / name);
            out << jg.dump(2) << '\n';
        }
    }

    // --- roll-up -------------------------------------------------------------
    {
        ordered_json expr;
        for (int w = 0; w < 2; ++w) {
            const std::string win = "Y" + std::to_string(w + 1);
            for (Direction dir : {Direction::over, Direction::under}) {
                std::set<std::pair<std::string, std::uint32_t>> expressed_clusters;
                std::set<std::string> expressed_securities;
                std::size_t attr_count = 0;
                for (const ExpressionProfile& profile : profiles) {
                    if (profile.network_id.substr(profile.network_id.rfind(':') + 1) != win)
                        continue;
                    for (const ExpressionTest& t : profile.tests) {
                        if (!t.validated || t.direction != dir) continue;
                        expressed_clusters.insert({t.network_id, t.cluster});
                        expressed_securities.insert(
                            t.network_id.substr(0, t.network_id.rfind(':')));
                        ++attr_count;
                    }
                }
                ordered_json je;
                je["clusters"] = expressed_clusters.size();
                je["attributes"] = attr_count;
                je["securities"] = expressed_securities.size();
                expr[win][std::string(to_string(dir))] = std::move(je);
            }
        }
        summary["expression"] = std::move(expr);
        summary["notices"] = notices;
        auto out = open_output(out_dir / "analyze_summary.json");
        out << summary.dump(2) << '\n';
    }
}

void run_report(const PipelineConfig& cfg) {
    if (cfg.output_dir.empty()) throw ConfigError("output directory is required");
    const fs::path out_dir(cfg.output_dir);
    if (!fs::is_directory(out_dir))
        throw DataError("output directory " + cfg.output_dir + " does not exist");

    std::vector<fs::path> reports;
    for (const auto& entry : fs::directory_iterator(out_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("report_", 0) == 0 && entry.path().extension() == ".json")
            reports.push_back(entry.path());
    }
    std::sort(reports.begin(), reports.end());
    if (reports.empty()) throw DataError("no validation reports found in " + cfg.output_dir);

    for (const fs::path& path : reports) {
        auto in = open_input(path);
        ordered_json j;
        try {
            j = ordered_json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path.string() + ": " + e.what());
        }
        const auto pvalues = j.at("sorted_pvalues").get<std::vector<double>>();
        const double slope = j.at("threshold_slope").get<double>();
        std::string stem = path.stem().string().substr(std::string("report_").size());
        auto out = open_output(out_dir / ("fdr_curve_" + stem + ".csv"));
        out << "rank,p_value,fdr_threshold\n";
        for (std::size_t r = 0; r < pvalues.size(); ++r) {
            out << (r + 1) << ',' << format_double(pvalues[r]) << ','
                << format_double(slope * static_cast<double>(r + 1)) << '\n';
        }
    }
}

}  // namespace svn
