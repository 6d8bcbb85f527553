#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "svnet/common.hpp"
#include "svnet/csv.hpp"
#include "svnet/pipeline.hpp"
#include "svnet/synthetic.hpp"

#include "test_util.hpp"

using namespace svn;
namespace fs = std::filesystem;

namespace {

// two securities sharing one persistent planted cluster (institutional), an
// ephemeral Y1-only group, and three household bulk groups that give the
// networks a realistic base composition
ScenarioConfig pipeline_scenario() {
    ScenarioConfig cfg;
    cfg.seed = 404;
    cfg.investors = 120;
    cfg.noise_rate = 0.04;
    cfg.securities = {{"S01", *Date::parse("2005-04-21"), 120},
                      {"S02", *Date::parse("2005-06-01"), 120}};

    PlantedGroup persistent;
    persistent.name = "persistent";
    persistent.members = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    persistent.state = TradingState::buy;
    persistent.sync_probability = 1.0;
    persistent.sync_days = 12;
    persistent.securities = {0, 1};
    persistent.windows = {1, 2};
    persistent.attributes.sector = {{"FinancialInsurance", 1.0}};

    PlantedGroup ephemeral;
    ephemeral.name = "ephemeral";
    ephemeral.members = {10, 11, 12, 13, 14};
    ephemeral.state = TradingState::sell;
    ephemeral.sync_probability = 1.0;
    ephemeral.sync_days = 12;
    ephemeral.securities = {0};
    ephemeral.windows = {1};

    cfg.groups = {persistent, ephemeral};
    for (int g = 0; g < 3; ++g) {
        PlantedGroup bulk;
        bulk.name = "bulk" + std::to_string(g);
        for (int m = 0; m < 8; ++m) bulk.members.push_back(20 + g * 10 + m);
        bulk.state = g % 2 ? TradingState::sell : TradingState::buy;
        bulk.sync_probability = 1.0;
        bulk.sync_days = 10;
        bulk.securities = {0};
        bulk.windows = {1, 2};
        bulk.attributes.sector = {{"Households", 1.0}};
        cfg.groups.push_back(bulk);
    }
    return cfg;
}

PipelineConfig write_dataset(const testutil::TempDir& dir, const ScenarioConfig& scenario) {
    const auto data = generate(scenario);
    {
        std::ofstream out(dir.path / "transactions.csv", std::ios::binary);
        write_transactions_csv(data.transactions, out);
    }
    {
        std::ofstream out(dir.path / "attributes.csv", std::ios::binary);
        write_attributes_csv(data.attributes, out);
    }
    {
        std::ofstream out(dir.path / "calendar.csv", std::ios::binary);
        write_calendar_csv(data.calendar, out);
    }
    PipelineConfig cfg;
    cfg.transactions_path = (dir.path / "transactions.csv").string();
    cfg.attributes_path = (dir.path / "attributes.csv").string();
    cfg.calendar_path = (dir.path / "calendar.csv").string();
    cfg.output_dir = (dir.path / "out").string();
    cfg.trials = 30;
    cfg.seed = 9;
    cfg.jobs = 2;
    return cfg;
}

std::map<std::string, std::string> snapshot_outputs(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
        if (entry.is_regular_file())
            files[entry.path().lexically_relative(dir).string()] =
                testutil::read_file(entry.path());
    return files;
}

}  // namespace

TEST_CASE("infer produces the full artifact set and recovers planted structure") {
    testutil::TempDir dir;
    PipelineConfig cfg = write_dataset(dir, pipeline_scenario());
    InferSummary summary = run_infer(cfg);

    REQUIRE(summary.securities.size() == 2);
    CHECK(summary.skipped.empty());
    const fs::path out(cfg.output_dir);
    for (const char* sec : {"S01", "S02"}) {
        for (const char* win : {"Y1", "Y2"}) {
            for (const char* prefix : {"states_", "links_", "network_", "partition_"}) {
                const fs::path csvish =
                    out / (std::string(prefix) + sec + "_" + win +
                           (std::string(prefix) == "network_" ? ".edges" : ".csv"));
                CHECK_MESSAGE(fs::exists(csvish), csvish.string());
            }
            CHECK(fs::exists(out / ("report_" + std::string(sec) + "_" + win + ".json")));
        }
    }
    CHECK(fs::exists(out / "infer_summary.json"));

    // planted cluster appears in S01 Y1 partition as one cluster
    std::ifstream in(out / "partition_S01_Y1.csv");
    std::string line;
    std::getline(in, line);  // header
    std::map<std::string, std::string> cluster_of;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        cluster_of[line.substr(0, comma)] = line.substr(comma + 1);
    }
    REQUIRE(cluster_of.count("I000000"));
    for (int m = 1; m <= 9; ++m)
        CHECK(cluster_of.at(investor_name(m)) == cluster_of.at("I000000"));
}

TEST_CASE("analyze validates persistence of the planted cluster only") {
    testutil::TempDir dir;
    PipelineConfig cfg = write_dataset(dir, pipeline_scenario());
    run_infer(cfg);
    run_analyze(cfg);

    const fs::path out(cfg.output_dir);
    CHECK(fs::exists(out / "table3.csv"));
    CHECK(fs::exists(out / "cross_security_Y1.csv"));
    CHECK(fs::exists(out / "expression_S01_Y1.csv"));
    CHECK(fs::exists(out / "expression_groups_over.json"));
    CHECK(fs::exists(out / "analyze_summary.json"));

    // persistence: the planted members persist Y1 -> Y2 in S01
    std::ifstream in(out / "persistence_S01.csv");
    std::string line;
    std::getline(in, line);
    bool any_validated = false;
    while (std::getline(in, line)) {
        if (line.substr(line.rfind(',') + 1) == "1") any_validated = true;
    }
    CHECK(any_validated);

    // cross-security: planted cluster validated between S01 and S02
    std::ifstream cross(out / "cross_security_Y1.csv");
    std::getline(cross, line);
    bool cross_validated = false;
    while (std::getline(cross, line))
        if (line.substr(line.rfind(',') + 1) == "1") cross_validated = true;
    CHECK(cross_validated);

    // expression: planted cluster flagged FinancialInsurance overexpressed
    const std::string expr = testutil::read_file(out / "expression_S01_Y1.csv");
    CHECK(expr.find("FinancialInsurance,over") != std::string::npos);

    // summary JSON mirrors the table columns and the expression roll-up
    nlohmann::json summary =
        nlohmann::json::parse(testutil::read_file(out / "analyze_summary.json"));
    REQUIRE(summary.contains("table3"));
    REQUIRE(!summary.at("table3").empty());
    CHECK(summary.at("table3").at(0).contains("persisting_y1"));
    CHECK(summary.at("expression").at("Y1").at("over").at("clusters").get<int>() >= 1);

    // partition JSON carries the display filter
    nlohmann::json part =
        nlohmann::json::parse(testutil::read_file(out / "partition_S01_Y1.json"));
    CHECK(part.at("display").at("min_size").get<int>() == 4);
}

TEST_CASE("single-security analyze records a cross-security notice") {
    testutil::TempDir dir;
    auto scenario = pipeline_scenario();
    scenario.securities.pop_back();
    scenario.groups[0].securities = {0};
    PipelineConfig cfg = write_dataset(dir, scenario);
    run_infer(cfg);
    run_analyze(cfg);
    const std::string summary =
        testutil::read_file(fs::path(cfg.output_dir) / "analyze_summary.json");
    CHECK(summary.find("cross-security analysis skipped") != std::string::npos);
}

TEST_CASE("expression analysis is skipped without an attributes file") {
    testutil::TempDir dir;
    PipelineConfig cfg = write_dataset(dir, pipeline_scenario());
    cfg.attributes_path.clear();
    run_infer(cfg);
    run_analyze(cfg);
    const std::string summary =
        testutil::read_file(fs::path(cfg.output_dir) / "analyze_summary.json");
    CHECK(summary.find("expression analysis skipped") != std::string::npos);
    CHECK_FALSE(fs::exists(fs::path(cfg.output_dir) / "expression_S01_Y1.csv"));
}

TEST_CASE("mature overlap emits the A (B) {C} table") {
    testutil::TempDir dir;
    PipelineConfig cfg = write_dataset(dir, pipeline_scenario());
    cfg.mature_ids = {"S02"};  // treat the second security as the mature benchmark
    run_infer(cfg);
    run_analyze(cfg);
    const fs::path out(cfg.output_dir);
    const std::string table4 = testutil::read_file(out / "table4.csv");
    CHECK(table4.rfind("security_id,window,mature_id,", 0) == 0);
    CHECK(table4.find("{") != std::string::npos);
    CHECK(fs::exists(out / "ipo_vs_mature_S01_Y1.csv"));
    CHECK(fs::exists(out / "table4_unique.csv"));

    // reconcile one formatted cell against the raw rows
    std::ifstream raw(out / "ipo_vs_mature_S01_Y1.csv");
    std::string line;
    std::getline(raw, line);
    std::set<std::string> ipo_side;
    while (std::getline(raw, line)) {
        if (line.substr(line.rfind(',') + 1) != "1") continue;
        // columns: mode,net_a,cluster_a,...
        auto p1 = line.find(',');
        auto p2 = line.find(',', p1 + 1);
        auto p3 = line.find(',', p2 + 1);
        ipo_side.insert(line.substr(p2 + 1, p3 - p2 - 1));
    }
    std::ifstream t4(out / "table4.csv");
    std::getline(t4, line);
    std::size_t formatted_a = std::string::npos;
    while (std::getline(t4, line)) {
        if (line.rfind("S01,Y1,S02,", 0) == 0) {
            auto fields = split_csv_line(line);
            formatted_a = std::stoul(fields[3]);
        }
    }
    REQUIRE(formatted_a != std::string::npos);
    CHECK(formatted_a == ipo_side.size());

    // the unique-cluster table carries the paper-style bottom rows
    const std::string unique = testutil::read_file(out / "table4_unique.csv");
    CHECK(unique.find("Median,Y1") != std::string::npos);
    CHECK(unique.find("Average,Y2") != std::string::npos);
}

TEST_CASE("literal FDR and full-window universe run end to end") {
    testutil::TempDir dir;
    PipelineConfig cfg = write_dataset(dir, pipeline_scenario());
    cfg.fdr_mode = FdrMode::literal;
    cfg.universe = UniverseMode::full_window;
    InferSummary summary = run_infer(cfg);
    REQUIRE(summary.securities.size() == 2);
    run_analyze(cfg);

    // the fully synchronized planted cluster survives the stricter literal
    // rule and the full-year counting universe
    std::ifstream in(fs::path(cfg.output_dir) / "partition_S01_Y1.csv");
    std::string line;
    std::getline(in, line);
    std::map<std::string, std::string> cluster_of;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        cluster_of[line.substr(0, comma)] = line.substr(comma + 1);
    }
    REQUIRE(cluster_of.count("I000000"));
    for (int m = 1; m <= 9; ++m)
        CHECK(cluster_of.at(investor_name(m)) == cluster_of.at("I000000"));
}

TEST_CASE("reruns and different worker pools are byte-identical") {
    testutil::TempDir dir;
    const auto scenario = pipeline_scenario();
    PipelineConfig cfg = write_dataset(dir, scenario);
    cfg.jobs = 1;
    run_infer(cfg);
    run_analyze(cfg);
    auto first = snapshot_outputs(cfg.output_dir);

    fs::remove_all(cfg.output_dir);
    cfg.jobs = 2;
    run_infer(cfg);
    run_analyze(cfg);
    auto second = snapshot_outputs(cfg.output_dir);
    CHECK(first == second);
}

TEST_CASE("report emits one FDR curve per stored report") {
    testutil::TempDir dir;
    PipelineConfig cfg = write_dataset(dir, pipeline_scenario());
    run_infer(cfg);
    run_report(cfg);
    const fs::path out(cfg.output_dir);
    for (const char* name : {"fdr_curve_S01_Y1.csv", "fdr_curve_S02_Y2.csv"}) {
        REQUIRE(fs::exists(out / name));
        const std::string text = testutil::read_file(out / name);
        CHECK(text.rfind("rank,p_value,fdr_threshold\n", 0) == 0);
    }
}

TEST_CASE("config file loads and validates") {
    testutil::TempDir dir;
    testutil::write_file(dir.path / "config.json", R"({
        "transactions": "t.csv", "calendar": "c.csv", "out": "o",
        "theta": 0.1, "alpha": 0.01, "fdr_mode": "literal",
        "universe": "full_window", "trials": 7, "seed": 3, "jobs": 2,
        "mature": ["M1"], "analysis_end": "2009-12-31"
    })");
    auto cfg = load_pipeline_config((dir.path / "config.json").string());
    CHECK(cfg.theta == 0.1);
    CHECK(cfg.fdr_mode == FdrMode::literal);
    CHECK(cfg.universe == UniverseMode::full_window);
    CHECK(cfg.mature_ids == std::vector<std::string>{"M1"});
    REQUIRE(cfg.analysis_end.has_value());
    CHECK(cfg.analysis_end->iso() == "2009-12-31");

    PipelineConfig bad;
    bad.transactions_path = "t";
    bad.calendar_path = "c";
    bad.output_dir = "o";
    bad.theta = 1.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("duplicate calendar entries are rejected") {
    testutil::TempDir dir;
    PipelineConfig cfg = write_dataset(dir, pipeline_scenario());
    testutil::write_file(dir.path / "calendar.csv",
                         "security_id,ipo_date\nS01,2005-04-21\nS01,2005-04-21\n");
    CHECK_THROWS_AS(run_infer(cfg), DataError);
}

TEST_CASE("truncation skips the security only when an analysis end is set") {
    testutil::TempDir dir;
    auto scenario = pipeline_scenario();
    PipelineConfig cfg = write_dataset(dir, scenario);
    cfg.analysis_end = Date::parse("2006-06-01");  // inside S01's Y2
    InferSummary summary = run_infer(cfg);
    CHECK(summary.securities.empty());
    CHECK(summary.skipped.size() == 2);
    CHECK(summary.skipped[0].second.find("truncated") != std::string::npos);
}
