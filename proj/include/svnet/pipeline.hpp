#ifndef SVNET_PIPELINE_HPP
#define SVNET_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "svnet/fdr.hpp"
#include "svnet/link_validation.hpp"

namespace svn {

struct PipelineConfig {
    std::string transactions_path;
    std::string attributes_path;  // optional; required for expression analysis
    std::string calendar_path;
    std::string output_dir;

    double theta = 0.25;
    int min_active_days = 5;
    double alpha = 0.05;
    FdrMode fdr_mode = FdrMode::step_up;
    UniverseMode universe = UniverseMode::intersection;
    int trials = 100;
    std::uint64_t seed = 0;
    int jobs = 1;
    bool exclude_nominee = true;
    bool export_states = true;
    int min_display_size = 4;  // clusters below this are marked grey-out in exports
    std::optional<Date> analysis_end;      // truncation check when set
    std::vector<std::string> mature_ids;   // analyze: mature benchmark securities

    void validate() const;
};

// Loads the JSON config file; missing fields keep their defaults.
PipelineConfig load_pipeline_config(const std::string& path);

struct WindowSummary {
    std::string window_label;
    std::size_t investors = 0;      // traders in the window, before the filter
    std::size_t active = 0;         // traders with >= min_active_days
    std::size_t trading_days = 0;
    std::size_t observed = 0;       // co-occurrence relationships
    std::size_t validated = 0;      // validated links
    std::size_t nodes = 0;
    std::size_t edges = 0;
    std::size_t clusters = 0;
    double codelength = 0.0;
};

struct SecuritySummary {
    std::string security_id;
    Date ipo_date;
    std::size_t active_both = 0;  // active in both windows
    std::vector<WindowSummary> windows;
};

struct InferSummary {
    std::vector<SecuritySummary> securities;
    std::vector<std::pair<std::string, std::string>> skipped;  // (id, reason)
};

// Full inference for every calendared security: state encoding, link
// validation, network assembly, community detection. Writes all per-window
// artifacts plus infer_summary.json under cfg.output_dir.
InferSummary run_infer(const PipelineConfig& cfg);

// Persistence, cross-security, IPO-vs-mature and attribute-expression
// analysis over the outputs of run_infer (reads them back from
// cfg.output_dir). Writes the analysis CSVs, grouped-expression JSON and
// analyze_summary.json.
void run_analyze(const PipelineConfig& cfg);

// Plot-ready sorted p-value / FDR threshold curves from the stored
// validation reports: fdr_curve_<security>_<window>.csv.
void run_report(const PipelineConfig& cfg);

}  // namespace svn

#endif  // SVNET_PIPELINE_HPP
