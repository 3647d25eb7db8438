#ifndef DSTRIPE_BENCH_HPP
#define DSTRIPE_BENCH_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dstripe/experiments.hpp"
#include "dstripe/sim.hpp"

namespace dstripe {

enum class RunMode : uint8_t { Sim, File };

struct ExperimentConfig {
    std::string experiment;  // preset name; ignored when inline_experiment is set
    std::optional<ExperimentPreset> inline_experiment;
    RunMode mode = RunMode::Sim;
    uint32_t repetitions = 1;
    uint64_t seed = 1;
    Scale scale = Scale::Desk;
    std::filesystem::path output_csv;      // empty = don't write a file
    std::filesystem::path cluster_config;  // Sim; empty = built-in defaults
    std::filesystem::path root;            // File: where segment dirs go
    std::string cache_drop_hook;           // File: run between repetitions
    std::string striping_hook;             // File: passed to LogicalFile::create
    uint32_t workers = 0;                  // File: 0 = hardware_concurrency
    bool async_variant = false;            // netflow only
    bool keep_files = false;               // File: keep per-rep data

    void validate() const;
};

// One CSV detail row. Column order is fixed:
//   experiment,variant,repetition,phase,wall_time_s,throughput_bytes_per_s,
//   total_bytes,fragments,flags
// flags is empty or "hook-failed" (the cache-drop hook preceding this
// repetition exited nonzero).
struct ResultRow {
    std::string experiment;
    std::string variant;  // "sim"/"file", netflow: "sim-sync" etc.
    uint32_t repetition = 0;
    std::string phase;
    double wall_time_s = 0.0;
    double throughput_bytes_per_s = 0.0;
    uint64_t total_bytes = 0;
    uint64_t fragments = 0;
    std::string flags;
};

struct SummaryRow {
    std::string experiment;
    std::string variant;
    std::string phase;
    uint32_t repetitions = 0;
    double median_wall_s = 0.0;
    double median_throughput_bps = 0.0;
};

struct RunOutput {
    std::vector<ResultRow> rows;
    std::vector<SummaryRow> summary;
    bool all_completed = false;
    bool hook_warning = false;
};

// Executes the configured experiment. Writes the detail CSV to
// config.output_csv when set; identical config and seed give a
// byte-identical CSV in Sim mode.
RunOutput run(const ExperimentConfig& config);

double median(std::vector<double> values);  // throws on empty input

std::string to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_csv(const std::string& text);

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);
std::string render_summary(const std::vector<SummaryRow>& summary);

// Per-experiment medians, optionally with a speedup column relative to the
// named baseline experiment (matched per phase). Throws if the baseline is
// requested but absent from the rows.
std::string report(const std::vector<ResultRow>& rows, const std::string& baseline = "");

// Built-in cluster: the 8 OSS x 8 OST topology with illustrative desk-scale
// rates. Not calibrated to any real system.
ClusterModel default_cluster();

} // namespace dstripe

#endif
