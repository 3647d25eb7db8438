#include "dstripe/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dstripe/rng.hpp"
#include "dstripe/segment_store.hpp"

namespace dstripe {

void ExperimentConfig::validate() const {
    if (experiment.empty() && !inline_experiment)
        throw std::invalid_argument("config: experiment name or inline experiment required");
    if (repetitions < 1) throw std::invalid_argument("config: repetitions must be >= 1");
    if (mode == RunMode::File && root.empty())
        throw std::invalid_argument("config: file mode requires a root path");
}

ClusterModel default_cluster() {
    ClusterModel c;
    c.num_clients = 16;
    c.client_link_bw = 200e6;
    c.num_oss = 8;
    c.oss_bw_cap = 3e9;
    c.osts_per_oss = 8;
    c.ost_bw = 500e6;
    c.per_op_latency = 0.0003;
    c.seek_penalty = 0.004;
    c.aggregate_fabric_bw = 24e9;
    return c;
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of empty set");
    std::sort(values.begin(), values.end());
    const size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

// ------------------------------------------------------------------- CSV

namespace {

const char* kCsvHeader =
    "experiment,variant,repetition,phase,wall_time_s,throughput_bytes_per_s,"
    "total_bytes,fragments,flags";

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

std::string to_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream os;
    os << kCsvHeader << "\n";
    for (const ResultRow& r : rows) {
        os << r.experiment << "," << r.variant << "," << r.repetition << "," << r.phase
           << "," << fmt_double(r.wall_time_s) << "," << fmt_double(r.throughput_bytes_per_s)
           << "," << r.total_bytes << "," << r.fragments << "," << r.flags << "\n";
    }
    return os.str();
}

std::vector<ResultRow> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw std::runtime_error("csv: missing or unexpected header");
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> f = split_fields(line);
        if (f.size() != 9) throw std::runtime_error("csv: bad field count in '" + line + "'");
        ResultRow r;
        r.experiment = f[0];
        r.variant = f[1];
        r.repetition = static_cast<uint32_t>(std::stoul(f[2]));
        r.phase = f[3];
        r.wall_time_s = std::stod(f[4]);
        r.throughput_bytes_per_s = std::stod(f[5]);
        r.total_bytes = std::stoull(f[6]);
        r.fragments = std::stoull(f[7]);
        r.flags = f[8];
        rows.push_back(std::move(r));
    }
    return rows;
}

// -------------------------------------------------------------- summaries

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
    struct Key {
        std::string experiment, variant, phase;
        bool operator==(const Key&) const = default;
    };
    std::vector<Key> order;
    std::vector<std::vector<const ResultRow*>> groups;
    for (const ResultRow& r : rows) {
        const Key key{r.experiment, r.variant, r.phase};
        size_t i = 0;
        for (; i < order.size(); ++i)
            if (order[i] == key) break;
        if (i == order.size()) {
            order.push_back(key);
            groups.emplace_back();
        }
        groups[i].push_back(&r);
    }

    std::vector<SummaryRow> out;
    for (size_t i = 0; i < order.size(); ++i) {
        SummaryRow s;
        s.experiment = order[i].experiment;
        s.variant = order[i].variant;
        s.phase = order[i].phase;
        s.repetitions = static_cast<uint32_t>(groups[i].size());
        std::vector<double> walls, thrs;
        for (const ResultRow* r : groups[i]) {
            walls.push_back(r->wall_time_s);
            thrs.push_back(r->throughput_bytes_per_s);
        }
        s.median_wall_s = median(walls);
        s.median_throughput_bps = median(thrs);
        out.push_back(std::move(s));
    }
    return out;
}

std::string render_summary(const std::vector<SummaryRow>& summary) {
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-12s %-10s %-8s %5s %16s %22s\n", "experiment",
                  "variant", "phase", "reps", "median_wall_s", "median_throughput");
    os << buf;
    for (const SummaryRow& s : summary) {
        std::snprintf(buf, sizeof buf, "%-12s %-10s %-8s %5u %16.6f %18s/s\n",
                      s.experiment.c_str(), s.variant.c_str(), s.phase.c_str(),
                      s.repetitions, s.median_wall_s,
                      format_size_human(static_cast<uint64_t>(s.median_throughput_bps)).c_str());
        os << buf;
    }
    return os.str();
}

std::string report(const std::vector<ResultRow>& rows, const std::string& baseline) {
    if (rows.empty()) throw std::invalid_argument("report: empty result table");
    const std::vector<SummaryRow> summary = summarize(rows);

    auto baseline_for = [&](const SummaryRow& s) -> const SummaryRow* {
        for (const SummaryRow& b : summary)
            if (b.experiment == baseline && b.phase == s.phase && b.variant == s.variant)
                return &b;
        return nullptr;
    };

    if (!baseline.empty()) {
        bool found = false;
        for (const SummaryRow& s : summary) found |= s.experiment == baseline;
        if (!found)
            throw std::invalid_argument("report: baseline experiment '" + baseline +
                                        "' not present in results");
    }

    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-12s %-10s %-8s %5s %16s %22s %10s\n", "experiment",
                  "variant", "phase", "reps", "median_wall_s", "median_throughput",
                  baseline.empty() ? "" : "speedup");
    os << buf;
    for (const SummaryRow& s : summary) {
        std::string speedup;
        if (!baseline.empty()) {
            const SummaryRow* b = baseline_for(s);
            if (b && b->median_throughput_bps > 0)
                speedup = fmt_double(s.median_throughput_bps / b->median_throughput_bps);
            else
                speedup = "n/a";
        }
        std::snprintf(buf, sizeof buf, "%-12s %-10s %-8s %5u %16.6f %18s/s %10s\n",
                      s.experiment.c_str(), s.variant.c_str(), s.phase.c_str(),
                      s.repetitions, s.median_wall_s,
                      format_size_human(static_cast<uint64_t>(s.median_throughput_bps)).c_str(),
                      speedup.c_str());
        os << buf;
    }
    return os.str();
}

// ------------------------------------------------------- file-mode replay

namespace {

struct PhaseTiming {
    double wall_s = 0.0;
    uint64_t bytes = 0;
    uint64_t fragments = 0;
};

// deterministic junk for write payloads
const std::vector<uint8_t>& pattern_buffer() {
    static const std::vector<uint8_t> buf = [] {
        std::vector<uint8_t> b(4 * MiB);
        Rng rng(0x5eedf00dULL);
        for (size_t i = 0; i < b.size(); i += 8) {
            const uint64_t v = rng.next();
            for (size_t j = 0; j < 8 && i + j < b.size(); ++j)
                b[i + j] = static_cast<uint8_t>(v >> (8 * j));
        }
        return b;
    }();
    return buf;
}

void execute_op(LogicalFile& file, const IoOp& op, std::vector<uint8_t>& scratch) {
    if (op.length > scratch.size()) scratch.resize(op.length);
    if (op.kind == IoKind::Read) {
        file.read_at(op.offset, std::span<uint8_t>(scratch.data(), op.length));
    } else {
        const std::vector<uint8_t>& pat = pattern_buffer();
        uint64_t done = 0;
        while (done < op.length) {
            const uint64_t n = std::min<uint64_t>(op.length - done, pat.size());
            file.write_at(op.offset + done, std::span<const uint8_t>(pat.data(), n));
            done += n;
        }
    }
}

PhaseTiming replay_phase(LogicalFile& file, const IoPhase& phase, uint32_t worker_count) {
    PhaseTiming timing;
    timing.bytes = phase.total_bytes();
    for (const IoOp& op : phase.ops)
        timing.fragments += split_range(file.layout(), op.offset, op.length).size();

    // chains keyed by task id; ops within a chain run in order
    std::map<uint32_t, std::vector<const IoOp*>> chains;
    for (const IoOp& op : phase.ops) chains[op.task].push_back(&op);
    std::vector<std::vector<const IoOp*>> units;
    units.reserve(chains.size());
    for (auto& [task, ops] : chains) units.push_back(std::move(ops));

    const uint32_t workers =
        std::max<uint32_t>(1, std::min<uint32_t>(worker_count,
                                                 static_cast<uint32_t>(units.size())));

    std::atomic<size_t> next_unit{0};
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (uint32_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            std::vector<uint8_t> scratch(1 * MiB);
            if (phase.mode == PhaseMode::WorkQueue) {
                while (true) {
                    const size_t u = next_unit.fetch_add(1);
                    if (u >= units.size()) break;
                    for (const IoOp* op : units[u]) execute_op(file, *op, scratch);
                }
            } else {
                for (size_t u = w; u < units.size(); u += workers)
                    for (const IoOp* op : units[u]) execute_op(file, *op, scratch);
            }
        });
    }
    for (std::thread& t : pool) t.join();
    const auto t1 = std::chrono::steady_clock::now();
    timing.wall_s = std::chrono::duration<double>(t1 - t0).count();
    return timing;
}

int run_hook(const std::string& cmd) { return std::system(cmd.c_str()); }

} // namespace

// -------------------------------------------------------------------- run

RunOutput run(const ExperimentConfig& config) {
    config.validate();
    ExperimentPreset preset = config.inline_experiment
                                  ? *config.inline_experiment
                                  : experiment_preset(config.experiment, config.scale);

    if (config.async_variant) {
        if (preset.kind != WorkloadKind::Netflow)
            throw std::invalid_argument("async variant only applies to netflow experiments");
        std::get<NetflowSpec>(preset.workload).variant = NetflowVariant::Async;
    }

    std::string variant = config.mode == RunMode::Sim ? "sim" : "file";
    if (preset.kind == WorkloadKind::Netflow)
        variant += config.async_variant ? "-async" : "-sync";

    RunOutput out;
    bool hook_failed_before_rep = false;

    ClusterModel cluster =
        config.cluster_config.empty() ? default_cluster() : ClusterModel::load(config.cluster_config);
    cluster.num_clients = preset.num_clients;
    const OstPool pool = make_rr_pool(cluster.num_oss, cluster.osts_per_oss);

    for (uint32_t rep = 0; rep < config.repetitions; ++rep) {
        if (rep > 0 && config.mode == RunMode::File && !config.cache_drop_hook.empty()) {
            hook_failed_before_rep = run_hook(config.cache_drop_hook) != 0;
            out.hook_warning |= hook_failed_before_rep;
        }
        const uint64_t rep_seed = Rng::mix(config.seed, rep);
        const std::string flags = hook_failed_before_rep ? "hook-failed" : "";

        auto push_row = [&](const std::string& phase, double wall, uint64_t bytes,
                            uint64_t fragments) {
            ResultRow r;
            r.experiment = preset.name;
            r.variant = variant;
            r.repetition = rep;
            r.phase = phase;
            r.wall_time_s = wall;
            r.throughput_bytes_per_s = wall > 0 ? static_cast<double>(bytes) / wall : 0.0;
            r.total_bytes = bytes;
            r.fragments = fragments;
            r.flags = flags;
            out.rows.push_back(std::move(r));
        };

        if (config.mode == RunMode::Sim) {
            const IoTrace trace = build_trace(preset, rep_seed);
            const SimResult result = simulate(cluster, pool, preset.layout, trace, rep_seed);
            for (const PhaseResult& pr : result.phases)
                push_row(pr.label, pr.wall_s, pr.bytes, pr.fragments);
        } else {
            const std::filesystem::path rep_root =
                config.root / (preset.name + "-rep" + std::to_string(rep));
            std::filesystem::create_directories(rep_root);
            StoreOptions opts;
            opts.striping_hook = config.striping_hook;
            const uint32_t workers =
                config.workers ? config.workers
                               : std::max(1u, std::thread::hardware_concurrency());

            {
                IoTrace trace;
                LogicalFile file = [&]() -> LogicalFile {
                    switch (preset.kind) {
                        case WorkloadKind::Ior: {
                            trace = build_trace(preset, rep_seed);
                            return LogicalFile::create(rep_root, "data", preset.layout, opts);
                        }
                        case WorkloadKind::Netflow: {
                            // untimed setup: materialize the flow data
                            LogicalFile f =
                                LogicalFile::create(rep_root, "data", preset.layout, opts);
                            uint64_t at = 0;
                            const NetflowSpec& spec = std::get<NetflowSpec>(preset.workload);
                            const NetflowDataResult data = gen_netflow_data(
                                spec,
                                [&](std::span<const uint8_t> bytes) {
                                    at += f.write_at(at, bytes);
                                },
                                rep_seed);
                            f.flush();
                            trace = gen_netflow_trace(spec, data.index);
                            return f;
                        }
                        case WorkloadKind::ScanRandom: {
                            // untimed setup: materialize the database
                            LogicalFile f =
                                LogicalFile::create(rep_root, "data", preset.layout, opts);
                            const ScanRandomSpec& spec =
                                std::get<ScanRandomSpec>(preset.workload);
                            const std::vector<uint8_t>& pat = pattern_buffer();
                            uint64_t at = 0;
                            while (at < spec.db_size) {
                                const uint64_t n =
                                    std::min<uint64_t>(spec.db_size - at, pat.size());
                                at += f.write_at(
                                    at, std::span<const uint8_t>(pat.data(), n));
                            }
                            f.flush();
                            trace = gen_scan_random(spec, rep_seed);
                            return f;
                        }
                    }
                    throw std::logic_error("unreachable");
                }();

                for (const IoPhase& phase : trace.phases) {
                    const PhaseTiming timing = replay_phase(file, phase, workers);
                    push_row(phase.label, timing.wall_s, timing.bytes, timing.fragments);
                }
                file.flush();
            }
            if (!config.keep_files) std::filesystem::remove_all(rep_root);
        }
    }

    out.summary = summarize(out.rows);
    if (!config.output_csv.empty()) {
        std::ofstream csv(config.output_csv, std::ios::binary | std::ios::trunc);
        if (!csv) throw std::runtime_error("cannot write " + config.output_csv.string());
        csv << to_csv(out.rows);
        csv.flush();
        if (!csv) throw std::runtime_error("write failed: " + config.output_csv.string());
    }
    out.all_completed = true;
    return out;
}

} // namespace dstripe
