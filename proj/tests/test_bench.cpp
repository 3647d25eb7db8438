#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>

#include "dstripe/bench.hpp"
#include "dstripe/rng.hpp"
#include "dstripe/util.hpp"

using namespace dstripe;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    TempDir() {
        static std::atomic<int> counter{0};
        path = fs::temp_directory_path() /
               ("dstripe-bench-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter.fetch_add(1)));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    fs::path path;
};

ExperimentPreset tiny_ior_preset() {
    ExperimentPreset p;
    p.name = "tiny-ior";
    p.description = "unit test preset";
    p.kind = WorkloadKind::Ior;
    p.layout = build_layout({Watermark{256 * KiB}},
                            {StripingConfig{2, 64 * KiB}, StripingConfig{4, 64 * KiB}});
    IorSpec spec;
    spec.num_tasks = 4;
    spec.block_size = 256 * KiB;
    spec.transfer_size = 64 * KiB;
    p.workload = spec;
    p.num_clients = 2;
    return p;
}

} // namespace

TEST_CASE("median matches a sort-based oracle for sizes 1..9") {
    Rng rng(4);
    for (size_t n = 1; n <= 9; ++n) {
        for (int iter = 0; iter < 20; ++iter) {
            std::vector<double> values;
            for (size_t i = 0; i < n; ++i)
                values.push_back(double(rng.uniform_u64(0, 1000)) / 10.0);

            std::vector<double> sorted = values;
            std::sort(sorted.begin(), sorted.end());
            const double expect =
                n % 2 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
            CHECK(median(values) == doctest::Approx(expect));
        }
    }
    CHECK(median({3, 5, 100}) == 5);  // robust to outliers, unlike the mean
    CHECK_THROWS_AS(median({}), std::invalid_argument);
}

TEST_CASE("csv round trip preserves every field") {
    std::vector<ResultRow> rows;
    ResultRow r;
    r.experiment = "IOR.1";
    r.variant = "sim";
    r.repetition = 3;
    r.phase = "read";
    r.wall_time_s = 1.2345678901;
    r.throughput_bytes_per_s = 3.2e9;
    r.total_bytes = 4294967296ULL;
    r.fragments = 4096;
    rows.push_back(r);
    r.phase = "write";
    r.flags = "hook-failed";
    rows.push_back(r);

    const std::vector<ResultRow> back = parse_csv(to_csv(rows));
    REQUIRE(back.size() == 2);
    for (size_t i = 0; i < 2; ++i) {
        CHECK(back[i].experiment == rows[i].experiment);
        CHECK(back[i].variant == rows[i].variant);
        CHECK(back[i].repetition == rows[i].repetition);
        CHECK(back[i].phase == rows[i].phase);
        CHECK(back[i].wall_time_s == doctest::Approx(rows[i].wall_time_s).epsilon(1e-12));
        CHECK(back[i].throughput_bytes_per_s ==
              doctest::Approx(rows[i].throughput_bytes_per_s).epsilon(1e-12));
        CHECK(back[i].total_bytes == rows[i].total_bytes);
        CHECK(back[i].fragments == rows[i].fragments);
        CHECK(back[i].flags == rows[i].flags);
    }
    CHECK_THROWS_AS(parse_csv("bogus\n"), std::runtime_error);
}

TEST_CASE("report computes speedup against a baseline") {
    auto row = [](const std::string& exp, double wall, double thr) {
        ResultRow r;
        r.experiment = exp;
        r.variant = "sim";
        r.repetition = 0;
        r.phase = "read";
        r.wall_time_s = wall;
        r.throughput_bytes_per_s = thr;
        r.total_bytes = 1000;
        r.fragments = 1;
        return r;
    };
    const std::vector<ResultRow> rows = {row("base", 2.0, 500.0), row("fast", 1.0, 1000.0)};

    const std::string text = report(rows, "base");
    CHECK(text.find("speedup") != std::string::npos);
    CHECK(text.find(" 1\n") != std::string::npos);  // baseline vs itself
    CHECK(text.find(" 2\n") != std::string::npos);  // t vs t/2

    CHECK_THROWS_AS(report(rows, "absent"), std::invalid_argument);
}

TEST_CASE("presets: thirty experiments with the published layouts") {
    const auto paper = experiment_presets(Scale::Paper);
    REQUIRE(paper.size() == 30);

    const ExperimentPreset ior6 = experiment_preset("IOR.6", Scale::Paper);
    REQUIRE(ior6.layout.segments.size() == 3);
    CHECK(ior6.layout.segments[1].start == 1 * TiB);
    CHECK(ior6.layout.segments[2].start == 2 * TiB);
    CHECK(ior6.layout.segments[0].config.stripe_count == 4);
    CHECK(ior6.layout.segments[1].config.stripe_count == 8);
    CHECK(ior6.layout.segments[2].config.stripe_count == 16);

    const ExperimentPreset blast1 = experiment_preset("blast.1", Scale::Paper);
    REQUIRE(blast1.layout.segments.size() == 1);
    CHECK(blast1.layout.segments[0].config.stripe_count == 4);
    CHECK(blast1.layout.segments[0].config.stripe_width == 1 * MiB);

    const ExperimentPreset nf6 = experiment_preset("netflow.6", Scale::Desk);
    REQUIRE(nf6.layout.segments.size() == 3);
    CHECK(nf6.layout.segments[1].start == 10 * MiB);
    CHECK(nf6.layout.segments[2].start == 20 * MiB);

    CHECK_THROWS_AS(experiment_preset("IOR.7", Scale::Desk), std::invalid_argument);
}

TEST_CASE("desk netflow preset is sized near seventy thousand records") {
    const ExperimentPreset preset = experiment_preset("netflow.1", Scale::Desk);
    const NetflowSpec& spec = std::get<NetflowSpec>(preset.workload);
    const NetflowIndex index = gen_netflow_index(spec, 1);
    CHECK(index.entries.size() > 60000);
    CHECK(index.entries.size() < 80000);
}

TEST_CASE("sweep runs named presets in order and rejects unknown names") {
    const ClusterModel cluster = default_cluster();
    const OstPool pool = make_rr_pool(cluster.num_oss, cluster.osts_per_oss);

    CHECK(sweep(cluster, pool, {}, Scale::Desk, 1).empty());
    CHECK_THROWS_AS(sweep(cluster, pool, {"IOR.99"}, Scale::Desk, 1),
                    std::invalid_argument);

    const auto results = sweep(cluster, pool, {"IOR.1", "IOR.2"}, Scale::Desk, 1);
    REQUIRE(results.size() == 2);
    CHECK(results[0].first == "IOR.1");
    CHECK(results[1].first == "IOR.2");
    for (const auto& [name, result] : results) {
        REQUIRE(result.phases.size() == 2);
        CHECK(result.phases[0].bytes == 4 * GiB);
    }

    const auto again = sweep(cluster, pool, {"IOR.1"}, Scale::Desk, 1);
    CHECK(again[0].second.phases[0].wall_s == results[0].second.phases[0].wall_s);
    CHECK(again[0].second.ost_bytes == results[0].second.ost_bytes);
}

TEST_CASE("sim run: row arithmetic, summary shape, determinism") {
    TempDir tmp;
    ExperimentConfig cfg;
    cfg.inline_experiment = tiny_ior_preset();
    cfg.mode = RunMode::Sim;
    cfg.repetitions = 5;
    cfg.seed = 11;
    cfg.output_csv = tmp.path / "a.csv";

    const RunOutput out = run(cfg);
    CHECK(out.all_completed);
    CHECK(out.rows.size() == 10);  // 2 phases x 5 reps
    CHECK(out.summary.size() == 2);
    for (const ResultRow& r : out.rows) {
        CHECK(r.total_bytes == 4 * 256 * KiB);
        CHECK(r.throughput_bytes_per_s ==
              doctest::Approx(double(r.total_bytes) / r.wall_time_s).epsilon(1e-9));
    }

    cfg.output_csv = tmp.path / "b.csv";
    const RunOutput again = run(cfg);
    std::ifstream fa(tmp.path / "a.csv", std::ios::binary);
    std::ifstream fb(tmp.path / "b.csv", std::ios::binary);
    const std::string bytes_a((std::istreambuf_iterator<char>(fa)), {});
    const std::string bytes_b((std::istreambuf_iterator<char>(fb)), {});
    CHECK(bytes_a == bytes_b);
    CHECK(!bytes_a.empty());

    // single repetition: median equals the observation
    cfg.repetitions = 1;
    cfg.output_csv.clear();
    const RunOutput single = run(cfg);
    REQUIRE(single.summary.size() == 2);
    CHECK(single.summary[0].median_wall_s == single.rows[0].wall_time_s);
}

TEST_CASE("file run: ior round trip on a real filesystem") {
    TempDir tmp;
    ExperimentConfig cfg;
    cfg.inline_experiment = tiny_ior_preset();
    cfg.mode = RunMode::File;
    cfg.root = tmp.path;
    cfg.repetitions = 2;
    cfg.workers = 4;
    cfg.cache_drop_hook = "true";

    const RunOutput out = run(cfg);
    CHECK(out.all_completed);
    CHECK(!out.hook_warning);
    CHECK(out.rows.size() == 4);
    for (const ResultRow& r : out.rows) {
        CHECK(r.total_bytes == 4 * 256 * KiB);
        CHECK(r.wall_time_s > 0.0);
        CHECK(r.flags.empty());
    }
    // per-rep data removed by default
    CHECK(!fs::exists(tmp.path / "tiny-ior-rep0"));
}

TEST_CASE("file run: failing cache-drop hook flags later repetitions") {
    TempDir tmp;
    ExperimentConfig cfg;
    cfg.inline_experiment = tiny_ior_preset();
    cfg.mode = RunMode::File;
    cfg.root = tmp.path;
    cfg.repetitions = 2;
    cfg.cache_drop_hook = "exit 7";

    const RunOutput out = run(cfg);
    CHECK(out.all_completed);
    CHECK(out.hook_warning);
    for (const ResultRow& r : out.rows) {
        if (r.repetition == 0)
            CHECK(r.flags.empty());
        else
            CHECK(r.flags == "hook-failed");
    }
}

TEST_CASE("file run: netflow data materializes and replays") {
    TempDir tmp;
    ExperimentPreset p;
    p.name = "tiny-netflow";
    p.kind = WorkloadKind::Netflow;
    p.layout = build_layout({Watermark{128 * KiB}},
                            {StripingConfig{2, 32 * KiB}, StripingConfig{4, 32 * KiB}});
    NetflowSpec spec;
    spec.total_bytes = 512 * KiB;
    spec.num_tasks = 4;
    spec.num_models = 8;
    spec.seq_read_size = 64 * KiB;
    p.workload = spec;
    p.num_clients = 2;

    ExperimentConfig cfg;
    cfg.inline_experiment = p;
    cfg.mode = RunMode::File;
    cfg.root = tmp.path;
    cfg.keep_files = true;

    const RunOutput out = run(cfg);
    REQUIRE(out.rows.size() == 2);
    CHECK(out.rows[0].phase == "phase1");
    CHECK(out.rows[1].phase == "phase2");
    CHECK(out.rows[0].total_bytes == out.rows[1].total_bytes);  // every record re-read
    CHECK(out.rows[0].total_bytes > 500 * KiB);
    CHECK(fs::exists(tmp.path / "tiny-netflow-rep0" / "data.manifest"));
}

TEST_CASE("config validation") {
    ExperimentConfig cfg;
    CHECK_THROWS_AS(run(cfg), std::invalid_argument);  // no experiment
    cfg.experiment = "IOR.1";
    cfg.repetitions = 0;
    CHECK_THROWS_AS(run(cfg), std::invalid_argument);
    cfg.repetitions = 1;
    cfg.mode = RunMode::File;  // no root
    CHECK_THROWS_AS(run(cfg), std::invalid_argument);
    cfg.mode = RunMode::Sim;
    cfg.async_variant = true;  // ior has no async variant
    CHECK_THROWS_AS(run(cfg), std::invalid_argument);
}
