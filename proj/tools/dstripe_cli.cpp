// dstripe: benchmark and tooling front end for watermark-based dynamic
// striping. Subcommands: list-presets, run, report, import-split,
// export-merge, verify.

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dstripe/bench.hpp"
#include "dstripe/segment_store.hpp"
#include "dstripe/util.hpp"

namespace fs = std::filesystem;
using namespace dstripe;

namespace {

Scale parse_scale(const std::string& s) {
    if (s == "desk") return Scale::Desk;
    if (s == "paper") return Scale::Paper;
    throw CLI::ValidationError("--scale must be 'desk' or 'paper'");
}

CompositeLayout layout_from_flags(const std::string& preset_name,
                                  const std::string& watermarks,
                                  const std::string& types, Scale scale) {
    if (!preset_name.empty())
        return experiment_preset(preset_name, scale).layout;
    if (types.empty())
        throw CLI::ValidationError("provide --preset or --types (with optional --watermarks)");
    std::vector<Watermark> wms;
    if (!watermarks.empty()) {
        std::istringstream in(watermarks);
        std::string tok;
        while (std::getline(in, tok, ','))
            wms.push_back(Watermark{parse_size(tok)});
    }
    return build_layout_from_types(wms, types);
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int cmd_list_presets(Scale scale) {
    printf("%-12s %-12s %-10s %s\n", "name", "workload", "clients", "striping pattern");
    for (const ExperimentPreset& p : experiment_presets(scale)) {
        const char* kind = p.kind == WorkloadKind::Ior        ? "ior"
                           : p.kind == WorkloadKind::Netflow  ? "netflow"
                                                              : "scan-random";
        std::ostringstream segs;
        for (size_t i = 0; i < p.layout.segments.size(); ++i) {
            const SegmentSpec& s = p.layout.segments[i];
            if (i) segs << " | ";
            segs << s.dir_label << " [" << format_size_human(s.start) << ", "
                 << (s.end ? format_size_human(*s.end) : std::string("end")) << ")";
        }
        printf("%-12s %-12s %-10u %s\n", p.name.c_str(), kind, p.num_clients,
               segs.str().c_str());
    }
    return 0;
}

int cmd_verify(const fs::path& root, const std::string& name, const fs::path& source) {
    int failures = 0;
    auto check = [&](bool ok, const std::string& what) {
        printf("%s  %s\n", ok ? "PASS" : "FAIL", what.c_str());
        if (!ok) ++failures;
    };

    LogicalFile file = LogicalFile::open(root, name);
    check(true, "manifest parses: " + file.manifest_path().string());

    const uint64_t size = file.logical_size();
    const CompositeLayout& layout = file.layout();
    for (size_t i = 0; i < layout.segments.size(); ++i) {
        const SegmentSpec& seg = layout.segments[i];
        if (seg.start >= size) break;
        const fs::path p = file.segment_path(i);
        const bool exists = fs::exists(p);
        check(exists, "segment file present: " + p.string());
        if (!exists) continue;
        const uint64_t span_end = seg.end ? std::min(*seg.end, size) : size;
        const uint64_t span = span_end - seg.start;
        const uint64_t on_disk = fs::file_size(p);
        check(on_disk <= span, "segment file within span (" + std::to_string(on_disk) +
                                   " <= " + std::to_string(span) + "): " + p.string());
    }

    if (!source.empty()) {
        const fs::path merged = fs::temp_directory_path() /
                                ("dstripe-verify-" + std::to_string(::getpid()) + ".bin");
        export_merge(file, merged);
        const bool same = fnv1a64_file(merged) == fnv1a64_file(source) &&
                          fs::file_size(merged) == fs::file_size(source);
        fs::remove(merged);
        check(same, "merged content matches " + source.string());
    }

    printf("%s\n", failures == 0 ? "verify: OK" : "verify: FAILED");
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"watermark-based dynamic striping benchmark toolkit"};
    app.require_subcommand(1);

    std::string scale_str = "desk";

    // ---- list-presets
    auto* list = app.add_subcommand("list-presets", "show the experiment matrix");
    list->add_option("--scale", scale_str, "desk|paper")->capture_default_str();

    // ---- run
    auto* run_cmd = app.add_subcommand("run", "execute one experiment preset");
    ExperimentConfig cfg;
    std::string mode_str = "sim";
    std::string run_scale = "desk";
    run_cmd->add_option("--preset", cfg.experiment, "experiment name, see list-presets")
        ->required();
    run_cmd->add_option("--mode", mode_str, "sim|file")->capture_default_str();
    run_cmd->add_option("--reps", cfg.repetitions, "repetitions")->capture_default_str();
    run_cmd->add_option("--seed", cfg.seed, "base seed")->capture_default_str();
    run_cmd->add_option("--scale", run_scale, "desk|paper")->capture_default_str();
    run_cmd->add_option("--cluster", cfg.cluster_config, "cluster model json (sim mode)");
    run_cmd->add_option("--root", cfg.root, "store root directory (file mode)");
    run_cmd->add_option("--hook", cfg.cache_drop_hook,
                        "command run between repetitions (file mode, e.g. cache drop)");
    run_cmd->add_option("--striping-hook", cfg.striping_hook,
                        "command template run per created segment directory; "
                        "placeholders {dir} {stripe_count} {stripe_width}");
    run_cmd->add_option("--out", cfg.output_csv, "detail CSV output path");
    run_cmd->add_option("--workers", cfg.workers, "file-mode worker threads (0 = auto)");
    run_cmd->add_flag("--async", cfg.async_variant, "netflow: async task assignment");
    run_cmd->add_flag("--keep", cfg.keep_files, "file mode: keep per-rep data");

    // ---- report
    auto* rep_cmd = app.add_subcommand("report", "summarize a detail CSV");
    fs::path report_in;
    std::string baseline;
    rep_cmd->add_option("--in", report_in, "detail CSV from 'run --out'")->required();
    rep_cmd->add_option("--baseline", baseline, "experiment for the speedup column");

    // ---- import-split
    auto* imp = app.add_subcommand("import-split",
                                   "split a flat file into striped segment files");
    fs::path imp_source, imp_root;
    std::string imp_name, imp_preset, imp_watermarks, imp_types, imp_hook;
    std::string imp_scale = "desk";
    imp->add_option("--source", imp_source, "input file")->required();
    imp->add_option("--root", imp_root, "store root directory")->required();
    imp->add_option("--name", imp_name, "logical file name")->required();
    imp->add_option("--preset", imp_preset, "take the layout from this preset");
    imp->add_option("--watermarks", imp_watermarks, "comma-separated sizes, e.g. 1MiB,10MiB");
    imp->add_option("--types", imp_types, "directory type letters, e.g. ABC");
    imp->add_option("--striping-hook", imp_hook, "see run --striping-hook");
    imp->add_option("--scale", imp_scale, "desk|paper (with --preset)")->capture_default_str();

    // ---- export-merge
    auto* exp = app.add_subcommand("export-merge",
                                   "concatenate segment files back into a flat file");
    fs::path exp_root, exp_dest;
    std::string exp_name;
    exp->add_option("--root", exp_root, "store root directory")->required();
    exp->add_option("--name", exp_name, "logical file name")->required();
    exp->add_option("--dest", exp_dest, "output file")->required();

    // ---- verify
    auto* ver = app.add_subcommand("verify", "check a logical file's on-disk state");
    fs::path ver_root, ver_source;
    std::string ver_name;
    ver->add_option("--root", ver_root, "store root directory")->required();
    ver->add_option("--name", ver_name, "logical file name")->required();
    ver->add_option("--source", ver_source, "original file to compare against");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) return cmd_list_presets(parse_scale(scale_str));

        if (run_cmd->parsed()) {
            cfg.mode = mode_str == "file" ? RunMode::File : RunMode::Sim;
            if (mode_str != "sim" && mode_str != "file")
                throw std::invalid_argument("--mode must be 'sim' or 'file'");
            cfg.scale = parse_scale(run_scale);
            const RunOutput out = run(cfg);
            std::cout << render_summary(out.summary);
            if (out.hook_warning)
                std::cerr << "warning: cache-drop hook failed during the run "
                             "(rows flagged hook-failed)\n";
            if (!cfg.output_csv.empty())
                std::cout << "detail rows written to " << cfg.output_csv.string() << "\n";
            return out.all_completed ? 0 : 1;
        }

        if (rep_cmd->parsed()) {
            const auto rows = parse_csv(read_text_file(report_in));
            std::cout << report(rows, baseline);
            return 0;
        }

        if (imp->parsed()) {
            const CompositeLayout layout =
                layout_from_flags(imp_preset, imp_watermarks, imp_types, parse_scale(imp_scale));
            StoreOptions opts;
            opts.striping_hook = imp_hook;
            LogicalFile f = import_split(imp_source, imp_root, imp_name, layout, opts);
            std::cout << "imported " << format_size_human(f.logical_size()) << " into "
                      << f.layout().segments.size() << " segment(s) under "
                      << imp_root.string() << "\n";
            return 0;
        }

        if (exp->parsed()) {
            const LogicalFile f = LogicalFile::open(exp_root, exp_name);
            export_merge(f, exp_dest);
            std::cout << "merged " << format_size_human(f.logical_size()) << " into "
                      << exp_dest.string() << "\n";
            return 0;
        }

        if (ver->parsed()) return cmd_verify(ver_root, ver_name, ver_source);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
