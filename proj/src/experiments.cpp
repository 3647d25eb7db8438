#include "dstripe/experiments.hpp"

#include <sstream>
#include <stdexcept>

#include "dstripe/rng.hpp"
#include "dstripe/util.hpp"

namespace dstripe {

namespace {

struct LayoutRow {
    const char* name;
    const char* letters;          // one directory type per segment
    uint64_t w1, w2;              // paper-scale watermark bytes; 0 = none
};

// Striping matrices of the three experiment families. Watermarks are at
// paper scale; desk scale divides them by 1024.
constexpr uint64_t kIorW1 = 1 * TiB;
constexpr uint64_t kIorW2 = 2 * TiB;

const LayoutRow kIorRows[] = {
    {"IOR.1", "A", 0, 0},
    {"IOR.2", "B", 0, 0},
    {"IOR.3", "C", 0, 0},
    {"IOR.4", "AB", kIorW1, 0},
    {"IOR.5", "AC", kIorW1, 0},
    {"IOR.6", "ABC", kIorW1, kIorW2},
};

const LayoutRow kNetflowRows[] = {
    {"netflow.1", "A", 0, 0},
    {"netflow.2", "B", 0, 0},
    {"netflow.3", "C", 0, 0},
    {"netflow.4", "AB", 10 * GiB, 0},
    {"netflow.5", "AC", 10 * GiB, 0},
    {"netflow.6", "ABC", 10 * GiB, 20 * GiB},
};

const LayoutRow kBlastRows[] = {
    {"blast.1", "A", 0, 0},
    {"blast.2", "C", 0, 0},
    {"blast.3", "D", 0, 0},
    {"blast.4", "E", 0, 0},
    {"blast.5", "F", 0, 0},
    {"blast.6", "G", 0, 0},
    {"blast.7", "H", 0, 0},
    {"blast.8", "I", 0, 0},
    {"blast.9", "J", 0, 0},
    {"blast.10", "AEH", 26 * GiB, 52 * GiB},
    {"blast.11", "CFI", 26 * GiB, 52 * GiB},
    {"blast.12", "DGJ", 26 * GiB, 52 * GiB},
    {"blast.13", "ACD", 26 * GiB, 52 * GiB},
    {"blast.14", "EFG", 26 * GiB, 52 * GiB},
    {"blast.15", "HIJ", 26 * GiB, 52 * GiB},
    {"blast.16", "AFJ", 26 * GiB, 52 * GiB},
    {"blast.17", "AFJ", 20 * GiB, 40 * GiB},
    {"blast.18", "AFJ", 8 * GiB, 28 * GiB},
};

uint64_t scaled(uint64_t paper_bytes, Scale scale) {
    return scale == Scale::Paper ? paper_bytes : paper_bytes / 1024;
}

CompositeLayout layout_from_row(const LayoutRow& row, Scale scale) {
    std::vector<Watermark> wms;
    if (row.w1) wms.push_back(Watermark{scaled(row.w1, scale)});
    if (row.w2) wms.push_back(Watermark{scaled(row.w2, scale)});
    return build_layout_from_types(wms, row.letters);
}

std::string describe_row(const LayoutRow& row) {
    std::ostringstream os;
    const std::string letters = row.letters;
    if (letters.size() == 1) {
        os << "Entire file in " << letters;
        return os.str();
    }
    auto human = [](uint64_t b) {
        if (b % TiB == 0) return std::to_string(b / TiB) + "tb";
        return std::to_string(b / GiB) + "gb";
    };
    os << "0-" << human(row.w1) << " in " << letters[0];
    if (letters.size() == 3)
        os << ", " << human(row.w1) << "-" << human(row.w2) << " in " << letters[1];
    os << ", remainder in " << letters.back();
    return os.str();
}

IorSpec ior_spec(Scale scale) {
    IorSpec s;
    s.num_tasks = 64;
    s.block_size = scaled(64 * GiB, scale);  // 64 tasks -> 4 TiB (paper) / 4 GiB (desk)
    s.transfer_size = 1 * MiB;
    return s;
}

NetflowSpec netflow_spec(Scale scale) {
    NetflowSpec s;
    s.total_bytes = scaled(55 * GiB, scale);
    // mean record 824 bytes: 55 GiB of flows is roughly 70 million records
    // at paper scale and roughly 70 thousand at desk scale
    s.record_length = LengthDist{DistShape::Uniform, 256, 1392};
    s.num_tasks = 128;
    s.variant = NetflowVariant::Sync;
    s.async_chunk_size = scaled(256 * MiB, scale);
    s.num_models = scale == Scale::Paper ? 8192 : 256;
    s.seq_read_size = 4 * MiB;
    return s;
}

ScanRandomSpec blast_spec(Scale scale) {
    ScanRandomSpec s;
    s.db_size = scaled(79 * GiB, scale);  // 79 nucleotide fragments of <= 1 GiB
    s.num_tasks = 64;
    s.scan_chunk = scale == Scale::Paper ? 4 * MiB : 1 * MiB;
    s.num_random_reads = scale == Scale::Paper ? 16777216 : 16384;
    s.random_read_size = LengthDist{DistShape::Uniform, 4 * KiB, 64 * KiB};
    s.hit_locality = HitLocality{LocalityShape::Uniform, 0.0, 0.0};
    return s;
}

} // namespace

std::vector<ExperimentPreset> experiment_presets(Scale scale) {
    std::vector<ExperimentPreset> out;
    for (const LayoutRow& row : kIorRows) {
        ExperimentPreset p;
        p.name = row.name;
        p.description = describe_row(row);
        p.kind = WorkloadKind::Ior;
        p.layout = layout_from_row(row, scale);
        p.workload = ior_spec(scale);
        p.num_clients = 16;
        out.push_back(std::move(p));
    }
    for (const LayoutRow& row : kNetflowRows) {
        ExperimentPreset p;
        p.name = row.name;
        p.description = describe_row(row);
        p.kind = WorkloadKind::Netflow;
        p.layout = layout_from_row(row, scale);
        p.workload = netflow_spec(scale);
        p.num_clients = 16;
        out.push_back(std::move(p));
    }
    for (const LayoutRow& row : kBlastRows) {
        ExperimentPreset p;
        p.name = row.name;
        p.description = describe_row(row);
        p.kind = WorkloadKind::ScanRandom;
        p.layout = layout_from_row(row, scale);
        p.workload = blast_spec(scale);
        p.num_clients = 8;
        out.push_back(std::move(p));
    }
    return out;
}

ExperimentPreset experiment_preset(const std::string& name, Scale scale) {
    for (ExperimentPreset& p : experiment_presets(scale))
        if (p.name == name) return std::move(p);
    throw std::invalid_argument("unknown experiment preset: " + name);
}

IoTrace build_trace(const ExperimentPreset& preset, uint64_t seed) {
    switch (preset.kind) {
        case WorkloadKind::Ior:
            return gen_ior(std::get<IorSpec>(preset.workload));
        case WorkloadKind::Netflow: {
            const NetflowSpec& spec = std::get<NetflowSpec>(preset.workload);
            const NetflowIndex index = gen_netflow_index(spec, seed);
            return gen_netflow_trace(spec, index);
        }
        case WorkloadKind::ScanRandom:
            return gen_scan_random(std::get<ScanRandomSpec>(preset.workload), seed);
    }
    throw std::logic_error("unreachable");
}

std::vector<std::pair<std::string, SimResult>> sweep(const ClusterModel& cluster,
                                                     const OstPool& pool,
                                                     const std::vector<std::string>& names,
                                                     Scale scale, uint64_t seed) {
    std::vector<std::pair<std::string, SimResult>> out;
    out.reserve(names.size());
    for (const std::string& name : names) {
        const ExperimentPreset preset = experiment_preset(name, scale);
        ClusterModel effective = cluster;
        effective.num_clients = preset.num_clients;
        const IoTrace trace = build_trace(preset, seed);
        out.emplace_back(name, simulate(effective, pool, preset.layout, trace, seed));
    }
    return out;
}

} // namespace dstripe
