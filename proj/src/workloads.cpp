#include "dstripe/workloads.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "dstripe/rng.hpp"

namespace dstripe {

void LengthDist::validate() const {
    if (min < 1) throw std::invalid_argument("LengthDist: min must be >= 1");
    if (max < min) throw std::invalid_argument("LengthDist: max < min");
}

uint64_t LengthDist::sample(Rng& rng) const {
    if (shape == DistShape::Fixed) return min;
    return rng.uniform_u64(min, max);
}

// ---------------------------------------------------------------------- IOR

void IorSpec::validate() const {
    if (num_tasks < 1) throw std::invalid_argument("IorSpec: num_tasks must be >= 1");
    if (block_size < 1) throw std::invalid_argument("IorSpec: block_size must be >= 1");
    if (transfer_size < 1) throw std::invalid_argument("IorSpec: transfer_size must be >= 1");
    if (block_size % transfer_size != 0)
        throw std::invalid_argument("IorSpec: block_size must be a multiple of transfer_size");
    if (!do_write && !do_read)
        throw std::invalid_argument("IorSpec: nothing to do");
}

IoTrace gen_ior(const IorSpec& spec) {
    spec.validate();
    const uint64_t ops_per_task = spec.block_size / spec.transfer_size;

    auto make_phase = [&](IoKind kind, const char* label) {
        IoPhase phase;
        phase.label = label;
        phase.mode = PhaseMode::StaticAssign;
        phase.ops.reserve(spec.num_tasks * ops_per_task);
        for (uint32_t t = 0; t < spec.num_tasks; ++t) {
            const uint64_t base = uint64_t(t) * spec.block_size;
            for (uint64_t k = 0; k < ops_per_task; ++k)
                phase.ops.push_back(
                    IoOp{t, kind, base + k * spec.transfer_size, spec.transfer_size});
        }
        return phase;
    };

    IoTrace trace;
    trace.workload = "ior";
    trace.variant = "sync";
    if (spec.do_write) trace.phases.push_back(make_phase(IoKind::Write, "write"));
    if (spec.do_read) trace.phases.push_back(make_phase(IoKind::Read, "read"));
    return trace;
}

// ------------------------------------------------------------------ netflow

void NetflowSpec::validate() const {
    if (num_tasks < 1) throw std::invalid_argument("NetflowSpec: num_tasks must be >= 1");
    record_length.validate();
    if (record_length.min < kNetflowHeaderBytes)
        throw std::invalid_argument("NetflowSpec: record length below header size");
    if (record_length.max > kNetflowMaxRecordBytes)
        throw std::invalid_argument("NetflowSpec: record length exceeds u16 length field");
    if (variant == NetflowVariant::Async && async_chunk_size < 1)
        throw std::invalid_argument("NetflowSpec: async variant requires async_chunk_size > 0");
    if (num_models < 1) throw std::invalid_argument("NetflowSpec: num_models must be >= 1");
    if (num_models > (1u << 24))
        throw std::invalid_argument("NetflowSpec: num_models exceeds 10.0.0.0/8 model space");
    if (seq_read_size < 1) throw std::invalid_argument("NetflowSpec: seq_read_size must be >= 1");
}

namespace {

struct ZipfSampler {
    std::vector<double> cumulative;
    explicit ZipfSampler(uint32_t n) {
        cumulative.resize(n);
        double sum = 0.0;
        for (uint32_t k = 0; k < n; ++k) {
            sum += 1.0 / static_cast<double>(k + 1);
            cumulative[k] = sum;
        }
    }
    uint32_t sample(Rng& rng) const {
        const double u = rng.uniform01() * cumulative.back();
        const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
        return static_cast<uint32_t>(it - cumulative.begin());
    }
};

// Single source of truth for the record schedule. The rng draw sequence is
// identical whether or not bytes are emitted, so gen_netflow_index and
// gen_netflow_data agree record for record.
NetflowDataResult generate_records(const NetflowSpec& spec, const ByteSink* sink,
                                   uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    ZipfSampler zipf(spec.model_assignment == ModelAssign::Zipf ? spec.num_models : 1);

    NetflowDataResult result;
    std::vector<uint8_t> buf;
    uint64_t offset = 0;
    uint64_t t_clock = 1700000000ULL * 1000000000ULL;  // arbitrary epoch ns

    while (true) {
        const uint64_t len = spec.record_length.sample(rng);
        if (offset + len > spec.total_bytes) break;  // never truncate a record

        const uint32_t model = spec.model_assignment == ModelAssign::Zipf
                                   ? zipf.sample(rng)
                                   : static_cast<uint32_t>(rng.uniform_u64(0, spec.num_models - 1));
        const uint64_t r1 = rng.next();
        const uint64_t r2 = rng.next();
        const uint64_t payload_seed = rng.next();

        NetflowRecord rec;
        rec.total_length = static_cast<uint16_t>(len);
        rec.src_ip = 0x0A000000u | model;  // one internal 10/8 address per model
        rec.dst_ip = static_cast<uint32_t>(r1);
        rec.src_port = static_cast<uint16_t>(r1 >> 32);
        rec.dst_port = static_cast<uint16_t>(r1 >> 48);
        rec.start_time = t_clock;
        rec.end_time = t_clock + (r2 & 0xffffffffULL);
        rec.byte_count = (r2 >> 32) & 0xffffff;
        rec.packet_count = 1 + (rec.byte_count / 1400);
        t_clock += (r2 & 0xffff) + 1;

        if (sink) {
            buf.resize(len);
            encode_netflow_header(rec, buf);
            Rng payload(payload_seed);
            for (uint64_t i = kNetflowHeaderBytes; i < len; i += 8) {
                const uint64_t v = payload.next();
                for (uint64_t j = 0; j < 8 && i + j < len; ++j)
                    buf[i + j] = static_cast<uint8_t>(v >> (8 * j));
            }
            (*sink)(buf);
        }

        result.index.entries.push_back(
            NetflowIndexEntry{offset, static_cast<uint32_t>(len), rec.src_ip});
        offset += len;
        ++result.record_count;
    }
    result.index.data_bytes = offset;
    return result;
}

// contiguous near-equal partition of `total` items over `parts`
std::vector<std::pair<uint64_t, uint64_t>> even_partition(uint64_t total, uint32_t parts) {
    std::vector<std::pair<uint64_t, uint64_t>> out;
    const uint64_t base = total / parts;
    const uint64_t rem = total % parts;
    uint64_t at = 0;
    for (uint32_t t = 0; t < parts; ++t) {
        const uint64_t n = base + (t < rem ? 1 : 0);
        out.emplace_back(at, n);
        at += n;
    }
    return out;
}

void append_span_reads(IoPhase& phase, uint32_t task, uint64_t start, uint64_t length,
                       uint64_t op_size) {
    uint64_t pos = start;
    uint64_t remaining = length;
    while (remaining > 0) {
        const uint64_t take = std::min(remaining, op_size);
        phase.ops.push_back(IoOp{task, IoKind::Read, pos, take});
        pos += take;
        remaining -= take;
    }
}

} // namespace

NetflowIndex gen_netflow_index(const NetflowSpec& spec, uint64_t seed) {
    return generate_records(spec, nullptr, seed).index;
}

NetflowDataResult gen_netflow_data(const NetflowSpec& spec, const ByteSink& sink,
                                   uint64_t seed) {
    if (!sink) throw std::invalid_argument("gen_netflow_data: sink required");
    return generate_records(spec, &sink, seed);
}

IoTrace gen_netflow_trace(const NetflowSpec& spec, const NetflowIndex& index) {
    spec.validate();
    if (index.entries.empty())
        throw std::invalid_argument("gen_netflow_trace: empty index");

    const bool async = spec.variant == NetflowVariant::Async;
    IoTrace trace;
    trace.workload = "netflow";
    trace.variant = async ? "async" : "sync";

    // phase 1: sequential scan of the whole data file
    IoPhase phase1;
    phase1.label = "phase1";
    if (!async) {
        phase1.mode = PhaseMode::StaticAssign;
        uint32_t task = 0;
        for (const auto& [at, n] : even_partition(index.data_bytes, spec.num_tasks)) {
            if (n > 0) append_span_reads(phase1, task, at, n, spec.seq_read_size);
            ++task;
        }
    } else {
        phase1.mode = PhaseMode::WorkQueue;
        phase1.num_workers = spec.num_tasks;
        uint32_t unit = 0;
        for (uint64_t at = 0; at < index.data_bytes; at += spec.async_chunk_size) {
            const uint64_t n = std::min(spec.async_chunk_size, index.data_bytes - at);
            append_span_reads(phase1, unit, at, n, spec.seq_read_size);
            ++unit;
        }
    }
    trace.phases.push_back(std::move(phase1));

    // phase 2: every record re-read once, grouped into per-address models
    std::map<uint32_t, std::vector<const NetflowIndexEntry*>> models;
    for (const NetflowIndexEntry& e : index.entries) models[e.flow_key].push_back(&e);

    IoPhase phase2;
    phase2.label = "phase2";
    if (!async) {
        phase2.mode = PhaseMode::StaticAssign;
        std::vector<const NetflowIndexEntry*> flat;
        flat.reserve(index.entries.size());
        for (const auto& [key, entries] : models)
            flat.insert(flat.end(), entries.begin(), entries.end());
        uint32_t task = 0;
        for (const auto& [at, n] : even_partition(flat.size(), spec.num_tasks)) {
            for (uint64_t i = 0; i < n; ++i) {
                const NetflowIndexEntry* e = flat[at + i];
                phase2.ops.push_back(IoOp{task, IoKind::Read, e->offset, e->length});
            }
            ++task;
        }
    } else {
        phase2.mode = PhaseMode::WorkQueue;
        phase2.num_workers = spec.num_tasks;
        uint32_t unit = 0;
        for (const auto& [key, entries] : models) {
            for (const NetflowIndexEntry* e : entries)
                phase2.ops.push_back(IoOp{unit, IoKind::Read, e->offset, e->length});
            ++unit;
        }
    }
    trace.phases.push_back(std::move(phase2));
    return trace;
}

// -------------------------------------------------------------- scan+random

void ScanRandomSpec::validate() const {
    if (db_size < 1) throw std::invalid_argument("ScanRandomSpec: db_size must be >= 1");
    if (num_tasks < 1) throw std::invalid_argument("ScanRandomSpec: num_tasks must be >= 1");
    if (scan_chunk < 1) throw std::invalid_argument("ScanRandomSpec: scan_chunk must be >= 1");
    random_read_size.validate();
    if (hit_locality.shape == LocalityShape::Hotspot) {
        if (hit_locality.hot_fraction < 0.0 || hit_locality.hot_fraction > 1.0 ||
            hit_locality.hot_portion <= 0.0 || hit_locality.hot_portion > 1.0)
            throw std::invalid_argument("ScanRandomSpec: bad hotspot parameters");
    }
}

IoTrace gen_scan_random(const ScanRandomSpec& spec, uint64_t seed) {
    spec.validate();
    Rng rng(seed);

    IoTrace trace;
    trace.workload = "scan_random";
    trace.variant = "sync";

    IoPhase scan;
    scan.label = "scan";
    scan.mode = PhaseMode::StaticAssign;
    uint32_t task = 0;
    for (const auto& [at, n] : even_partition(spec.db_size, spec.num_tasks)) {
        if (n > 0) append_span_reads(scan, task, at, n, spec.scan_chunk);
        ++task;
    }
    trace.phases.push_back(std::move(scan));

    IoPhase random;
    random.label = "random";
    random.mode = PhaseMode::StaticAssign;
    random.ops.reserve(spec.num_random_reads);
    task = 0;
    for (const auto& [at, n] : even_partition(spec.num_random_reads, spec.num_tasks)) {
        (void)at;
        for (uint64_t i = 0; i < n; ++i) {
            const uint64_t size = std::min(spec.random_read_size.sample(rng), spec.db_size);
            uint64_t offset;
            if (spec.hit_locality.shape == LocalityShape::Hotspot &&
                rng.uniform01() < spec.hit_locality.hot_fraction) {
                uint64_t hot_end = static_cast<uint64_t>(
                    static_cast<double>(spec.db_size) * spec.hit_locality.hot_portion);
                hot_end = std::max(hot_end, size);
                offset = rng.uniform_u64(0, hot_end - size);
            } else {
                offset = rng.uniform_u64(0, spec.db_size - size);
            }
            random.ops.push_back(IoOp{task, IoKind::Read, offset, size});
        }
        ++task;
    }
    if (!random.ops.empty()) trace.phases.push_back(std::move(random));
    return trace;
}

} // namespace dstripe
