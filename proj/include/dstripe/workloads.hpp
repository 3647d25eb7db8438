#ifndef DSTRIPE_WORKLOADS_HPP
#define DSTRIPE_WORKLOADS_HPP

#include <cstdint>
#include <functional>
#include <span>

#include "dstripe/io_trace.hpp"
#include "dstripe/netflow.hpp"
#include "dstripe/util.hpp"

namespace dstripe {

enum class DistShape : uint8_t { Fixed, Uniform };

// Closed interval [min, max]; Fixed always yields min.
struct LengthDist {
    DistShape shape = DistShape::Uniform;
    uint64_t min = 0;
    uint64_t max = 0;

    void validate() const;
    uint64_t sample(class Rng& rng) const;
};

enum class LocalityShape : uint8_t { Uniform, Hotspot };

// Where random reads land. Hotspot sends hot_fraction of the reads into the
// first hot_portion of the file.
struct HitLocality {
    LocalityShape shape = LocalityShape::Uniform;
    double hot_fraction = 0.9;
    double hot_portion = 0.1;
};

// Coordinated parallel write-then-read: task t owns the contiguous block
// [t*block_size, (t+1)*block_size) and moves through it in transfer_size
// ops.
struct IorSpec {
    uint32_t num_tasks = 1;
    uint64_t block_size = 0;
    uint64_t transfer_size = 1 * MiB;
    bool do_write = true;
    bool do_read = true;

    uint64_t total_file_size() const { return uint64_t(num_tasks) * block_size; }
    void validate() const;
};

IoTrace gen_ior(const IorSpec& spec);

enum class NetflowVariant : uint8_t { Sync, Async };
enum class ModelAssign : uint8_t { Uniform, Zipf };

// Two-phase flow analysis: phase 1 scans and indexes the data file with
// large sequential reads, phase 2 re-reads every record (grouped into one
// model per internal address) with small unaligned reads.
//
// Sync: phase 1 splits the file into num_tasks equal spans and phase 2
// deals each task a near-equal share of the record offsets. Async: phase 1
// hands out async_chunk_size spans from a queue and phase 2 hands out one
// model's offsets at a time, num_tasks workers drawing as they finish.
struct NetflowSpec {
    uint64_t total_bytes = 0;
    LengthDist record_length{DistShape::Uniform, 256, 2048};
    uint32_t num_tasks = 1;
    NetflowVariant variant = NetflowVariant::Sync;
    uint64_t async_chunk_size = 256 * MiB;
    uint32_t num_models = 256;
    ModelAssign model_assignment = ModelAssign::Uniform;  // records per model
    uint64_t seq_read_size = 4 * MiB;  // op granularity of sequential scans

    void validate() const;
};

// Record schedule only (offsets, lengths, flow keys); no payload bytes.
// gen_netflow_data with the same spec and seed produces exactly this index.
NetflowIndex gen_netflow_index(const NetflowSpec& spec, uint64_t seed);

// Emits self-delimiting records through sink until the next record would
// exceed total_bytes. Returns the record count and the index.
struct NetflowDataResult {
    uint64_t record_count = 0;
    NetflowIndex index;
};
using ByteSink = std::function<void(std::span<const uint8_t>)>;
NetflowDataResult gen_netflow_data(const NetflowSpec& spec, const ByteSink& sink,
                                   uint64_t seed);

IoTrace gen_netflow_trace(const NetflowSpec& spec, const NetflowIndex& index);

// Sequential scan of a database followed by random reads at hit locations
// (the I/O shape of seeded sequence search).
struct ScanRandomSpec {
    uint64_t db_size = 0;
    uint32_t num_tasks = 1;
    uint64_t scan_chunk = 4 * MiB;
    uint64_t num_random_reads = 0;
    LengthDist random_read_size{DistShape::Uniform, 4 * KiB, 64 * KiB};
    HitLocality hit_locality;

    void validate() const;
};

IoTrace gen_scan_random(const ScanRandomSpec& spec, uint64_t seed);

} // namespace dstripe

#endif
