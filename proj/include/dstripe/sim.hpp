#ifndef DSTRIPE_SIM_HPP
#define DSTRIPE_SIM_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dstripe/composite.hpp"
#include "dstripe/io_trace.hpp"

namespace dstripe {

// Fluid cost model of a striped storage cluster. Bandwidths are bytes/s,
// latencies seconds. Every in-flight fragment draws on four capacities: the
// issuing client's link, the shared fabric, the owning OSS, and the owning
// OST; rates are max-min fair across all concurrent fragments. Each
// executor keeps up to rpcs_in_flight fragments outstanding, issued in
// chain order, the way a storage client pipelines RPCs.
struct ClusterModel {
    uint32_t num_clients = 1;
    double client_link_bw = 1.0;
    uint32_t num_oss = 1;
    double oss_bw_cap = 1.0;
    uint32_t osts_per_oss = 1;
    double ost_bw = 1.0;
    double per_op_latency = 0.0;       // fixed cost per fragment
    double seek_penalty = 0.0;         // per fragment non-contiguous on its OST
    double aggregate_fabric_bw = 1.0;
    uint32_t rpcs_in_flight = 8;       // per-executor fragment pipeline depth

    uint32_t total_osts() const { return num_oss * osts_per_oss; }
    void validate() const;

    // JSON object with exactly these field names (comments allowed)
    static ClusterModel load(const std::filesystem::path& json_path);
    std::string to_json() const;
};

struct PhaseResult {
    std::string label;
    double wall_s = 0.0;
    double throughput_bps = 0.0;
    uint64_t bytes = 0;
    uint64_t fragments = 0;
    uint32_t active_osts = 0;  // OSTs that served bytes during this phase
};

struct SimResult {
    std::vector<PhaseResult> phases;
    std::vector<uint64_t> ost_bytes;  // indexed by physical OST id
    std::vector<double> ost_busy_s;
    uint64_t total_fragments = 0;
};

// Pool ordering that spreads consecutive assignment slots across OSS's
// round-robin, so a stripe_count of k touches min(k, num_oss) servers.
OstPool make_rr_pool(uint32_t num_oss, uint32_t osts_per_oss);

// Deterministic: identical inputs and seed give a bitwise-identical result.
SimResult simulate(const ClusterModel& cluster, const OstPool& pool,
                   const CompositeLayout& layout, const IoTrace& trace,
                   uint64_t seed);

} // namespace dstripe

#endif
