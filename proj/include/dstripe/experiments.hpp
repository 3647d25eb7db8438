#ifndef DSTRIPE_EXPERIMENTS_HPP
#define DSTRIPE_EXPERIMENTS_HPP

#include <string>
#include <variant>
#include <vector>

#include "dstripe/composite.hpp"
#include "dstripe/sim.hpp"
#include "dstripe/workloads.hpp"

namespace dstripe {

// Paper: the layouts and data sizes as the original experiments ran them
// (terabyte-class). Desk: every byte quantity that sets the extent of the
// experiment (watermarks, blocks, data sizes, queue chunks, read counts)
// divided by 1024 so the whole matrix runs on a workstation. Stripe
// configurations and op sizes are not scaled.
enum class Scale : uint8_t { Paper, Desk };

enum class WorkloadKind : uint8_t { Ior, Netflow, ScanRandom };

struct ExperimentPreset {
    std::string name;         // "IOR.4", "netflow.6", "blast.16"
    std::string description;  // layout in Table notation, e.g. "0-1tb in A, remainder in B"
    WorkloadKind kind = WorkloadKind::Ior;
    CompositeLayout layout;
    std::variant<IorSpec, NetflowSpec, ScanRandomSpec> workload;
    uint32_t num_clients = 1;  // node count the workload ran on
};

// All 30 named experiments: IOR.1-6, netflow.1-6, blast.1-18.
std::vector<ExperimentPreset> experiment_presets(Scale scale);

// Lookup by name; throws std::invalid_argument on unknown names.
ExperimentPreset experiment_preset(const std::string& name, Scale scale);

// Generates the preset's trace (for netflow this builds the record index
// first). Pure function of (preset, seed).
IoTrace build_trace(const ExperimentPreset& preset, uint64_t seed);

// Runs each named preset through the simulator, in order. The preset's
// node count overrides cluster.num_clients, mirroring the per-workload
// node counts of the original runs.
std::vector<std::pair<std::string, SimResult>> sweep(const ClusterModel& cluster,
                                                     const OstPool& pool,
                                                     const std::vector<std::string>& names,
                                                     Scale scale, uint64_t seed);

} // namespace dstripe

#endif
