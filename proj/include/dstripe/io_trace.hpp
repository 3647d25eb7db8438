#ifndef DSTRIPE_IO_TRACE_HPP
#define DSTRIPE_IO_TRACE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace dstripe {

enum class IoKind : uint8_t { Read, Write };

// One read or write against the logical file. Ops sharing a task id within
// a phase form a dependency chain: each op starts only after the previous
// op of the same task in list order has completed.
struct IoOp {
    uint32_t task = 0;  // task id (StaticAssign) or work-unit id (WorkQueue)
    IoKind kind = IoKind::Read;
    uint64_t offset = 0;
    uint64_t length = 0;
};

// StaticAssign: every task id runs concurrently from the start of the phase
// (pre-partitioned work, one executor per task).
// WorkQueue: task ids are work units, dispatched in ascending id order to
// num_workers executors as they become idle.
enum class PhaseMode : uint8_t { StaticAssign, WorkQueue };

struct IoPhase {
    std::string label;
    PhaseMode mode = PhaseMode::StaticAssign;
    uint32_t num_workers = 0;  // WorkQueue only
    std::vector<IoOp> ops;

    uint64_t total_bytes() const {
        uint64_t sum = 0;
        for (const IoOp& op : ops) sum += op.length;
        return sum;
    }
};

// Phases execute strictly in order: phase N+1 starts only after every op
// of phase N has completed.
struct IoTrace {
    std::string workload;
    std::string variant;
    std::vector<IoPhase> phases;

    uint64_t total_bytes() const {
        uint64_t sum = 0;
        for (const IoPhase& p : phases) sum += p.total_bytes();
        return sum;
    }
};

} // namespace dstripe

#endif
