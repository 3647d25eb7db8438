#include "dstripe/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace dstripe {

void ClusterModel::validate() const {
    if (num_clients < 1 || num_oss < 1 || osts_per_oss < 1)
        throw std::invalid_argument("ClusterModel: counts must be >= 1");
    if (client_link_bw <= 0 || oss_bw_cap <= 0 || ost_bw <= 0 || aggregate_fabric_bw <= 0)
        throw std::invalid_argument("ClusterModel: bandwidths must be > 0");
    if (per_op_latency < 0 || seek_penalty < 0)
        throw std::invalid_argument("ClusterModel: latencies must be >= 0");
    if (rpcs_in_flight < 1)
        throw std::invalid_argument("ClusterModel: rpcs_in_flight must be >= 1");
}

ClusterModel ClusterModel::load(const std::filesystem::path& json_path) {
    std::ifstream in(json_path);
    if (!in) throw std::runtime_error("cannot open cluster config " + json_path.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);

    ClusterModel c;
    c.num_clients = j.at("num_clients").get<uint32_t>();
    c.client_link_bw = j.at("client_link_bw").get<double>();
    c.num_oss = j.at("num_oss").get<uint32_t>();
    c.oss_bw_cap = j.at("oss_bw_cap").get<double>();
    c.osts_per_oss = j.at("osts_per_oss").get<uint32_t>();
    c.ost_bw = j.at("ost_bw").get<double>();
    c.per_op_latency = j.at("per_op_latency").get<double>();
    c.seek_penalty = j.at("seek_penalty").get<double>();
    c.aggregate_fabric_bw = j.at("aggregate_fabric_bw").get<double>();
    if (j.contains("rpcs_in_flight")) c.rpcs_in_flight = j.at("rpcs_in_flight").get<uint32_t>();
    c.validate();
    return c;
}

std::string ClusterModel::to_json() const {
    nlohmann::json j;
    j["num_clients"] = num_clients;
    j["client_link_bw"] = client_link_bw;
    j["num_oss"] = num_oss;
    j["oss_bw_cap"] = oss_bw_cap;
    j["osts_per_oss"] = osts_per_oss;
    j["ost_bw"] = ost_bw;
    j["per_op_latency"] = per_op_latency;
    j["seek_penalty"] = seek_penalty;
    j["aggregate_fabric_bw"] = aggregate_fabric_bw;
    j["rpcs_in_flight"] = rpcs_in_flight;
    return j.dump(2);
}

OstPool make_rr_pool(uint32_t num_oss, uint32_t osts_per_oss) {
    const uint32_t n = num_oss * osts_per_oss;
    OstPool pool;
    pool.num_osts = n;
    pool.ost_ids.resize(n);
    for (uint32_t j = 0; j < n; ++j)
        pool.ost_ids[j] = (j % num_oss) * osts_per_oss + j / num_oss;
    pool.validate();
    return pool;
}

namespace {

constexpr double kSaturationEps = 1e-12;

struct ActiveFrag {
    uint64_t id = 0;        // start order; gives deterministic tie-breaking
    uint32_t executor = 0;
    uint32_t client = 0;
    uint32_t oss = 0;
    uint32_t ost = 0;       // physical id
    double ready_at = 0.0;  // end of latency phase (absolute time)
    bool transferring = false;
    double bytes_remaining = 0.0;
    uint64_t length = 0;
    double rate = 0.0;
};

// Streams the fragments of its chain in order, keeping up to
// rpcs_in_flight of them outstanding. In WorkQueue mode the next unit is
// taken only once the current one has fully completed.
struct Executor {
    uint32_t client = 0;
    std::vector<uint32_t> op_indices;  // current chain, in order
    size_t next_op = 0;
    std::vector<LayoutFragment> op_frags;  // fragments of the op being issued
    size_t next_frag = 0;
    uint32_t outstanding = 0;
};

// last device position per OST, for the seek model
struct OstCursor {
    bool valid = false;
    size_t segment = 0;
    uint64_t end_offset = 0;
};

// Max-min fair rates via progressive filling. Resource layout:
// [0, C) client links, [C] fabric, (C, C+S] oss, then osts.
class FairShare {
public:
    FairShare(const ClusterModel& c)
        : num_clients_(c.num_clients),
          num_oss_(c.num_oss),
          num_osts_(c.total_osts()),
          capacity_(1 + c.num_clients + c.num_oss + c.total_osts()) {
        for (uint32_t i = 0; i < num_clients_; ++i) capacity_[client_res(i)] = c.client_link_bw;
        capacity_[fabric_res()] = c.aggregate_fabric_bw;
        for (uint32_t i = 0; i < num_oss_; ++i) capacity_[oss_res(i)] = c.oss_bw_cap;
        for (uint32_t i = 0; i < num_osts_; ++i) capacity_[ost_res(i)] = c.ost_bw;
    }

    uint32_t client_res(uint32_t i) const { return i; }
    uint32_t fabric_res() const { return num_clients_; }
    uint32_t oss_res(uint32_t i) const { return num_clients_ + 1 + i; }
    uint32_t ost_res(uint32_t i) const { return num_clients_ + 1 + num_oss_ + i; }

    // assigns f->rate for every transferring fragment in `flows`
    void solve(std::vector<ActiveFrag*>& flows) {
        const size_t nres = capacity_.size();
        remaining_.assign(nres, 0.0);
        count_.assign(nres, 0);
        for (size_t r = 0; r < nres; ++r) remaining_[r] = capacity_[r];

        frozen_.assign(flows.size(), false);
        size_t unfrozen = 0;
        for (ActiveFrag* f : flows) {
            count_[client_res(f->client)]++;
            count_[fabric_res()]++;
            count_[oss_res(f->oss)]++;
            count_[ost_res(f->ost)]++;
            f->rate = 0.0;
            ++unfrozen;
        }

        while (unfrozen > 0) {
            double delta = std::numeric_limits<double>::infinity();
            for (size_t r = 0; r < nres; ++r)
                if (count_[r] > 0)
                    delta = std::min(delta, remaining_[r] / static_cast<double>(count_[r]));

            for (size_t i = 0; i < flows.size(); ++i)
                if (!frozen_[i]) flows[i]->rate += delta;
            for (size_t r = 0; r < nres; ++r)
                if (count_[r] > 0) remaining_[r] -= delta * static_cast<double>(count_[r]);

            // freeze flows on saturated resources
            for (size_t i = 0; i < flows.size(); ++i) {
                if (frozen_[i]) continue;
                ActiveFrag* f = flows[i];
                const uint32_t res[4] = {client_res(f->client), fabric_res(),
                                         oss_res(f->oss), ost_res(f->ost)};
                bool sat = false;
                for (uint32_t r : res)
                    if (remaining_[r] <= capacity_[r] * kSaturationEps) sat = true;
                if (sat) {
                    frozen_[i] = true;
                    --unfrozen;
                    for (uint32_t r : res) count_[r]--;
                }
            }
        }
    }

private:
    uint32_t num_clients_, num_oss_, num_osts_;
    std::vector<double> capacity_;
    std::vector<double> remaining_;
    std::vector<uint32_t> count_;
    std::vector<char> frozen_;
};

class PhaseRunner {
public:
    PhaseRunner(const ClusterModel& cluster, const OstPool& pool,
                const CompositeLayout& layout, const IoPhase& phase,
                std::vector<uint64_t>& ost_bytes, std::vector<double>& ost_busy)
        : cluster_(cluster),
          pool_(pool),
          layout_(layout),
          phase_(phase),
          fair_(cluster),
          ost_bytes_(ost_bytes),
          ost_busy_(ost_busy),
          phase_ost_bytes_(cluster.total_osts(), 0),
          ost_active_(cluster.total_osts(), 0),
          cursors_(cluster.total_osts()) {}

    PhaseResult run() {
        build_executors();
        // kick off initial work at t = 0
        for (uint32_t e = 0; e < executors_.size(); ++e) refill(e, 0.0);

        double now = 0.0;
        while (!active_.empty()) {
            flows_.clear();
            for (auto& f : active_)
                if (f.transferring) flows_.push_back(&f);
            fair_.solve(flows_);

            // earliest next event: a latency expiry or a transfer completion
            double dt = std::numeric_limits<double>::infinity();
            for (const auto& f : active_) {
                if (f.transferring)
                    dt = std::min(dt, f.bytes_remaining / f.rate);
                else
                    dt = std::min(dt, f.ready_at - now);
            }
            if (!std::isfinite(dt))
                throw std::logic_error("simulate: stalled with no runnable fragment");
            dt = std::max(dt, 0.0);

            for (uint32_t t = 0; t < ost_active_.size(); ++t)
                if (ost_active_[t] > 0) ost_busy_[t] += dt;

            now += dt;

            for (auto& f : active_)
                if (f.transferring) f.bytes_remaining -= f.rate * dt;

            // latency expiries first, then completions, each in start order;
            // the tolerance must stay above one ulp of `now` or a fragment
            // whose gap rounds away could stall the clock
            const double time_eps = 1e-12 * std::max(1.0, now);
            for (auto& f : active_)
                if (!f.transferring && f.ready_at - now <= time_eps) {
                    f.transferring = true;
                    f.bytes_remaining = static_cast<double>(f.length);
                }

            std::vector<uint32_t> touched_execs;
            for (size_t i = 0; i < active_.size();) {
                ActiveFrag& f = active_[i];
                const bool done = f.transferring &&
                                  (f.bytes_remaining <= 0.0 ||
                                   f.bytes_remaining <= static_cast<double>(f.length) * 1e-15);
                if (!done) {
                    ++i;
                    continue;
                }
                ost_bytes_[f.ost] += f.length;
                phase_ost_bytes_[f.ost] += f.length;
                ost_active_[f.ost]--;
                executors_[f.executor].outstanding--;
                touched_execs.push_back(f.executor);
                active_.erase(active_.begin() + static_cast<std::ptrdiff_t>(i));
            }
            std::sort(touched_execs.begin(), touched_execs.end());
            touched_execs.erase(std::unique(touched_execs.begin(), touched_execs.end()),
                                touched_execs.end());
            for (uint32_t e : touched_execs) refill(e, now);
        }

        PhaseResult res;
        res.label = phase_.label;
        res.wall_s = now;
        res.bytes = phase_.total_bytes();
        res.fragments = fragments_started_;
        res.throughput_bps = now > 0.0 ? static_cast<double>(res.bytes) / now : 0.0;
        for (uint64_t b : phase_ost_bytes_) res.active_osts += b > 0;
        return res;
    }

private:
    void build_executors() {
        // group op indices by task id, preserving op order within a task
        std::map<uint32_t, std::vector<uint32_t>> chains;
        for (uint32_t i = 0; i < phase_.ops.size(); ++i) {
            const IoOp& op = phase_.ops[i];
            if (op.length < 1) throw std::invalid_argument("IoOp.length must be >= 1");
            chains[op.task].push_back(i);
        }

        if (phase_.mode == PhaseMode::StaticAssign) {
            for (auto& [task, ops] : chains) {
                Executor ex;
                ex.client = task % cluster_.num_clients;
                ex.op_indices = std::move(ops);
                executors_.push_back(std::move(ex));
            }
        } else {
            if (phase_.num_workers < 1)
                throw std::invalid_argument("WorkQueue phase needs num_workers >= 1");
            for (auto& [unit, ops] : chains) {
                (void)unit;
                unit_queue_.push_back(std::move(ops));
            }
            const uint32_t workers =
                std::min<uint32_t>(phase_.num_workers,
                                   static_cast<uint32_t>(unit_queue_.size()));
            for (uint32_t w = 0; w < workers; ++w) {
                Executor ex;
                ex.client = w % cluster_.num_clients;
                executors_.push_back(std::move(ex));  // no chain yet; refill pulls a unit
            }
        }
    }

    // tops the executor's pipeline back up to the window size
    void refill(uint32_t e, double now) {
        Executor& ex = executors_[e];
        while (ex.outstanding < cluster_.rpcs_in_flight) {
            if (ex.next_frag >= ex.op_frags.size()) {
                if (ex.next_op < ex.op_indices.size()) {
                    const IoOp& op = phase_.ops[ex.op_indices[ex.next_op++]];
                    ex.op_frags = full_decompose(layout_, pool_, op.offset, op.length);
                    ex.next_frag = 0;
                    continue;
                }
                // a work-queue executor takes its next unit only after the
                // current one fully completes
                if (ex.outstanding == 0 && next_unit_ < unit_queue_.size()) {
                    ex.op_indices = std::move(unit_queue_[next_unit_++]);
                    ex.next_op = 0;
                    continue;
                }
                return;
            }
            issue_fragment(e, ex.op_frags[ex.next_frag++], now);
        }
    }

    void issue_fragment(uint32_t e, const LayoutFragment& lf, double now) {
        Executor& ex = executors_[e];
        ActiveFrag f;
        f.id = fragments_started_++;
        f.executor = e;
        f.client = ex.client;
        f.ost = pool_.ost_ids[lf.chunk.ost_ordinal];
        f.oss = f.ost / cluster_.osts_per_oss;
        f.length = lf.chunk.length;

        OstCursor& cur = cursors_[f.ost];
        const bool contiguous = cur.valid && cur.segment == lf.segment_index &&
                                cur.end_offset == lf.chunk.object_offset;
        cur.valid = true;
        cur.segment = lf.segment_index;
        cur.end_offset = lf.chunk.object_offset + lf.chunk.length;

        const double delay =
            cluster_.per_op_latency + (contiguous ? 0.0 : cluster_.seek_penalty);
        if (delay > 0.0) {
            f.transferring = false;
            f.ready_at = now + delay;
        } else {
            f.transferring = true;
            f.bytes_remaining = static_cast<double>(f.length);
        }
        ost_active_[f.ost]++;
        ex.outstanding++;
        active_.push_back(f);
    }

    const ClusterModel& cluster_;
    const OstPool& pool_;
    const CompositeLayout& layout_;
    const IoPhase& phase_;
    FairShare fair_;
    std::vector<uint64_t>& ost_bytes_;
    std::vector<double>& ost_busy_;
    std::vector<uint64_t> phase_ost_bytes_;

    std::vector<Executor> executors_;
    std::vector<std::vector<uint32_t>> unit_queue_;
    size_t next_unit_ = 0;
    std::vector<ActiveFrag> active_;
    std::vector<ActiveFrag*> flows_;
    std::vector<uint32_t> ost_active_;
    std::vector<OstCursor> cursors_;
    uint64_t fragments_started_ = 0;
};

} // namespace

SimResult simulate(const ClusterModel& cluster, const OstPool& pool,
                   const CompositeLayout& layout, const IoTrace& trace,
                   uint64_t seed) {
    (void)seed;  // the fluid model is fully deterministic
    cluster.validate();
    pool.validate();
    layout.validate();
    if (cluster.total_osts() != pool.num_osts)
        throw std::invalid_argument("simulate: pool size != num_oss * osts_per_oss");
    for (uint32_t id : pool.ost_ids)
        if (id >= cluster.total_osts())
            throw std::invalid_argument("simulate: pool ost id out of range");
    bool any_ops = false;
    for (const IoPhase& p : trace.phases) any_ops |= !p.ops.empty();
    if (!any_ops) throw std::invalid_argument("simulate: trace has no ops");

    SimResult result;
    result.ost_bytes.assign(cluster.total_osts(), 0);
    result.ost_busy_s.assign(cluster.total_osts(), 0.0);
    for (const IoPhase& phase : trace.phases) {
        if (phase.ops.empty()) {
            result.phases.push_back(PhaseResult{phase.label, 0.0, 0.0, 0, 0});
            continue;
        }
        PhaseRunner runner(cluster, pool, layout, phase, result.ost_bytes,
                           result.ost_busy_s);
        PhaseResult pr = runner.run();
        result.total_fragments += pr.fragments;
        result.phases.push_back(std::move(pr));
    }
    return result;
}

} // namespace dstripe
