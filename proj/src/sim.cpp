#include "ehstab/sim.hpp"

#include <string>

namespace ehstab {

const char* to_string(NodeMode m) {
    switch (m) {
        case NodeMode::Normal:
            return "normal";
        case NodeMode::Saturated:
            return "saturated";
        case NodeMode::Dummy:
            return "dummy";
    }
    return "normal";
}

NodeMode parse_node_mode(const std::string& text) {
    if (text == "normal") {
        return NodeMode::Normal;
    }
    if (text == "saturated") {
        return NodeMode::Saturated;
    }
    if (text == "dummy") {
        return NodeMode::Dummy;
    }
    throw InvalidParameter("unknown node mode '" + text + "' (expected normal|saturated|dummy)");
}

void SimConfig::validate() const {
    if (slots <= 0) {
        throw InvalidParameter("slots must be positive");
    }
    if (burn_in < 0 || burn_in >= slots) {
        throw InvalidParameter("burn_in must satisfy 0 <= burn_in < slots");
    }
    if (sample_every <= 0) {
        throw InvalidParameter("sample_every must be positive");
    }
    for (NodeIndex i = 0; i < 2; ++i) {
        const auto& s = initial[static_cast<std::size_t>(i)];
        if (s.queue < 0 || s.battery < 0) {
            throw InvalidParameter("initial queue and battery must be non-negative");
        }
        if (caps[i].is_finite() && s.battery > caps[i].chunks()) {
            throw InvalidParameter("initial battery exceeds its capacity");
        }
    }
}

SlotOutcome step(const std::array<NodeState, 2>& state, const SimConfig& cfg, SlotRng& rng) {
    std::array<double, 2> attempt_coin{};
    std::array<double, 2> success_coin{};
    std::array<double, 2> arrival_coin{};
    std::array<double, 2> harvest_coin{};
    for (auto& u : attempt_coin) u = rng.uniform();
    for (auto& u : success_coin) u = rng.uniform();
    for (auto& u : arrival_coin) u = rng.uniform();
    for (auto& u : harvest_coin) u = rng.uniform();

    SlotOutcome out{state, {}};
    auto& ev = out.events;
    for (std::size_t i = 0; i < 2; ++i) {
        const auto& s = state[i];
        const bool has_data = cfg.mode[i] != NodeMode::Normal || s.queue > 0;
        const bool eligible = s.battery >= 1 && has_data;
        ev.attempted[i] = eligible && attempt_coin[i] < cfg.p[static_cast<NodeIndex>(i)];
        ev.dummy[i] = ev.attempted[i] && cfg.mode[i] == NodeMode::Dummy && s.queue == 0;
    }
    const bool both = ev.attempted[0] && ev.attempted[1];
    for (std::size_t i = 0; i < 2; ++i) {
        if (!ev.attempted[i]) {
            continue;
        }
        const auto n = static_cast<NodeIndex>(i);
        const double q = both ? cfg.channel.joint(n) : cfg.channel.alone(n);
        const bool decoded = success_coin[i] < q;
        ev.success[i] = decoded && !ev.dummy[i];
    }
    for (std::size_t i = 0; i < 2; ++i) {
        auto& next = out.next[i];
        const auto n = static_cast<NodeIndex>(i);
        if (ev.attempted[i]) {
            next.battery -= 1;
        }
        ev.arrival[i] = arrival_coin[i] < cfg.lambda[n];
        ev.harvest[i] = harvest_coin[i] < cfg.delta[n];
        if (cfg.mode[i] != NodeMode::Saturated) {
            next.queue += (ev.arrival[i] ? 1 : 0) - (ev.success[i] ? 1 : 0);
        }
        if (ev.harvest[i]) {
            next.battery += 1;
            if (cfg.caps[n].is_finite() && next.battery > cfg.caps[n].chunks()) {
                next.battery = cfg.caps[n].chunks();
                ev.harvest_lost[i] = true;
            }
        }
    }
    return out;
}

namespace {

void tally(NodeCounters& c, const NodeState& start, NodeMode mode, const SlotEvents& ev, std::size_t i) {
    c.arrivals += ev.arrival[i];
    c.harvested += ev.harvest[i];
    c.harvest_lost += ev.harvest_lost[i];
    c.attempts += ev.attempted[i];
    c.successes += ev.success[i];
    c.dummy_transmissions += ev.dummy[i];
    c.joint_successes += ev.success[0] && ev.success[1];
    const bool battery = start.battery > 0;
    c.nonempty_battery_slots += battery;
    c.active_slots += battery && (mode == NodeMode::Saturated || start.queue > 0);
}

QueueSample snapshot(std::int64_t slot, const std::array<NodeState, 2>& s) {
    return {slot, {s[0].queue, s[1].queue}, {s[0].battery, s[1].battery}};
}

}  // namespace

SimTrace run(const SimConfig& cfg) {
    cfg.validate();
    SimTrace trace;
    trace.config = cfg;
    trace.samples.reserve(static_cast<std::size_t>(cfg.slots / cfg.sample_every + 2));
    SlotRng rng(cfg.seed);
    std::array<NodeState, 2> state = cfg.initial;
    for (std::int64_t n = 0; n < cfg.slots; ++n) {
        if (n % cfg.sample_every == 0) {
            trace.samples.push_back(snapshot(n, state));
        }
        const SlotOutcome out = step(state, cfg, rng);
        const bool measured = n >= cfg.burn_in;
        for (std::size_t i = 0; i < 2; ++i) {
            tally(trace.total[i], state[i], cfg.mode[i], out.events, i);
            if (measured) {
                tally(trace.measured[i], state[i], cfg.mode[i], out.events, i);
            }
        }
        trace.measured_slots += measured;
        state = out.next;
    }
    trace.samples.push_back(snapshot(cfg.slots, state));
    trace.final_state = state;
    return trace;
}

OccupancyReport battery_occupancy(const SimTrace& trace) {
    OccupancyReport report;
    for (std::size_t i = 0; i < 2; ++i) {
        report.fraction[i] = static_cast<double>(trace.measured[i].nonempty_battery_slots) /
                             static_cast<double>(trace.measured_slots);
        if (trace.config.mode[i] == NodeMode::Normal) {
            report.warnings.push_back("node " + std::to_string(i + 1) +
                                      " ran in normal mode; occupancy is confounded with queue emptiness");
        }
    }
    return report;
}

std::array<double, 2> active_fraction(const SimTrace& trace) {
    const auto slots = static_cast<double>(trace.measured_slots);
    return {static_cast<double>(trace.measured[0].active_slots) / slots,
            static_cast<double>(trace.measured[1].active_slots) / slots};
}

std::array<double, 2> success_rate(const SimTrace& trace) {
    const auto slots = static_cast<double>(trace.measured_slots);
    return {static_cast<double>(trace.measured[0].successes) / slots,
            static_cast<double>(trace.measured[1].successes) / slots};
}

}  // namespace ehstab
