#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ehstab/channel.hpp"
#include "ehstab/types.hpp"

namespace ehstab {

/// How a node decides it has something to send.
///  - Normal: transmits only when both queue and battery are non-empty.
///  - Saturated: the data buffer never empties; the queue counter is frozen.
///  - Dummy: transmits whenever the battery is non-empty, sending a dummy
///    packet when the queue is empty. Dummies cost energy, carry no data.
enum class NodeMode { Normal, Saturated, Dummy };

const char* to_string(NodeMode m);
NodeMode parse_node_mode(const std::string& text);

struct NodeState {
    std::int64_t queue = 0;    // buffered packets at the start of the slot
    std::int64_t battery = 0;  // stored energy chunks at the start of the slot
    bool operator==(const NodeState&) const = default;
};

struct SimConfig {
    RatePoint lambda;
    HarvestRates delta;
    TransmitProbs p;
    BatteryCaps caps;
    ChannelModel channel = collision_channel();
    std::array<NodeMode, 2> mode{NodeMode::Normal, NodeMode::Normal};
    std::int64_t slots = 1'000'000;
    std::uint64_t seed = 1;
    std::int64_t burn_in = 0;
    std::int64_t sample_every = 100;
    std::array<NodeState, 2> initial{};

    void validate() const;
};

/// Uniform [0,1) stream with a platform-independent mapping from the seed.
/// Every slot consumes exactly eight draws in a fixed order: attempt coins
/// (node 1, node 2), success coins, arrival coins, harvest coins. Runs that
/// share a seed therefore see identical coin outcomes slot by slot, whatever
/// their modes.
class SlotRng {
public:
    explicit SlotRng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

struct SlotEvents {
    std::array<bool, 2> attempted{};
    std::array<bool, 2> dummy{};
    std::array<bool, 2> success{};  // successful data packet (dummies excluded)
    std::array<bool, 2> arrival{};
    std::array<bool, 2> harvest{};
    std::array<bool, 2> harvest_lost{};  // chunk discarded by a full battery
};

struct SlotOutcome {
    std::array<NodeState, 2> next;
    SlotEvents events;
};

/// Advance one slot. Order: eligibility from the start-of-slot state,
/// attempt coins, success coins (joint marginals when both attempt), one
/// chunk spent per attempt, departures, then arrivals and harvests with the
/// battery capped last.
SlotOutcome step(const std::array<NodeState, 2>& state, const SimConfig& cfg, SlotRng& rng);

struct NodeCounters {
    std::int64_t arrivals = 0;
    std::int64_t harvested = 0;
    std::int64_t harvest_lost = 0;
    std::int64_t attempts = 0;
    std::int64_t successes = 0;
    std::int64_t dummy_transmissions = 0;
    std::int64_t nonempty_battery_slots = 0;
    std::int64_t active_slots = 0;
    std::int64_t joint_successes = 0;  // slots where both nodes succeeded
    bool operator==(const NodeCounters&) const = default;
};

struct QueueSample {
    std::int64_t slot = 0;
    std::array<std::int64_t, 2> queue{};
    std::array<std::int64_t, 2> battery{};
    bool operator==(const QueueSample&) const = default;
};

struct SimTrace {
    SimConfig config;
    std::array<NodeCounters, 2> total{};     // whole run
    std::array<NodeCounters, 2> measured{};  // slots at or after burn_in
    std::int64_t measured_slots = 0;
    std::vector<QueueSample> samples;  // start-of-slot state every sample_every slots, plus the final state
    std::array<NodeState, 2> final_state{};
};

SimTrace run(const SimConfig& cfg);

struct OccupancyReport {
    std::array<double, 2> fraction{};
    std::vector<std::string> warnings;
};

/// Fraction of measured slots that began with a non-empty battery. In Normal
/// mode a node only drains its battery while its queue is non-empty, so the
/// figure is reported with a warning.
OccupancyReport battery_occupancy(const SimTrace& trace);

/// Fraction of measured slots where a node held both data and energy.
std::array<double, 2> active_fraction(const SimTrace& trace);

/// Measured successes per measured slot.
std::array<double, 2> success_rate(const SimTrace& trace);

}  // namespace ehstab
