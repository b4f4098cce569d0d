#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ehstab/analytic.hpp"
#include "ehstab/sim.hpp"

namespace ehstab {

enum class Verdict { Stable, Unstable, Inconclusive };

const char* to_string(Verdict v);

/// Thresholds for turning finite-horizon queue traces into a verdict.
struct StabilityPolicy {
    double k = 3.0;                    // standard errors of separation
    double drift_ceiling = 1e-3;       // packets/slot treated as "no drift"
    double excursion_multiple = 20.0;  // late-horizon max vs (median + 1)
    std::size_t min_seeds = 3;
};

struct StabilityVerdictEmpirical {
    Verdict verdict = Verdict::Inconclusive;
    std::array<double, 2> drift{};   // mean least-squares slope over seeds, packets/slot
    std::array<double, 2> stderr_{};  // standard error of that mean across seeds
    std::array<bool, 2> bounded_excursion{};
    std::int64_t slots_used = 0;  // post-burn-in slots per seed
    std::vector<std::uint64_t> seeds;
};

/// Least-squares slope of node i's sampled queue length against slot,
/// using samples taken at or after `from_slot`. Zero with fewer than two samples.
double estimate_drift(std::span<const QueueSample> samples, NodeIndex i, std::int64_t from_slot);

/// True when the largest queue sampled over the second half of the run stays
/// below `multiple` × (median + 1) over the same window.
bool bounded_excursion(const SimTrace& trace, NodeIndex i, double multiple);

/// Pools traces that share a configuration (different seeds only).
/// Unstable: some node has drift − k·stderr above the drift ceiling.
/// Stable: every node has drift + k·stderr below the ceiling and every trace
/// passes the excursion check. Anything else is Inconclusive.
StabilityVerdictEmpirical classify(std::span<const SimTrace> traces, const StabilityPolicy& policy = {});

/// Simulation effort spent per rate point.
struct SimBudget {
    std::int64_t slots = 1'000'000;
    std::int64_t burn_in = 100'000;
    std::size_t seeds = 5;
    std::uint64_t base_seed = 1;  // seeds are base_seed, base_seed + 1, ...
    std::int64_t sample_every = 100;
    unsigned threads = 0;  // 0 = hardware concurrency
};

/// Runs `count` independent jobs on a small thread pool. Job i writes only its
/// own result slot, so output order never depends on scheduling.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& job);

/// Normal-mode simulations of one rate point, one trace per seed.
std::vector<SimTrace> simulate_point(const ChannelModel& ch, const HarvestRates& d, const BatteryCaps& caps,
                                     Point2 pt, const TransmitProbs& p, const SimBudget& budget);

/// Stability region matching the battery configuration: region() for
/// unbounded caps, finite_region_mpr() otherwise.
RegionDescription region_for(const ChannelModel& ch, const HarvestRates& d, const BatteryCaps& caps);

/// Transmit probabilities whose saturated operating point is the radial
/// projection of `pt` onto the boundary: the best operating point along that
/// ray, used for points on either side of the boundary.
TransmitProbs operating_probabilities(const ChannelModel& ch, const HarvestRates& d, const BatteryCaps& caps,
                                      Point2 pt);

/// Ratio |pt| / |boundary point on the same ray|; 1 on the boundary.
double radial_ratio(const RegionDescription& r, Point2 pt);

/// `count` boundary points at evenly spaced angles strictly inside the
/// quadrant, scaled by `scale` and clipped to [0,1]².
std::vector<Point2> scaled_boundary_points(const RegionDescription& r, std::size_t count, double scale);

struct VerifyRow {
    std::size_t point_id = 0;
    Point2 point;
    TransmitProbs p;
    bool analytic_inside = false;
    double analytic_margin = 0.0;
    StabilityVerdictEmpirical empirical;
    bool agree = false;
};

/// Analytic-vs-simulated agreement for a list of rate points. Points within
/// `margin_band` (relative radial distance) of the boundary are rejected with
/// InvalidParameter; disagreements are reported in the rows, not thrown.
std::vector<VerifyRow> verify_region(const ChannelModel& ch, const HarvestRates& d, const BatteryCaps& caps,
                                     std::span<const Point2> points, const SimBudget& budget,
                                     const StabilityPolicy& policy = {}, double margin_band = 0.10);

}  // namespace ehstab
