#include "ehstab/stability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <set>
#include <string>
#include <thread>

namespace ehstab {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Stable:
            return "stable";
        case Verdict::Unstable:
            return "unstable";
        case Verdict::Inconclusive:
            return "inconclusive";
    }
    return "inconclusive";
}

double estimate_drift(std::span<const QueueSample> samples, NodeIndex i, std::int64_t from_slot) {
    require_node(i);
    const auto u = static_cast<std::size_t>(i);
    double n = 0.0;
    double mean_t = 0.0;
    double mean_q = 0.0;
    for (const auto& s : samples) {
        if (s.slot < from_slot) {
            continue;
        }
        n += 1.0;
        mean_t += (static_cast<double>(s.slot) - mean_t) / n;
        mean_q += (static_cast<double>(s.queue[u]) - mean_q) / n;
    }
    if (n < 2.0) {
        return 0.0;
    }
    double sxy = 0.0;
    double sxx = 0.0;
    for (const auto& s : samples) {
        if (s.slot < from_slot) {
            continue;
        }
        const double dt = static_cast<double>(s.slot) - mean_t;
        sxy += dt * (static_cast<double>(s.queue[u]) - mean_q);
        sxx += dt * dt;
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

bool bounded_excursion(const SimTrace& trace, NodeIndex i, double multiple) {
    const auto u = static_cast<std::size_t>(i);
    const std::int64_t half = trace.config.slots / 2;
    std::vector<std::int64_t> late;
    for (const auto& s : trace.samples) {
        if (s.slot >= half) {
            late.push_back(s.queue[u]);
        }
    }
    if (late.empty()) {
        return true;
    }
    const auto mid = late.begin() + static_cast<std::ptrdiff_t>(late.size() / 2);
    std::nth_element(late.begin(), mid, late.end());
    const auto median = static_cast<double>(*mid);
    const auto peak = static_cast<double>(*std::max_element(late.begin(), late.end()));
    return peak < multiple * (median + 1.0);
}

namespace {

void require_same_config(const SimConfig& a, const SimConfig& b) {
    const bool same = a.lambda == b.lambda && a.delta == b.delta && a.p == b.p && a.caps == b.caps &&
                      a.channel == b.channel && a.mode == b.mode && a.slots == b.slots && a.burn_in == b.burn_in &&
                      a.sample_every == b.sample_every && a.initial == b.initial;
    if (!same) {
        throw InvalidParameter("classify needs traces that differ only in their seed");
    }
}

}  // namespace

StabilityVerdictEmpirical classify(std::span<const SimTrace> traces, const StabilityPolicy& policy) {
    if (traces.size() < std::max<std::size_t>(policy.min_seeds, 2)) {
        throw InvalidParameter("classify needs at least " + std::to_string(std::max<std::size_t>(policy.min_seeds, 2)) +
                               " traces");
    }
    StabilityVerdictEmpirical out;
    std::set<std::uint64_t> distinct;
    for (const auto& t : traces) {
        require_same_config(traces.front().config, t.config);
        distinct.insert(t.config.seed);
        out.seeds.push_back(t.config.seed);
    }
    if (distinct.size() != traces.size()) {
        throw InvalidParameter("classify needs distinct seeds");
    }
    const SimConfig& cfg = traces.front().config;
    out.slots_used = cfg.slots - cfg.burn_in;

    const auto n = static_cast<double>(traces.size());
    bool any_unstable = false;
    bool all_stable = true;
    for (NodeIndex i = 0; i < 2; ++i) {
        const auto u = static_cast<std::size_t>(i);
        std::vector<double> slopes;
        bool excursion_ok = true;
        for (const auto& t : traces) {
            slopes.push_back(estimate_drift(t.samples, i, cfg.burn_in));
            excursion_ok = excursion_ok && bounded_excursion(t, i, policy.excursion_multiple);
        }
        double mean = 0.0;
        for (double s : slopes) mean += s;
        mean /= n;
        double var = 0.0;
        for (double s : slopes) var += (s - mean) * (s - mean);
        var /= (n - 1.0);
        out.drift[u] = mean;
        out.stderr_[u] = std::sqrt(var / n);
        out.bounded_excursion[u] = excursion_ok;

        if (mean - policy.k * out.stderr_[u] > policy.drift_ceiling) {
            any_unstable = true;
        }
        if (!(mean + policy.k * out.stderr_[u] < policy.drift_ceiling) || !excursion_ok) {
            all_stable = false;
        }
    }
    out.verdict = any_unstable ? Verdict::Unstable : (all_stable ? Verdict::Stable : Verdict::Inconclusive);
    return out;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& job) {
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        job(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next = count;
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

std::vector<SimTrace> simulate_point(const ChannelModel& ch, const HarvestRates& d, const BatteryCaps& caps,
                                     Point2 pt, const TransmitProbs& p, const SimBudget& budget) {
    SimConfig cfg;
    cfg.lambda = RatePoint(pt.x, pt.y);
    cfg.delta = d;
    cfg.p = p;
    cfg.caps = caps;
    cfg.channel = ch;
    cfg.slots = budget.slots;
    cfg.burn_in = budget.burn_in;
    cfg.sample_every = budget.sample_every;
    std::vector<SimTrace> traces;
    traces.reserve(budget.seeds);
    for (std::size_t s = 0; s < budget.seeds; ++s) {
        cfg.seed = budget.base_seed + s;
        traces.push_back(run(cfg));
    }
    return traces;
}

RegionDescription region_for(const ChannelModel& ch, const HarvestRates& d, const BatteryCaps& caps) {
    return caps.any_finite() ? finite_region_mpr(ch, d, caps) : region(ch, d);
}

TransmitProbs operating_probabilities(const ChannelModel& ch, const HarvestRates& d, const BatteryCaps& caps,
                                      Point2 pt) {
    if (pt.x <= 0.0 && pt.y <= 0.0) {
        return TransmitProbs(0.0, 0.0);
    }
    const Point2 target = region_for(ch, d, caps).radial_projection(pt);
    return caps.any_finite() ? finite_operating_probabilities(ch, d, caps, target)
                             : boundary_operating_probabilities(ch, d, target);
}

double radial_ratio(const RegionDescription& r, Point2 pt) {
    if (pt.x <= 0.0 && pt.y <= 0.0) {
        return 0.0;
    }
    const Point2 b = r.radial_projection(pt);
    const double nb = std::hypot(b.x, b.y);
    return nb > 0.0 ? std::hypot(pt.x, pt.y) / nb : std::numeric_limits<double>::infinity();
}

std::vector<Point2> scaled_boundary_points(const RegionDescription& r, std::size_t count, double scale) {
    std::vector<Point2> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double angle = (static_cast<double>(k) + 0.5) / static_cast<double>(count) * std::numbers::pi / 2.0;
        const Point2 b = r.radial_projection({std::cos(angle), std::sin(angle)});
        out.push_back({std::min(b.x * scale, 1.0), std::min(b.y * scale, 1.0)});
    }
    return out;
}

std::vector<VerifyRow> verify_region(const ChannelModel& ch, const HarvestRates& d, const BatteryCaps& caps,
                                     std::span<const Point2> points, const SimBudget& budget,
                                     const StabilityPolicy& policy, double margin_band) {
    const RegionDescription r = region_for(ch, d, caps);
    for (std::size_t k = 0; k < points.size(); ++k) {
        const double ratio = radial_ratio(r, points[k]);
        if (std::abs(ratio - 1.0) < margin_band) {
            throw InvalidParameter("point " + std::to_string(k) + " lies inside the boundary margin band");
        }
    }
    std::vector<VerifyRow> rows(points.size());
    parallel_for(points.size(), budget.threads, [&](std::size_t k) {
        VerifyRow row;
        row.point_id = k;
        row.point = points[k];
        const auto analytic = r.classify(points[k]);
        row.analytic_inside = analytic.inside;
        row.analytic_margin = analytic.margin;
        row.p = operating_probabilities(ch, d, caps, points[k]);
        const auto traces = simulate_point(ch, d, caps, points[k], row.p, budget);
        row.empirical = classify(traces, policy);
        row.agree = (row.analytic_inside && row.empirical.verdict == Verdict::Stable) ||
                    (!row.analytic_inside && row.empirical.verdict == Verdict::Unstable);
        rows[k] = std::move(row);
    });
    return rows;
}

}  // namespace ehstab
