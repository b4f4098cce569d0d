#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "ehstab/analytic.hpp"
#include "ehstab/cli.hpp"
#include "ehstab/io.hpp"
#include "ehstab/sim.hpp"
#include "ehstab/stability.hpp"

namespace ehstab::cli {

using nlohmann::json;

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

std::string require_format(const Context& ctx, std::initializer_list<const char*> allowed) {
    const std::string fmt = ctx.settings.get_or("format", *allowed.begin());
    for (const char* a : allowed) {
        if (fmt == a) return fmt;
    }
    std::string list;
    for (const char* a : allowed) list += (list.empty() ? "" : "|") + std::string(a);
    throw InvalidParameter(ctx.subcommand + ": unsupported format '" + fmt + "' (expected " + list + ")");
}

/// Writes `content` to the --out path (plus its manifest) or to stdout.
void emit(Context& ctx, const std::string& content, const std::vector<std::uint64_t>& seeds) {
    const std::string path = ctx.settings.get_or("out", "");
    if (path.empty()) {
        ctx.out << content;
        return;
    }
    {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw InvalidParameter("cannot write '" + path + "'");
        f << content;
    }
    const json manifest{{"subcommand", ctx.subcommand},
                        {"config", ctx.settings.to_json()},
                        {"seeds", seeds},
                        {"outputs", json::array({path})},
                        {"tool_version", kToolVersion},
                        {"timestamp", utc_timestamp()}};
    std::ofstream m(path + ".manifest.json", std::ios::binary);
    if (!m) throw InvalidParameter("cannot write '" + path + ".manifest.json'");
    m << manifest.dump(2) << '\n';
}

/// Summary text goes to stdout when the data went to a file, else to stderr.
std::ostream& summary_stream(Context& ctx) { return ctx.settings.get_or("out", "").empty() ? ctx.err : ctx.out; }

std::vector<std::uint64_t> budget_seeds(const SimBudget& b) {
    std::vector<std::uint64_t> s;
    for (std::size_t k = 0; k < b.seeds; ++k) s.push_back(b.base_seed + k);
    return s;
}

std::size_t parse_count(const Settings& s, const std::string& key, const std::string& fallback) {
    const auto v = parse_int(s.get_or(key, fallback), key);
    if (v < 0) throw InvalidParameter("'" + key + "' must be non-negative");
    return static_cast<std::size_t>(v);
}

RegionDescription region_from_settings(const ChannelModel& ch, const HarvestRates& d, const BatteryCaps& caps) {
    if (!caps.any_finite()) return region(ch, d);
    if (ch == collision_channel() && caps[0].is_finite() && caps[1].is_finite()) return finite_region(d, caps);
    return finite_region_mpr(ch, d, caps);
}

const char* verdict_color(Verdict v) {
    switch (v) {
        case Verdict::Stable:
            return "#2a9d4b";
        case Verdict::Unstable:
            return "#d62828";
        case Verdict::Inconclusive:
            return "#999999";
    }
    return "#999999";
}

}  // namespace

int cmd_region(Context& ctx) {
    const auto& s = ctx.settings;
    const ChannelModel ch = resolve_channel(s);
    const HarvestRates d = resolve_delta(s);
    const BatteryCaps caps = resolve_caps(s);
    const std::string fmt = require_format(ctx, {"json", "csv", "svg"});
    const std::size_t samples = parse_count(s, "samples", "512");

    const RegionDescription r = region_from_settings(ch, d, caps);
    std::string content;
    if (fmt == "json") {
        content = region_to_json(r, samples).dump(2) + "\n";
    } else if (fmt == "csv") {
        std::ostringstream os;
        write_region_csv(os, r, samples);
        content = os.str();
    } else {
        SvgPlot plot("stability region, case " + std::string(to_string(r.shape())));
        const RegionDescription ref = caps.any_finite() ? region(ch, d) : region(ch, HarvestRates(1.0, 1.0));
        plot.polyline(ref.sample(samples), "#777777", true);
        plot.polyline(r.sample(samples), "#1d3557");
        plot.legend(caps.any_finite() ? "finite batteries" : "harvest rates as given", "#1d3557");
        plot.legend(caps.any_finite() ? "unbounded batteries" : "unit harvest rates", "#777777");
        content = plot.str();
    }
    emit(ctx, content, {});
    return kOk;
}

int cmd_simulate(Context& ctx) {
    const SimConfig cfg = resolve_sim_config(ctx.settings);
    const std::string fmt = require_format(ctx, {"json", "csv"});
    const SimTrace trace = run(cfg);

    std::string content;
    if (fmt == "json") {
        content = trace_to_json(trace).dump(2) + "\n";
    } else {
        std::ostringstream os;
        write_trace_csv(os, trace);
        content = os.str();
    }
    emit(ctx, content, {cfg.seed});

    auto& sum = summary_stream(ctx);
    const auto occupancy = battery_occupancy(trace);
    const auto active = active_fraction(trace);
    const auto rate = success_rate(trace);
    sum << "slots " << cfg.slots << " (measured " << trace.measured_slots << ")\n";
    for (std::size_t i = 0; i < 2; ++i) {
        const auto& c = trace.measured[i];
        sum << "node " << i + 1 << ": arrivals " << c.arrivals << ", attempts " << c.attempts << ", successes "
            << c.successes << ", dummies " << c.dummy_transmissions << ", success_rate " << format_number(rate[i])
            << ", battery_occupancy " << format_number(occupancy.fraction[i]) << ", active_fraction "
            << format_number(active[i]) << ", final_queue " << trace.final_state[i].queue << '\n';
    }
    for (const auto& w : occupancy.warnings) {
        ctx.err << "warning: " << w << '\n';
    }
    return kOk;
}

int cmd_sweep(Context& ctx) {
    const auto& s = ctx.settings;
    const ChannelModel ch = resolve_channel(s);
    const HarvestRates d = resolve_delta(s);
    const BatteryCaps caps = resolve_caps(s);
    const SimBudget budget = resolve_budget(s);
    const std::string fmt = require_format(ctx, {"csv", "json", "svg"});

    const auto l1 = parse_pair(s.get_or("l1_range", "0,1"), "l1_range");
    const auto l2 = parse_pair(s.get_or("l2_range", "0,1"), "l2_range");
    const auto grid = parse_pair(s.get_or("grid", "8,8"), "grid");
    if (grid[0] < 0 || grid[1] < 0 || grid[0] != std::floor(grid[0]) || grid[1] != std::floor(grid[1])) {
        throw InvalidParameter("'grid' expects two non-negative integers");
    }
    if (l1[0] < 0 || l1[1] > 1 || l1[0] > l1[1] || l2[0] < 0 || l2[1] > 1 || l2[0] > l2[1]) {
        throw InvalidParameter("grid ranges must satisfy 0 <= lo <= hi <= 1");
    }
    const auto nx = static_cast<std::size_t>(grid[0]);
    const auto ny = static_cast<std::size_t>(grid[1]);
    const double wx = nx ? (l1[1] - l1[0]) / static_cast<double>(nx) : 0.0;
    const double wy = ny ? (l2[1] - l2[0]) / static_cast<double>(ny) : 0.0;

    std::optional<TransmitProbs> fixed_p;
    if (s.has("p")) {
        const auto p = parse_pair(s.get("p"), "p");
        fixed_p = TransmitProbs(p[0], p[1]);
    }

    // Row-major from the lower-left cell, one point per cell centre.
    std::vector<Point2> points;
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            points.push_back({l1[0] + (static_cast<double>(ix) + 0.5) * wx, l2[0] + (static_cast<double>(iy) + 0.5) * wy});
        }
    }

    const RegionDescription r = region_for(ch, d, caps);
    struct Row {
        TransmitProbs p;
        StabilityVerdictEmpirical verdict;
    };
    std::vector<Row> rows(points.size());
    SimBudget serial = budget;
    serial.threads = 1;
    parallel_for(points.size(), budget.threads, [&](std::size_t k) {
        const TransmitProbs p = fixed_p ? *fixed_p : operating_probabilities(ch, d, caps, points[k]);
        const auto traces = simulate_point(ch, d, caps, points[k], p, serial);
        rows[k] = {p, classify(traces)};
    });

    std::string content;
    if (fmt == "svg") {
        SvgPlot plot("sweep verdicts", std::max({l1[1], l2[1], 1e-6}));
        for (std::size_t k = 0; k < points.size(); ++k) {
            plot.cell(points[k], wx, wy, verdict_color(rows[k].verdict.verdict));
        }
        plot.polyline(r.sample(512), "#1d3557");
        plot.legend("stable", verdict_color(Verdict::Stable));
        plot.legend("unstable", verdict_color(Verdict::Unstable));
        plot.legend("inconclusive", verdict_color(Verdict::Inconclusive));
        content = plot.str();
    } else if (fmt == "json") {
        json arr = json::array();
        for (std::size_t k = 0; k < points.size(); ++k) {
            const auto& v = rows[k].verdict;
            arr.push_back({{"point_id", k},
                           {"lambda", to_json(points[k])},
                           {"p", {rows[k].p[0], rows[k].p[1]}},
                           {"radial_ratio", radial_ratio(r, points[k])},
                           {"analytic", r.contains(points[k]) ? "stable" : "unstable"},
                           {"empirical", to_string(v.verdict)},
                           {"drift", {v.drift[0], v.drift[1]}}});
        }
        content = arr.dump(2) + "\n";
    } else {
        std::ostringstream os;
        os << "point_id,lambda1,lambda2,p1,p2,radial_ratio,analytic,empirical,drift1,drift2\n";
        for (std::size_t k = 0; k < points.size(); ++k) {
            const auto& v = rows[k].verdict;
            os << k << ',' << format_number(points[k].x) << ',' << format_number(points[k].y) << ','
               << format_number(rows[k].p[0]) << ',' << format_number(rows[k].p[1]) << ','
               << format_number(radial_ratio(r, points[k])) << ',' << (r.contains(points[k]) ? "stable" : "unstable")
               << ',' << to_string(v.verdict) << ',' << format_number(v.drift[0]) << ','
               << format_number(v.drift[1]) << '\n';
        }
        content = os.str();
    }
    emit(ctx, content, budget_seeds(budget));
    return kOk;
}

Settings scenario_settings(const std::string& name) {
    Settings s;
    if (name == "fig2a") {
        s.set("q", "0.9,0.8,0.2,0.15");
        s.set("delta", "0.8,0.7");
    } else if (name == "fig2b") {
        s.set("q", "0.9,0.8,0.45,0.4");
        s.set("delta", "0.8,0.7");
    } else if (name == "corollary2") {
        s.set("channel", "collision");
        s.set("delta", "0.8,0.6");
    } else if (name == "theorem2") {
        s.set("channel", "collision");
        s.set("delta", "0.8,0.6");
        s.set("caps", "3,3");
    } else if (name == "fig4-containment") {
        s.set("channel", "collision");
        s.set("delta", "0.8,0.6");
        s.set("caps", "3,3");
        s.set("samples", "1000");
    } else if (name == "battery-occupancy") {
    } else {
        throw InvalidParameter("unknown scenario '" + name +
                               "' (fig2a, fig2b, corollary2, theorem2, fig4-containment, battery-occupancy)");
    }
    return s;
}

namespace {

int verify_containment(Context& ctx) {
    const auto& s = ctx.settings;
    const HarvestRates d = resolve_delta(s);
    const BatteryCaps caps = resolve_caps(s);
    if (!caps[0].is_finite() || !caps[1].is_finite()) {
        throw InvalidParameter("fig4-containment needs finite caps for both nodes");
    }
    const std::size_t count = parse_count(s, "samples", "1000");
    const RegionDescription finite = finite_region(d, caps);
    const RegionDescription infinite = region(collision_channel(), d);

    SlotRng rng(static_cast<std::uint64_t>(parse_int(s.get_or("seed", "1"), "seed")));
    const Point2 box = finite.lambda1_intercept();
    const double ymax = finite.lambda2_intercept().y;
    std::ostringstream os;
    os << "point_id,lambda1,lambda2,finite,infinite,agree\n";
    std::size_t contained = 0;
    for (std::size_t k = 0; k < count;) {
        const Point2 pt{rng.uniform() * box.x, rng.uniform() * ymax};
        if (!finite.contains(pt)) continue;
        const bool inner = infinite.contains(pt);
        contained += inner ? 1 : 0;
        os << k << ',' << format_number(pt.x) << ',' << format_number(pt.y) << ",inside,"
           << (inner ? "inside" : "outside") << ',' << (inner ? "true" : "false") << '\n';
        ++k;
    }

    std::optional<Point2> witness;
    for (const auto& b : infinite.sample(512)) {
        const Point2 pt{b.x * 0.99, b.y * 0.99};
        if (infinite.contains(pt) && !finite.contains(pt)) {
            witness = pt;
            break;
        }
    }
    emit(ctx, os.str(), {});
    auto& sum = summary_stream(ctx);
    sum << "fig4-containment: " << contained << "/" << count << " finite-battery points inside the unbounded region";
    if (witness) {
        sum << "; strict witness (" << format_number(witness->x) << ", " << format_number(witness->y) << ")\n";
    } else {
        sum << "; no strict witness found\n";
    }
    return contained == count && witness ? kOk : kVerificationFailed;
}

int verify_occupancy(Context& ctx) {
    SimBudget budget = resolve_budget(ctx.settings);
    struct Case {
        double delta;
        double p;
        Capacity cap;
        double expected;
    };
    const std::vector<Case> cases{
        {0.3, 0.6, Capacity::unbounded(), std::min(0.3 / 0.6, 1.0)},
        {0.8, 1.0, Capacity::finite(3), finite_nonempty_prob(0.8, 1.0, 3)},
        {0.5, 0.0, Capacity::finite(2), 1.0},
    };
    constexpr double kTol = 0.01;

    std::vector<double> observed(cases.size() * budget.seeds);
    parallel_for(observed.size(), budget.threads, [&](std::size_t job) {
        const auto& c = cases[job / budget.seeds];
        SimConfig cfg;
        cfg.delta = HarvestRates(c.delta, c.delta);
        cfg.p = TransmitProbs(c.p, c.p);
        cfg.caps = BatteryCaps(c.cap, c.cap);
        cfg.mode = {NodeMode::Dummy, NodeMode::Dummy};
        cfg.slots = budget.slots;
        cfg.burn_in = budget.burn_in;
        cfg.sample_every = budget.sample_every;
        cfg.seed = budget.base_seed + job % budget.seeds;
        observed[job] = battery_occupancy(run(cfg)).fraction[0];
    });

    std::ostringstream os;
    os << "case_id,delta,p,cap,expected,observed,agree\n";
    std::size_t agree = 0;
    for (std::size_t k = 0; k < cases.size(); ++k) {
        double mean = 0.0;
        for (std::size_t sd = 0; sd < budget.seeds; ++sd) mean += observed[k * budget.seeds + sd];
        mean /= static_cast<double>(budget.seeds);
        const bool ok = std::abs(mean - cases[k].expected) <= kTol;
        agree += ok ? 1 : 0;
        os << k << ',' << format_number(cases[k].delta) << ',' << format_number(cases[k].p) << ','
           << cases[k].cap.to_string() << ',' << format_number(cases[k].expected) << ',' << format_number(mean) << ','
           << (ok ? "true" : "false") << '\n';
    }
    emit(ctx, os.str(), budget_seeds(budget));
    summary_stream(ctx) << "battery-occupancy: " << agree << "/" << cases.size() << " cases within " << kTol << '\n';
    return agree == cases.size() ? kOk : kVerificationFailed;
}

}  // namespace

int cmd_verify(Context& ctx) {
    const auto& s = ctx.settings;
    require_format(ctx, {"csv"});
    const std::string scenario = s.get_or("scenario", "");
    if (scenario == "fig4-containment") return verify_containment(ctx);
    if (scenario == "battery-occupancy") return verify_occupancy(ctx);

    const ChannelModel ch = resolve_channel(s);
    const HarvestRates d = resolve_delta(s);
    const BatteryCaps caps = resolve_caps(s);
    const SimBudget budget = resolve_budget(s);
    const std::size_t count = parse_count(s, "points", "16");
    const auto scales = parse_list(s.get_or("scales", "0.85,1.15"), "scales");
    const double band = parse_double(s.get_or("margin_band", "0.1"), "margin_band");

    const RegionDescription r = region_for(ch, d, caps);
    std::vector<Point2> points;
    for (double scale : scales) {
        const auto pts = scaled_boundary_points(r, count, scale);
        points.insert(points.end(), pts.begin(), pts.end());
    }
    const auto rows = verify_region(ch, d, caps, points, budget, StabilityPolicy{}, band);

    std::ostringstream os;
    write_agreement_csv(os, rows);
    emit(ctx, os.str(), budget_seeds(budget));
    const auto agree = static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const VerifyRow& row) { return row.agree; }));
    summary_stream(ctx) << (scenario.empty() ? "verify" : scenario) << ": " << agree << "/" << rows.size()
                        << " points agree\n";
    return agree == rows.size() ? kOk : kVerificationFailed;
}

int cmd_channel_calc(Context& ctx) {
    const auto& s = ctx.settings;
    require_format(ctx, {"json"});
    const ChannelModel ch = resolve_channel(s);
    const auto dv = parse_pair(s.get_or("delta", "1,1"), "delta");
    const HarvestRates d(dv[0], dv[1]);
    const double value = psi(ch, d);

    json doc{{"channel", to_json(ch)},
             {"interference_gap", {interference_gap(ch, 0), interference_gap(ch, 1)}},
             {"delta", {d[0], d[1]}},
             {"psi", value},
             {"case", value >= 1.0 ? "psi_ge_1" : "psi_lt_1"},
             {"convex", value <= 1.0}};
    if (s.has("phys") || s.has("theta")) {
        const PhysicalParams phys = resolve_phys(s);
        doc["psi_physical"] = psi_physical(phys, d);
        // With unit harvest rates the convexity test reduces to theta against 1.
        const char* relation = phys.theta > 1.0 ? "theta > 1" : (phys.theta < 1.0 ? "theta < 1" : "theta = 1");
        doc["unit_harvest"] = {{"psi", psi_physical(phys, HarvestRates(1.0, 1.0))},
                               {"theta", phys.theta},
                               {"criterion", relation},
                               {"convex", phys.theta <= 1.0}};
    }
    emit(ctx, doc.dump(2) + "\n", {});
    return kOk;
}

}  // namespace ehstab::cli
