#include "ehstab/cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <ostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace ehstab::cli {

namespace {

struct Subcommand {
    std::string name;
    std::function<int(Context&)> handler;
    CLI::App* app = nullptr;
};

/// Registers a value flag whose text is recorded under `key` when present.
void flag(CLI::App* app, Settings& given, const std::string& name, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(name, [&given, key](const std::string& v) { given.set(key, v); }, help);
}

void channel_flags(CLI::App* app, Settings& given) {
    flag(app, given, "--q", "q", "MPR success probabilities q1_alone,q2_alone,q1_joint,q2_joint");
    flag(app, given, "--channel", "channel", "named channel (collision)");
    flag(app, given, "--phys", "phys", "physical-layer parameter file (key = value)");
}

void budget_flags(CLI::App* app, Settings& given) {
    flag(app, given, "--slots", "slots", "slots per simulation run");
    flag(app, given, "--burn-in", "burn_in", "slots discarded before drift estimation");
    flag(app, given, "--seeds", "seeds", "independent runs per rate point");
    flag(app, given, "--seed", "seed", "first seed; runs use seed, seed+1, ...");
    flag(app, given, "--sample-every", "sample_every", "queue sampling period in slots");
    flag(app, given, "--threads", "threads", "worker threads (0 = all cores)");
}

void common_flags(CLI::App* app, Settings& given) {
    flag(app, given, "--out", "out", "output path (default stdout); a manifest is written beside it");
    flag(app, given, "--format", "format", "output format");
    flag(app, given, "--config", "config", "flat key = value config file");
    flag(app, given, "--from-manifest", "from_manifest", "rerun from a manifest written by an earlier run");
}

Settings subcommand_defaults(const std::string& name) {
    Settings s;
    if (name == "region") {
        s.set("format", "json");
        s.set("samples", "512");
        s.set("caps", "inf");
    } else if (name == "simulate") {
        s.set("format", "json");
        s.set("lambda", "0,0");
        s.set("caps", "inf");
        s.set("mode", "normal");
        s.set("slots", "1000000");
        s.set("seed", "1");
        s.set("burn_in", "0");
        s.set("sample_every", "100");
    } else if (name == "sweep" || name == "verify") {
        s.set("format", "csv");
        s.set("caps", "inf");
        s.set("slots", "1000000");
        s.set("burn_in", "100000");
        s.set("seeds", "5");
        s.set("seed", "1");
        s.set("sample_every", "100");
        if (name == "sweep") {
            s.set("grid", "8,8");
            s.set("l1_range", "0,1");
            s.set("l2_range", "0,1");
        } else {
            s.set("points", "16");
            s.set("scales", "0.85,1.15");
            s.set("margin_band", "0.1");
        }
    } else if (name == "channel-calc") {
        s.set("format", "json");
        s.set("delta", "1,1");
    }
    return s;
}

/// Defaults, then scenario, then config file or manifest, then flags.
Settings resolve(const std::string& name, const Settings& given) {
    Settings s = subcommand_defaults(name);
    Settings lower;
    if (given.has("from_manifest")) {
        std::ifstream in(given.get("from_manifest"));
        if (!in) throw InvalidParameter("cannot read manifest '" + given.get("from_manifest") + "'");
        const auto doc = nlohmann::json::parse(in, nullptr, false);
        if (doc.is_discarded() || !doc.contains("config")) {
            throw InvalidParameter("'" + given.get("from_manifest") + "' is not a run manifest");
        }
        if (doc.value("subcommand", name) != name) {
            throw InvalidParameter("manifest was written by '" + doc.value("subcommand", std::string{}) +
                                   "', not '" + name + "'");
        }
        lower = Settings::from_json(doc.at("config"));
    }
    if (given.has("config")) {
        lower.overlay(Settings::parse_file(given.get("config")));
    }
    const std::string scenario = given.get_or("scenario", lower.get_or("scenario", ""));
    if (!scenario.empty()) {
        s.overlay(scenario_settings(scenario));
    }
    s.overlay(lower);
    Settings top = given;
    top.erase("config");
    top.erase("from_manifest");
    s.overlay(top);
    return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stability regions of two-node slotted ALOHA with energy harvesting"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    Settings given;
    std::vector<Subcommand> subs{
        {"region", cmd_region},   {"simulate", cmd_simulate},         {"sweep", cmd_sweep},
        {"verify", cmd_verify},   {"channel-calc", cmd_channel_calc},
    };

    auto* region = app.add_subcommand("region", "emit the analytic stability region boundary");
    channel_flags(region, given);
    flag(region, given, "--delta", "delta", "harvest rates d1,d2");
    flag(region, given, "--caps", "caps", "battery capacities c1,c2 or inf");
    flag(region, given, "--samples", "samples", "boundary sample count");
    common_flags(region, given);
    subs[0].app = region;

    auto* simulate = app.add_subcommand("simulate", "run one seeded simulation");
    channel_flags(simulate, given);
    flag(simulate, given, "--delta", "delta", "harvest rates d1,d2");
    flag(simulate, given, "--p", "p", "transmit probabilities p1,p2");
    flag(simulate, given, "--caps", "caps", "battery capacities c1,c2 or inf");
    flag(simulate, given, "--lambda", "lambda", "arrival rates l1,l2");
    flag(simulate, given, "--mode", "mode", "node modes m1,m2 (normal, saturated, dummy)");
    flag(simulate, given, "--slots", "slots", "slots to simulate");
    flag(simulate, given, "--seed", "seed", "RNG seed");
    flag(simulate, given, "--burn-in", "burn_in", "slots excluded from measured counters");
    flag(simulate, given, "--sample-every", "sample_every", "queue sampling period in slots");
    flag(simulate, given, "--initial-queue", "initial_queue", "initial queue lengths q1,q2");
    flag(simulate, given, "--initial-battery", "initial_battery", "initial battery levels b1,b2");
    common_flags(simulate, given);
    subs[1].app = simulate;

    auto* sweep = app.add_subcommand("sweep", "classify a grid of arrival rates by simulation");
    channel_flags(sweep, given);
    flag(sweep, given, "--delta", "delta", "harvest rates d1,d2");
    flag(sweep, given, "--p", "p", "fixed transmit probabilities (default: best operating point per cell)");
    flag(sweep, given, "--caps", "caps", "battery capacities c1,c2 or inf");
    flag(sweep, given, "--l1-range", "l1_range", "lambda1 range lo,hi");
    flag(sweep, given, "--l2-range", "l2_range", "lambda2 range lo,hi");
    flag(sweep, given, "--grid", "grid", "cells nx,ny (0 gives an empty grid)");
    budget_flags(sweep, given);
    common_flags(sweep, given);
    subs[2].app = sweep;

    auto* verify = app.add_subcommand("verify", "compare analytic and simulated stability");
    channel_flags(verify, given);
    flag(verify, given, "--scenario", "scenario",
         "fig2a, fig2b, corollary2, theorem2, fig4-containment or battery-occupancy");
    flag(verify, given, "--delta", "delta", "harvest rates d1,d2");
    flag(verify, given, "--caps", "caps", "battery capacities c1,c2 or inf");
    flag(verify, given, "--points", "points", "boundary points per scale");
    flag(verify, given, "--scales", "scales", "radial scale factors");
    flag(verify, given, "--margin-band", "margin_band", "relative radial band around the boundary to reject");
    budget_flags(verify, given);
    common_flags(verify, given);
    subs[3].app = verify;

    auto* calc = app.add_subcommand("channel-calc", "derive success probabilities and the shape parameter");
    channel_flags(calc, given);
    flag(calc, given, "--delta", "delta", "harvest rates d1,d2 (default 1,1)");
    flag(calc, given, "--theta", "theta", "SINR threshold");
    flag(calc, given, "--noise", "noise", "noise power");
    flag(calc, given, "--K", "k", "path-loss constant");
    flag(calc, given, "--nu", "nu", "path-loss exponent");
    flag(calc, given, "--r", "r", "distances r1,r2");
    flag(calc, given, "--ptx", "ptx", "transmit powers p1,p2");
    common_flags(calc, given);
    subs[4].app = calc;

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    for (auto& sub : subs) {
        if (!sub.app->parsed()) continue;
        try {
            Context ctx{sub.name, resolve(sub.name, given), out, err};
            return sub.handler(ctx);
        } catch (const std::invalid_argument& e) {
            err << "error: " << e.what() << '\n';
            return kUsage;
        } catch (const std::domain_error& e) {
            err << "error: " << e.what() << '\n';
            return kUsage;
        } catch (const nlohmann::json::exception& e) {
            err << "error: " << e.what() << '\n';
            return kUsage;
        }
    }
    return kUsage;
}

}  // namespace ehstab::cli
