#pragma once

#include <iosfwd>
#include <string>

#include "settings.hpp"

namespace ehstab::cli {

struct Context {
    std::string subcommand;
    Settings settings;  // fully resolved
    std::ostream& out;
    std::ostream& err;
};

int cmd_region(Context& ctx);
int cmd_simulate(Context& ctx);
int cmd_sweep(Context& ctx);
int cmd_verify(Context& ctx);
int cmd_channel_calc(Context& ctx);

/// Defaults that a named verification scenario layers under the user's settings.
Settings scenario_settings(const std::string& name);

}  // namespace ehstab::cli
