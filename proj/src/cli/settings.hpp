#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ehstab/channel.hpp"
#include "ehstab/sim.hpp"
#include "ehstab/stability.hpp"
#include "ehstab/types.hpp"

namespace ehstab::cli {

/// Flat key=value configuration. Keys use underscores (`burn_in`); values are
/// the literal text a user would type after the matching flag.
class Settings {
public:
    Settings() = default;

    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    void set(const std::string& key, std::string value);
    void erase(const std::string& key);

    /// Later layers win. Setting any channel key drops the other two so a
    /// lower layer's channel never leaks through.
    void overlay(const Settings& top);

    const std::map<std::string, std::string>& values() const { return values_; }

    nlohmann::json to_json() const;
    static Settings from_json(const nlohmann::json& obj);

    /// `key = value` lines; blank lines and `#` comments ignored.
    static Settings parse_file(const std::string& path);

private:
    std::map<std::string, std::string> values_;
};

std::string normalize_key(std::string key);

double parse_double(const std::string& text, const std::string& key);
std::int64_t parse_int(const std::string& text, const std::string& key);
std::vector<double> parse_list(const std::string& text, const std::string& key);
std::array<double, 2> parse_pair(const std::string& text, const std::string& key);

ChannelModel resolve_channel(const Settings& s);
PhysicalParams resolve_phys(const Settings& s);
HarvestRates resolve_delta(const Settings& s);
BatteryCaps resolve_caps(const Settings& s);
SimConfig resolve_sim_config(const Settings& s);
SimBudget resolve_budget(const Settings& s);

}  // namespace ehstab::cli
