#include "settings.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace ehstab::cli {

namespace {

const std::vector<std::string> kChannelKeys{"q", "channel", "phys"};
const std::vector<std::string> kPhysicalKeys{"theta", "noise", "k", "nu", "r", "ptx"};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string normalize_key(std::string key) {
    for (auto& ch : key) {
        ch = ch == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
    return key;
}

bool Settings::has(const std::string& key) const { return values_.contains(key); }

const std::string& Settings::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        throw InvalidParameter("missing required setting '" + key + "'");
    }
    return it->second;
}

std::string Settings::get_or(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

void Settings::set(const std::string& key, std::string value) { values_[normalize_key(key)] = std::move(value); }

void Settings::erase(const std::string& key) { values_.erase(key); }

void Settings::overlay(const Settings& top) {
    const auto touches = [&](const std::vector<std::string>& keys) {
        return std::any_of(keys.begin(), keys.end(), [&](const std::string& k) { return top.has(k); });
    };
    if (touches(kChannelKeys)) {
        for (const auto& k : kChannelKeys) erase(k);
        if (!top.has("phys")) {
            for (const auto& k : kPhysicalKeys) erase(k);
        }
    }
    for (const auto& [k, v] : top.values_) {
        values_[k] = v;
    }
}

nlohmann::json Settings::to_json() const {
    nlohmann::json obj = nlohmann::json::object();
    for (const auto& [k, v] : values_) {
        obj[k] = v;
    }
    return obj;
}

Settings Settings::from_json(const nlohmann::json& obj) {
    if (!obj.is_object()) {
        throw InvalidParameter("manifest config must be a JSON object");
    }
    Settings s;
    for (const auto& [k, v] : obj.items()) {
        s.set(k, v.is_string() ? v.get<std::string>() : v.dump());
    }
    return s;
}

Settings Settings::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidParameter("cannot read config file '" + path + "'");
    }
    Settings s;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InvalidParameter(path + ":" + std::to_string(lineno) + ": expected key = value");
        }
        s.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return s;
}

double parse_double(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
        throw InvalidParameter("'" + key + "': not a number: '" + text + "'");
    }
    return v;
}

std::int64_t parse_int(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
        // Accept 1e6-style spellings when they are exact integers.
        const double d = parse_double(t, key);
        if (d != static_cast<double>(static_cast<std::int64_t>(d))) {
            throw InvalidParameter("'" + key + "': not an integer: '" + text + "'");
        }
        return static_cast<std::int64_t>(d);
    }
    return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_double(item, key));
    }
    return out;
}

std::array<double, 2> parse_pair(const std::string& text, const std::string& key) {
    const auto v = parse_list(text, key);
    if (v.size() == 1) {
        return {v[0], v[0]};
    }
    if (v.size() != 2) {
        throw InvalidParameter("'" + key + "': expected two comma-separated values, got '" + text + "'");
    }
    return {v[0], v[1]};
}

PhysicalParams resolve_phys(const Settings& s) {
    Settings merged;
    if (s.has("phys")) {
        merged = Settings::parse_file(s.get("phys"));
    }
    for (const auto& k : kPhysicalKeys) {
        if (s.has(k)) merged.set(k, s.get(k));
    }
    // Files may also spell the per-node values out.
    for (const char* k : {"r1", "r2", "ptx1", "ptx2"}) {
        if (s.has(k)) merged.set(k, s.get(k));
    }
    PhysicalParams phys;
    phys.theta = parse_double(merged.get("theta"), "theta");
    phys.noise = parse_double(merged.get_or("noise", "0"), "noise");
    phys.K = parse_double(merged.get_or("k", "1"), "k");
    phys.nu = parse_double(merged.get("nu"), "nu");
    const auto pick = [&](const char* pair_key, const char* first, const char* second) {
        std::array<double, 2> v{};
        if (merged.has(pair_key)) {
            v = parse_pair(merged.get(pair_key), pair_key);
        } else {
            v = {parse_double(merged.get(first), first), parse_double(merged.get(second), second)};
        }
        return v;
    };
    phys.r = pick("r", "r1", "r2");
    phys.ptx = pick("ptx", "ptx1", "ptx2");
    phys.validate();
    return phys;
}

ChannelModel resolve_channel(const Settings& s) {
    if (s.has("phys") || s.has("theta")) {
        return rayleigh_channel(resolve_phys(s));
    }
    if (s.has("q")) {
        const auto q = parse_list(s.get("q"), "q");
        if (q.size() != 4) {
            throw InvalidParameter("'q' expects four values: q1_alone,q2_alone,q1_joint,q2_joint");
        }
        return ChannelModel(q[0], q[1], q[2], q[3]);
    }
    const std::string name = s.get_or("channel", "collision");
    if (name != "collision") {
        throw InvalidParameter("unknown channel '" + name + "' (use collision, --q or --phys)");
    }
    return collision_channel();
}

HarvestRates resolve_delta(const Settings& s) {
    const auto d = parse_pair(s.get("delta"), "delta");
    return HarvestRates(d[0], d[1]);
}

BatteryCaps resolve_caps(const Settings& s) {
    const std::string text = s.get_or("caps", "inf");
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        parts.push_back(trim(item));
    }
    if (parts.size() == 1) {
        parts.push_back(parts[0]);
    }
    if (parts.size() != 2) {
        throw InvalidParameter("'caps' expects c1,c2 or a single value, got '" + text + "'");
    }
    return BatteryCaps(Capacity::parse(parts[0]), Capacity::parse(parts[1]));
}

SimConfig resolve_sim_config(const Settings& s) {
    SimConfig cfg;
    const auto lambda = parse_pair(s.get_or("lambda", "0,0"), "lambda");
    cfg.lambda = RatePoint(lambda[0], lambda[1]);
    cfg.delta = resolve_delta(s);
    const auto p = parse_pair(s.get("p"), "p");
    cfg.p = TransmitProbs(p[0], p[1]);
    cfg.caps = resolve_caps(s);
    cfg.channel = resolve_channel(s);

    std::vector<std::string> modes;
    std::stringstream ss(s.get_or("mode", "normal"));
    std::string item;
    while (std::getline(ss, item, ',')) {
        modes.push_back(trim(item));
    }
    if (modes.size() == 1) {
        modes.push_back(modes[0]);
    }
    if (modes.size() != 2) {
        throw InvalidParameter("'mode' expects m1,m2 or a single mode");
    }
    cfg.mode = {parse_node_mode(modes[0]), parse_node_mode(modes[1])};

    cfg.slots = parse_int(s.get_or("slots", "1000000"), "slots");
    cfg.seed = static_cast<std::uint64_t>(parse_int(s.get_or("seed", "1"), "seed"));
    cfg.burn_in = parse_int(s.get_or("burn_in", "0"), "burn_in");
    cfg.sample_every = parse_int(s.get_or("sample_every", "100"), "sample_every");
    const auto q0 = parse_pair(s.get_or("initial_queue", "0,0"), "initial_queue");
    const auto b0 = parse_pair(s.get_or("initial_battery", "0,0"), "initial_battery");
    for (std::size_t i = 0; i < 2; ++i) {
        cfg.initial[i].queue = static_cast<std::int64_t>(q0[i]);
        cfg.initial[i].battery = static_cast<std::int64_t>(b0[i]);
    }
    cfg.validate();
    return cfg;
}

SimBudget resolve_budget(const Settings& s) {
    SimBudget b;
    b.slots = parse_int(s.get_or("slots", "1000000"), "slots");
    b.burn_in = parse_int(s.get_or("burn_in", "100000"), "burn_in");
    const auto seeds = parse_int(s.get_or("seeds", "5"), "seeds");
    if (seeds < 1) {
        throw InvalidParameter("'seeds' must be at least 1");
    }
    b.seeds = static_cast<std::size_t>(seeds);
    b.base_seed = static_cast<std::uint64_t>(parse_int(s.get_or("seed", "1"), "seed"));
    b.sample_every = parse_int(s.get_or("sample_every", "100"), "sample_every");
    b.threads = static_cast<unsigned>(parse_int(s.get_or("threads", "0"), "threads"));
    if (b.slots <= b.burn_in || b.burn_in < 0 || b.sample_every < 1) {
        throw InvalidParameter("budget needs slots > burn_in >= 0 and sample_every >= 1");
    }
    return b;
}

}  // namespace ehstab::cli
