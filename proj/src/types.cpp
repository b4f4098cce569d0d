#include "ehstab/types.hpp"

#include <charconv>
#include <cmath>

namespace ehstab {

void require_node(NodeIndex i) {
    if (i != 0 && i != 1) {
        throw InvalidParameter("node index must be 0 or 1, got " + std::to_string(i));
    }
}

void require_probability(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw InvalidParameter(std::string(what) + " must lie in [0,1], got " + std::to_string(v));
    }
}

Capacity Capacity::finite(std::int64_t chunks) {
    if (chunks < 1) {
        throw InvalidParameter("battery capacity must be >= 1 chunk, got " + std::to_string(chunks));
    }
    Capacity cap;
    cap.chunks_ = chunks;
    return cap;
}

std::int64_t Capacity::chunks() const {
    if (!chunks_) {
        throw std::logic_error("chunks() on an unbounded capacity");
    }
    return *chunks_;
}

std::string Capacity::to_string() const { return chunks_ ? std::to_string(*chunks_) : "inf"; }

Capacity Capacity::parse(const std::string& text) {
    if (text == "inf" || text == "unbounded") {
        return unbounded();
    }
    std::int64_t value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw InvalidParameter("cannot parse battery capacity '" + text + "'");
    }
    return finite(value);
}

}  // namespace ehstab
