#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace ehstab {

/// Raised when a parameter violates its documented range.
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an operation needs a strictly positive interference gap
/// (alone-minus-joint success probability) and the channel does not have one.
class DegenerateChannel : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Node index, 0 or 1. `other(i)` is the interfering node.
using NodeIndex = int;
constexpr NodeIndex other(NodeIndex i) noexcept { return 1 - i; }

void require_node(NodeIndex i);
void require_probability(double v, const char* what);

/// Pair of per-node probabilities in [0,1]; base for the rate/probability
/// value types below so each keeps its own name at call sites.
template <typename Tag>
struct ProbabilityPair {
    std::array<double, 2> v{0.0, 0.0};

    constexpr ProbabilityPair() = default;
    ProbabilityPair(double first, double second) : v{first, second} {
        require_probability(first, Tag::name);
        require_probability(second, Tag::name);
    }

    double operator[](NodeIndex i) const { return v[static_cast<std::size_t>(i)]; }
    bool operator==(const ProbabilityPair&) const = default;
};

struct HarvestTag { static constexpr const char* name = "harvest rate"; };
struct TransmitTag { static constexpr const char* name = "transmit probability"; };
struct RateTag { static constexpr const char* name = "arrival rate"; };

/// Energy harvesting rates, E[H_i(n)] per slot.
using HarvestRates = ProbabilityPair<HarvestTag>;
/// ALOHA transmit probabilities used while a node is active.
using TransmitProbs = ProbabilityPair<TransmitTag>;
/// Packet arrival rates, E[A_i(n)] per slot. Also used for throughput vectors.
using RatePoint = ProbabilityPair<RateTag>;

/// Battery capacity in energy chunks; empty optional means unbounded.
class Capacity {
public:
    constexpr Capacity() = default;
    static Capacity unbounded() { return Capacity{}; }
    static Capacity finite(std::int64_t chunks);

    bool is_finite() const { return chunks_.has_value(); }
    std::int64_t chunks() const;
    std::string to_string() const;
    static Capacity parse(const std::string& text);

    bool operator==(const Capacity&) const = default;

private:
    std::optional<std::int64_t> chunks_;
};

struct BatteryCaps {
    std::array<Capacity, 2> c{};

    BatteryCaps() = default;
    BatteryCaps(Capacity first, Capacity second) : c{first, second} {}
    static BatteryCaps unbounded() { return {}; }

    const Capacity& operator[](NodeIndex i) const { return c[static_cast<std::size_t>(i)]; }
    bool any_finite() const { return c[0].is_finite() || c[1].is_finite(); }
    bool operator==(const BatteryCaps&) const = default;
};

}  // namespace ehstab
