#pragma once

#include "ehstab/types.hpp"

namespace ehstab {

/// Multipacket-reception channel described by four success probabilities:
/// node i alone on the channel, and node i with both nodes transmitting.
///
/// Construction only checks 0 <= joint <= alone <= 1. Operations that need a
/// strictly positive gap (alone - joint) throw DegenerateChannel themselves.
class ChannelModel {
public:
    ChannelModel(double q1_alone, double q2_alone, double q1_joint, double q2_joint);

    double alone(NodeIndex i) const { return alone_[static_cast<std::size_t>(i)]; }
    double joint(NodeIndex i) const { return joint_[static_cast<std::size_t>(i)]; }

    bool operator==(const ChannelModel&) const = default;

private:
    std::array<double, 2> alone_;
    std::array<double, 2> joint_;
};

/// Rayleigh-fading link budget for the two-transmitter uplink.
struct PhysicalParams {
    double theta = 1.0;   // SINR decoding threshold
    double noise = 0.0;   // background noise power [W]
    double K = 1.0;       // path-loss constant
    double nu = 2.0;      // propagation loss exponent
    std::array<double, 2> r{1.0, 1.0};    // node-receiver distance [m]
    std::array<double, 2> ptx{1.0, 1.0};  // transmit power [W]

    void validate() const;
};

/// Success probabilities under independent unit-mean exponential power fades.
ChannelModel rayleigh_channel(const PhysicalParams& phys);

/// Classical collision channel: alone always succeeds, overlap always fails.
ChannelModel collision_channel();

/// Alone-minus-joint success probability of node i.
double interference_gap(const ChannelModel& ch, NodeIndex i);

/// Shape parameter Ψ = Δ₁δ₂/q₁ + Δ₂δ₁/q₂. Ψ > 1 means a non-convex region,
/// Ψ <= 1 a convex polygon.
double psi(const ChannelModel& ch, const HarvestRates& delta);

/// Ψ written directly in terms of the link budget; agrees with
/// psi(rayleigh_channel(phys), delta) up to round-off.
double psi_physical(const PhysicalParams& phys, const HarvestRates& delta);

}  // namespace ehstab
