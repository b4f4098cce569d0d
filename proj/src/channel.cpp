#include "ehstab/channel.hpp"

#include <cmath>
#include <string>

namespace ehstab {

ChannelModel::ChannelModel(double q1_alone, double q2_alone, double q1_joint, double q2_joint)
    : alone_{q1_alone, q2_alone}, joint_{q1_joint, q2_joint} {
    for (std::size_t i = 0; i < 2; ++i) {
        require_probability(alone_[i], "alone success probability");
        require_probability(joint_[i], "joint success probability");
        if (joint_[i] > alone_[i]) {
            throw InvalidParameter("joint success probability of node " + std::to_string(i + 1) +
                                   " exceeds its alone success probability");
        }
    }
}

void PhysicalParams::validate() const {
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw InvalidParameter(std::string(what) + " must be positive and finite");
        }
    };
    positive(theta, "theta");
    positive(K, "K");
    positive(nu, "nu");
    positive(r[0], "r1");
    positive(r[1], "r2");
    positive(ptx[0], "ptx1");
    positive(ptx[1], "ptx2");
    if (!(noise >= 0.0) || !std::isfinite(noise)) {
        throw InvalidParameter("noise power must be non-negative and finite");
    }
}

namespace {

// θ (P_j/P_i) (r_i/r_j)^ν: interference-to-signal ratio scaled by the threshold.
double interference_ratio(const PhysicalParams& phys, NodeIndex i) {
    const auto a = static_cast<std::size_t>(i);
    const auto b = static_cast<std::size_t>(other(i));
    return phys.theta * (phys.ptx[b] / phys.ptx[a]) * std::pow(phys.r[a] / phys.r[b], phys.nu);
}

}  // namespace

ChannelModel rayleigh_channel(const PhysicalParams& phys) {
    phys.validate();
    std::array<double, 2> alone{};
    std::array<double, 2> joint{};
    for (NodeIndex i = 0; i < 2; ++i) {
        const auto a = static_cast<std::size_t>(i);
        alone[a] = std::exp(-phys.theta * phys.noise * std::pow(phys.r[a], phys.nu) / (phys.K * phys.ptx[a]));
        joint[a] = alone[a] / (1.0 + interference_ratio(phys, i));
    }
    return ChannelModel(alone[0], alone[1], joint[0], joint[1]);
}

ChannelModel collision_channel() { return ChannelModel(1.0, 1.0, 0.0, 0.0); }

double interference_gap(const ChannelModel& ch, NodeIndex i) {
    require_node(i);
    return ch.alone(i) - ch.joint(i);
}

double psi(const ChannelModel& ch, const HarvestRates& delta) {
    if (ch.alone(0) <= 0.0 || ch.alone(1) <= 0.0) {
        throw DegenerateChannel("psi is undefined when an alone success probability is zero");
    }
    return interference_gap(ch, 0) * delta[1] / ch.alone(0) + interference_gap(ch, 1) * delta[0] / ch.alone(1);
}

double psi_physical(const PhysicalParams& phys, const HarvestRates& delta) {
    phys.validate();
    const double th = phys.theta;
    const double p1 = phys.ptx[0];
    const double p2 = phys.ptx[1];
    const double r1n = std::pow(phys.r[0], phys.nu);
    const double r2n = std::pow(phys.r[1], phys.nu);
    return th * p2 * r1n * delta[1] / (p1 * r2n + th * p2 * r1n) +
           th * p1 * r2n * delta[0] / (p2 * r1n + th * p1 * r2n);
}

}  // namespace ehstab
