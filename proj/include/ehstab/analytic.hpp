#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "ehstab/channel.hpp"
#include "ehstab/types.hpp"

namespace ehstab {

/// Tolerance for single closed-form identities.
inline constexpr double kClosedFormTol = 1e-12;
/// Tolerance for identities that chain several closed forms (optimizer, junctions).
inline constexpr double kOptimizationTol = 1e-9;

/// Unchecked point in the (λ₁, λ₂) plane; geometry helper, not a rate.
struct Point2 {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point2&) const = default;
};

/// Corner points of the closure boundary. P_A lies on the λ₂ axis and P_C on
/// the λ₁ axis; the curve (when present) runs between P_B1 and P_B2, and P_B3
/// is the corner of the two-line polygon.
struct BoundaryPoints {
    Point2 a;
    Point2 b1;
    Point2 b2;
    Point2 b3;
    Point2 c;
};

struct LineSegment {
    Point2 from;
    Point2 to;
};

/// Arc of √(a1·λ₁) + √(a2·λ₂) = rhs between two points on it.
struct SqrtCurve {
    double a1 = 1.0;
    double a2 = 1.0;
    double rhs = 1.0;
    Point2 from;
    Point2 to;

    double lambda2_at(double lambda1) const;
};

using Segment = std::variant<LineSegment, SqrtCurve>;

enum class RegionCase { PsiAtLeastOne, PsiBelowOne };

const char* to_string(RegionCase c);

struct StabilityVerdictAnalytic {
    bool inside = false;
    /// Boundary λ₂ at the point's λ₁ minus its λ₂; positive in the interior.
    double margin = 0.0;
};

/// Piecewise boundary of a stability region, ordered from the λ₂-axis
/// intercept to the λ₁-axis intercept. Zero-length pieces are dropped, so a
/// Ψ >= 1 region can have fewer than three segments.
class RegionDescription {
public:
    RegionDescription(std::vector<Segment> segments, double psi, RegionCase shape);

    const std::vector<Segment>& segments() const { return segments_; }
    double psi() const { return psi_; }
    RegionCase shape() const { return shape_; }

    Point2 lambda2_intercept() const;
    Point2 lambda1_intercept() const;

    /// Boundary λ₂ at a given λ₁ in [0, λ₁-intercept].
    double boundary_lambda2(double lambda1) const;

    StabilityVerdictAnalytic classify(Point2 pt) const;
    bool contains(Point2 pt) const { return classify(pt).inside; }

    /// The boundary point on the ray from the origin through `direction`.
    Point2 radial_projection(Point2 direction) const;

    /// `n` boundary points evenly spaced in arc length, each evaluated
    /// exactly on its segment. First is the λ₂ intercept, last the λ₁ intercept.
    std::vector<Point2> sample(std::size_t n) const;

    struct TaggedPoint {
        Point2 point;
        std::size_t segment = 0;
    };
    /// As sample(), also reporting which segment each point came from.
    std::vector<TaggedPoint> sample_tagged(std::size_t n) const;

private:
    std::vector<Segment> segments_;
    double psi_;
    RegionCase shape_;
};

BoundaryPoints boundary_points(const ChannelModel& ch, const HarvestRates& d);

/// Closure of the stability region over all transmit probabilities
/// (infinite batteries, general MPR channel).
RegionDescription region(const ChannelModel& ch, const HarvestRates& d);

StabilityVerdictAnalytic region_contains(const ChannelModel& ch, const HarvestRates& d, const RatePoint& pt);

/// μᵢˢ = min(δᵢ,pᵢ)(qᵢ − Δᵢ·min(δⱼ,pⱼ)), throughput with both buffers saturated.
RatePoint saturated_throughput(const ChannelModel& ch, const HarvestRates& d, const TransmitProbs& p);

/// Sufficient condition at fixed p: pt is componentwise <= the saturated throughput.
bool inner_bound_contains(const ChannelModel& ch, const HarvestRates& d, const TransmitProbs& p,
                          const RatePoint& pt);

/// Necessary condition at fixed p: pt lies in R₁ ∪ R₂, the stability regions
/// of the two systems where one node sends dummy packets.
bool outer_bound_contains(const ChannelModel& ch, const HarvestRates& d, const TransmitProbs& p,
                          const RatePoint& pt);

/// Largest λᵢ on the closure boundary for a given λⱼ, j = other(i).
/// Throws InvalidParameter if λⱼ is outside [0, δⱼqⱼ].
double closure_boundary_lambda(const ChannelModel& ch, const HarvestRates& d, NodeIndex i, double lambda_j);

/// Transmit probabilities p ⪯ δ whose saturated throughput dominates `pt`,
/// equal to it when `pt` is on the boundary. Accepts points inside or on
/// the boundary (within kOptimizationTol).
TransmitProbs boundary_operating_probabilities(const ChannelModel& ch, const HarvestRates& d, Point2 pt);

/// Transmit probabilities that stably support a point strictly inside the
/// region. The saturated operating point is the radial projection of `pt`
/// onto the boundary, so every component keeps the same relative margin.
/// Throws InvalidParameter for points outside or on the boundary.
TransmitProbs achieving_probabilities(const ChannelModel& ch, const HarvestRates& d, const RatePoint& pt);

// ---- Finite batteries ------------------------------------------------------

/// Stationary probability that a capacity-c battery, recharged at rate δ and
/// drained at rate p whenever non-empty, holds energy (M/M/1/c formula).
/// p = 0 gives 1 for δ > 0: the battery fills and is never drained.
double finite_nonempty_prob(double delta, double p, std::int64_t capacity);

/// Largest achievable attempt rate p·f(p) over p in [0,1]; δ when unbounded.
double max_attempt_rate(double delta, const Capacity& cap);

/// Transmit probability p with p·f(p) = target; inverse of the map above.
double attempt_prob_for_rate(double delta, const Capacity& cap, double target);

/// Finite-battery saturated throughput pᵢfᵢ(qᵢ − Δᵢ·pⱼfⱼ); with unbounded caps
/// this reduces to saturated_throughput.
RatePoint finite_saturated_throughput(const ChannelModel& ch, const HarvestRates& d, const BatteryCaps& caps,
                                      const TransmitProbs& p);

/// Collision-channel region with finite batteries, built from the explicit
/// two-case description in terms of λᵢᵐᵃˣ. Unbounded caps delegate to region().
RegionDescription finite_region(const HarvestRates& d, const BatteryCaps& caps);

/// MPR generalisation: the infinite-battery closure with each δᵢ replaced by
/// λᵢᵐᵃˣ, the box the attempt rates are confined to.
RegionDescription finite_region_mpr(const ChannelModel& ch, const HarvestRates& d, const BatteryCaps& caps);

StabilityVerdictAnalytic finite_region_contains(const HarvestRates& d, const BatteryCaps& caps, const RatePoint& pt);

/// Transmit probabilities for a finite-battery system whose saturated
/// operating point is `pt` (on or inside finite_region_mpr).
TransmitProbs finite_operating_probabilities(const ChannelModel& ch, const HarvestRates& d, const BatteryCaps& caps,
                                             Point2 pt);

}  // namespace ehstab
