#include "ehstab/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ehstab {

namespace {

double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }

double distance(Point2 a, Point2 b) { return std::hypot(b.x - a.x, b.y - a.y); }

Point2 segment_from(const Segment& s) {
    return std::visit([](const auto& seg) { return seg.from; }, s);
}

Point2 segment_to(const Segment& s) {
    return std::visit([](const auto& seg) { return seg.to; }, s);
}

void set_from(Segment& s, Point2 p) {
    std::visit([p](auto& seg) { seg.from = p; }, s);
}

void require_nondegenerate(const ChannelModel& ch) {
    for (NodeIndex i = 0; i < 2; ++i) {
        if (!(interference_gap(ch, i) > 0.0)) {
            throw DegenerateChannel("node " + std::to_string(i + 1) +
                                    " has no interference gap (joint == alone success probability)");
        }
    }
}

// Curve points parameterised by u = √(a1·λ₁), which stays smooth where the
// curve meets an axis.
Point2 curve_point(const SqrtCurve& c, double u) {
    const double v = std::max(c.rhs - u, 0.0);
    return {u * u / c.a1, v * v / c.a2};
}

constexpr int kCurveArcSteps = 2048;

std::vector<double> curve_arc_table(const SqrtCurve& c) {
    const double u0 = std::sqrt(c.a1 * c.from.x);
    const double u1 = std::sqrt(c.a1 * c.to.x);
    std::vector<double> cumulative(kCurveArcSteps + 1, 0.0);
    Point2 prev = curve_point(c, u0);
    for (int k = 1; k <= kCurveArcSteps; ++k) {
        const Point2 cur = curve_point(c, u0 + (u1 - u0) * k / kCurveArcSteps);
        cumulative[static_cast<std::size_t>(k)] = cumulative[static_cast<std::size_t>(k - 1)] + distance(prev, cur);
        prev = cur;
    }
    return cumulative;
}

double segment_length(const Segment& s) {
    if (const auto* line = std::get_if<LineSegment>(&s)) {
        return distance(line->from, line->to);
    }
    return curve_arc_table(std::get<SqrtCurve>(s)).back();
}

Point2 point_at_arc(const Segment& s, double arc) {
    if (const auto* line = std::get_if<LineSegment>(&s)) {
        const double len = distance(line->from, line->to);
        const double t = len > 0.0 ? std::clamp(arc / len, 0.0, 1.0) : 0.0;
        if (t >= 1.0) {
            return line->to;
        }
        return {line->from.x + t * (line->to.x - line->from.x), line->from.y + t * (line->to.y - line->from.y)};
    }
    const auto& curve = std::get<SqrtCurve>(s);
    const auto table = curve_arc_table(curve);
    const double u0 = std::sqrt(curve.a1 * curve.from.x);
    const double u1 = std::sqrt(curve.a1 * curve.to.x);
    if (arc <= 0.0) {
        return curve.from;
    }
    if (arc >= table.back()) {
        return curve.to;
    }
    const auto it = std::upper_bound(table.begin(), table.end(), arc);
    const auto k = static_cast<std::size_t>(it - table.begin());
    const double seg = table[k] - table[k - 1];
    const double frac = seg > 0.0 ? (arc - table[k - 1]) / seg : 0.0;
    const double step = (u1 - u0) / kCurveArcSteps;
    return curve_point(curve, u0 + step * (static_cast<double>(k - 1) + frac));
}

}  // namespace

double SqrtCurve::lambda2_at(double lambda1) const {
    const double v = std::max(rhs - std::sqrt(a1 * std::max(lambda1, 0.0)), 0.0);
    return v * v / a2;
}

const char* to_string(RegionCase c) { return c == RegionCase::PsiAtLeastOne ? "psi_ge_1" : "psi_lt_1"; }

RegionDescription::RegionDescription(std::vector<Segment> segments, double psi, RegionCase shape)
    : psi_(psi), shape_(shape) {
    if (segments.empty()) {
        throw InvalidParameter("a region boundary needs at least one segment");
    }
    const Point2 start = segment_from(segments.front());
    const Point2 end = segment_to(segments.back());
    for (auto& seg : segments) {
        if (distance(segment_from(seg), segment_to(seg)) <= kClosedFormTol) {
            continue;
        }
        if (!segments_.empty()) {
            set_from(seg, segment_to(segments_.back()));
        }
        segments_.push_back(seg);
    }
    if (segments_.empty()) {
        segments_.push_back(LineSegment{start, end});
    }
}

Point2 RegionDescription::lambda2_intercept() const { return segment_from(segments_.front()); }

Point2 RegionDescription::lambda1_intercept() const { return segment_to(segments_.back()); }

double RegionDescription::boundary_lambda2(double lambda1) const {
    const double xmax = lambda1_intercept().x;
    if (lambda1 < -kClosedFormTol || lambda1 > xmax + kClosedFormTol) {
        throw InvalidParameter("lambda1 outside the boundary's domain");
    }
    lambda1 = std::clamp(lambda1, 0.0, xmax);
    for (const auto& s : segments_) {
        const Point2 from = segment_from(s);
        const Point2 to = segment_to(s);
        if (lambda1 < from.x || lambda1 > to.x) {
            continue;
        }
        if (const auto* line = std::get_if<LineSegment>(&s)) {
            if (to.x == from.x) {
                return std::max(from.y, to.y);
            }
            const double t = (lambda1 - from.x) / (to.x - from.x);
            return line->from.y + t * (line->to.y - line->from.y);
        }
        return std::get<SqrtCurve>(s).lambda2_at(lambda1);
    }
    return lambda1_intercept().y;
}

StabilityVerdictAnalytic RegionDescription::classify(Point2 pt) const {
    const double xmax = lambda1_intercept().x;
    double margin = 0.0;
    if (pt.x < 0.0 || pt.y < 0.0) {
        margin = std::min(pt.x, pt.y);
    } else if (pt.x > xmax) {
        margin = (xmax - pt.x) - pt.y;
    } else {
        margin = boundary_lambda2(pt.x) - pt.y;
    }
    return {margin > kClosedFormTol, margin};
}

Point2 RegionDescription::radial_projection(Point2 direction) const {
    if (!(direction.x >= 0.0 && direction.y >= 0.0) || (direction.x == 0.0 && direction.y == 0.0)) {
        throw InvalidParameter("radial projection needs a non-zero direction in the first quadrant");
    }
    if (direction.y == 0.0) {
        return lambda1_intercept();
    }
    if (direction.x == 0.0) {
        return lambda2_intercept();
    }
    for (const auto& s : segments_) {
        const Point2 from = segment_from(s);
        const Point2 to = segment_to(s);
        if (const auto* curve = std::get_if<SqrtCurve>(&s)) {
            const double root = std::sqrt(curve->a1 * direction.x) + std::sqrt(curve->a2 * direction.y);
            const double scale = curve->rhs * curve->rhs / (root * root);
            const Point2 hit{scale * direction.x, scale * direction.y};
            if (hit.x >= from.x - kClosedFormTol && hit.x <= to.x + kClosedFormTol) {
                return hit;
            }
            continue;
        }
        const Point2 edge{to.x - from.x, to.y - from.y};
        const double denom = cross(edge, direction);
        if (denom == 0.0) {
            continue;
        }
        const double t = -cross(from, direction) / denom;
        if (t >= -kClosedFormTol && t <= 1.0 + kClosedFormTol) {
            const double tc = std::clamp(t, 0.0, 1.0);
            return {from.x + tc * edge.x, from.y + tc * edge.y};
        }
    }
    // Rounding can let the ray slip through a junction; take the nearest end.
    return lambda1_intercept();
}

std::vector<Point2> RegionDescription::sample(std::size_t n) const {
    std::vector<Point2> out;
    out.reserve(n);
    for (const auto& t : sample_tagged(n)) {
        out.push_back(t.point);
    }
    return out;
}

std::vector<RegionDescription::TaggedPoint> RegionDescription::sample_tagged(std::size_t n) const {
    std::vector<TaggedPoint> out;
    if (n == 0) {
        return out;
    }
    out.reserve(n);
    std::vector<double> lengths;
    double total = 0.0;
    for (const auto& s : segments_) {
        lengths.push_back(segment_length(s));
        total += lengths.back();
    }
    if (n == 1 || total <= 0.0) {
        out.assign(n, TaggedPoint{lambda2_intercept(), 0});
        return out;
    }
    std::size_t seg = 0;
    double offset = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k + 1 == n) {
            out.push_back({lambda1_intercept(), segments_.size() - 1});
            break;
        }
        const double target = total * static_cast<double>(k) / static_cast<double>(n - 1);
        while (seg + 1 < segments_.size() && target > offset + lengths[seg]) {
            offset += lengths[seg];
            ++seg;
        }
        out.push_back({point_at_arc(segments_[seg], target - offset), seg});
    }
    return out;
}

BoundaryPoints boundary_points(const ChannelModel& ch, const HarvestRates& d) {
    require_nondegenerate(ch);
    const double q1 = ch.alone(0);
    const double q2 = ch.alone(1);
    const double g1 = interference_gap(ch, 0);
    const double g2 = interference_gap(ch, 1);
    const double d1 = d[0];
    const double d2 = d[1];
    BoundaryPoints bp;
    bp.a = {0.0, d2 * q2};
    bp.b1 = {q2 * (q1 - g1 * d2) * (q1 - g1 * d2) / (g2 * q1), g1 * d2 * d2 * q2 / q1};
    bp.b2 = {g2 * d1 * d1 * q1 / q2, q1 * (q2 - g2 * d1) * (q2 - g2 * d1) / (g1 * q2)};
    bp.b3 = {d1 * (q1 - g1 * d2), d2 * (q2 - g2 * d1)};
    bp.c = {d1 * q1, 0.0};
    return bp;
}

RegionDescription region(const ChannelModel& ch, const HarvestRates& d) {
    const BoundaryPoints bp = boundary_points(ch, d);
    const double shape = psi(ch, d);
    if (shape >= 1.0) {
        SqrtCurve curve{interference_gap(ch, 1), interference_gap(ch, 0), std::sqrt(ch.alone(0) * ch.alone(1)),
                        bp.b1, bp.b2};
        return RegionDescription({LineSegment{bp.a, bp.b1}, curve, LineSegment{bp.b2, bp.c}}, shape,
                                 RegionCase::PsiAtLeastOne);
    }
    return RegionDescription({LineSegment{bp.a, bp.b3}, LineSegment{bp.b3, bp.c}}, shape, RegionCase::PsiBelowOne);
}

StabilityVerdictAnalytic region_contains(const ChannelModel& ch, const HarvestRates& d, const RatePoint& pt) {
    return region(ch, d).classify({pt[0], pt[1]});
}

RatePoint saturated_throughput(const ChannelModel& ch, const HarvestRates& d, const TransmitProbs& p) {
    const double m1 = std::min(d[0], p[0]);
    const double m2 = std::min(d[1], p[1]);
    return RatePoint(m1 * (ch.alone(0) - interference_gap(ch, 0) * m2),
                     m2 * (ch.alone(1) - interference_gap(ch, 1) * m1));
}

bool inner_bound_contains(const ChannelModel& ch, const HarvestRates& d, const TransmitProbs& p,
                          const RatePoint& pt) {
    const RatePoint mu = saturated_throughput(ch, d, p);
    return pt[0] <= mu[0] && pt[1] <= mu[1];
}

bool outer_bound_contains(const ChannelModel& ch, const HarvestRates& d, const TransmitProbs& p,
                          const RatePoint& pt) {
    for (NodeIndex i = 0; i < 2; ++i) {
        const NodeIndex j = other(i);
        const double mi = std::min(d[i], p[i]);
        const double mj = std::min(d[j], p[j]);
        const double served_j = ch.joint(j) + interference_gap(ch, j) * (1.0 - mi);  // qⱼ − Δⱼmᵢ
        if (pt[j] > mj * served_j) {
            continue;
        }
        // pt[j] > 0 here implies served_j > 0, so the quotient is well defined.
        const double penalty = pt[j] > 0.0 ? interference_gap(ch, i) * pt[j] / served_j : 0.0;
        if (pt[i] <= mi * (ch.alone(i) - penalty)) {
            return true;
        }
    }
    return false;
}

double closure_boundary_lambda(const ChannelModel& ch, const HarvestRates& d, NodeIndex i, double lambda_j) {
    require_node(i);
    require_nondegenerate(ch);
    const NodeIndex j = other(i);
    const double qi = ch.alone(i);
    const double qj = ch.alone(j);
    const double gi = interference_gap(ch, i);
    const double gj = interference_gap(ch, j);
    const double di = d[i];
    const double dj = d[j];
    const double intercept = dj * qj;
    if (!(lambda_j >= 0.0) || lambda_j > intercept + kClosedFormTol) {
        throw InvalidParameter("lambda_j outside [0, delta_j * q_j]");
    }
    lambda_j = std::min(lambda_j, intercept);
    if (lambda_j == 0.0) {
        return di * qi;
    }
    const double served_j = qj - gj * di;
    auto line_i = [&] { return di * (qi - gi * lambda_j / served_j); };
    // Line piece owned by node j's sub-region, solved for λᵢ.
    auto line_j_inverse = [&] { return (qj - lambda_j / dj) * (qi - gi * dj) / gj; };

    if (psi(ch, d) >= 1.0) {
        const double lower = qi * served_j * served_j / (gi * qj);
        const double upper = gi * qj * dj * dj / qi;
        if (lambda_j <= lower) {
            return line_i();
        }
        if (lambda_j <= upper) {
            const double s = 1.0 - std::sqrt(gi * lambda_j / (qi * qj));
            return qi * qj * s * s / gj;
        }
        return std::max(line_j_inverse(), 0.0);
    }
    if (lambda_j <= dj * served_j) {
        return line_i();
    }
    return std::max(line_j_inverse(), 0.0);
}

TransmitProbs boundary_operating_probabilities(const ChannelModel& ch, const HarvestRates& d, Point2 pt) {
    require_nondegenerate(ch);
    if (pt.x < 0.0 || pt.y < 0.0) {
        throw InvalidParameter("rate point must be non-negative");
    }
    if (pt.x == 0.0 && pt.y == 0.0) {
        return TransmitProbs(0.0, 0.0);
    }
    const std::array<double, 2> target{pt.x, pt.y};
    double best_slack = -std::numeric_limits<double>::infinity();
    std::array<double, 2> best{0.0, 0.0};
    for (NodeIndex i = 0; i < 2; ++i) {
        const NodeIndex j = other(i);
        const auto ui = static_cast<std::size_t>(i);
        const auto uj = static_cast<std::size_t>(j);
        const double qi = ch.alone(i);
        const double qj = ch.alone(j);
        const double gi = interference_gap(ch, i);
        const double gj = interference_gap(ch, j);
        const double lj = target[uj];
        // Concave objective in pᵢ; clamp its stationary point to [0, δᵢ].
        const double stationary = (qj - std::sqrt(gi * qj * lj / qi)) / gj;
        const double pi = std::clamp(stationary, 0.0, d[i]);
        const double served_j = qj - gj * pi;
        double pj = 0.0;
        if (lj > 0.0) {
            if (!(served_j > 0.0)) {
                continue;
            }
            pj = lj / served_j;
            if (pj > d[j] * (1.0 + kClosedFormTol) + kClosedFormTol) {
                continue;
            }
            pj = std::min(pj, d[j]);
        }
        const double slack = pi * (qi - gi * pj) - target[ui];
        if (slack > best_slack) {
            best_slack = slack;
            best[ui] = pi;
            best[uj] = pj;
        }
    }
    if (best_slack < -kOptimizationTol) {
        throw InvalidParameter("rate point lies outside the stability region");
    }
    return TransmitProbs(best[0], best[1]);
}

TransmitProbs achieving_probabilities(const ChannelModel& ch, const HarvestRates& d, const RatePoint& pt) {
    const RegionDescription r = region(ch, d);
    const Point2 p{pt[0], pt[1]};
    if (p.x == 0.0 && p.y == 0.0) {
        return TransmitProbs(0.0, 0.0);
    }
    if (!r.classify(p).inside) {
        throw InvalidParameter("achieving probabilities need a point strictly inside the region");
    }
    return boundary_operating_probabilities(ch, d, r.radial_projection(p));
}

double finite_nonempty_prob(double delta, double p, std::int64_t capacity) {
    require_probability(delta, "harvest rate");
    require_probability(p, "transmit probability");
    if (capacity < 1) {
        throw InvalidParameter("battery capacity must be >= 1");
    }
    if (delta == 0.0) {
        return 0.0;
    }
    if (p == 0.0) {
        return 1.0;
    }
    const auto c = static_cast<double>(capacity);
    if (delta == p) {
        return c / (c + 1.0);
    }
    const double rho = delta / p;
    if (rho < 1.0) {
        const double lr = std::log(rho);
        return rho * -std::expm1(c * lr) / -std::expm1((c + 1.0) * lr);
    }
    // Divide through by ρ^(c+1) so large capacities do not overflow.
    const double ls = -std::log(rho);
    return std::expm1(c * ls) / std::expm1((c + 1.0) * ls);
}

double max_attempt_rate(double delta, const Capacity& cap) {
    require_probability(delta, "harvest rate");
    if (!cap.is_finite()) {
        return delta;
    }
    return finite_nonempty_prob(delta, 1.0, cap.chunks());
}

double attempt_prob_for_rate(double delta, const Capacity& cap, double target) {
    const double top = max_attempt_rate(delta, cap);
    if (!(target >= 0.0) || target > top + kClosedFormTol) {
        throw InvalidParameter("attempt rate outside [0, lambda_max]");
    }
    if (!cap.is_finite()) {
        return std::min(target, delta);
    }
    if (target <= 0.0) {
        return 0.0;
    }
    if (target >= top) {
        return 1.0;
    }
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (mid * finite_nonempty_prob(delta, mid, cap.chunks()) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return hi;
}

RatePoint finite_saturated_throughput(const ChannelModel& ch, const HarvestRates& d, const BatteryCaps& caps,
                                      const TransmitProbs& p) {
    std::array<double, 2> rate{};
    for (NodeIndex i = 0; i < 2; ++i) {
        const auto u = static_cast<std::size_t>(i);
        rate[u] = caps[i].is_finite() ? p[i] * finite_nonempty_prob(d[i], p[i], caps[i].chunks())
                                      : std::min(d[i], p[i]);
    }
    return RatePoint(rate[0] * (ch.alone(0) - interference_gap(ch, 0) * rate[1]),
                     rate[1] * (ch.alone(1) - interference_gap(ch, 1) * rate[0]));
}

RegionDescription finite_region(const HarvestRates& d, const BatteryCaps& caps) {
    if (!caps.any_finite()) {
        return region(collision_channel(), d);
    }
    const double m1 = max_attempt_rate(d[0], caps[0]);
    const double m2 = max_attempt_rate(d[1], caps[1]);
    const Point2 top{0.0, m2};
    const Point2 bottom{m1, 0.0};
    if (m1 + m2 >= 1.0) {
        const Point2 upper{(1.0 - m2) * (1.0 - m2), m2 * m2};
        const Point2 lower{m1 * m1, (1.0 - m1) * (1.0 - m1)};
        return RegionDescription(
            {LineSegment{top, upper}, SqrtCurve{1.0, 1.0, 1.0, upper, lower}, LineSegment{lower, bottom}}, m1 + m2,
            RegionCase::PsiAtLeastOne);
    }
    const Point2 corner{m1 * (1.0 - m2), m2 * (1.0 - m1)};
    return RegionDescription({LineSegment{top, corner}, LineSegment{corner, bottom}}, m1 + m2,
                             RegionCase::PsiBelowOne);
}

RegionDescription finite_region_mpr(const ChannelModel& ch, const HarvestRates& d, const BatteryCaps& caps) {
    return region(ch, HarvestRates(max_attempt_rate(d[0], caps[0]), max_attempt_rate(d[1], caps[1])));
}

StabilityVerdictAnalytic finite_region_contains(const HarvestRates& d, const BatteryCaps& caps, const RatePoint& pt) {
    return finite_region(d, caps).classify({pt[0], pt[1]});
}

TransmitProbs finite_operating_probabilities(const ChannelModel& ch, const HarvestRates& d, const BatteryCaps& caps,
                                             Point2 pt) {
    const HarvestRates box(max_attempt_rate(d[0], caps[0]), max_attempt_rate(d[1], caps[1]));
    const TransmitProbs rates = boundary_operating_probabilities(ch, box, pt);
    return TransmitProbs(attempt_prob_for_rate(d[0], caps[0], rates[0]),
                         attempt_prob_for_rate(d[1], caps[1], rates[1]));
}

}  // namespace ehstab
