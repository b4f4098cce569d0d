#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ehstab/analytic.hpp"
#include "oracles.hpp"

using namespace ehstab;

namespace {

const ChannelModel kFig2a(0.9, 0.8, 0.2, 0.15);
const ChannelModel kFig2b(0.9, 0.8, 0.45, 0.4);
const HarvestRates kFig2Delta(0.8, 0.7);

struct Params {
    ChannelModel ch;
    HarvestRates d;
};

Params random_params(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double a1 = 0.3 + 0.7 * u(gen);
    const double a2 = 0.3 + 0.7 * u(gen);
    const double j1 = (a1 - 0.05) * u(gen);
    const double j2 = (a2 - 0.05) * u(gen);
    return {ChannelModel(a1, a2, j1, j2), HarvestRates(0.05 + 0.95 * u(gen), 0.05 + 0.95 * u(gen))};
}

oracle::Mpr to_oracle(const ChannelModel& ch) {
    return {{ch.alone(0), ch.alone(1)}, {ch.joint(0), ch.joint(1)}};
}

double max_sample_gap(const RegionDescription& r, const std::array<double, 2>& m, std::size_t n) {
    double worst = 0.0;
    for (const auto& pt : r.sample(n)) {
        worst = std::max(worst, std::abs(oracle::collision_boundary(m, pt.x) - pt.y));
    }
    return worst;
}

}  // namespace

TEST_CASE("boundary points") {
    SUBCASE("collision channel, unequal harvest rates") {
        const auto bp = boundary_points(collision_channel(), HarvestRates(0.8, 0.6));
        CHECK(bp.a.x == 0.0);
        CHECK(bp.a.y == doctest::Approx(0.6).epsilon(1e-15));
        CHECK(bp.c.x == doctest::Approx(0.8).epsilon(1e-15));
        CHECK(bp.c.y == 0.0);
        CHECK(bp.b3.x == doctest::Approx(0.8 * 0.4).epsilon(1e-14));
        CHECK(bp.b3.y == doctest::Approx(0.6 * 0.2).epsilon(1e-14));
    }
    SUBCASE("collision channel, unit harvest rates") {
        const auto bp = boundary_points(collision_channel(), HarvestRates(1, 1));
        CHECK(bp.b1.x == doctest::Approx(0.0));
        CHECK(bp.b1.y == doctest::Approx(1.0));
        CHECK(bp.b2.x == doctest::Approx(1.0));
        CHECK(bp.b2.y == doctest::Approx(0.0));
    }
    SUBCASE("MPR channel") {
        const auto bp = boundary_points(kFig2a, kFig2Delta);
        CHECK(bp.a.y == doctest::Approx(0.56).epsilon(1e-14));
        // Curve endpoints satisfy the square-root curve.
        for (const Point2 p : {bp.b1, bp.b2}) {
            CHECK(std::sqrt(0.65 * p.x) + std::sqrt(0.7 * p.y) == doctest::Approx(std::sqrt(0.72)).epsilon(1e-12));
        }
    }
    SUBCASE("degenerate channel") {
        CHECK_THROWS_AS(boundary_points(ChannelModel(0.9, 0.8, 0.9, 0.1), kFig2Delta), DegenerateChannel);
        CHECK_THROWS_AS(region(ChannelModel(0.9, 0.8, 0.1, 0.8), kFig2Delta), DegenerateChannel);
    }
}

TEST_CASE("region shape follows the psi case split") {
    const auto a = region(kFig2a, kFig2Delta);
    CHECK(a.shape() == RegionCase::PsiAtLeastOne);
    REQUIRE(a.segments().size() == 3);
    CHECK(std::holds_alternative<SqrtCurve>(a.segments()[1]));

    const auto b = region(kFig2b, kFig2Delta);
    CHECK(b.shape() == RegionCase::PsiBelowOne);
    REQUIRE(b.segments().size() == 2);
    CHECK(std::holds_alternative<LineSegment>(b.segments()[0]));
    CHECK(std::holds_alternative<LineSegment>(b.segments()[1]));

    const auto c = region(collision_channel(), HarvestRates(1, 1));
    REQUIRE(c.segments().size() == 1);
    const auto& curve = std::get<SqrtCurve>(c.segments()[0]);
    CHECK(curve.from.x == doctest::Approx(0.0));
    CHECK(curve.from.y == doctest::Approx(1.0));
    CHECK(curve.to.x == doctest::Approx(1.0));
    CHECK(curve.to.y == doctest::Approx(0.0));
}

TEST_CASE("region invariants on random parameters") {
    std::mt19937_64 gen(3);
    for (int n = 0; n < 500; ++n) {
        const auto [ch, d] = random_params(gen);
        const auto r = region(ch, d);
        const auto& segs = r.segments();
        // Connected end to end, from the λ₂ axis to the λ₁ axis.
        CHECK(r.lambda2_intercept().x == 0.0);
        CHECK(r.lambda1_intercept().y == 0.0);
        for (std::size_t k = 1; k < segs.size(); ++k) {
            const Point2 prev = std::visit([](const auto& s) { return s.to; }, segs[k - 1]);
            const Point2 next = std::visit([](const auto& s) { return s.from; }, segs[k]);
            REQUIRE(prev == next);
        }
        for (const auto& s : segs) {
            if (const auto* c = std::get_if<SqrtCurve>(&s)) {
                for (const Point2 p : {c->from, c->to}) {
                    REQUIRE(std::abs(std::sqrt(c->a1 * p.x) + std::sqrt(c->a2 * p.y) - c->rhs) <= 1e-9);
                }
            }
        }
        // Non-increasing boundary.
        const auto pts = r.sample(128);
        for (std::size_t k = 1; k < pts.size(); ++k) {
            REQUIRE(pts[k].x >= pts[k - 1].x - 1e-15);
            REQUIRE(pts[k].y <= pts[k - 1].y + 1e-15);
        }
    }
}

TEST_CASE("region membership") {
    const auto unit = region(collision_channel(), HarvestRates(1, 1));
    const auto on = unit.classify({0.25, 0.25});
    CHECK_FALSE(on.inside);
    CHECK(std::abs(on.margin) <= 1e-12);
    CHECK(region_contains(collision_channel(), HarvestRates(1, 1), RatePoint(0.25, 0.20)).inside);

    const auto bp = boundary_points(kFig2b, kFig2Delta);
    const Point2 mid{0.5 * (bp.a.x + bp.b3.x), 0.5 * (bp.a.y + bp.b3.y) - 0.01};
    const auto v = region_contains(kFig2b, kFig2Delta, RatePoint(mid.x, mid.y));
    CHECK(v.inside);
    CHECK(v.margin == doctest::Approx(0.01).epsilon(1e-9));

    // Beyond the λ₁ intercept counts as outside.
    CHECK_FALSE(region(kFig2a, kFig2Delta).classify({0.73, 0.0}).inside);
    CHECK(region(kFig2a, kFig2Delta).classify({0.73, 0.0}).margin < 0.0);
}

TEST_CASE("saturated throughput") {
    const auto mu = saturated_throughput(collision_channel(), HarvestRates(1, 1), TransmitProbs(0.5, 0.5));
    CHECK(mu[0] == doctest::Approx(0.25));
    CHECK(mu[1] == doctest::Approx(0.25));
    const auto zero = saturated_throughput(kFig2a, kFig2Delta, TransmitProbs(0, 0));
    CHECK(zero[0] == 0.0);
    CHECK(zero[1] == 0.0);
    const auto fig = saturated_throughput(kFig2a, kFig2Delta, TransmitProbs(0.8, 0.7));
    CHECK(fig[0] == doctest::Approx(0.8 * (0.9 - 0.7 * 0.7)).epsilon(1e-14));
    CHECK(fig[1] == doctest::Approx(0.7 * (0.8 - 0.65 * 0.8)).epsilon(1e-14));
    CHECK(fig[0] == doctest::Approx(0.328).epsilon(1e-12));
    CHECK(fig[1] == doctest::Approx(0.196).epsilon(1e-12));
    // p beyond δ is capped by the harvest rate.
    const auto capped = saturated_throughput(kFig2a, kFig2Delta, TransmitProbs(1.0, 1.0));
    CHECK(capped == fig);
}

TEST_CASE("inner and outer bounds at fixed p") {
    const TransmitProbs p(0.8, 0.7);
    CHECK(inner_bound_contains(kFig2a, kFig2Delta, p, RatePoint(0, 0)));
    CHECK_FALSE(inner_bound_contains(kFig2a, kFig2Delta, p, RatePoint(0.33, 0.19)));
    CHECK(inner_bound_contains(kFig2a, kFig2Delta, p, RatePoint(0.32, 0.19)));
    CHECK(outer_bound_contains(kFig2a, kFig2Delta, p, RatePoint(0, 0)));

    SUBCASE("transition on the first sub-region boundary") {
        const double l2 = 0.196;
        const double l1 = 0.8 * (0.9 - 0.7 * l2 / (0.8 - 0.65 * 0.8));
        CHECK(outer_bound_contains(kFig2a, kFig2Delta, p, RatePoint(l1 - 1e-9, l2)));
        // Above l1 only the second sub-region could hold it; its λ₁ cap is 0.328 < l1.
        CHECK(l1 > 0.328);
        CHECK_FALSE(outer_bound_contains(kFig2a, kFig2Delta, p, RatePoint(l1 + 1e-9, l2)));
    }
    SUBCASE("inner implies outer") {
        std::mt19937_64 gen(8);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int n = 0; n < 5000; ++n) {
            const auto [ch, d] = random_params(gen);
            const TransmitProbs pp(u(gen), u(gen));
            const RatePoint pt(u(gen) * 0.6, u(gen) * 0.6);
            if (inner_bound_contains(ch, d, pp, pt)) {
                REQUIRE(outer_bound_contains(ch, d, pp, pt));
            }
        }
    }
}

TEST_CASE("closure boundary") {
    CHECK(closure_boundary_lambda(collision_channel(), HarvestRates(1, 1), 0, 0.25) == doctest::Approx(0.25));

    const auto bp = boundary_points(kFig2a, kFig2Delta);
    CHECK(std::abs(closure_boundary_lambda(kFig2a, kFig2Delta, 0, bp.b1.y) - bp.b1.x) <= 1e-9);
    const auto bpb = boundary_points(kFig2b, kFig2Delta);
    CHECK(std::abs(closure_boundary_lambda(kFig2b, kFig2Delta, 0, bpb.b3.y) - bpb.b3.x) <= 1e-9);

    CHECK_THROWS_AS(closure_boundary_lambda(kFig2a, kFig2Delta, 0, 0.57), InvalidParameter);
    CHECK_THROWS_AS(closure_boundary_lambda(kFig2a, kFig2Delta, 0, -0.1), InvalidParameter);

    SUBCASE("matches direct maximisation over transmit probabilities") {
        std::mt19937_64 gen(12);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int n = 0; n < 400; ++n) {
            const auto [ch, d] = random_params(gen);
            const auto o = to_oracle(ch);
            for (NodeIndex i = 0; i < 2; ++i) {
                const NodeIndex j = other(i);
                const double lj = u(gen) * d[j] * ch.alone(j);
                const double expected = oracle::closure_max(o, {d[0], d[1]}, i, lj);
                REQUIRE(closure_boundary_lambda(ch, d, i, lj) == doctest::Approx(expected).epsilon(1e-9));
            }
        }
    }
    SUBCASE("curve and line pieces meet at the junction") {
        std::mt19937_64 gen(13);
        int checked = 0;
        while (checked < 300) {
            const auto [ch, d] = random_params(gen);
            if (psi(ch, d) < 1.0) continue;
            ++checked;
            const double qi = ch.alone(0), qj = ch.alone(1);
            const double gi = interference_gap(ch, 0), gj = interference_gap(ch, 1);
            const double junction = qi * (qj - gj * d[0]) * (qj - gj * d[0]) / (gi * qj);
            const double line = d[0] * (qi - gi * junction / (qj - gj * d[0]));
            const double curve = qi * qj * std::pow(1 - std::sqrt(gi * junction / (qi * qj)), 2) / gj;
            REQUIRE(std::abs(line - curve) <= 1e-9);
            REQUIRE(std::abs(closure_boundary_lambda(ch, d, 0, junction) - line) <= 1e-9);
        }
    }
    SUBCASE("curve range maps onto the square-root curve from either side") {
        std::mt19937_64 gen(14);
        int checked = 0;
        while (checked < 200) {
            const auto [ch, d] = random_params(gen);
            if (psi(ch, d) < 1.0) continue;
            ++checked;
            const auto bp = boundary_points(ch, d);
            const double g1 = interference_gap(ch, 0), g2 = interference_gap(ch, 1);
            const double rhs = std::sqrt(ch.alone(0) * ch.alone(1));
            for (int k = 0; k <= 16; ++k) {
                const double l2 = bp.b2.y + (bp.b1.y - bp.b2.y) * k / 16.0;
                const double l1 = closure_boundary_lambda(ch, d, 0, l2);
                REQUIRE(std::abs(std::sqrt(g2 * l1) + std::sqrt(g1 * l2) - rhs) <= 1e-9);
                REQUIRE(std::abs(closure_boundary_lambda(ch, d, 1, l1) - l2) <= 1e-9);
            }
        }
    }
}

TEST_CASE("convexity classification") {
    SUBCASE("psi above one has a midpoint outside") {
        const auto r = region(kFig2a, kFig2Delta);
        const auto bp = boundary_points(kFig2a, kFig2Delta);
        const Point2 mid{0.5 * (bp.b1.x + bp.b2.x), 0.5 * (bp.b1.y + bp.b2.y)};
        CHECK_FALSE(r.contains(mid));
        CHECK(r.classify(mid).margin < 0.0);
    }
    SUBCASE("psi below one keeps every boundary midpoint inside or on") {
        const auto r = region(kFig2b, kFig2Delta);
        const auto pts = r.sample(64);
        for (std::size_t a = 0; a < pts.size(); ++a) {
            for (std::size_t b = a + 1; b < pts.size(); ++b) {
                const Point2 mid{0.5 * (pts[a].x + pts[b].x), 0.5 * (pts[a].y + pts[b].y)};
                REQUIRE(r.classify(mid).margin >= -1e-12);
            }
        }
    }
    SUBCASE("psi equal to one collapses the curve") {
        // Collision channel: Ψ = δ₁ + δ₂.
        const auto bp = boundary_points(collision_channel(), HarvestRates(0.4, 0.6));
        CHECK(std::abs(bp.b1.x - bp.b2.x) <= 1e-9);
        CHECK(std::abs(bp.b1.y - bp.b2.y) <= 1e-9);
        CHECK(region(collision_channel(), HarvestRates(0.4, 0.6)).shape() == RegionCase::PsiAtLeastOne);
    }
}

TEST_CASE("collision region matches the explicit collision description") {
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (int n = 0; n < 200; ++n) {
        const HarvestRates d(u(gen), u(gen));
        REQUIRE(max_sample_gap(region(collision_channel(), d), {d[0], d[1]}, 512) <= 1e-12);
    }
    const auto unit = region(collision_channel(), HarvestRates(1, 1));
    for (const auto& p : unit.sample(512)) {
        REQUIRE(std::abs(std::sqrt(p.x) + std::sqrt(p.y) - 1.0) <= 1e-12);
    }
}

TEST_CASE("operating probabilities") {
    CHECK(achieving_probabilities(kFig2a, kFig2Delta, RatePoint(0, 0)) == TransmitProbs(0, 0));

    SUBCASE("collision channel near the symmetric boundary point") {
        const RatePoint pt(0.25, 0.25 - 1e-6);
        const auto p = achieving_probabilities(collision_channel(), HarvestRates(1, 1), pt);
        CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-5));
        const auto mu = saturated_throughput(collision_channel(), HarvestRates(1, 1), p);
        CHECK(mu[0] >= pt[0]);
        CHECK(mu[1] >= pt[1]);
    }
    SUBCASE("line regime uses the harvest rates") {
        const auto bp = boundary_points(kFig2b, kFig2Delta);
        const RatePoint pt(bp.b3.x * 0.999, bp.b3.y * 0.999);
        const auto p = achieving_probabilities(kFig2b, kFig2Delta, pt);
        CHECK(p[0] == doctest::Approx(0.8).epsilon(1e-9));
        CHECK(p[1] == doctest::Approx(0.7).epsilon(1e-9));
    }
    SUBCASE("rejects points outside or on the boundary") {
        CHECK_THROWS_AS(achieving_probabilities(collision_channel(), HarvestRates(1, 1), RatePoint(0.25, 0.25)),
                        InvalidParameter);
        CHECK_THROWS_AS(achieving_probabilities(kFig2a, kFig2Delta, RatePoint(0.5, 0.5)), InvalidParameter);
    }
    SUBCASE("interior points are dominated") {
        std::mt19937_64 gen(41);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int n = 0; n < 2000; ++n) {
            const auto [ch, d] = random_params(gen);
            const auto r = region(ch, d);
            const Point2 b = r.radial_projection({u(gen) + 1e-3, u(gen) + 1e-3});
            const double s = 0.99 * u(gen);
            const RatePoint pt(b.x * s, b.y * s);
            if (pt[0] == 0.0 && pt[1] == 0.0) continue;
            const auto p = achieving_probabilities(ch, d, pt);
            REQUIRE(p[0] <= d[0]);
            REQUIRE(p[1] <= d[1]);
            const auto mu = saturated_throughput(ch, d, p);
            REQUIRE(mu[0] >= pt[0] - 1e-12);
            REQUIRE(mu[1] >= pt[1] - 1e-12);
        }
    }
}

TEST_CASE("battery non-empty probability") {
    CHECK(finite_nonempty_prob(0.5, 0.5, 3) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(finite_nonempty_prob(0.8, 1.0, 3) == doctest::Approx(0.3904 / 0.5904).epsilon(1e-12));
    CHECK(finite_nonempty_prob(0.8, 1.0, 3) == doctest::Approx(0.66125).epsilon(1e-4));
    CHECK(finite_nonempty_prob(0.3, 0.6, 400) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(finite_nonempty_prob(0.5, 0.0, 2) == 1.0);
    CHECK(finite_nonempty_prob(0.0, 0.5, 2) == 0.0);
    CHECK_THROWS_AS(finite_nonempty_prob(0.5, 0.5, 0), InvalidParameter);

    SUBCASE("matches the truncated geometric sum") {
        std::mt19937_64 gen(51);
        std::uniform_real_distribution<double> u(0.01, 1.0);
        for (int n = 0; n < 2000; ++n) {
            const double d = u(gen), p = u(gen);
            const int c = 1 + static_cast<int>(u(gen) * 30);
            REQUIRE(finite_nonempty_prob(d, p, c) == doctest::Approx(oracle::mm1c_nonempty(d, p, c)).epsilon(1e-11));
        }
    }
    SUBCASE("continuous across the equal-rate branch") {
        // Slope in δ at δ = p is c / (2p(c+1)).
        for (int c : {1, 3, 10, 50}) {
            const double p = 0.4;
            const double mid = finite_nonempty_prob(p, p, c);
            const double slope = c / (2.0 * p * (c + 1.0));
            for (double eps : {1e-6, -1e-6}) {
                CHECK(std::abs(finite_nonempty_prob(p + eps, p, c) - (mid + slope * eps)) <= 1e-9);
            }
        }
    }
    SUBCASE("large capacities stay finite above unit load") {
        CHECK(finite_nonempty_prob(0.9, 0.1, 5000) == doctest::Approx(1.0));
    }
}

TEST_CASE("attempt rate ceiling and its inverse") {
    CHECK(max_attempt_rate(0.8, Capacity::finite(3)) == doctest::Approx(0.661246612466).epsilon(1e-11));
    CHECK(max_attempt_rate(0.6, Capacity::finite(3)) == doctest::Approx(0.6 * 0.784 / 0.8704).epsilon(1e-12));
    CHECK(max_attempt_rate(0.3, Capacity::finite(1)) == doctest::Approx(0.3 * 0.7 / 0.91).epsilon(1e-12));
    CHECK(max_attempt_rate(0.7, Capacity::unbounded()) == 0.7);
    for (double target : {0.0, 0.1, 0.3, 0.5, 0.66}) {
        const double p = attempt_prob_for_rate(0.8, Capacity::finite(3), target);
        CHECK(p * finite_nonempty_prob(0.8, p, 3) == doctest::Approx(target).epsilon(1e-12));
    }
    CHECK_THROWS_AS(attempt_prob_for_rate(0.8, Capacity::finite(3), 0.7), InvalidParameter);
}

TEST_CASE("finite battery region") {
    const HarvestRates d(0.8, 0.6);
    const BatteryCaps c33(Capacity::finite(3), Capacity::finite(3));

    SUBCASE("three-segment case") {
        const auto r = finite_region(d, c33);
        CHECK(r.segments().size() == 3);
        const double m1 = max_attempt_rate(0.8, Capacity::finite(3));
        const double m2 = max_attempt_rate(0.6, Capacity::finite(3));
        CHECK(m1 + m2 >= 1.0);
        CHECK(max_sample_gap(r, {m1, m2}, 512) <= 1e-12);
        const auto on_axis = finite_region_contains(d, c33, RatePoint(m1, 0));
        CHECK_FALSE(on_axis.inside);
        CHECK(std::abs(on_axis.margin) <= 1e-12);
        CHECK(finite_region_contains(d, c33, RatePoint(0, 0)).inside);
    }
    SUBCASE("two-line case") {
        const BatteryCaps c11(Capacity::finite(1), Capacity::finite(1));
        const auto r = finite_region(HarvestRates(0.3, 0.3), c11);
        CHECK(r.segments().size() == 2);
        CHECK(r.lambda1_intercept().x == doctest::Approx(0.3 * 0.7 / 0.91).epsilon(1e-12));
    }
    SUBCASE("unbounded caps fall back to the collision region") {
        const auto a = finite_region(d, BatteryCaps::unbounded());
        const auto b = region(collision_channel(), d);
        CHECK(max_sample_gap(a, {0.8, 0.6}, 256) <= 1e-12);
        CHECK(a.segments().size() == b.segments().size());
    }
    SUBCASE("explicit construction agrees with the substituted MPR closure") {
        std::mt19937_64 gen(61);
        std::uniform_real_distribution<double> u(0.05, 1.0);
        for (int n = 0; n < 200; ++n) {
            const HarvestRates dd(u(gen), u(gen));
            const BatteryCaps cc(Capacity::finite(1 + static_cast<int>(u(gen) * 8)),
                                 Capacity::finite(1 + static_cast<int>(u(gen) * 8)));
            const auto exact = finite_region(dd, cc);
            const auto mpr = finite_region_mpr(collision_channel(), dd, cc);
            for (const auto& p : exact.sample(128)) {
                REQUIRE(std::abs(mpr.boundary_lambda2(p.x) - p.y) <= 1e-12);
            }
        }
    }
    SUBCASE("finite region sits inside the unbounded one") {
        std::mt19937_64 gen(62);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const auto fin = finite_region(d, c33);
        const auto inf = region(collision_channel(), d);
        for (int n = 0; n < 5000; ++n) {
            const Point2 pt{u(gen), u(gen)};
            if (fin.contains(pt)) REQUIRE(inf.contains(pt));
        }
    }
    SUBCASE("finite operating point reproduces the boundary") {
        const auto r = finite_region_mpr(kFig2a, kFig2Delta, c33);
        for (const auto& b : r.sample(32)) {
            const auto p = finite_operating_probabilities(kFig2a, kFig2Delta, c33, b);
            const auto mu = finite_saturated_throughput(kFig2a, kFig2Delta, c33, p);
            REQUIRE(std::abs(mu[0] - b.x) <= 1e-9);
            REQUIRE(std::abs(mu[1] - b.y) <= 1e-9);
        }
    }
}

TEST_CASE("sampling and radial projection") {
    const auto r = region(kFig2a, kFig2Delta);
    const auto pts = r.sample(512);
    REQUIRE(pts.size() == 512);
    CHECK(pts.front() == r.lambda2_intercept());
    CHECK(pts.back() == r.lambda1_intercept());
    const auto tagged = r.sample_tagged(64);
    for (std::size_t k = 1; k < tagged.size(); ++k) {
        CHECK(tagged[k].segment >= tagged[k - 1].segment);
    }
    for (const auto& p : pts) {
        REQUIRE(std::abs(r.classify(p).margin) <= 1e-12);
    }
    for (double angle = 0.01; angle < 1.57; angle += 0.05) {
        const Point2 b = r.radial_projection({std::cos(angle), std::sin(angle)});
        REQUIRE(std::abs(r.classify(b).margin) <= 1e-12);
        REQUIRE(std::abs(std::atan2(b.y, b.x) - angle) <= 1e-9);
    }
    CHECK_THROWS_AS(r.radial_projection({0, 0}), InvalidParameter);
}
