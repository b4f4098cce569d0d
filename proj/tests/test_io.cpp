#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "ehstab/io.hpp"

using namespace ehstab;

namespace {

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

// Every '<' opens a tag that closes with '>' before the next '<', and the
// element stack balances.
bool well_formed(const std::string& svg) {
    std::vector<std::string> stack;
    std::size_t pos = 0;
    while ((pos = svg.find('<', pos)) != std::string::npos) {
        const auto end = svg.find('>', pos);
        if (end == std::string::npos) return false;
        const std::string tag = svg.substr(pos + 1, end - pos - 1);
        if (tag.find('<') != std::string::npos) return false;
        const auto name_end = tag.find_first_of(" />");
        if (tag.front() == '/') {
            if (stack.empty() || stack.back() != tag.substr(1)) return false;
            stack.pop_back();
        } else if (tag.back() != '/') {
            stack.push_back(tag.substr(0, name_end));
        }
        pos = end + 1;
    }
    return stack.empty();
}

}  // namespace

TEST_CASE("number formatting round-trips") {
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1e-20) == "1e-20");
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int n = 0; n < 10000; ++n) {
        const double v = u(gen);
        REQUIRE(std::stod(format_number(v)) == v);
    }
}

TEST_CASE("region json") {
    const auto r = region(ChannelModel(0.9, 0.8, 0.2, 0.15), HarvestRates(0.8, 0.7));
    const auto j = region_to_json(r, 64);
    CHECK(j.at("case") == "psi_ge_1");
    CHECK(j.at("psi").get<double>() == doctest::Approx(1.19444).epsilon(1e-5));
    const auto& segs = j.at("segments");
    REQUIRE(segs.size() == 3);
    CHECK(segs[0].at("type") == "line");
    CHECK(segs[1].at("type") == "sqrt_curve");
    CHECK(segs[1].at("coeffs").contains("rhs"));
    CHECK(segs[2].at("type") == "line");
    CHECK(segs[0].at("to") == segs[1].at("from"));
    CHECK(j.at("samples").size() == 64);
    CHECK(j.at("samples")[0].is_array());
    // Parsing the dump gives back the same document.
    CHECK(nlohmann::json::parse(j.dump()) == j);
}

TEST_CASE("region csv") {
    const auto r = region(ChannelModel(0.9, 0.8, 0.45, 0.4), HarvestRates(0.8, 0.7));
    std::ostringstream os;
    write_region_csv(os, r, 20);
    const auto rows = lines(os.str());
    REQUIRE(rows.size() == 21);
    CHECK(rows[0] == "lambda1,lambda2,segment_id");
    for (std::size_t k = 1; k < rows.size(); ++k) {
        CHECK(std::count(rows[k].begin(), rows[k].end(), ',') == 2);
    }
}

TEST_CASE("trace outputs") {
    SimConfig cfg;
    cfg.lambda = RatePoint(0.1, 0.2);
    cfg.delta = HarvestRates(0.6, 0.6);
    cfg.p = TransmitProbs(0.5, 0.5);
    cfg.slots = 1000;
    cfg.sample_every = 100;
    const auto t = run(cfg);

    const auto j = trace_to_json(t);
    CHECK(j.at("measured_slots") == 1000);
    REQUIRE(j.at("nodes").size() == 2);
    CHECK(j.at("nodes")[0].at("total").at("arrivals") == t.total[0].arrivals);
    CHECK(j.at("config").at("mode")[0] == "normal");
    CHECK(j.at("config").at("caps")[0] == "inf");
    CHECK(j.at("warnings").size() == 2);

    std::ostringstream os;
    write_trace_csv(os, t);
    const auto rows = lines(os.str());
    CHECK(rows[0] == "slot,Q1,Q2,B1,B2");
    CHECK(rows.size() == t.samples.size() + 1);
    CHECK(rows[1].rfind("0,0,0,0,0", 0) == 0);
}

TEST_CASE("agreement csv") {
    VerifyRow a;
    a.point_id = 3;
    a.point = {0.25, 0.125};
    a.analytic_inside = true;
    a.empirical.verdict = Verdict::Stable;
    a.empirical.drift = {-0.0001, 0.0};
    a.agree = true;
    VerifyRow b = a;
    b.analytic_inside = false;
    b.agree = false;
    std::ostringstream os;
    write_agreement_csv(os, {a, b});
    const auto rows = lines(os.str());
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "point_id,lambda1,lambda2,analytic,empirical,drift1,drift2,agree");
    CHECK(rows[1] == "3,0.25,0.125,stable,stable,-1e-04,0,true");
    CHECK(rows[2] == "3,0.25,0.125,unstable,stable,-1e-04,0,false");
}

TEST_CASE("svg plot") {
    SvgPlot plot("region", 1.0);
    plot.polyline({{0, 0.5}, {0.5, 0}}, "black");
    plot.polyline({{0, 0.6}, {0.6, 0}}, "gray", true);
    plot.marker({0.2, 0.2}, "red", 3);
    plot.cell({0.5, 0.5}, 10, 10, "#00aa00");
    plot.legend("boundary", "black");
    const auto svg = plot.str();
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);
    CHECK(well_formed(svg));
    CHECK_FALSE(well_formed("<svg><g></svg>"));
}
