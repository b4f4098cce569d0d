#include "ehstab/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

namespace ehstab {

using nlohmann::json;

std::string format_number(double v) {
    if (v == 0.0) {
        return "0";  // also folds -0
    }
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) {
        throw std::runtime_error("number formatting failed");
    }
    return std::string(buf.data(), ptr);
}

json to_json(const Point2& p) { return json::array({p.x, p.y}); }

json to_json(const ChannelModel& ch) {
    return json{{"q1_alone", ch.alone(0)},
                {"q2_alone", ch.alone(1)},
                {"q1_joint", ch.joint(0)},
                {"q2_joint", ch.joint(1)}};
}

json to_json(const SimConfig& cfg) {
    return json{{"lambda", {cfg.lambda[0], cfg.lambda[1]}},
                {"delta", {cfg.delta[0], cfg.delta[1]}},
                {"p", {cfg.p[0], cfg.p[1]}},
                {"caps", {cfg.caps[0].to_string(), cfg.caps[1].to_string()}},
                {"channel", to_json(cfg.channel)},
                {"mode", {to_string(cfg.mode[0]), to_string(cfg.mode[1])}},
                {"slots", cfg.slots},
                {"seed", cfg.seed},
                {"burn_in", cfg.burn_in},
                {"sample_every", cfg.sample_every},
                {"initial",
                 {{{"queue", cfg.initial[0].queue}, {"battery", cfg.initial[0].battery}},
                  {{"queue", cfg.initial[1].queue}, {"battery", cfg.initial[1].battery}}}}};
}

json to_json(const NodeCounters& c) {
    return json{{"arrivals", c.arrivals},
                {"harvested", c.harvested},
                {"harvest_lost", c.harvest_lost},
                {"attempts", c.attempts},
                {"successes", c.successes},
                {"dummy_transmissions", c.dummy_transmissions},
                {"nonempty_battery_slots", c.nonempty_battery_slots},
                {"active_slots", c.active_slots},
                {"joint_successes", c.joint_successes}};
}

json region_to_json(const RegionDescription& r, std::size_t samples) {
    json segs = json::array();
    for (const auto& s : r.segments()) {
        if (const auto* line = std::get_if<LineSegment>(&s)) {
            segs.push_back({{"type", "line"}, {"from", to_json(line->from)}, {"to", to_json(line->to)}});
        } else {
            const auto& c = std::get<SqrtCurve>(s);
            segs.push_back({{"type", "sqrt_curve"},
                            {"from", to_json(c.from)},
                            {"to", to_json(c.to)},
                            {"coeffs", {{"a1", c.a1}, {"a2", c.a2}, {"rhs", c.rhs}}}});
        }
    }
    json pts = json::array();
    for (const auto& p : r.sample(samples)) {
        pts.push_back(to_json(p));
    }
    return json{{"psi", r.psi()}, {"case", to_string(r.shape())}, {"segments", segs}, {"samples", pts}};
}

void write_region_csv(std::ostream& os, const RegionDescription& r, std::size_t samples) {
    os << "lambda1,lambda2,segment_id\n";
    for (const auto& t : r.sample_tagged(samples)) {
        os << format_number(t.point.x) << ',' << format_number(t.point.y) << ',' << t.segment << '\n';
    }
}

json trace_to_json(const SimTrace& trace) {
    json nodes = json::array();
    const auto occupancy = battery_occupancy(trace);
    const auto active = active_fraction(trace);
    const auto rate = success_rate(trace);
    for (std::size_t i = 0; i < 2; ++i) {
        nodes.push_back({{"total", to_json(trace.total[i])},
                         {"measured", to_json(trace.measured[i])},
                         {"success_rate", rate[i]},
                         {"battery_occupancy", occupancy.fraction[i]},
                         {"active_fraction", active[i]},
                         {"final_queue", trace.final_state[i].queue},
                         {"final_battery", trace.final_state[i].battery}});
    }
    return json{{"config", to_json(trace.config)},
                {"measured_slots", trace.measured_slots},
                {"nodes", nodes},
                {"warnings", occupancy.warnings}};
}

void write_trace_csv(std::ostream& os, const SimTrace& trace) {
    os << "slot,Q1,Q2,B1,B2\n";
    for (const auto& s : trace.samples) {
        os << s.slot << ',' << s.queue[0] << ',' << s.queue[1] << ',' << s.battery[0] << ',' << s.battery[1] << '\n';
    }
}

void write_agreement_csv(std::ostream& os, const std::vector<VerifyRow>& rows) {
    os << "point_id,lambda1,lambda2,analytic,empirical,drift1,drift2,agree\n";
    for (const auto& r : rows) {
        os << r.point_id << ',' << format_number(r.point.x) << ',' << format_number(r.point.y) << ','
           << (r.analytic_inside ? "stable" : "unstable") << ',' << to_string(r.empirical.verdict) << ','
           << format_number(r.empirical.drift[0]) << ',' << format_number(r.empirical.drift[1]) << ','
           << (r.agree ? "true" : "false") << '\n';
    }
}

namespace {

constexpr double kCanvas = 480.0;
constexpr double kPad = 50.0;

}  // namespace

SvgPlot::SvgPlot(std::string title, double extent) : title_(std::move(title)), extent_(extent) {}

double SvgPlot::sx(double x) const { return kPad + x / extent_ * kCanvas; }

double SvgPlot::sy(double y) const { return kPad + kCanvas - y / extent_ * kCanvas; }

void SvgPlot::polyline(const std::vector<Point2>& pts, const std::string& color, bool dotted) {
    std::ostringstream os;
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"";
    if (dotted) {
        os << " stroke-dasharray=\"4 4\"";
    }
    os << " points=\"";
    for (std::size_t k = 0; k < pts.size(); ++k) {
        os << (k ? " " : "") << format_number(std::round(sx(pts[k].x) * 100) / 100) << ','
           << format_number(std::round(sy(pts[k].y) * 100) / 100);
    }
    os << "\"/>";
    body_.push_back(os.str());
}

void SvgPlot::marker(Point2 p, const std::string& color, double size) {
    std::ostringstream os;
    os << "<circle cx=\"" << format_number(sx(p.x)) << "\" cy=\"" << format_number(sy(p.y)) << "\" r=\""
       << format_number(size) << "\" fill=\"" << color << "\"/>";
    body_.push_back(os.str());
}

void SvgPlot::cell(Point2 center, double width, double height, const std::string& color) {
    const double w = width / extent_ * kCanvas;
    const double h = height / extent_ * kCanvas;
    std::ostringstream os;
    os << "<rect x=\"" << format_number(sx(center.x) - w / 2) << "\" y=\"" << format_number(sy(center.y) - h / 2)
       << "\" width=\"" << format_number(w) << "\" height=\"" << format_number(h) << "\" fill=\"" << color
       << "\" fill-opacity=\"0.45\"/>";
    body_.push_back(os.str());
}

void SvgPlot::legend(const std::string& text, const std::string& color) {
    std::ostringstream os;
    const double y = kPad + 16.0 * static_cast<double>(legend_.size() + 1);
    os << "<text x=\"" << format_number(kPad + kCanvas - 150) << "\" y=\"" << format_number(y) << "\" fill=\""
       << color << "\" font-size=\"12\">" << text << "</text>";
    legend_.push_back(os.str());
}

std::string SvgPlot::str() const {
    const double size = kCanvas + 2 * kPad;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
       << size << ' ' << size << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << kPad << "\" y=\"" << kPad / 2 << "\" font-size=\"14\">" << title_ << "</text>\n";
    // Axes with ticks every 0.1 of the extent.
    os << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(extent_) << "\" y2=\"" << sy(0)
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(0) << "\" y2=\"" << sy(extent_)
       << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 10; ++k) {
        const double v = extent_ * k / 10.0;
        os << "<text x=\"" << format_number(sx(v) - 8) << "\" y=\"" << format_number(sy(0) + 16)
           << "\" font-size=\"10\">" << format_number(std::round(v * 100) / 100) << "</text>\n";
        os << "<text x=\"" << format_number(sx(0) - 30) << "\" y=\"" << format_number(sy(v) + 4)
           << "\" font-size=\"10\">" << format_number(std::round(v * 100) / 100) << "</text>\n";
    }
    os << "<text x=\"" << sx(extent_ / 2) << "\" y=\"" << size - 8 << "\" font-size=\"12\">lambda1</text>\n";
    os << "<text x=\"8\" y=\"" << sy(extent_ / 2) << "\" font-size=\"12\">lambda2</text>\n";
    for (const auto& b : body_) os << b << '\n';
    for (const auto& l : legend_) os << l << '\n';
    os << "</svg>\n";
    return os.str();
}

}  // namespace ehstab
