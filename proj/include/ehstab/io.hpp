#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ehstab/analytic.hpp"
#include "ehstab/sim.hpp"
#include "ehstab/stability.hpp"

namespace ehstab {

/// Shortest decimal that round-trips to the same double.
std::string format_number(double v);

nlohmann::json to_json(const Point2& p);
nlohmann::json to_json(const ChannelModel& ch);
nlohmann::json to_json(const SimConfig& cfg);
nlohmann::json to_json(const NodeCounters& c);

/// {psi, case, segments:[{type, from, to, coeffs?}], samples:[[x,y],...]}
nlohmann::json region_to_json(const RegionDescription& r, std::size_t samples);

/// Columns lambda1,lambda2,segment_id.
void write_region_csv(std::ostream& os, const RegionDescription& r, std::size_t samples);

/// Counters, derived rates and a config echo; no time series.
nlohmann::json trace_to_json(const SimTrace& trace);

/// Columns slot,Q1,Q2,B1,B2 at every sample point.
void write_trace_csv(std::ostream& os, const SimTrace& trace);

/// Columns point_id,lambda1,lambda2,analytic,empirical,drift1,drift2,agree.
void write_agreement_csv(std::ostream& os, const std::vector<VerifyRow>& rows);

/// Minimal SVG plot of the unit square in (λ₁, λ₂) coordinates.
class SvgPlot {
public:
    explicit SvgPlot(std::string title, double extent = 1.0);

    void polyline(const std::vector<Point2>& pts, const std::string& color, bool dotted = false);
    void marker(Point2 p, const std::string& color, double size);
    void cell(Point2 center, double width, double height, const std::string& color);
    void legend(const std::string& text, const std::string& color);

    std::string str() const;

private:
    double sx(double x) const;
    double sy(double y) const;

    std::string title_;
    double extent_;
    std::vector<std::string> body_;
    std::vector<std::string> legend_;
};

}  // namespace ehstab
