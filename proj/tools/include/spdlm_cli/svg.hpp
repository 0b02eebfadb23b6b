#pragma once

// Minimal SVG 1.1 emitter for the static plots.

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spdlm/phase_space.hpp"

namespace spdlm::cli {

class SvgDocument {
public:
    SvgDocument(double width, double height);

    void rect(double x, double y, double w, double h, std::string_view fill, std::string_view stroke = "none");
    void line(double x1, double y1, double x2, double y2, std::string_view stroke, double width = 1.0);
    void polyline(std::span<const std::pair<double, double>> pts, std::string_view stroke, double width = 1.0);
    void circle(double cx, double cy, double r, std::string_view fill, std::string_view stroke = "none");
    /// Text is escaped.
    void text(double x, double y, std::string_view content, double size = 12.0, std::string_view anchor = "start");

    [[nodiscard]] std::string str() const;

private:
    double width_;
    double height_;
    std::string body_;
};

/// Orthographic view of the sphere path on the left, z against t on the right.
[[nodiscard]] std::string trajectory_svg(std::span<const double> times, std::span<const PhasePoint> points,
                                         std::string_view title);

struct HeatCell {
    double j = 0.0;
    double h = 0.0;
    double value = 0.0;  ///< NaN leaves the cell blank
};

/// Cells of a regular (j, h) grid over the momentum image, coloured by value,
/// with the boundary parabola and the focus-focus value marked.
[[nodiscard]] std::string momentum_image_svg(std::span<const HeatCell> cells, double j_step, double h_step,
                                             double j_min, double j_max, double h_max, std::string_view title);

/// Hex colour on a blue to red ramp for t in [0, 1].
[[nodiscard]] std::string ramp_colour(double t);

}  // namespace spdlm::cli
