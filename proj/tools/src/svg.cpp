#include "spdlm_cli/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace spdlm::cli {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Maps a data box onto a pixel box with y pointing up.
struct Frame {
    double x0, y0, w, h;
    double xmin, xmax, ymin, ymax;
    [[nodiscard]] double px(double x) const { return x0 + (x - xmin) / (xmax - xmin) * w; }
    [[nodiscard]] double py(double y) const { return y0 + h - (y - ymin) / (ymax - ymin) * h; }
};

void axes(SvgDocument& svg, const Frame& f, std::string_view xlabel, std::string_view ylabel) {
    svg.rect(f.x0, f.y0, f.w, f.h, "none", "#444");
    svg.text(f.x0 + f.w / 2, f.y0 + f.h + 32, xlabel, 13, "middle");
    svg.text(f.x0 - 38, f.y0 + f.h / 2, ylabel, 13, "middle");
    for (int i = 0; i <= 4; ++i) {
        const double xv = f.xmin + (f.xmax - f.xmin) * i / 4.0;
        const double yv = f.ymin + (f.ymax - f.ymin) * i / 4.0;
        svg.text(f.px(xv), f.y0 + f.h + 16, num(xv), 10, "middle");
        svg.text(f.x0 - 6, f.py(yv) + 4, num(yv), 10, "end");
    }
}

}  // namespace

SvgDocument::SvgDocument(double width, double height) : width_(width), height_(height) {}

void SvgDocument::rect(double x, double y, double w, double h, std::string_view fill, std::string_view stroke) {
    body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
             "\" fill=\"" + std::string(fill) + "\" stroke=\"" + std::string(stroke) + "\"/>\n";
}

void SvgDocument::line(double x1, double y1, double x2, double y2, std::string_view stroke, double width) {
    body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
             "\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"" + num(width) + "\"/>\n";
}

void SvgDocument::polyline(std::span<const std::pair<double, double>> pts, std::string_view stroke, double width) {
    if (pts.empty()) {
        return;
    }
    body_ += "<polyline fill=\"none\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"" + num(width) +
             "\" points=\"";
    for (const auto& [x, y] : pts) {
        body_ += num(x) + "," + num(y) + " ";
    }
    body_ += "\"/>\n";
}

void SvgDocument::circle(double cx, double cy, double r, std::string_view fill, std::string_view stroke) {
    body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) + "\" fill=\"" +
             std::string(fill) + "\" stroke=\"" + std::string(stroke) + "\"/>\n";
}

void SvgDocument::text(double x, double y, std::string_view content, double size, std::string_view anchor) {
    body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + num(size) +
             "\" font-family=\"sans-serif\" text-anchor=\"" + std::string(anchor) + "\">" + escape(content) +
             "</text>\n";
}

std::string SvgDocument::str() const {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
           "width=\"" + num(width_) + "\" height=\"" + num(height_) + "\" viewBox=\"0 0 " + num(width_) + " " +
           num(height_) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + body_ + "</svg>\n";
}

std::string ramp_colour(double t) {
    t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0);
    const int r = static_cast<int>(std::lround(40 + 215 * t));
    const int g = static_cast<int>(std::lround(70 + 110 * (1.0 - std::abs(2.0 * t - 1.0))));
    const int b = static_cast<int>(std::lround(255 - 215 * t));
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

std::string trajectory_svg(std::span<const double> times, std::span<const PhasePoint> points,
                           std::string_view title) {
    SvgDocument svg(960, 480);
    svg.text(480, 24, title, 15, "middle");

    // Sphere seen from azimuth 30 deg, elevation 20 deg.
    const double az = 30.0 * std::numbers::pi / 180.0;
    const double el = 20.0 * std::numbers::pi / 180.0;
    const std::array<double, 3> right{-std::sin(az), std::cos(az), 0.0};
    const std::array<double, 3> up{-std::sin(el) * std::cos(az), -std::sin(el) * std::sin(az), std::cos(el)};
    const double cx = 240;
    const double cy = 255;
    const double radius = 180;
    svg.circle(cx, cy, radius, "#f4f4f8", "#888");
    std::vector<std::pair<double, double>> equator;
    for (int i = 0; i <= 96; ++i) {
        const double a = 2.0 * std::numbers::pi * i / 96;
        const double x = std::cos(a);
        const double y = std::sin(a);
        equator.emplace_back(cx + radius * (right[0] * x + right[1] * y), cy - radius * (up[0] * x + up[1] * y));
    }
    svg.polyline(equator, "#bbb", 0.8);
    std::vector<std::pair<double, double>> path;
    path.reserve(points.size());
    for (const PhasePoint& p : points) {
        const double sx = right[0] * p.x + right[1] * p.y + right[2] * p.z;
        const double sy = up[0] * p.x + up[1] * p.y + up[2] * p.z;
        path.emplace_back(cx + radius * sx, cy - radius * sy);
    }
    svg.polyline(path, "#c0392b", 1.2);
    if (!path.empty()) {
        svg.circle(path.front().first, path.front().second, 4, "#2c3e50");
    }

    double tmin = times.empty() ? 0.0 : times.front();
    double tmax = times.empty() ? 1.0 : times.back();
    if (tmin > tmax) {
        std::swap(tmin, tmax);
    }
    if (tmax == tmin) {
        tmax = tmin + 1.0;
    }
    const Frame f{540, 60, 380, 360, tmin, tmax, -1.0, 1.0};
    axes(svg, f, "t", "z");
    std::vector<std::pair<double, double>> graph;
    graph.reserve(points.size());
    for (std::size_t i = 0; i < points.size() && i < times.size(); ++i) {
        graph.emplace_back(f.px(times[i]), f.py(points[i].z));
    }
    svg.polyline(graph, "#2471a3", 1.2);
    return svg.str();
}

std::string momentum_image_svg(std::span<const HeatCell> cells, double j_step, double h_step, double j_min,
                               double j_max, double h_max, std::string_view title) {
    SvgDocument svg(720, 600);
    svg.text(360, 24, title, 15, "middle");
    const Frame f{80, 50, 560, 480, j_min, j_max, 0.0, h_max};

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const HeatCell& c : cells) {
        if (std::isfinite(c.value)) {
            lo = std::min(lo, c.value);
            hi = std::max(hi, c.value);
        }
    }
    const double span = hi > lo ? hi - lo : 1.0;
    for (const HeatCell& c : cells) {
        if (!std::isfinite(c.value)) {
            continue;
        }
        const double x = f.px(c.j - j_step / 2);
        const double y = f.py(c.h + h_step / 2);
        svg.rect(x, y, f.px(c.j + j_step / 2) - x, f.py(c.h - h_step / 2) - y, ramp_colour((c.value - lo) / span));
    }

    std::vector<std::pair<double, double>> parabola;
    for (int i = 0; i <= 200; ++i) {
        const double j = j_min + (j_max - j_min) * i / 200.0;
        const double h = 0.5 * j * j;
        if (h <= h_max) {
            parabola.emplace_back(f.px(j), f.py(h));
        }
    }
    svg.polyline(parabola, "#111", 2.0);
    svg.circle(f.px(0.0), f.py(1.0), 5, "white", "#111");
    svg.text(f.px(0.0) + 8, f.py(1.0) - 8, "(0, 1)", 11);
    axes(svg, f, "j", "h");
    if (std::isfinite(lo)) {
        svg.text(f.x0 + f.w, f.y0 - 8, "colour: " + num(lo) + " to " + num(hi), 11, "end");
    }
    return svg.str();
}

}  // namespace spdlm::cli
