#include "spdlm/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "spdlm/errors.hpp"
#include "spdlm/io.hpp"

namespace spdlm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
// |cos(delta)| below this counts as the singular set of the equator chart;
// delta = pi / 2 itself only rounds to 6e-17.
constexpr double kEquatorCosGuard = 1e-12;

double dot3(double a0, double a1, double a2, double b0, double b1, double b2) {
    return a0 * b0 + a1 * b1 + a2 * b2;
}

// Coefficients c[i][j] (i < j) of a 2-form sum c_ij dq_i ^ dq_j.
using FormMatrix = std::array<std::array<double, 4>, 4>;

double apply_form(const FormMatrix& c, const Vec4& t1, const Vec4& t2) {
    double total = 0.0;
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            total += c[i][j] * (t1[i] * t2[j] - t1[j] * t2[i]);
        }
    }
    return total;
}

}  // namespace

double wrap_angle(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) {
        r += kTwoPi;
    }
    return r >= kTwoPi ? 0.0 : r;
}

double constraint_residual(const PhasePoint& p) {
    const double sphere = dot3(p.x, p.y, p.z, p.x, p.y, p.z) - 1.0;
    const double cotangent = dot3(p.x, p.y, p.z, p.u, p.v, p.w);
    return std::max(std::abs(sphere), std::abs(cotangent));
}

double distance(const PhasePoint& a, const PhasePoint& b) {
    const Vec6 da = a.as_array();
    const Vec6 db = b.as_array();
    double s = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
        s += (da[i] - db[i]) * (da[i] - db[i]);
    }
    return std::sqrt(s);
}

std::string_view to_string(Chart chart) {
    switch (chart) {
        case Chart::North: return "north";
        case Chart::South: return "south";
        case Chart::Equator: return "equator";
    }
    return "?";
}

std::string_view to_string(Stratum stratum) {
    switch (stratum) {
        case Stratum::Regular: return "regular";
        case Stratum::EllipticBoundary: return "elliptic-boundary";
        case Stratum::FocusFocus: return "focus-focus";
        case Stratum::Outside: return "outside";
    }
    return "?";
}

Potential::Potential(std::string name, Fn value, Fn derivative)
    : name_(std::move(name)), value_(std::move(value)), derivative_(std::move(derivative)) {
    if (!value_ || !derivative_) {
        throw std::invalid_argument("Potential needs both V and V'");
    }
}

Potential Potential::quadratic() {
    Potential p("z^2", [](double z) { return z * z; }, [](double z) { return 2.0 * z; });
    p.quadratic_ = true;
    return p;
}

double Potential::profile(Chart hemisphere, double rho) const {
    const double z = std::sqrt(std::max(0.0, (1.0 - rho) * (1.0 + rho)));
    return value(hemisphere == Chart::South ? -z : z);
}

double Potential::profile_derivative(Chart hemisphere, double rho) const {
    const double z = std::sqrt(std::max(0.0, (1.0 - rho) * (1.0 + rho)));
    if (hemisphere == Chart::South) {
        return derivative(-z) * rho / z;
    }
    return -derivative(z) * rho / z;
}

std::optional<std::string> admissibility_violation(const Potential& potential) {
    constexpr double kTol = 1e-12;
    const auto near = [](double a, double b) { return std::abs(a - b) <= kTol; };
    if (!near(potential.value(-1.0), 1.0) || !near(potential.value(1.0), 1.0)) {
        return "V(+-1) must equal 1";
    }
    if (!near(potential.value(0.0), 0.0)) {
        return "V(0) must equal 0";
    }
    constexpr int kSteps = 1000;
    double previous = potential.value(0.0);
    for (int side : {1, -1}) {
        previous = potential.value(0.0);
        for (int i = 1; i <= kSteps; ++i) {
            const double z = side * static_cast<double>(i) / kSteps;
            const double value = potential.value(z);
            if (!(value > previous)) {
                return "V is not strictly increasing in |z| near z=" + std::to_string(z);
            }
            previous = value;
        }
    }
    constexpr double kStep = 1e-6;
    for (int i = -kSteps + 1; i < kSteps; i += 7) {
        const double z = static_cast<double>(i) / kSteps;
        const double fd = (potential.value(z + kStep) - potential.value(z - kStep)) / (2.0 * kStep);
        const double exact = potential.derivative(z);
        if (std::abs(fd - exact) > 1e-5 * (1.0 + std::abs(exact))) {
            return "V' disagrees with a difference quotient of V at z=" + std::to_string(z);
        }
    }
    return std::nullopt;
}

Stratum classify(double j, double h) {
    const double boundary = 0.5 * j * j;
    if (h < boundary - kOutsideTolerance) {
        return Stratum::Outside;
    }
    if (std::abs(h - boundary) <= kStratumBand) {
        return Stratum::EllipticBoundary;
    }
    if (std::abs(j) <= kStratumBand && std::abs(h - 1.0) <= kStratumBand) {
        return Stratum::FocusFocus;
    }
    return Stratum::Regular;
}

PhasePoint project(const Vec6& raw) {
    const double norm = std::sqrt(dot3(raw[0], raw[1], raw[2], raw[0], raw[1], raw[2]));
    if (!(norm >= 1e-8)) {
        throw DegenerateInput("project: position part has norm below 1e-8");
    }
    const double x = raw[0] / norm;
    const double y = raw[1] / norm;
    const double z = raw[2] / norm;
    const double radial = dot3(x, y, z, raw[3], raw[4], raw[5]);
    return {x, y, z, raw[3] - radial * x, raw[4] - radial * y, raw[5] - radial * z};
}

ChartPoint to_chart(const PhasePoint& p, Chart chart) {
    const double rho = std::hypot(p.x, p.y);
    const double eta = std::hypot(p.u, p.v);
    const double theta = rho > 0.0 ? wrap_angle(std::atan2(p.y, p.x)) : 0.0;
    const double phi = eta > 0.0 ? wrap_angle(std::atan2(p.v, p.u)) : 0.0;
    switch (chart) {
        case Chart::North:
            if (!(p.z > 0.0)) {
                throw ChartDomainError("north chart needs z > 0");
            }
            return {chart, {rho, eta, theta, phi}};
        case Chart::South:
            if (!(p.z < 0.0)) {
                throw ChartDomainError("south chart needs z < 0");
            }
            return {chart, {rho, eta, theta, phi}};
        case Chart::Equator:
            if (!(std::abs(p.z) < 1.0)) {
                throw ChartDomainError("equator chart needs |z| < 1");
            }
            return {chart, {p.z, p.w, theta, phi}};
    }
    throw ChartDomainError("unknown chart");
}

PhasePoint from_chart(const ChartPoint& c) {
    const auto& q = c.coords;
    const double delta = c.delta();
    if (c.chart == Chart::Equator) {
        const double z = q[0];
        const double w = q[1];
        if (!(std::abs(z) < 1.0)) {
            throw ChartDomainError("equator chart needs |z| < 1");
        }
        const double cos_delta = std::cos(delta);
        if (std::abs(cos_delta) < kEquatorCosGuard) {
            throw ChartDomainError("equator chart is singular at cos(phi - theta) = 0");
        }
        const double rho = std::sqrt((1.0 - z) * (1.0 + z));
        const double eta = -z * w / (rho * cos_delta);
        return {rho * std::cos(q[2]), rho * std::sin(q[2]), z,
                eta * std::cos(q[3]), eta * std::sin(q[3]), w};
    }
    const double rho = q[0];
    const double eta = q[1];
    if (!(rho >= 0.0 && rho < 1.0) || !(eta >= 0.0)) {
        throw ChartDomainError("polar chart needs rho in [0, 1) and eta >= 0");
    }
    const double height = std::sqrt((1.0 - rho) * (1.0 + rho));
    const double sign = c.chart == Chart::South ? -1.0 : 1.0;
    const double w = -sign * rho * eta * std::cos(delta) / height;
    return {rho * std::cos(q[2]), rho * std::sin(q[2]), sign * height,
            eta * std::cos(q[3]), eta * std::sin(q[3]), w};
}

MomentumValue momentum_map(const PhasePoint& p, const Potential& potential) {
    const double j = p.x * p.v - p.y * p.u;
    const double h = 0.5 * (p.u * p.u + p.v * p.v + p.w * p.w) + potential.value(p.z);
    return {j, h, classify(j, h)};
}

std::array<double, 2> chart_momentum_map(const ChartPoint& c, const Potential& potential) {
    if (c.chart == Chart::Equator) {
        throw ChartDomainError("chart_momentum_map is defined on the polar charts");
    }
    const double rho = c.coords[0];
    const double eta = c.coords[1];
    const double sd = std::sin(c.delta());
    const double j = rho * eta * sd;
    const double h = 0.5 * eta * eta * (1.0 - rho * rho * sd * sd) / ((1.0 - rho) * (1.0 + rho)) +
                     potential.profile(c.chart, rho);
    return {j, h};
}

double symplectic_eval(const ChartPoint& c, const Vec4& t1, const Vec4& t2) {
    const double delta = c.delta();
    const double sd = std::sin(delta);
    const double cd = std::cos(delta);
    FormMatrix m{};
    if (c.chart == Chart::Equator) {
        const double z = c.coords[0];
        const double w = c.coords[1];
        if (!(std::abs(z) < 1.0) || std::abs(cd) < kEquatorCosGuard) {
            throw ChartDomainError("equator form is singular here");
        }
        const double one_minus = (1.0 - z) * (1.0 + z);
        const double td = sd / cd;
        // From omega = -d(w dz / (1 - z^2) - z w tan(delta) dtheta). The dz ^ dtheta
        // coefficient is w tan(delta); the extra (1 + z^2) / (1 - z^2) sometimes
        // quoted for it fails the pullback check.
        m[0][1] = 1.0 / one_minus;
        m[0][2] = w * td;
        m[1][2] = z * td;
        m[2][3] = -z * w / (cd * cd);
    } else {
        const double rho = c.coords[0];
        const double eta = c.coords[1];
        if (!(rho >= 0.0 && rho < 1.0)) {
            throw ChartDomainError("polar form needs rho in [0, 1)");
        }
        const double one_minus = (1.0 - rho) * (1.0 + rho);
        m[0][1] = cd / one_minus;
        m[0][2] = rho * rho * eta * sd / one_minus;
        m[0][3] = -eta * sd / one_minus;
        m[1][2] = -rho * sd;
        m[2][3] = rho * eta * cd;
    }
    return apply_form(m, t1, t2);
}

double ambient_form(const Vec6& a, const Vec6& b) {
    double total = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        total += a[i] * b[i + 3] - a[i + 3] * b[i];
    }
    return total;
}

PhasePoint assemble_point(double z, double w, double theta, double j, double kinetic2) {
    const double rho = std::sqrt(std::max(0.0, (1.0 - z) * (1.0 + z)));
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    double radial_rate = 0.0;
    double azimuthal = 0.0;
    if (rho > 1e-9) {
        radial_rate = -z * w / rho;
        azimuthal = j / rho;
    } else {
        // At a pole only j = 0 is possible; the point is taken as arriving.
        radial_rate = -std::sqrt(std::max(0.0, kinetic2 - w * w));
    }
    return {rho * ct, rho * st, z,
            radial_rate * ct - azimuthal * st, radial_rate * st + azimuthal * ct, w};
}

PhasePoint meridian_point(double psi, double rate, double plane) {
    const double c = std::cos(psi);
    const double s = std::sin(psi);
    const double cp = std::cos(plane);
    const double sp = std::sin(plane);
    return {c * cp, c * sp, s, -s * rate * cp, -s * rate * sp, c * rate};
}

double meridian_plane(const PhasePoint& p) {
    if (p.w > 0.0) {
        return wrap_angle(std::atan2(p.y, p.x));
    }
    if (p.w < 0.0) {
        return wrap_angle(std::atan2(p.y, p.x) + kPi);
    }
    // Pole passage: horizontal momentum is -sin(psi) * rate * (cos, sin)(plane).
    const double sign = p.z >= 0.0 ? -1.0 : 1.0;
    return wrap_angle(std::atan2(sign * p.v, sign * p.u));
}

std::string to_json(const PhasePoint& p) {
    const auto f = [](double v) { return io::format_real(v); };
    return "{\"x\":" + f(p.x) + ",\"y\":" + f(p.y) + ",\"z\":" + f(p.z) + ",\"u\":" + f(p.u) +
           ",\"v\":" + f(p.v) + ",\"w\":" + f(p.w) + "}";
}

PhasePoint phase_point_from_json(std::string_view text) {
    try {
        const auto j = nlohmann::json::parse(text);
        return {j.at("x").get<double>(), j.at("y").get<double>(), j.at("z").get<double>(),
                j.at("u").get<double>(), j.at("v").get<double>(), j.at("w").get<double>()};
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("phase point JSON: ") + e.what());
    }
}

std::string to_csv_row(const PhasePoint& p) {
    std::vector<std::string> fields;
    for (double v : p.as_array()) {
        fields.push_back(io::format_real(v));
    }
    return io::join_csv(fields);
}

PhasePoint phase_point_from_csv_row(std::string_view row) {
    const auto fields = io::split_csv(row);
    if (fields.size() != 6) {
        throw std::invalid_argument("phase point CSV row needs 6 fields");
    }
    Vec6 a{};
    for (std::size_t i = 0; i < 6; ++i) {
        a[i] = std::stod(fields[i]);
    }
    return PhasePoint::from_array(a);
}

}  // namespace spdlm
