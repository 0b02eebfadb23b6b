#include "spdlm/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include <boost/math/tools/roots.hpp>

#include "spdlm/errors.hpp"

namespace spdlm::elliptic {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2;
constexpr int kMaxDuplications = 200;

// Error tolerances of the duplication loops; the truncation error of the
// final series is O(tol^6), below double rounding for these values.
constexpr double kRfTol = 0.0025;
constexpr double kRjTol = 0.0015;
constexpr double kRcTol = 0.0012;

[[noreturn]] void domain(const std::string& what) {
    throw DomainError("elliptic: " + what);
}

double complement_of(double k) {
    const double a = std::abs(k);
    return (1.0 - a) * (1.0 + a);
}

void check_modulus_for_complete(double k) {
    if (!std::isfinite(k) || std::abs(k) >= 1.0 - kModulusGuard) {
        domain("modulus k=" + std::to_string(k) + " outside [0, 1 - 1e-12)");
    }
}

// Splits gamma = m*pi + r with r in [-pi/2, pi/2].
std::pair<double, double> reduce_angle(double gamma) {
    const double m = std::round(gamma / kPi);
    return {m, gamma - m * kPi};
}

// y = 1 - k^2 sin^2(r) written as cos^2 + kc2 sin^2 to keep digits near k=1.
double delta_sq(double s, double c, double kc2) {
    return c * c + kc2 * s * s;
}

double first_kind_principal(double r, double kc2) {
    const double s = std::sin(r);
    const double c = std::cos(r);
    const double y = delta_sq(s, c, kc2);
    if (!(y > 0.0)) {
        domain("first kind: 1 - k^2 sin^2 vanishes on the range");
    }
    return s * carlson_rf(c * c, y, 1.0);
}

// one_minus_n = 1 - n, passed separately so n close to 1 keeps its digits.
double third_kind_principal(double r, double n, double one_minus_n, double kc2) {
    const double s = std::sin(r);
    const double c = std::cos(r);
    const double y = delta_sq(s, c, kc2);
    const double p = c * c + one_minus_n * s * s;
    if (!(y > 0.0)) {
        domain("third kind: 1 - k^2 sin^2 vanishes on the range");
    }
    if (!(p > 0.0)) {
        domain("third kind: 1 - n sin^2 crosses zero on the range (n=" + std::to_string(n) + ")");
    }
    const double s3 = s * s * s;
    return s * carlson_rf(c * c, y, 1.0) + n / 3.0 * s3 * carlson_rj(c * c, y, 1.0, p);
}

}  // namespace

double carlson_rc(double x, double y) {
    if (!(x >= 0.0) || !(y > 0.0)) {
        domain("R_C needs x >= 0, y > 0");
    }
    double xt = x;
    double yt = y;
    double ave = 0.0;
    double s = 0.0;
    for (int i = 0; i < kMaxDuplications; ++i) {
        const double lambda = 2.0 * std::sqrt(xt) * std::sqrt(yt) + yt;
        xt = 0.25 * (xt + lambda);
        yt = 0.25 * (yt + lambda);
        ave = (xt + yt + yt) / 3.0;
        s = (yt - ave) / ave;
        if (std::abs(s) <= kRcTol) {
            break;
        }
    }
    return (1.0 + s * s * (0.3 + s * (1.0 / 7.0 + s * (0.375 + s * 9.0 / 22.0)))) / std::sqrt(ave);
}

double carlson_rf(double x, double y, double z) {
    if (!(x >= 0.0) || !(y >= 0.0) || !(z >= 0.0)) {
        domain("R_F needs non-negative arguments");
    }
    if ((x == 0.0) + (y == 0.0) + (z == 0.0) > 1) {
        domain("R_F diverges with two zero arguments");
    }
    double xt = x;
    double yt = y;
    double zt = z;
    double ave = 0.0;
    double dx = 0.0;
    double dy = 0.0;
    double dz = 0.0;
    for (int i = 0; i < kMaxDuplications; ++i) {
        const double sx = std::sqrt(xt);
        const double sy = std::sqrt(yt);
        const double sz = std::sqrt(zt);
        const double lambda = sx * (sy + sz) + sy * sz;
        xt = 0.25 * (xt + lambda);
        yt = 0.25 * (yt + lambda);
        zt = 0.25 * (zt + lambda);
        ave = (xt + yt + zt) / 3.0;
        dx = (ave - xt) / ave;
        dy = (ave - yt) / ave;
        dz = (ave - zt) / ave;
        if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) <= kRfTol) {
            break;
        }
    }
    const double e2 = dx * dy - dz * dz;
    const double e3 = dx * dy * dz;
    return (1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0) / std::sqrt(ave);
}

double carlson_rj(double x, double y, double z, double p) {
    if (!(x >= 0.0) || !(y >= 0.0) || !(z >= 0.0) || !(p > 0.0)) {
        domain("R_J needs x, y, z >= 0 and p > 0");
    }
    if ((x == 0.0) + (y == 0.0) + (z == 0.0) > 1) {
        domain("R_J diverges with two zero arguments");
    }
    constexpr double c1 = 3.0 / 14.0;
    constexpr double c2 = 1.0 / 3.0;
    constexpr double c3 = 3.0 / 22.0;
    constexpr double c4 = 3.0 / 26.0;
    constexpr double c5 = 0.75 * c3;
    constexpr double c6 = 1.5 * c4;
    constexpr double c7 = 0.5 * c2;
    constexpr double c8 = c3 + c3;

    double xt = x;
    double yt = y;
    double zt = z;
    double pt = p;
    double sum = 0.0;
    double fac = 1.0;
    double ave = 0.0;
    double dx = 0.0;
    double dy = 0.0;
    double dz = 0.0;
    double dp = 0.0;
    for (int i = 0; i < kMaxDuplications; ++i) {
        const double sx = std::sqrt(xt);
        const double sy = std::sqrt(yt);
        const double sz = std::sqrt(zt);
        const double lambda = sx * (sy + sz) + sy * sz;
        const double alpha = std::pow(pt * (sx + sy + sz) + sx * sy * sz, 2);
        const double beta = pt * std::pow(pt + lambda, 2);
        sum += fac * carlson_rc(alpha, beta);
        fac *= 0.25;
        xt = 0.25 * (xt + lambda);
        yt = 0.25 * (yt + lambda);
        zt = 0.25 * (zt + lambda);
        pt = 0.25 * (pt + lambda);
        ave = 0.2 * (xt + yt + zt + pt + pt);
        dx = (ave - xt) / ave;
        dy = (ave - yt) / ave;
        dz = (ave - zt) / ave;
        dp = (ave - pt) / ave;
        if (std::max({std::abs(dx), std::abs(dy), std::abs(dz), std::abs(dp)}) <= kRjTol) {
            break;
        }
    }
    const double ea = dx * (dy + dz) + dy * dz;
    const double eb = dx * dy * dz;
    const double ec = dp * dp;
    const double ed = ea - 3.0 * ec;
    const double ee = eb + 2.0 * dp * (ea - ec);
    const double series = 1.0 + ed * (-c1 + c5 * ed - c6 * ee) + eb * (c7 + dp * (-c8 + dp * c4)) +
                          dp * ea * (c2 - dp * c3) - c2 * dp * ec;
    return 3.0 * sum + fac * series / (ave * std::sqrt(ave));
}

double ellint_K_kc(double kc2) {
    if (!(kc2 > 0.0) || kc2 > 1.0) {
        domain("complete first kind needs 0 < 1 - k^2 <= 1");
    }
    return carlson_rf(0.0, kc2, 1.0);
}

double ellint_F_kc(double gamma, double kc2) {
    if (!std::isfinite(gamma)) {
        domain("non-finite amplitude");
    }
    if (std::abs(gamma) <= kHalfPi) {
        return first_kind_principal(gamma, kc2);
    }
    const auto [m, r] = reduce_angle(gamma);
    return 2.0 * m * ellint_K_kc(kc2) + first_kind_principal(r, kc2);
}

double ellint_Pi_complete_kcn(double n, double one_minus_n, double kc2) {
    if (!(one_minus_n > 0.0)) {
        domain("complete third kind needs n < 1");
    }
    const double rf = ellint_K_kc(kc2);
    return rf + n / 3.0 * carlson_rj(0.0, kc2, 1.0, one_minus_n);
}

double ellint_Pi_kcn(double gamma, double n, double one_minus_n, double kc2) {
    if (!std::isfinite(gamma)) {
        domain("non-finite amplitude");
    }
    if (std::abs(gamma) <= kHalfPi) {
        return third_kind_principal(gamma, n, one_minus_n, kc2);
    }
    const auto [m, r] = reduce_angle(gamma);
    return 2.0 * m * ellint_Pi_complete_kcn(n, one_minus_n, kc2) + third_kind_principal(r, n, one_minus_n, kc2);
}

double ellint_Pi_complete_kc(double n, double kc2) {
    return ellint_Pi_complete_kcn(n, 1.0 - n, kc2);
}

double ellint_Pi_kc(double gamma, double n, double kc2) {
    return ellint_Pi_kcn(gamma, n, 1.0 - n, kc2);
}

double jacobi_am_kc(double f, double kc2) {
    if (!std::isfinite(f)) {
        domain("non-finite argument to am");
    }
    const double big_k = ellint_K_kc(kc2);
    const double m = std::round(f / (2.0 * big_k));
    const double r = f - 2.0 * m * big_k;
    if (r == 0.0) {
        return m * kPi;
    }
    const double k2 = 1.0 - kc2;
    // am(u) ~ u for k -> 0 and ~ gd(u) = asin(tanh u) for k -> 1.
    const double seed = std::clamp(kc2 * r + k2 * std::asin(std::tanh(r)), -kHalfPi, kHalfPi);
    const auto residual = [&](double g) {
        const double s = std::sin(g);
        const double c = std::cos(g);
        const double y = delta_sq(s, c, kc2);
        return std::make_pair(first_kind_principal(g, kc2) - r, 1.0 / std::sqrt(y));
    };
    std::uintmax_t iterations = 100;
    const double g = boost::math::tools::newton_raphson_iterate(residual, seed, -kHalfPi, kHalfPi,
                                                                std::numeric_limits<double>::digits - 2,
                                                                iterations);
    return m * kPi + g;
}

double ellint_F(double gamma, double k) {
    if (std::abs(gamma) > kHalfPi) {
        check_modulus_for_complete(k);
    }
    return ellint_F_kc(gamma, complement_of(k));
}

double ellint_K(double k) {
    check_modulus_for_complete(k);
    return ellint_K_kc(complement_of(k));
}

double ellint_Pi(double gamma, double n, double k) {
    if (std::abs(gamma) > kHalfPi) {
        check_modulus_for_complete(k);
    }
    return ellint_Pi_kc(gamma, n, complement_of(k));
}

double ellint_Pi_complete(double n, double k) {
    check_modulus_for_complete(k);
    return ellint_Pi_complete_kc(n, complement_of(k));
}

double jacobi_am(double f, double k) {
    check_modulus_for_complete(k);
    return jacobi_am_kc(f, complement_of(k));
}

double jacobi_sn(double f, double k) {
    return std::sin(jacobi_am(f, k));
}

double jacobi_cn(double f, double k) {
    return std::cos(jacobi_am(f, k));
}

double jacobi_dn(double f, double k) {
    const double s = jacobi_sn(f, k);
    return std::sqrt(1.0 - k * k * s * s);
}

}  // namespace spdlm::elliptic
