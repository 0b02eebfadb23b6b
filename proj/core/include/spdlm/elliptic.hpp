#pragma once

// Elliptic integrals of the first and third kind and the Jacobi amplitude.
//
// Conventions: `k` is always the modulus, entering the integrands as
// sqrt(1 - k^2 sin^2 t). No parameter-m interface is exposed; callers that
// already hold the complementary parameter kc2 = 1 - k^2 (for moduli very close
// to one) use the *_kc entry points, which skip the guard band and avoid the
// cancellation in 1 - k^2.
//
// Everything here is a pure function and safe to call from any thread.

namespace spdlm::elliptic {

/// Moduli closer to 1 than this are rejected by the complete integrals and by am.
inline constexpr double kModulusGuard = 1e-12;

// Carlson symmetric forms.
double carlson_rf(double x, double y, double z);
double carlson_rj(double x, double y, double z, double p);
double carlson_rc(double x, double y);

/// F(gamma, k) = int_0^gamma dt / sqrt(1 - k^2 sin^2 t). Arguments beyond
/// [-pi/2, pi/2] use F(gamma + pi) = F(gamma) + 2K (requires k < 1).
double ellint_F(double gamma, double k);
double ellint_K(double k);
/// Pi(gamma, n, k) = int_0^gamma dt / ((1 - n sin^2 t) sqrt(1 - k^2 sin^2 t)).
double ellint_Pi(double gamma, double n, double k);
double ellint_Pi_complete(double n, double k);

/// am(f, k): the gamma with F(gamma, k) = f. Continuous and increasing in f.
double jacobi_am(double f, double k);
double jacobi_sn(double f, double k);
double jacobi_cn(double f, double k);
double jacobi_dn(double f, double k);

// Complementary-parameter variants; kc2 = 1 - k^2 must lie in (0, 1].
double ellint_F_kc(double gamma, double kc2);
double ellint_K_kc(double kc2);
double ellint_Pi_kc(double gamma, double n, double kc2);
double ellint_Pi_complete_kc(double n, double kc2);
double jacobi_am_kc(double f, double kc2);
/// Third kind with 1 - n supplied as well, for characteristics close to 1.
double ellint_Pi_kcn(double gamma, double n, double one_minus_n, double kc2);
double ellint_Pi_complete_kcn(double n, double one_minus_n, double kc2);

}  // namespace spdlm::elliptic
