#ifndef MSP_COUPLING_HPP
#define MSP_COUPLING_HPP

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <limits>
#include <string>

#include "msp/constants.hpp"
#include "msp/errors.hpp"
#include "msp/numeric.hpp"

namespace msp {

/// Bright-mode coupling parameters. All rates are hbar * rate in meV, so any
/// consistent energy unit works (the normalized tools use omega0 = 1).
struct CouplingParams
{
    double omega0 = 1.0;     // bright MSP frequency
    double gamma0 = 0.0;     // Fermi-golden-rule radiative rate
    double gamma_nr = 0.1;   // non-radiative rate gamma
    double eps_s = 12.9;

    void validate() const
    {
        if (!(omega0 > 0.0) || !std::isfinite(omega0))
            throw InvalidArgument("CouplingParams: omega0 must be > 0");
        if (!(gamma0 >= 0.0) || !std::isfinite(gamma0))
            throw InvalidArgument("CouplingParams: gamma0 must be >= 0");
        if (!(gamma_nr > 0.0) || !std::isfinite(gamma_nr))
            throw InvalidArgument("CouplingParams: gamma must be > 0");
        if (!(eps_s >= 1.0))
            throw InvalidArgument("CouplingParams: eps_s must be >= 1");
    }

    /// Quality factor omega0 / gamma.
    [[nodiscard]] double Q() const { return omega0 / gamma_nr; }

    /// Damping ratio Gamma(theta, omega0) / gamma.
    [[nodiscard]] double g(double theta_deg) const;

    /// Parameters realizing damping ratio g and quality factor Q at angle theta.
    static CouplingParams from_gq(double g, double Q, double theta_deg, double omega0 = 1.0, double eps_s = 12.9);
};

namespace detail {

inline void check_angle(double theta_deg)
{
    if (!(theta_deg >= 0.0) || !(theta_deg < 90.0))
        throw AngleOutOfRange("theta = " + std::to_string(theta_deg) + " deg is outside [0, 90)");
}

inline double angle_factor(double theta_deg)
{
    check_angle(theta_deg);
    const double th = constants::deg_to_rad(theta_deg);
    const double s = std::sin(th);
    return s * s / std::cos(th);
}

} // namespace detail

/// Gamma(theta, omega) = Gamma0 (omega / omega0) sin^2(theta) / cos(theta).
inline double gamma_theta(const CouplingParams& p, double theta_deg, double omega)
{
    if (!(omega >= 0.0))
        throw InvalidArgument("gamma_theta: omega must be >= 0");
    return p.gamma0 * (omega / p.omega0) * detail::angle_factor(theta_deg);
}

inline double CouplingParams::g(double theta_deg) const
{
    return gamma_theta(*this, theta_deg, omega0) / gamma_nr;
}

inline CouplingParams CouplingParams::from_gq(double g, double Q, double theta_deg, double omega0, double eps_s)
{
    if (!(g >= 0.0) || !(Q > 0.0))
        throw InvalidArgument("from_gq: need g >= 0 and Q > 0");
    const double f = detail::angle_factor(theta_deg);
    if (!(f > 0.0) && g > 0.0)
        throw AngleOutOfRange("from_gq: theta = 0 cannot realize g > 0");
    CouplingParams p;
    p.omega0 = omega0;
    p.gamma_nr = omega0 / Q;
    p.gamma0 = g > 0.0 ? g * p.gamma_nr / f : 0.0;
    p.eps_s = eps_s;
    p.validate();
    return p;
}

/// Normalized in-plane wavevector k_norm = c k / (sqrt(eps_s) omega0), with k
/// in 1/m and omega0 in meV. The light cone sits at omega = k_norm * omega0.
inline double k_norm_from_si(double k_per_m, double eps_s, double omega0_meV)
{
    return constants::c * k_per_m / (std::sqrt(eps_s) * constants::meV_to_rad_per_s(omega0_meV));
}

/// Radiative rate at normalized wavevector k: Gamma0 k^2 omega0 / sqrt(omega^2 - a^2)
/// above the light cone a = k omega0, zero below it (and for omega <= 0).
/// Exactly on the cone the kernel diverges and +infinity is returned.
inline double gamma_k(const CouplingParams& p, double k, double omega)
{
    if (!(k >= 0.0))
        throw InvalidArgument("gamma_k: k must be >= 0");
    if (k == 0.0)
        return 0.0;
    const double a = k * p.omega0;
    if (omega == a)
        return std::numeric_limits<double>::infinity();
    if (omega < a)
        return 0.0;
    return p.gamma0 * k * k * p.omega0 / std::sqrt((omega - a) * (omega + a));
}

/// Lamb shift G_k(omega) = Im[Gamma(omega) - Gamma*(-omega)]: zero outside the
/// light cone, -Gamma0 k^2 omega0 / sqrt(a^2 - omega^2) inside it, -infinity on it.
inline double lamb_shift_G(const CouplingParams& p, double k, double omega)
{
    if (!(k >= 0.0))
        throw InvalidArgument("lamb_shift_G: k must be >= 0");
    if (k == 0.0)
        return 0.0;
    const double a = k * p.omega0;
    const double x = std::abs(omega);
    if (x == a)
        return -std::numeric_limits<double>::infinity();
    if (x > a)
        return 0.0;
    return -p.gamma0 * k * k * p.omega0 / std::sqrt((a - x) * (a + x));
}

/// Closed-form Im Gamma(omega), piecewise in the three regions
/// omega > a, |omega| < a, omega < -a.
inline double im_gamma_analytic(const CouplingParams& p, double k, double omega)
{
    if (!(k >= 0.0))
        throw InvalidArgument("im_gamma_analytic: k must be >= 0");
    if (k == 0.0)
        return 0.0;
    const double a = k * p.omega0;
    const double x = std::abs(omega);
    if (x == a)
        throw LightConePoint("im_gamma_analytic: omega on the light cone");
    const double pref = p.gamma0 * a * a / (constants::pi * p.omega0);
    if (x > a) {
        const double v = pref * std::acosh(x / a) / std::sqrt((x - a) * (x + a));
        return omega > 0.0 ? v : -v;
    }
    return -pref * (0.5 * constants::pi + std::asin(omega / a)) / std::sqrt((a - x) * (a + x));
}

/// Kramers-Kronig oracle: Im Gamma(omega) = (1/pi) PV int Re Gamma(w') / (omega - w') dw'.
///
/// Substituting w' = a cosh t turns the integrand into A / (omega - a cosh t)
/// with A = Gamma0 k^2 omega0. The t-integral runs to T = acosh(W/a) with the
/// cutoff W = 50 omega0 (raised when omega or a come near it); the remainder
/// beyond W is added from its large-w' series. For omega > a the pole at
/// t0 = acosh(omega/a) is removed by subtracting -1/(a sinh t0 (t - t0)),
/// whose principal value is known in closed form. Composite 20-point
/// Gauss-Legendre panels are doubled until two levels agree to `tol`.
inline double kk_oracle_im_gamma(const CouplingParams& p, double k, double omega, double tol = 1e-10)
{
    if (!(k > 0.0))
        throw InvalidArgument("kk_oracle_im_gamma: k must be > 0");
    const double a = k * p.omega0;
    const double x = std::abs(omega);
    if (std::abs(x - a) <= 1e-12 * a)
        throw LightConePoint("kk_oracle_im_gamma: omega on the light cone");
    const double amp = p.gamma0 * k * k * p.omega0;

    const double cutoff = 50.0 * std::max({p.omega0, a, x});
    const double t_max = std::acosh(cutoff / a);

    // tail beyond the cutoff: -A sum_{n,m} omega^n c_m a^2m W^-(1+n+2m) / (1+n+2m)
    double tail = 0.0;
    {
        double cm = 1.0;
        for (int m = 0; m < 40; ++m) {
            if (m > 0)
                cm *= (2.0 * m - 1.0) / (2.0 * m);
            double term_m = 0.0;
            for (int n = 0; n < 60; ++n) {
                const int pw = 1 + n + 2 * m;
                const double term = std::pow(omega / cutoff, n) * std::pow(a / cutoff, 2 * m) / (cutoff * pw);
                term_m += term;
                if (std::abs(term) < 1e-18 * std::abs(term_m))
                    break;
            }
            tail += cm * term_m;
            if (cm * std::pow(a / cutoff, 2 * m) < 1e-18)
                break;
        }
        tail *= -amp;
    }

    const bool singular = omega > a;
    const double t0 = singular ? std::acosh(omega / a) : 0.0;
    const double s0 = singular ? std::sinh(t0) : 0.0;

    auto integrand = [&](double t) {
        if (!singular)
            return 1.0 / (omega - a * std::cosh(t));
        const double d = t - t0;
        if (std::abs(d) < 1e-6)
            return std::cosh(t0) / (2.0 * a * s0 * s0);
        // omega - a cosh t = -2a sinh((t+t0)/2) sinh((t-t0)/2), free of cancellation
        const double f = -1.0 / (2.0 * a * std::sinh(0.5 * (t + t0)) * std::sinh(0.5 * d));
        return f + 1.0 / (a * s0 * d);
    };

    using gl = boost::math::quadrature::gauss<double, 20>;
    auto composite = [&](double lo, double hi, int panels) {
        if (!(hi > lo))
            return 0.0;
        const double h = (hi - lo) / panels;
        double sum = 0.0;
        for (int i = 0; i < panels; ++i) {
            const double l = lo + i * h;
            sum += gl::integrate(integrand, l, l + h);
        }
        return sum;
    };
    auto level = [&](int panels) {
        if (!singular)
            return composite(0.0, t_max, panels);
        return composite(0.0, t0, panels) + composite(t0, t_max, panels);
    };

    double prev = level(16);
    for (int panels = 32; panels <= 4096; panels *= 2) {
        const double cur = level(panels);
        if (std::abs(cur - prev) <= tol * std::max(std::abs(cur), 1e-300)) {
            double pv = cur;
            if (singular)
                pv -= std::log((t_max - t0) / t0) / (a * s0);
            return (amp * pv + tail) / constants::pi;
        }
        prev = cur;
    }
    throw QuadratureNotConverged("kk_oracle_im_gamma: panel refinement did not reach tol at omega = " +
                                 std::to_string(omega));
}

/// Non-radiative rate in the Markov approximation: gamma Theta(omega).
inline double electronic_gamma(const CouplingParams& p, double omega)
{
    return omega > 0.0 ? p.gamma_nr : 0.0;
}

/// Angle where Gamma(theta, omega0) = gamma, by bisection to 1e-6 deg.
inline double critical_angle(const CouplingParams& p)
{
    if (!(p.gamma0 > 0.0))
        throw InvalidArgument("critical_angle: gamma0 must be > 0");
    if (!(p.gamma_nr > 0.0))
        throw InvalidArgument("critical_angle: gamma must be > 0");
    const double r = p.gamma_nr / p.gamma0;
    // sin^2 / cos - r in radians; monotone on (0, pi/2)
    auto f = [r](double th) { return std::sin(th) * std::sin(th) / std::cos(th) - r; };
    const double hi = std::nextafter(0.5 * constants::pi, 0.0);
    const double th = numeric::bisect(f, 0.0, hi, constants::deg_to_rad(1e-7));
    return constants::rad_to_deg(th);
}

} // namespace msp

#endif
