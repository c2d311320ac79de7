#ifndef MSP_EIGENSTATES_HPP
#define MSP_EIGENSTATES_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "msp/coupling.hpp"
#include "msp/errors.hpp"
#include "msp/numeric.hpp"

namespace msp {

/// Closed-form consequences of the full diagonalization at one (k, Omega).
/// k is normalized (c k / sqrt(eps_s) omega0); Omega is in the units of omega0.
struct EigenstateSample
{
    double k = 0.0;
    double Omega = 0.0;
    double z = 0.0;
    double f2 = 0.0;
    double plasmon_weight = 0.0;
};

namespace detail {

struct Kernel
{
    double rate;    // gamma + Gamma_k(Omega)
    double shift;   // G_k(Omega); the electronic shift is neglected
};

inline Kernel kernel(const CouplingParams& p, double k, double omega)
{
    if (!(omega > 0.0))
        throw InvalidArgument("eigenstates: Omega must be > 0");
    if (!(k >= 0.0))
        throw InvalidArgument("eigenstates: k must be >= 0");
    const double a = k * p.omega0;
    if (k > 0.0 && std::abs(omega - a) <= 1e-12 * a)
        throw LightConePoint("eigenstates: Omega on the light cone");
    return {electronic_gamma(p, omega) + gamma_k(p, k, omega), lamb_shift_G(p, k, omega)};
}

} // namespace detail

/// z = (Omega^2 - omega0^2 - omega0 G) / (omega0 (gamma + Gamma_k)).
inline double z_function(const CouplingParams& p, double k, double omega)
{
    const auto kn = detail::kernel(p, k, omega);
    return (omega * omega - p.omega0 * p.omega0 - p.omega0 * kn.shift) / (p.omega0 * kn.rate);
}

/// [Omega - omega0 - y G]^2 + y^2 (gamma + Gamma)^2 with y = omega0 / (omega0 + Omega).
/// Above the light cone it equals |D|^2 of the optical coefficients.
inline double f_denominator(const CouplingParams& p, double k, double omega)
{
    const auto kn = detail::kernel(p, k, omega);
    const double y = p.omega0 / (p.omega0 + omega);
    const double u = omega - p.omega0 - y * kn.shift;
    return u * u + y * y * kn.rate * kn.rate;
}

/// |f(Omega)|^2 = (1/2 pi) (gamma + Gamma) / f_denominator.
inline double f_weight(const CouplingParams& p, double k, double omega)
{
    const auto kn = detail::kernel(p, k, omega);
    return kn.rate / (2.0 * constants::pi * f_denominator(p, k, omega));
}

/// Antiresonant amplitude ratio f~/f = (Omega - omega0)/(Omega + omega0); the
/// bath ratio g~/g has the same form with (Omega', Omega).
inline double antiresonant_ratio(double omega_mode, double omega)
{
    return (omega - omega_mode) / (omega + omega_mode);
}

/// Plasmon Hopfield weight |f|^2 - |f~|^2 = |f|^2 [1 - ((Omega - omega0)/(Omega + omega0))^2].
inline double plasmon_hopfield_weight(const CouplingParams& p, double k, double omega)
{
    const double q = antiresonant_ratio(p.omega0, omega);
    return f_weight(p, k, omega) * (1.0 - q * q);
}

/// |f|^2 2 pi omega0^2 / (Omega + omega0)^2 (gamma + Gamma) (1 + z^2); identically 1.
inline double normalization_identity(const CouplingParams& p, double k, double omega)
{
    const auto kn = detail::kernel(p, k, omega);
    const double z = z_function(p, k, omega);
    const double y = p.omega0 / (p.omega0 + omega);
    return f_weight(p, k, omega) * 2.0 * constants::pi * y * y * kn.rate * (1.0 + z * z);
}

inline EigenstateSample sample(const CouplingParams& p, double k, double omega)
{
    return {k, omega, z_function(p, k, omega), f_weight(p, k, omega), plasmon_hopfield_weight(p, k, omega)};
}

/// Center of the non-radiative (ENZ) branch: the root of
/// Omega^2 - omega0^2 - omega0 G_k(Omega) below the light cone. The left side
/// is increasing on (0, k omega0), so a root exists iff Gamma0 k < omega0.
inline double enz_center(const CouplingParams& p, double k)
{
    p.validate();
    if (!(k > 0.0))
        throw NoLocalizedMode("enz_center: no evanescent region at k = 0");
    const double a = k * p.omega0;
    auto F = [&](double w) { return w * w - p.omega0 * p.omega0 - p.omega0 * lamb_shift_G(p, k, w); };
    if (!(F(0.0) < 0.0))
        throw NoLocalizedMode("enz_center: Gamma0 k >= omega0, no localized mode at k = " + std::to_string(k));
    double hi = std::nextafter(a, 0.0);
    while (!(F(hi) > 0.0)) {
        // the root lies within rounding of the cone
        hi = std::nextafter(hi, a);
        if (hi >= a)
            throw NoLocalizedMode("enz_center: root not resolvable below the light cone");
    }
    return numeric::bisect(F, 0.0, hi, 0.0, 2000);
}

/// FWHM of the ENZ Lorentzian measured in u = Omega - omega0 - y G, the
/// variable in which the closed form is a Lorentzian of HWHM y gamma.
inline double enz_linewidth(const CouplingParams& p, double k)
{
    const double center = enz_center(p, k);
    const double a = k * p.omega0;
    auto f2 = [&](double w) { return f_weight(p, k, w); };
    const double lo_edge = std::min(1e-9 * p.omega0, 0.5 * center);
    const double hi_edge = a * (1.0 - 1e-10);
    const auto peak = numeric::golden_max(f2, std::max(lo_edge, center - 20.0 * p.gamma_nr),
                                          std::min(hi_edge, center + 20.0 * p.gamma_nr), 1e-14 * p.omega0);
    const double half = 0.5 * peak.second;
    auto excess = [&](double w) { return f2(w) - half; };
    double l = peak.first;
    while (l > lo_edge && excess(l) > 0.0)
        l = std::max(lo_edge, peak.first - 2.0 * (peak.first - l + p.gamma_nr * 1e-3));
    double h = peak.first;
    while (h < hi_edge && excess(h) > 0.0)
        h = std::min(hi_edge, peak.first + 2.0 * (h - peak.first + p.gamma_nr * 1e-3));
    if (excess(l) > 0.0 || excess(h) > 0.0)
        throw HalfMaxNotBracketed("enz_linewidth: half maximum not reached inside the evanescent region");
    const double w_lo = numeric::bisect(excess, l, peak.first, 1e-15 * p.omega0);
    const double w_hi = numeric::bisect(excess, peak.first, h, 1e-15 * p.omega0);
    auto u = [&](double w) { return w - p.omega0 - p.omega0 / (p.omega0 + w) * lamb_shift_G(p, k, w); };
    return u(w_hi) - u(w_lo);
}

/// Peak and FWHM (in Omega) of the plasmon weight above the light cone.
struct Ridge
{
    double center = 0.0;
    double fwhm = 0.0;
    double peak = 0.0;
};

inline Ridge radiative_ridge(const CouplingParams& p, double k)
{
    p.validate();
    const double a = k * p.omega0;
    const double lo = k > 0.0 ? a * (1.0 + 1e-10) : 1e-9 * p.omega0;
    const double hi = std::max(20.0 * p.omega0, 20.0 * a);
    auto w = [&](double om) { return plasmon_hopfield_weight(p, k, om); };
    // log grid in the distance from the cone resolves both the cone edge and omega0
    std::vector<double> grid;
    for (double d : numeric::logspace(1e-9 * p.omega0, hi - lo, 20001))
        grid.push_back(lo + d);
    const auto peak = numeric::refined_max(w, std::span<const double>(grid), 1e-14 * p.omega0);
    const double half = 0.5 * peak.second;
    auto excess = [&](double om) { return w(om) - half; };
    if (excess(lo) > 0.0 || excess(grid.back()) > 0.0)
        throw HalfMaxNotBracketed("radiative_ridge: half maximum not reached above the light cone");
    Ridge r;
    r.center = peak.first;
    r.peak = peak.second;
    r.fwhm = numeric::bisect(excess, peak.first, grid.back(), 1e-14 * p.omega0) -
             numeric::bisect(excess, lo, peak.first, 1e-14 * p.omega0);
    return r;
}

/// Plasmon weight on a (k, Omega) grid. Rows index Omega, columns index k.
/// The cell nearest the light cone in each column is masked (weight 0).
struct DispersionMap
{
    std::vector<double> k;
    std::vector<double> omega;          // normalized by omega0
    Eigen::MatrixXd weight;             // units of 1 / omega0
    Eigen::MatrixXi mask;               // 1 on the light-cone cell

    /// Row of the masked cell in column i, or -1 if the cone is off the grid.
    [[nodiscard]] int cone_row(std::size_t i) const
    {
        for (Eigen::Index j = 0; j < mask.rows(); ++j)
            if (mask(j, static_cast<Eigen::Index>(i)))
                return static_cast<int>(j);
        return -1;
    }
};

/// k_i = k_max i / (n_k - 1), Omega_j = Omega_max (j + 1/2) / n_omega: cell
/// centers never land on the light cone for the default sizes.
inline DispersionMap dispersion_map(const CouplingParams& p, std::size_t n_k = 512, std::size_t n_omega = 512,
                                    double k_max = 2.0, double omega_max = 2.0)
{
    p.validate();
    if (n_k < 2 || n_omega < 2 || !(k_max > 0.0) || !(omega_max > 0.0))
        throw InvalidArgument("dispersion_map: invalid grid");
    DispersionMap m;
    m.k = numeric::linspace(0.0, k_max, n_k);
    const double h = omega_max / static_cast<double>(n_omega);
    for (std::size_t j = 0; j < n_omega; ++j)
        m.omega.push_back(h * (static_cast<double>(j) + 0.5));
    m.weight = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_omega), static_cast<Eigen::Index>(n_k));
    m.mask = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(n_omega), static_cast<Eigen::Index>(n_k));

    for (std::size_t i = 0; i < n_k; ++i) {
        const double a = m.k[i];   // cone in normalized frequency
        long cone = -1;
        if (a > 0.0 && a < omega_max)
            cone = std::clamp(std::lround(a / h - 0.5), 0L, static_cast<long>(n_omega) - 1);
        for (std::size_t j = 0; j < n_omega; ++j) {
            const auto r = static_cast<Eigen::Index>(j);
            const auto c = static_cast<Eigen::Index>(i);
            if (static_cast<long>(j) == cone) {
                m.mask(r, c) = 1;
                continue;
            }
            m.weight(r, c) = plasmon_hopfield_weight(p, m.k[i], m.omega[j] * p.omega0) * p.omega0;
        }
    }
    return m;
}

/// Weights divided by the map maximum (the export normalization).
inline Eigen::MatrixXd max_normalized(const DispersionMap& m)
{
    const double top = m.weight.maxCoeff();
    return top > 0.0 ? Eigen::MatrixXd(m.weight / top) : m.weight;
}

struct RidgePoint
{
    int row;
    bool above_cone;
};

/// Ridges in column i: local maxima on each side of the masked cone cell whose
/// prominence reaches `threshold` of that side's maximum. The weight vanishes on
/// the cone, so the masked cell acts as a zero wall; a sample next to it is a
/// candidate when it exceeds its inner neighbour. Grid ends are never maxima.
inline std::vector<RidgePoint> ridges_in_column(const DispersionMap& m, std::size_t i, double threshold = 0.05)
{
    const auto c = static_cast<Eigen::Index>(i);
    const int n = static_cast<int>(m.weight.rows());
    const int cone = m.cone_row(i);
    std::vector<RidgePoint> out;
    auto w = [&](int j) { return m.weight(j, c); };
    auto scan = [&](int first, int last, bool above) {
        if (first > last)
            return;
        const bool wall_lo = above && cone >= 0;   // cone below the side
        const bool wall_hi = !above && cone >= 0;  // cone above the side
        double side_max = 0.0;
        for (int j = first; j <= last; ++j)
            side_max = std::max(side_max, w(j));
        if (!(side_max > 0.0))
            return;
        for (int j = first; j <= last; ++j) {
            const double v = w(j);
            const bool left_ok = j == first ? wall_lo : v > w(j - 1);
            const bool right_ok = j == last ? wall_hi : v >= w(j + 1);
            if (!left_ok || !right_ok)
                continue;
            // walk outwards until a higher sample; the base is the larger valley
            double lo_min = v;
            int l = j - 1;
            for (; l >= first && w(l) <= v; --l)
                lo_min = std::min(lo_min, w(l));
            if (l < first && wall_lo)
                lo_min = 0.0;
            double hi_min = v;
            int h = j + 1;
            for (; h <= last && w(h) <= v; ++h)
                hi_min = std::min(hi_min, w(h));
            if (h > last && wall_hi)
                hi_min = 0.0;
            if (v - std::max(lo_min, hi_min) >= threshold * side_max)
                out.push_back({j, above});
        }
    };
    if (cone < 0) {
        const bool above = m.k[i] <= m.omega.front();
        scan(0, n - 1, above);
    } else {
        scan(0, cone - 1, false);
        scan(cone + 1, n - 1, true);
    }
    return out;
}

} // namespace msp

#endif
