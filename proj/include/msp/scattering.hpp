#ifndef MSP_SCATTERING_HPP
#define MSP_SCATTERING_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "msp/coupling.hpp"
#include "msp/errors.hpp"
#include "msp/numeric.hpp"

namespace msp {

/// Approximation switches for the light-matter coupling.
///  Full       antiresonant factor x = 2 omega0/(omega0 + omega), Gamma(theta, omega)
///  RWA        x = 1, Gamma(theta, omega)
///  MarkovRWA  x = 1, Gamma frozen at Gamma(theta, omega0)
///  Mirror     Full semantics with a single photonic port of rate Gamma(theta, omega)
enum class ModelVariant { Full, RWA, MarkovRWA, Mirror };

inline ModelVariant parse_variant(std::string_view s)
{
    if (s == "full")
        return ModelVariant::Full;
    if (s == "rwa")
        return ModelVariant::RWA;
    if (s == "markov" || s == "markov-rwa")
        return ModelVariant::MarkovRWA;
    if (s == "mirror")
        return ModelVariant::Mirror;
    throw InvalidArgument("unknown model variant '" + std::string(s) + "' (expected full|rwa|markov|mirror)");
}

inline const char* to_string(ModelVariant v)
{
    switch (v) {
    case ModelVariant::Full: return "full";
    case ModelVariant::RWA: return "rwa";
    case ModelVariant::MarkovRWA: return "markov";
    case ModelVariant::Mirror: return "mirror";
    }
    return "full";
}

/// Input-output matrix at one (theta, omega). Ports are ordered
/// (photon-up, photon-down, electron), or (photon, electron) for Mirror.
struct ScatteringMatrix
{
    Eigen::MatrixXcd u;
};

namespace detail {

struct Rates
{
    double x;       // antiresonant factor
    double gamma;   // radiative rate entering the ports
};

inline Rates variant_rates(const CouplingParams& p, double theta_deg, double omega, ModelVariant v)
{
    const bool rwa = v == ModelVariant::RWA || v == ModelVariant::MarkovRWA;
    const double x = rwa ? 1.0 : 2.0 * p.omega0 / (p.omega0 + omega);
    const double g = gamma_theta(p, theta_deg, v == ModelVariant::MarkovRWA ? p.omega0 : omega);
    return {x, g};
}

inline void check_frequency(double omega)
{
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw InvalidArgument("scattering: omega must be > 0");
}

} // namespace detail

/// D = i(omega - omega0) - x (gamma + Gamma) / 2.
inline std::complex<double> denominator(const CouplingParams& p, double theta_deg, double omega, ModelVariant v)
{
    const auto r = detail::variant_rates(p, theta_deg, omega, v);
    return {-0.5 * r.x * (p.gamma_nr + r.gamma), omega - p.omega0};
}

/// U_ij = delta_ij + x sqrt(kappa_i kappa_j) / D with port rates
/// (Gamma/2, Gamma/2, gamma), or (Gamma, gamma) for Mirror.
inline ScatteringMatrix build_U(const CouplingParams& p, double theta_deg, double omega, ModelVariant v)
{
    detail::check_frequency(omega);
    const auto r = detail::variant_rates(p, theta_deg, omega, v);
    const std::complex<double> d(-0.5 * r.x * (p.gamma_nr + r.gamma), omega - p.omega0);
    Eigen::VectorXd kappa;
    if (v == ModelVariant::Mirror)
        kappa = Eigen::Vector2d(r.gamma, p.gamma_nr);
    else
        kappa = Eigen::Vector3d(0.5 * r.gamma, 0.5 * r.gamma, p.gamma_nr);
    const Eigen::VectorXd s = kappa.cwiseSqrt();
    ScatteringMatrix m;
    m.u = (r.x / d) * (s * s.transpose()).cast<std::complex<double>>();
    m.u.diagonal().array() += 1.0;
    return m;
}

/// t, r and alpha at one frequency. alpha is the closed form
/// x^2 (Gamma/2) gamma / |D|^2 (x^2 Gamma gamma / |D|^2 for Mirror, where t = 0).
struct OpticalPoint
{
    std::complex<double> t;
    std::complex<double> r;
    double alpha;
};

inline OpticalPoint optical_point(const CouplingParams& p, double theta_deg, double omega, ModelVariant v)
{
    detail::check_frequency(omega);
    const auto rt = detail::variant_rates(p, theta_deg, omega, v);
    const std::complex<double> d(-0.5 * rt.x * (p.gamma_nr + rt.gamma), omega - p.omega0);
    const double d2 = std::norm(d);
    OpticalPoint o;
    if (v == ModelVariant::Mirror) {
        o.t = 0.0;
        o.r = 1.0 + rt.x * rt.gamma / d;
        o.alpha = rt.x * rt.x * rt.gamma * p.gamma_nr / d2;
    } else {
        o.r = 0.5 * rt.x * rt.gamma / d;
        o.t = 1.0 + o.r;
        o.alpha = rt.x * rt.x * 0.5 * rt.gamma * p.gamma_nr / d2;
    }
    return o;
}

/// Frequency-gridded optical coefficients; the grid is omega / omega0.
struct SpectralTable
{
    std::vector<double> omega_norm;
    std::vector<std::complex<double>> t;
    std::vector<std::complex<double>> r;
    std::vector<double> alpha;
    ModelVariant variant = ModelVariant::Full;
    double g = 0.0;
    double Q = 0.0;
    double theta_deg = 0.0;
    double max_balance_residual = 0.0;   // max |1 - |t|^2 - |r|^2 - alpha|
};

/// 4001 points geometric in omega/omega0 over [1/50, 50], with 1 exactly at the center.
inline std::vector<double> default_grid(std::size_t n = 4001, double span = 50.0)
{
    auto grid = numeric::logspace(1.0 / span, span, n);
    if (n % 2 == 1)
        grid[n / 2] = 1.0;
    return grid;
}

inline SpectralTable optical_coefficients(const CouplingParams& p, double theta_deg,
                                          const std::vector<double>& omega_norm, ModelVariant v)
{
    p.validate();
    detail::check_angle(theta_deg);
    for (std::size_t i = 0; i < omega_norm.size(); ++i) {
        if (!(omega_norm[i] > 0.0))
            throw InvalidArgument("optical_coefficients: grid must be positive");
        if (i > 0 && !(omega_norm[i] > omega_norm[i - 1]))
            throw InvalidArgument("optical_coefficients: grid must be strictly increasing");
    }
    SpectralTable tab;
    tab.omega_norm = omega_norm;
    tab.variant = v;
    tab.g = p.g(theta_deg);
    tab.Q = p.Q();
    tab.theta_deg = theta_deg;
    tab.t.reserve(omega_norm.size());
    tab.r.reserve(omega_norm.size());
    tab.alpha.reserve(omega_norm.size());
    for (double wn : omega_norm) {
        const auto o = optical_point(p, theta_deg, wn * p.omega0, v);
        tab.t.push_back(o.t);
        tab.r.push_back(o.r);
        tab.alpha.push_back(o.alpha);
        const double res = std::abs(1.0 - std::norm(o.t) - std::norm(o.r) - o.alpha);
        tab.max_balance_residual = std::max(tab.max_balance_residual, res);
    }
    return tab;
}

/// Peak absorptivity and reflectivity against g at fixed Q.
struct PeakRow
{
    double g;
    double peak_alpha;
    double peak_r2;
    double perturbative_alpha;   // 2g
    double perturbative_r2;      // g^2
};

inline std::vector<PeakRow> peak_curves(double Q, double theta_deg, const std::vector<double>& g_grid,
                                        ModelVariant v = ModelVariant::Full)
{
    std::vector<PeakRow> rows;
    const auto grid = numeric::logspace(1e-3, 1e3, 6001);
    for (double g : g_grid) {
        const auto p = CouplingParams::from_gq(g, Q, theta_deg);
        auto alpha = [&](double w) { return optical_point(p, theta_deg, w, v).alpha; };
        auto r2 = [&](double w) { return std::norm(optical_point(p, theta_deg, w, v).r); };
        const double pa = numeric::refined_max(alpha, grid, 1e-12).second;
        const double pr = numeric::refined_max(r2, grid, 1e-12).second;
        rows.push_back({g, pa, pr, 2.0 * g, g * g});
    }
    return rows;
}

enum class HalfMaxQuantity { Alpha, Reflectivity };

inline HalfMaxQuantity parse_half_max_quantity(std::string_view s)
{
    if (s == "alpha")
        return HalfMaxQuantity::Alpha;
    if (s == "r" || s == "reflectivity")
        return HalfMaxQuantity::Reflectivity;
    throw InvalidArgument("unknown half-max quantity '" + std::string(s) + "' (expected alpha|r)");
}

struct HalfMaxRow
{
    double ratio;          // Gamma(theta, omega0) / omega0
    double omega_minus;    // normalized by omega0
    double omega_plus;
    double markov_minus;   // 1 - (gamma + Gamma)/(2 omega0)
    double markov_plus;
};

/// Largest relative error of the half-max offsets against the Markov lines,
/// max_pm |(omega_pm - 1) -/+ h| / h with h = (gamma + Gamma) / (2 omega0).
inline double markov_deviation(const HalfMaxRow& row)
{
    const double h = row.markov_plus - 1.0;
    const double up = std::abs((row.omega_plus - 1.0) - h);
    const double down = std::abs((1.0 - row.omega_minus) - h);
    return std::max(up, down) / h;
}

/// Half-maximum frequencies of alpha or |r|^2 for each Gamma(theta, omega0)/omega0
/// in `ratios`, with gamma, omega0 and theta taken from `base`.
inline std::vector<HalfMaxRow> half_max_frequencies(const CouplingParams& base, double theta_deg, ModelVariant v,
                                                    const std::vector<double>& ratios, HalfMaxQuantity which)
{
    base.validate();
    const double f = detail::angle_factor(theta_deg);
    if (!(f > 0.0))
        throw AngleOutOfRange("half_max_frequencies: theta must be > 0");
    const auto grid = numeric::logspace(1e-6 * base.omega0, 1e3 * base.omega0, 20001);

    std::vector<HalfMaxRow> rows;
    for (double ratio : ratios) {
        if (!(ratio > 0.0))
            throw InvalidArgument("half_max_frequencies: ratios must be > 0");
        CouplingParams p = base;
        p.gamma0 = ratio * base.omega0 / f;
        auto value = [&](double w) {
            const auto o = optical_point(p, theta_deg, w, v);
            return which == HalfMaxQuantity::Alpha ? o.alpha : std::norm(o.r);
        };

        std::vector<double> samples(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            samples[i] = value(grid[i]);
        const auto top = std::max_element(samples.begin(), samples.end());
        const double vmax = *top;
        int maxima = 0;
        for (std::size_t i = 1; i + 1 < samples.size(); ++i)
            if (samples[i] > samples[i - 1] && samples[i] >= samples[i + 1] && samples[i] > 1e-6 * vmax)
                ++maxima;
        if (maxima > 1)
            throw NotUnimodal("half_max_frequencies: spectrum has " + std::to_string(maxima) +
                              " maxima at ratio " + std::to_string(ratio));

        const auto ip = static_cast<std::size_t>(top - samples.begin());
        const auto peak = numeric::refined_max(value, std::span<const double>(grid), 1e-13 * base.omega0);
        const double half = 0.5 * peak.second;
        auto excess = [&](double w) { return value(w) - half; };

        std::size_t il = ip;
        while (il > 0 && samples[il] >= half)
            --il;
        std::size_t ir = ip;
        while (ir + 1 < samples.size() && samples[ir] >= half)
            ++ir;
        if (samples[il] >= half || samples[ir] >= half)
            throw HalfMaxNotBracketed("half_max_frequencies: " + std::string(samples[il] >= half ? "lower" : "upper") +
                                      " side never drops below half maximum at ratio " + std::to_string(ratio));
        const double lo = numeric::bisect(excess, grid[il], peak.first, 1e-14 * base.omega0);
        const double hi = numeric::bisect(excess, peak.first, grid[ir], 1e-14 * base.omega0);

        const double h = 0.5 * (base.gamma_nr + ratio * base.omega0) / base.omega0;
        rows.push_back({ratio, lo / base.omega0, hi / base.omega0, 1.0 - h, 1.0 + h});
    }
    return rows;
}

} // namespace msp

#endif
