#ifndef MSP_THERMAL_HPP
#define MSP_THERMAL_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "msp/constants.hpp"
#include "msp/errors.hpp"
#include "msp/numeric.hpp"
#include "msp/scattering.hpp"

namespace msp {

/// Bose-Einstein occupancy 1 / (exp(hbar omega / kB T) - 1); zero at T = 0.
inline double bose_occupancy(double omega_meV, double T_K)
{
    if (!(omega_meV > 0.0))
        throw InvalidArgument("bose_occupancy: omega must be > 0");
    if (!(T_K >= 0.0))
        throw InvalidArgument("bose_occupancy: temperature must be >= 0");
    if (T_K == 0.0)
        return 0.0;
    return 1.0 / std::expm1(omega_meV / (constants::kB_meV * T_K));
}

/// Thermal inputs on the two uncorrelated baths. Frequencies and rates in meV.
struct ThermalScenario
{
    double T_el = 300.0;
    double T_ph = 0.0;
    double theta_deg = 45.0;
    CouplingParams params;
    ModelVariant variant = ModelVariant::Full;
    std::vector<double> omega_meV;

    void validate() const
    {
        params.validate();
        if (!(T_el >= 0.0) || !(T_ph >= 0.0))
            throw InvalidArgument("ThermalScenario: temperatures must be >= 0");
        for (std::size_t i = 0; i < omega_meV.size(); ++i) {
            if (!(omega_meV[i] > 0.0))
                throw InvalidArgument("ThermalScenario: grid must be positive");
            if (i > 0 && !(omega_meV[i] > omega_meV[i - 1]))
                throw InvalidArgument("ThermalScenario: grid must be strictly increasing");
        }
    }
};

/// Output occupancy of the first photonic port. The coefficient of
/// n_B(T_el) is |U_{0,el}|^2 and is kept separately to expose Kirchhoff's law.
struct EmissionSpectrum
{
    std::vector<double> omega_meV;
    std::vector<double> photons_out;
    std::vector<double> power_density;           // hbar omega * photons_out, meV
    std::vector<double> alpha_used;              // closed-form absorptivity
    std::vector<double> emission_coefficient;    // |U_{0,el}|^2
    std::vector<double> planck_Tel;
    std::vector<double> planck_Tph;
};

namespace detail {

inline Eigen::VectorXd bath_occupancies(const ThermalScenario& s, double omega)
{
    const double nph = bose_occupancy(omega, s.T_ph);
    const double nel = bose_occupancy(omega, s.T_el);
    if (s.variant == ModelVariant::Mirror)
        return Eigen::Vector2d(nph, nel);
    return Eigen::Vector3d(nph, nph, nel);
}

} // namespace detail

/// <a_out^+ a_out> = sum_j |U_0j|^2 n_j, assembled from the input-output matrix.
inline EmissionSpectrum emitted_spectrum(const ThermalScenario& s)
{
    s.validate();
    if (s.variant != ModelVariant::Full && s.variant != ModelVariant::Mirror)
        throw InvalidArgument("emitted_spectrum: variant must be full or mirror");
    EmissionSpectrum e;
    e.omega_meV = s.omega_meV;
    for (double w : s.omega_meV) {
        const auto u = build_U(s.params, s.theta_deg, w, s.variant).u;
        const Eigen::VectorXd n = detail::bath_occupancies(s, w);
        const Eigen::VectorXd row = u.row(0).cwiseAbs2().transpose();
        const double out = row.dot(n);
        e.photons_out.push_back(out);
        e.power_density.push_back(w * out);
        e.alpha_used.push_back(optical_point(s.params, s.theta_deg, w, s.variant).alpha);
        e.emission_coefficient.push_back(row[row.size() - 1]);
        e.planck_Tel.push_back(n[n.size() - 1]);
        e.planck_Tph.push_back(n[0]);
    }
    return e;
}

/// max over the grid of |sum_ports out - sum_ports in| / max(sum in, 1).
inline double photon_balance_residual(const ThermalScenario& s)
{
    s.validate();
    double worst = 0.0;
    for (double w : s.omega_meV) {
        const auto u = build_U(s.params, s.theta_deg, w, s.variant).u;
        const Eigen::VectorXd n = detail::bath_occupancies(s, w);
        const double in = n.sum();
        const double out = (u.cwiseAbs2() * n).sum();
        worst = std::max(worst, std::abs(out - in) / std::max(in, 1.0));
    }
    return worst;
}

/// Trapezoid integral of hbar omega (n_out - n_B(T_ph)) over the scenario grid
/// points inside [band_lo, band_hi]. Units: meV^2 (energy per unit hbar omega).
inline double integrated_power(const ThermalScenario& s, double band_lo, double band_hi)
{
    if (!(band_hi > band_lo))
        throw InvalidArgument("integrated_power: empty band");
    ThermalScenario clipped = s;
    clipped.omega_meV.clear();
    for (double w : s.omega_meV)
        if (w >= band_lo && w <= band_hi)
            clipped.omega_meV.push_back(w);
    if (clipped.omega_meV.size() < 2)
        return 0.0;
    const auto e = emitted_spectrum(clipped);
    std::vector<double> excess(e.omega_meV.size());
    for (std::size_t i = 0; i < excess.size(); ++i)
        excess[i] = e.omega_meV[i] * (e.photons_out[i] - e.planck_Tph[i]);
    return numeric::trapezoid(e.omega_meV, excess);
}

} // namespace msp

#endif
