#ifndef MSP_WELLBANDS_HPP
#define MSP_WELLBANDS_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <tuple>
#include <vector>

#include "msp/constants.hpp"
#include "msp/errors.hpp"

namespace msp {

/// Square-well description in boundary units (the JSON well schema).
/// Defaults are GaInAs/AlInAs literature values.
struct SquareWellSpec
{
    double well_nm = 15.0;
    double barrier_meV = 520.0;
    double eff_mass = 0.043;
    double eps_s = 12.9;
    double Ns_cm2 = 0.0;
    int grid_points = 1024;
    double barrier_pad_nm = 20.0;
    double temperature_K = 0.0;
};

/// Discretized conduction-band profile of a doped quantum well.
struct WellProfile
{
    Eigen::VectorXd z_nm;
    Eigen::VectorXd potential_meV;
    Eigen::VectorXd eff_mass;       // units of m0, per grid point
    double eps_s = 12.9;
    double sheet_density_cm2 = 0.0;
    double temperature_K = 0.0;

    [[nodiscard]] double spacing_nm() const { return z_nm[1] - z_nm[0]; }

    void validate() const
    {
        const auto n = z_nm.size();
        if (n < 3)
            throw InvalidArgument("WellProfile: z grid needs at least 3 points");
        if (potential_meV.size() != n || eff_mass.size() != n)
            throw InvalidArgument("WellProfile: potential/eff_mass length differs from z grid");
        const double h = spacing_nm();
        if (!(h > 0.0))
            throw InvalidArgument("WellProfile: z grid must be strictly increasing");
        for (Eigen::Index i = 1; i < n; ++i) {
            const double hi = z_nm[i] - z_nm[i - 1];
            if (std::abs(hi - h) > 1e-9 * h)
                throw InvalidArgument("WellProfile: z grid must be uniform");
        }
        if (!potential_meV.allFinite())
            throw InvalidArgument("WellProfile: potential must be finite");
        if ((eff_mass.array() <= 0.0).any())
            throw InvalidArgument("WellProfile: effective mass must be positive");
        if (!(eps_s >= 1.0))
            throw InvalidArgument("WellProfile: eps_s must be >= 1");
        if (!(sheet_density_cm2 >= 0.0))
            throw InvalidArgument("WellProfile: sheet density must be >= 0");
        if (!(temperature_K >= 0.0))
            throw InvalidArgument("WellProfile: temperature must be >= 0");
    }
};

/// Uniform grid over [-pad, L + pad], symmetric about the well center.
inline WellProfile square_well(const SquareWellSpec& spec)
{
    if (spec.grid_points < 3)
        throw InvalidArgument("square_well: grid_points must be >= 3");
    if (!(spec.well_nm > 0.0) || !(spec.barrier_pad_nm >= 0.0))
        throw InvalidArgument("square_well: well width must be > 0 and padding >= 0");

    const auto n = static_cast<Eigen::Index>(spec.grid_points);
    const double half_span = 0.5 * spec.well_nm + spec.barrier_pad_nm;
    const double center = 0.5 * spec.well_nm;
    const double h = 2.0 * half_span / static_cast<double>(n - 1);

    WellProfile p;
    p.z_nm.resize(n);
    p.potential_meV.resize(n);
    p.eff_mass = Eigen::VectorXd::Constant(n, spec.eff_mass);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double offset = (static_cast<double>(i) - 0.5 * static_cast<double>(n - 1)) * h;
        p.z_nm[i] = center + offset;
        const bool inside = std::abs(offset) <= 0.5 * spec.well_nm + 1e-9 * h;
        p.potential_meV[i] = inside ? 0.0 : spec.barrier_meV;
    }
    p.eps_s = spec.eps_s;
    p.sheet_density_cm2 = spec.Ns_cm2;
    p.temperature_K = spec.temperature_K;
    return p;
}

/// Bound states of a well. Before fill_subbands the Fermi level equals E1
/// and every population is zero.
struct SubbandSet
{
    Eigen::VectorXd z_nm;
    Eigen::VectorXd energies_meV;
    Eigen::MatrixXd wavefunctions;   // column i is psi_i in nm^-1/2
    double fermi_level_meV = 0.0;
    Eigen::VectorXd populations_cm2;

    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(energies_meV.size()); }
};

namespace detail {

struct Tridiagonal
{
    Eigen::VectorXd diag;
    Eigen::VectorXd off;
};

// BenDaniel-Duke finite differences on the interior points (Dirichlet ends).
// Inverse masses are averaged onto the half-grid points.
inline Tridiagonal bdd_hamiltonian(const Eigen::VectorXd& z, const Eigen::VectorXd& v,
                                   const Eigen::VectorXd& mass)
{
    const Eigen::Index n = z.size();
    const double h = z[1] - z[0];
    const double scale = constants::kinetic_meV_nm2 / (h * h);
    Eigen::VectorXd t(n - 1);
    for (Eigen::Index j = 0; j + 1 < n; ++j)
        t[j] = scale * 0.5 * (1.0 / mass[j] + 1.0 / mass[j + 1]);

    Tridiagonal tri;
    tri.diag.resize(n - 2);
    tri.off.resize(std::max<Eigen::Index>(n - 3, 0));
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        tri.diag[i - 1] = v[i] + t[i - 1] + t[i];
        if (i + 2 < n)
            tri.off[i - 1] = -t[i];
    }
    return tri;
}

inline Eigen::VectorXd tridiagonal_eigenvalues(const Tridiagonal& tri)
{
    if (tri.diag.size() == 1)
        return tri.diag;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(tri.diag, tri.off, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

// Thomas solve of (T - shift) x = b with a guard against vanishing pivots.
inline Eigen::VectorXd shifted_solve(const Tridiagonal& tri, double shift, const Eigen::VectorXd& b)
{
    const Eigen::Index n = tri.diag.size();
    const double tiny = 1e-14 * (tri.diag.cwiseAbs().maxCoeff() + 1.0);
    Eigen::VectorXd c(n), d(n), x(n);
    double piv = tri.diag[0] - shift;
    if (std::abs(piv) < tiny)
        piv = tiny;
    c[0] = n > 1 ? tri.off[0] / piv : 0.0;
    d[0] = b[0] / piv;
    for (Eigen::Index i = 1; i < n; ++i) {
        piv = tri.diag[i] - shift - tri.off[i - 1] * c[i - 1];
        if (std::abs(piv) < tiny)
            piv = tiny;
        c[i] = i + 1 < n ? tri.off[i] / piv : 0.0;
        d[i] = (b[i] - tri.off[i - 1] * d[i - 1]) / piv;
    }
    x[n - 1] = d[n - 1];
    for (Eigen::Index i = n - 2; i >= 0; --i)
        x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

inline Eigen::VectorXd inverse_iteration(const Tridiagonal& tri, double eigenvalue,
                                         const Eigen::MatrixXd& previous, Eigen::Index n_prev)
{
    const Eigen::Index n = tri.diag.size();
    Eigen::VectorXd x(n);
    // Deterministic start vector with no parity.
    for (Eigen::Index i = 0; i < n; ++i)
        x[i] = 1.0 + 0.5 * std::sin(1.3 * static_cast<double>(i) + 0.7);
    const double shift = eigenvalue + 1e-12 * (std::abs(eigenvalue) + 1.0);
    for (int it = 0; it < 4; ++it) {
        x = shifted_solve(tri, shift, x);
        for (Eigen::Index k = 0; k < n_prev; ++k)
            x -= previous.col(k).dot(x) * previous.col(k);
        x.normalize();
    }
    return x;
}

inline Eigen::VectorXd stride_sample(const Eigen::VectorXd& v, Eigen::Index stride)
{
    const Eigen::Index n = (v.size() - 1) / stride + 1;
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i)
        out[i] = v[i * stride];
    return out;
}

inline double barrier_top(const WellProfile& p)
{
    return std::min(p.potential_meV[0], p.potential_meV[p.potential_meV.size() - 1]);
}

} // namespace detail

/// Richardson estimate |E1(h) - E1(2h)| / 3 of the ground-state
/// discretization error (meV). Returns 0 when the coarse grid is too small.
inline double ground_state_error_estimate(const WellProfile& profile)
{
    const auto fine = detail::tridiagonal_eigenvalues(
        detail::bdd_hamiltonian(profile.z_nm, profile.potential_meV, profile.eff_mass));
    const Eigen::VectorXd zc = detail::stride_sample(profile.z_nm, 2);
    if (zc.size() < 3)
        return 0.0;
    const auto coarse = detail::tridiagonal_eigenvalues(detail::bdd_hamiltonian(
        zc, detail::stride_sample(profile.potential_meV, 2), detail::stride_sample(profile.eff_mass, 2)));
    return std::abs(fine[0] - coarse[0]) / 3.0;
}

/// Lowest bound states of -(hbar^2/2) d/dz (1/m*) d/dz + V by finite
/// differences. States at or above the lower barrier edge are dropped, so
/// fewer than n_states may come back.
inline SubbandSet solve_subbands(const WellProfile& profile, std::size_t n_states)
{
    profile.validate();
    if (n_states < 1)
        throw InvalidArgument("solve_subbands: n_states must be >= 1");

    const auto tri = detail::bdd_hamiltonian(profile.z_nm, profile.potential_meV, profile.eff_mass);
    const Eigen::VectorXd evals = detail::tridiagonal_eigenvalues(tri);
    const double top = detail::barrier_top(profile);

    Eigen::Index n_bound = 0;
    while (n_bound < evals.size() && static_cast<std::size_t>(n_bound) < n_states && evals[n_bound] < top)
        ++n_bound;
    if (n_bound == 0)
        throw NoBoundState("no state below the barrier top (" + std::to_string(top) + " meV)");

    const double err = ground_state_error_estimate(profile);
    if (err > 0.1)
        throw GridTooCoarse("estimated E1 discretization error " + std::to_string(err) +
                            " meV exceeds 0.1 meV");

    const Eigen::Index n = profile.z_nm.size();
    const double h = profile.spacing_nm();
    Eigen::MatrixXd interior(tri.diag.size(), n_bound);
    for (Eigen::Index k = 0; k < n_bound; ++k)
        interior.col(k) = detail::inverse_iteration(tri, evals[k], interior, k);

    SubbandSet s;
    s.z_nm = profile.z_nm;
    s.energies_meV = evals.head(n_bound);
    s.wavefunctions = Eigen::MatrixXd::Zero(n, n_bound);
    for (Eigen::Index k = 0; k < n_bound; ++k) {
        Eigen::VectorXd psi = interior.col(k) / std::sqrt(h);
        // sign: first appreciable lobe positive
        const double peak = psi.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < psi.size(); ++i) {
            if (std::abs(psi[i]) > 1e-3 * peak) {
                if (psi[i] < 0.0)
                    psi = -psi;
                break;
            }
        }
        s.wavefunctions.col(k).segment(1, n - 2) = psi;
    }
    s.fermi_level_meV = s.energies_meV[0];
    s.populations_cm2 = Eigen::VectorXd::Zero(n_bound);
    return s;
}

/// 2D density of states m* m0 / (pi hbar^2) per subband (spin included),
/// in cm^-2 meV^-1.
inline double dos_cm2_per_meV(double eff_mass)
{
    using namespace constants;
    return eff_mass * m0 / (pi * hbar * hbar) * meV / per_cm2;
}

/// Fill the subbands with Ns electrons. T = 0 inverts the piecewise-linear
/// filling law exactly; T > 0 bisects the Fermi-Dirac sum.
inline SubbandSet fill_subbands(SubbandSet s, double Ns_cm2, double eff_mass, double temperature_K)
{
    if (!(Ns_cm2 >= 0.0))
        throw InvalidArgument("fill_subbands: Ns must be >= 0");
    if (!(eff_mass > 0.0) || !(temperature_K >= 0.0))
        throw InvalidArgument("fill_subbands: eff_mass must be > 0 and T >= 0");
    const Eigen::Index n = s.energies_meV.size();
    const Eigen::VectorXd& e = s.energies_meV;
    const double dos = dos_cm2_per_meV(eff_mass);
    s.populations_cm2 = Eigen::VectorXd::Zero(n);
    s.fermi_level_meV = e[0];
    if (Ns_cm2 == 0.0)
        return s;

    if (temperature_K == 0.0) {
        double partial = 0.0;
        for (Eigen::Index k = 1; k <= n; ++k) {
            partial += e[k - 1];
            const double ef = (Ns_cm2 / dos + partial) / static_cast<double>(k);
            if (k == n || ef <= e[k]) {
                s.fermi_level_meV = ef;
                break;
            }
        }
        for (Eigen::Index i = 0; i < n; ++i)
            s.populations_cm2[i] = dos * std::max(0.0, s.fermi_level_meV - e[i]);
        return s;
    }

    const double kt = constants::kB_meV * temperature_K;
    auto occupation = [&](double ef, Eigen::Index i) {
        const double x = (ef - e[i]) / kt;
        // log(1 + exp(x)) without overflow
        return dos * kt * (x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)));
    };
    auto total = [&](double ef) {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            sum += occupation(ef, i);
        return sum;
    };
    double lo = e[0] - 60.0 * kt;
    double hi = e[0] + Ns_cm2 / dos + 60.0 * kt;
    while (total(lo) > Ns_cm2)
        lo -= 60.0 * kt;
    while (total(hi) < Ns_cm2)
        hi += Ns_cm2 / dos + 60.0 * kt;
    double ef = 0.5 * (lo + hi);
    for (int it = 0; it < 400; ++it) {
        ef = 0.5 * (lo + hi);
        const double nt = total(ef);
        if (std::abs(nt - Ns_cm2) <= 1e-12 * Ns_cm2)
            break;
        (nt < Ns_cm2 ? lo : hi) = ef;
    }
    s.fermi_level_meV = ef;
    for (Eigen::Index i = 0; i < n; ++i)
        s.populations_cm2[i] = occupation(ef, i);
    return s;
}

/// One optically active intersubband transition i -> f.
struct Transition
{
    int initial = 0;
    int final = 0;
    double w_meV = 0.0;           // hbar w = E_f - E_i
    double delta_pop_cm2 = 0.0;   // N_i - N_f, > 0
};

/// Intersubband transitions with their current densities j(z).
///
/// The currents carry the 1/sqrt(S) quantization-area factor explicitly for
/// the area stored in `area_m2`; every downstream observable multiplies the
/// area back in, so nothing exported depends on its value.
struct TransitionSet
{
    Eigen::VectorXd z_nm;
    std::vector<Transition> items;
    Eigen::MatrixXd currents;     // column per transition, A / m^2
    double area_m2 = 1.0;

    [[nodiscard]] std::size_t size() const { return items.size(); }

    /// Trapezoid weights for z in metres.
    [[nodiscard]] Eigen::VectorXd quadrature_weights() const
    {
        const Eigen::Index n = z_nm.size();
        const double h = (z_nm[1] - z_nm[0]) * constants::nm;
        Eigen::VectorXd w = Eigen::VectorXd::Constant(n, h);
        w[0] *= 0.5;
        w[n - 1] *= 0.5;
        return w;
    }

    /// Integral of j_a over z, A / m.
    [[nodiscard]] double integrated_current(std::size_t a) const
    {
        return quadrature_weights().dot(currents.col(static_cast<Eigen::Index>(a)));
    }

    /// S * integral of j_a j_b over z (area-independent), A^2 / m.
    [[nodiscard]] double overlap(std::size_t a, std::size_t b) const
    {
        const auto w = quadrature_weights();
        return area_m2 * (w.array() * currents.col(static_cast<Eigen::Index>(a)).array() *
                          currents.col(static_cast<Eigen::Index>(b)).array())
                             .sum();
    }
};

/// Central-difference derivative on a uniform grid (one-sided at the ends).
inline Eigen::VectorXd derivative(const Eigen::VectorXd& f, double h)
{
    const Eigen::Index n = f.size();
    Eigen::VectorXd d(n);
    d[0] = (f[1] - f[0]) / h;
    d[n - 1] = (f[n - 1] - f[n - 2]) / h;
    for (Eigen::Index i = 1; i + 1 < n; ++i)
        d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    return d;
}

/// Build every transition with positive population difference.
/// j(z) = (e hbar / 2 m*) sqrt(dN / S) (psi_i psi_f' - psi_f psi_i').
inline TransitionSet build_transitions(const SubbandSet& s, double eff_mass, double area_m2 = 1.0)
{
    using namespace constants;
    if (!(eff_mass > 0.0) || !(area_m2 > 0.0))
        throw InvalidArgument("build_transitions: eff_mass and area must be positive");
    const Eigen::Index n_states = s.energies_meV.size();
    if (n_states == 0 || s.populations_cm2.size() != n_states || !(s.populations_cm2.maxCoeff() > 0.0))
        throw InvalidArgument("build_transitions: needs at least one occupied subband");

    const double h_m = (s.z_nm[1] - s.z_nm[0]) * nm;
    const double psi_scale = 1.0 / std::sqrt(nm);   // nm^-1/2 -> m^-1/2
    const double prefactor = e * hbar / (2.0 * eff_mass * m0);

    struct Candidate
    {
        Transition t;
        Eigen::VectorXd j;
        double j2;
    };
    std::vector<Candidate> found;
    for (Eigen::Index i = 0; i < n_states; ++i) {
        for (Eigen::Index f = i + 1; f < n_states; ++f) {
            const double dn = s.populations_cm2[i] - s.populations_cm2[f];
            if (!(dn > 0.0))
                continue;
            const Eigen::VectorXd psi_i = s.wavefunctions.col(i) * psi_scale;
            const Eigen::VectorXd psi_f = s.wavefunctions.col(f) * psi_scale;
            const Eigen::VectorXd xi = psi_i.cwiseProduct(derivative(psi_f, h_m)) -
                                       psi_f.cwiseProduct(derivative(psi_i, h_m));
            Candidate c;
            c.t = {static_cast<int>(i), static_cast<int>(f), s.energies_meV[f] - s.energies_meV[i], dn};
            c.j = prefactor * std::sqrt(dn * per_cm2 / area_m2) * xi;
            c.j2 = c.j.squaredNorm();
            found.push_back(std::move(c));
        }
    }
    std::stable_sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) {
        return std::tie(a.t.w_meV, a.j2) < std::tie(b.t.w_meV, b.j2);
    });

    TransitionSet out;
    out.z_nm = s.z_nm;
    out.area_m2 = area_m2;
    out.currents.resize(s.z_nm.size(), static_cast<Eigen::Index>(found.size()));
    for (std::size_t a = 0; a < found.size(); ++a) {
        out.items.push_back(found[a].t);
        out.currents.col(static_cast<Eigen::Index>(a)) = found[a].j;
    }
    return out;
}

/// Single-transition plasma energy squared, (hbar w_P)^2 in meV^2, with
/// w_P^2 = (2 S / hbar eps0 eps_s w) * integral of j^2.
inline double plasma_energy_sq_meV2(const TransitionSet& t, std::size_t a, double eps_s)
{
    using namespace constants;
    const double w = meV_to_rad_per_s(t.items.at(a).w_meV);
    const double wp2 = 2.0 * t.overlap(a, a) / (hbar * eps0 * eps_s * w);
    return wp2 * (hbar / meV) * (hbar / meV);
}

/// Rescale every population difference by `factor` with frozen wavefunctions.
inline TransitionSet scale_populations(TransitionSet t, double factor)
{
    if (!(factor >= 0.0))
        throw InvalidArgument("scale_populations: factor must be >= 0");
    for (auto& item : t.items)
        item.delta_pop_cm2 *= factor;
    t.currents *= std::sqrt(factor);
    return t;
}

/// Keep only the listed transitions (in the given order).
inline TransitionSet select_transitions(const TransitionSet& t, const std::vector<std::size_t>& keep)
{
    TransitionSet out;
    out.z_nm = t.z_nm;
    out.area_m2 = t.area_m2;
    out.currents.resize(t.currents.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
        out.items.push_back(t.items.at(keep[k]));
        out.currents.col(static_cast<Eigen::Index>(k)) = t.currents.col(static_cast<Eigen::Index>(keep[k]));
    }
    return out;
}

} // namespace msp

#endif
