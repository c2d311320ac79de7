#ifndef MSP_PLASMONS_HPP
#define MSP_PLASMONS_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "msp/constants.hpp"
#include "msp/errors.hpp"
#include "msp/wellbands.hpp"

namespace msp {

/// Dipole-dipole couplings: H_dd = sum hbar Xi_ab (B_a^+ + B_a)(B_b^+ + B_b).
struct CouplingMatrix
{
    Eigen::VectorXd bare_frequencies_meV;
    Eigen::MatrixXd xi_meV;

    void validate() const
    {
        const auto n = bare_frequencies_meV.size();
        if (n < 1 || xi_meV.rows() != n || xi_meV.cols() != n)
            throw InvalidArgument("CouplingMatrix: shape mismatch");
        if ((bare_frequencies_meV.array() <= 0.0).any())
            throw InvalidArgument("CouplingMatrix: bare frequencies must be positive");
        const double scale = xi_meV.cwiseAbs().maxCoeff();
        if ((xi_meV - xi_meV.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
            throw InvalidArgument("CouplingMatrix: Xi is not symmetric");
        if ((xi_meV.diagonal().array() < 0.0).any())
            throw InvalidArgument("CouplingMatrix: negative diagonal coupling");
    }
};

/// Multisubband plasmons: the positive-frequency Bogoliubov modes.
struct PlasmonModeSet
{
    Eigen::VectorXd z_nm;
    Eigen::VectorXd frequencies_meV;   // ascending
    Eigen::MatrixXd X;                 // column n: coefficients of B_a in mode n
    Eigen::MatrixXd Y;                 // column n: coefficients of B_a^+ in mode n
    Eigen::MatrixXd mode_currents;     // column n: J_n(z), same units as j_a
    Eigen::VectorXd integrated_currents;   // integral of J_n, A / m
    Eigen::VectorXd weights;           // |int J_n|^2 / omega_n, sums to 1
    std::size_t bright_index = 0;
    double omega0_meV = 0.0;
    double area_m2 = 1.0;

    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(frequencies_meV.size()); }
};

/// Xi_ab = (S / 2 hbar eps0 eps_s) * integral(j_a j_b) / (w_a w_b).
inline CouplingMatrix build_coupling_matrix(const TransitionSet& t, double eps_s)
{
    using namespace constants;
    if (t.size() < 1)
        throw InvalidArgument("build_coupling_matrix: needs at least one transition");
    if (!(eps_s >= 1.0))
        throw InvalidArgument("build_coupling_matrix: eps_s must be >= 1");
    const auto n = static_cast<Eigen::Index>(t.size());
    CouplingMatrix cm;
    cm.bare_frequencies_meV.resize(n);
    cm.xi_meV.resize(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        cm.bare_frequencies_meV[a] = t.items[static_cast<std::size_t>(a)].w_meV;
    for (Eigen::Index a = 0; a < n; ++a) {
        const double wa = meV_to_rad_per_s(cm.bare_frequencies_meV[a]);
        for (Eigen::Index b = a; b < n; ++b) {
            const double wb = meV_to_rad_per_s(cm.bare_frequencies_meV[b]);
            const double xi = t.overlap(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) /
                              (2.0 * hbar * eps0 * eps_s * wa * wb);
            cm.xi_meV(a, b) = cm.xi_meV(b, a) = rad_per_s_to_meV(xi);
        }
    }
    return cm;
}

/// Diagonalize H = sum hbar w B^+B + H_dd.
///
/// In position-like coordinates the problem reduces to the symmetric matrix
/// M = W^2 + 4 W^1/2 Xi W^1/2 whose eigenvalues are omega_n^2. With e_n the
/// unit eigenvectors, u = sqrt(omega) W^-1/2 e and v = W^1/2 e / sqrt(omega)
/// give X = (u + v)/2, Y = (u - v)/2, so |X|^2 - |Y|^2 = 1. The mode current is
/// J_n = omega_n sum_a v_na j_a / w_a, signed so that integral(J_n) >= 0.
inline PlasmonModeSet diagonalize_bogoliubov(const CouplingMatrix& cm, const TransitionSet& t)
{
    cm.validate();
    const Eigen::Index n = cm.bare_frequencies_meV.size();
    if (static_cast<Eigen::Index>(t.size()) != n)
        throw InvalidArgument("diagonalize_bogoliubov: transition count differs from coupling matrix");

    const Eigen::VectorXd& w = cm.bare_frequencies_meV;
    const Eigen::VectorXd sqrt_w = w.cwiseSqrt();
    Eigen::MatrixXd m = 4.0 * sqrt_w.asDiagonal() * cm.xi_meV * sqrt_w.asDiagonal();
    m.diagonal() += w.cwiseAbs2();
    m = 0.5 * (m + m.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success)
        throw NonPositiveSpectrum("plasmon eigen-decomposition failed");
    const Eigen::VectorXd omega2 = solver.eigenvalues();
    for (Eigen::Index k = 0; k < n; ++k)
        if (!(omega2[k] > 0.0))
            throw NonPositiveSpectrum("squared plasmon frequency " + std::to_string(omega2[k]) +
                                      " meV^2 is not positive");

    PlasmonModeSet modes;
    modes.z_nm = t.z_nm;
    modes.area_m2 = t.area_m2;
    modes.frequencies_meV = omega2.cwiseSqrt();
    modes.X.resize(n, n);
    modes.Y.resize(n, n);
    modes.mode_currents.resize(t.currents.rows(), n);
    modes.integrated_currents.resize(n);

    const Eigen::VectorXd qw = t.quadrature_weights();
    const Eigen::VectorXd bare_integrals = t.currents.transpose() * qw;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double om = modes.frequencies_meV[k];
        Eigen::VectorXd e = solver.eigenvectors().col(k);
        Eigen::VectorXd v = sqrt_w.cwiseProduct(e) / std::sqrt(om);
        double integral = om * v.cwiseQuotient(w).dot(bare_integrals);
        if (integral < 0.0) {
            e = -e;
            v = -v;
            integral = -integral;
        }
        const Eigen::VectorXd u = std::sqrt(om) * e.cwiseQuotient(sqrt_w);
        modes.X.col(k) = 0.5 * (u + v);
        modes.Y.col(k) = 0.5 * (u - v);
        modes.mode_currents.col(k) = om * (t.currents * v.cwiseQuotient(w));
        modes.integrated_currents[k] = integral;
    }

    modes.weights = modes.integrated_currents.cwiseAbs2().cwiseQuotient(modes.frequencies_meV);
    const double total = modes.weights.sum();
    if (total > 0.0)
        modes.weights /= total;
    // argmax weight, lowest frequency on ties (modes are ascending)
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < n; ++k)
        if (modes.weights[k] > modes.weights[best])
            best = k;
    modes.bright_index = static_cast<std::size_t>(best);
    modes.omega0_meV = modes.frequencies_meV[best];
    return modes;
}

/// Convenience: transitions -> coupling matrix -> modes.
inline PlasmonModeSet plasmon_modes(const TransitionSet& t, double eps_s)
{
    return diagonalize_bogoliubov(build_coupling_matrix(t, eps_s), t);
}

/// 2N x 2N Hopfield matrix in the (B, B^+) basis for Pi = X.B + Y.B^+:
/// [[A, -Bm], [Bm, -A]] (X; Y) = omega (X; Y), A = W + 2 Xi, Bm = 2 Xi.
inline Eigen::MatrixXd hopfield_matrix(const CouplingMatrix& cm)
{
    const Eigen::Index n = cm.bare_frequencies_meV.size();
    Eigen::MatrixXd a = 2.0 * cm.xi_meV;
    a.diagonal() += cm.bare_frequencies_meV;
    const Eigen::MatrixXd b = 2.0 * cm.xi_meV;
    Eigen::MatrixXd h(2 * n, 2 * n);
    h << a, -b, b, -a;
    return h;
}

/// Gram matrix of the full eigenvector set under the metric diag(+1, -1).
/// Positive-frequency columns (X; Y) are followed by their conjugate
/// partners (Y; X); the result equals diag(+1, -1) for a symplectic basis.
inline Eigen::MatrixXd symplectic_gram(const PlasmonModeSet& modes)
{
    const Eigen::Index n = modes.X.rows();
    Eigen::MatrixXd phi(2 * n, 2 * n);
    phi << modes.X, modes.Y, modes.Y, modes.X;
    Eigen::VectorXd eta(2 * n);
    eta << Eigen::VectorXd::Ones(n), -Eigen::VectorXd::Ones(n);
    return phi.transpose() * eta.asDiagonal() * phi;
}

/// Fermi-golden-rule rate of mode n,
/// hbar Gamma_n = hbar S |int J_n|^2 / (hbar eps0 sqrt(eps_s) c omega_n), in meV.
inline double mode_gamma0(const PlasmonModeSet& modes, std::size_t n, double eps_s)
{
    using namespace constants;
    if (n >= modes.size())
        throw InvalidArgument("mode_gamma0: mode index out of range");
    if (!(eps_s >= 1.0))
        throw InvalidArgument("mode_gamma0: eps_s must be >= 1");
    const auto k = static_cast<Eigen::Index>(n);
    const double integral = modes.integrated_currents[k];
    const double omega = meV_to_rad_per_s(modes.frequencies_meV[k]);
    const double rate = modes.area_m2 * integral * integral / (hbar * eps0 * std::sqrt(eps_s) * c * omega);
    return rad_per_s_to_meV(rate);
}

/// Gamma0 of the bright mode, in meV.
inline double bright_gamma0(const PlasmonModeSet& modes, double eps_s)
{
    if (modes.size() == 0)
        throw InvalidArgument("bright_gamma0: no modes");
    return mode_gamma0(modes, modes.bright_index, eps_s);
}

/// Sum of unit-area Lorentzians (HWHM gamma/2) with the given strengths,
/// divided by `norm`.
inline Eigen::VectorXd lorentzian_sum(const Eigen::VectorXd& omega_meV, const Eigen::VectorXd& centers_meV,
                                      const Eigen::VectorXd& strengths, double gamma_meV, double norm)
{
    const double hw = 0.5 * gamma_meV;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(omega_meV.size());
    for (Eigen::Index i = 0; i < omega_meV.size(); ++i)
        for (Eigen::Index k = 0; k < centers_meV.size(); ++k) {
            const double d = omega_meV[i] - centers_meV[k];
            out[i] += strengths[k] * hw / (constants::pi * (d * d + hw * hw));
        }
    return out / norm;
}

struct AbsorptionSpectrum
{
    Eigen::VectorXd omega_meV;
    Eigen::VectorXd single_particle;
    Eigen::VectorXd msp;
};

/// Absorption with (msp) and without (single_particle) dipole-dipole
/// coupling. Each line is a Lorentzian with HWHM gamma/2 weighted by
/// |int j|^2 / w. Both curves are divided by the total single-particle
/// strength, so the single-particle curve has unit area (and, by the f-sum
/// rule, so does the MSP curve).
inline AbsorptionSpectrum absorption_spectrum(const TransitionSet& t, const PlasmonModeSet& modes,
                                              double gamma_meV, const Eigen::VectorXd& omega_meV)
{
    if (!(gamma_meV > 0.0))
        throw InvalidArgument("absorption_spectrum: broadening must be > 0");
    const auto n = static_cast<Eigen::Index>(t.size());
    Eigen::VectorXd w(n), strength(n);
    for (Eigen::Index a = 0; a < n; ++a) {
        w[a] = t.items[static_cast<std::size_t>(a)].w_meV;
        const double ia = t.integrated_current(static_cast<std::size_t>(a));
        strength[a] = ia * ia / w[a];
    }
    const double norm = strength.sum();
    if (!(norm > 0.0))
        throw InvalidArgument("absorption_spectrum: no optically active transition");
    const Eigen::VectorXd msp_strength =
        modes.integrated_currents.cwiseAbs2().cwiseQuotient(modes.frequencies_meV);

    AbsorptionSpectrum out;
    out.omega_meV = omega_meV;
    out.single_particle = lorentzian_sum(omega_meV, w, strength, gamma_meV, norm);
    out.msp = lorentzian_sum(omega_meV, modes.frequencies_meV, msp_strength, gamma_meV, norm);
    return out;
}

} // namespace msp

#endif
