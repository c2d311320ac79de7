#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <vector>

#include "msp/plasmons.hpp"

using Catch::Approx;
using namespace msp;

namespace {

TransitionSet well_transitions(double well_nm, double ns, std::size_t n_states = 12)
{
    SquareWellSpec spec;
    spec.well_nm = well_nm;
    const auto s = fill_subbands(solve_subbands(square_well(spec), n_states), ns, spec.eff_mass, 0.0);
    return build_transitions(s, spec.eff_mass);
}

TransitionSet single_transition(double ns)
{
    SquareWellSpec spec;
    const auto s = fill_subbands(solve_subbands(square_well(spec), 2), ns, spec.eff_mass, 0.0);
    return build_transitions(s, spec.eff_mass);
}

double fsum(const Eigen::VectorXd& integrals, const Eigen::VectorXd& freqs)
{
    return integrals.cwiseAbs2().cwiseQuotient(freqs).sum();
}

} // namespace

TEST_CASE("single transition depolarization shift", "[plasmons]")
{
    const auto t = single_transition(5e12);
    REQUIRE(t.size() == 1);
    const double eps = 12.9;
    const double w = t.items[0].w_meV;
    const double wp2 = plasma_energy_sq_meV2(t, 0, eps);

    const auto cm = build_coupling_matrix(t, eps);
    CHECK(cm.xi_meV(0, 0) == Approx(wp2 / (4.0 * w)).epsilon(1e-12));

    const auto modes = diagonalize_bogoliubov(cm, t);
    // 2x2 Hopfield problem by hand: (w + 2 xi)^2 - (2 xi)^2 = w^2 + 4 w xi
    const double xi = cm.xi_meV(0, 0);
    const double by_hand = (w + 2 * xi) * (w + 2 * xi) - 4 * xi * xi;
    CHECK(modes.frequencies_meV[0] * modes.frequencies_meV[0] == Approx(w * w + wp2).epsilon(1e-10));
    CHECK(by_hand == Approx(w * w + wp2).epsilon(1e-12));
    CHECK(modes.weights[0] == Approx(1.0).epsilon(1e-12));
    CHECK(modes.bright_index == 0);
}

TEST_CASE("uncoupled limit", "[plasmons]")
{
    const auto t = well_transitions(15.0, 1.5e13);
    auto cm = build_coupling_matrix(t, 12.9);
    cm.xi_meV.setZero();
    const auto modes = diagonalize_bogoliubov(cm, t);
    for (std::size_t a = 0; a < t.size(); ++a) {
        const auto k = static_cast<Eigen::Index>(a);
        CHECK(modes.frequencies_meV[k] == Approx(t.items[a].w_meV).epsilon(1e-14));
        // modes are signed so that integral(J) >= 0
        const double scale = t.currents.col(k).cwiseAbs().maxCoeff();
        const double diff = std::min((modes.mode_currents.col(k) - t.currents.col(k)).cwiseAbs().maxCoeff(),
                                     (modes.mode_currents.col(k) + t.currents.col(k)).cwiseAbs().maxCoeff());
        CHECK(diff <= 1e-12 * scale);
    }

    Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(400, 50.0, 500.0);
    const auto spec = absorption_spectrum(t, modes, 10.0, grid);
    CHECK((spec.msp - spec.single_particle).cwiseAbs().maxCoeff() < 1e-12 * spec.single_particle.maxCoeff());
}

TEST_CASE("coupling matrix structure", "[plasmons]")
{
    const auto t = well_transitions(15.0, 1.5e13);
    REQUIRE(t.size() >= 3);
    const auto cm = build_coupling_matrix(t, 12.9);
    CHECK((cm.xi_meV - cm.xi_meV.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * cm.xi_meV.cwiseAbs().maxCoeff());
    CHECK((cm.xi_meV.diagonal().array() >= 0.0).all());

    // disjoint supports
    TransitionSet d = t;
    d.currents.setZero();
    const Eigen::Index half = d.currents.rows() / 2;
    d.currents.col(0).head(half).setOnes();
    d.currents.col(1).tail(half).setOnes();
    const auto cd = build_coupling_matrix(d, 12.9);
    CHECK(cd.xi_meV(0, 1) == 0.0);
    CHECK(cd.xi_meV(0, 0) > 0.0);

    // N_s -> 0
    const auto tiny = build_coupling_matrix(scale_populations(t, 1e-12), 12.9);
    CHECK(tiny.xi_meV.cwiseAbs().maxCoeff() <= 1e-11 * cm.xi_meV.cwiseAbs().maxCoeff());

    CHECK_THROWS_AS(build_coupling_matrix(TransitionSet{}, 12.9), InvalidArgument);
}

TEST_CASE("15 nm well: Bogoliubov invariants and a dominant bright mode", "[plasmons]")
{
    const auto t = well_transitions(15.0, 1.5e13);
    const auto cm = build_coupling_matrix(t, 12.9);
    const auto modes = diagonalize_bogoliubov(cm, t);
    const auto n = static_cast<Eigen::Index>(modes.size());

    // full 2N Hopfield eigenproblem residual
    const Eigen::MatrixXd h = hopfield_matrix(cm);
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::VectorXd xy(2 * n);
        xy << modes.X.col(k), modes.Y.col(k);
        CHECK((h * xy - modes.frequencies_meV[k] * xy).norm() <= 1e-9 * modes.frequencies_meV[k] * xy.norm());
    }
    // the independent non-Hermitian solve yields the same positive spectrum
    Eigen::EigenSolver<Eigen::MatrixXd> es(h);
    std::vector<double> positive;
    for (Eigen::Index k = 0; k < 2 * n; ++k) {
        CHECK(std::abs(es.eigenvalues()[k].imag()) < 1e-9);
        if (es.eigenvalues()[k].real() > 0.0)
            positive.push_back(es.eigenvalues()[k].real());
    }
    std::sort(positive.begin(), positive.end());
    REQUIRE(positive.size() == static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k)
        CHECK(positive[static_cast<std::size_t>(k)] == Approx(modes.frequencies_meV[k]).epsilon(1e-9));

    Eigen::VectorXd eta(2 * n);
    eta << Eigen::VectorXd::Ones(n), -Eigen::VectorXd::Ones(n);
    const Eigen::MatrixXd gram = symplectic_gram(modes);
    CHECK((gram - Eigen::MatrixXd(eta.asDiagonal())).cwiseAbs().maxCoeff() < 1e-8);

    Eigen::VectorXd w(n), ints(n);
    for (Eigen::Index a = 0; a < n; ++a) {
        w[a] = t.items[static_cast<std::size_t>(a)].w_meV;
        ints[a] = t.integrated_current(static_cast<std::size_t>(a));
    }
    CHECK(fsum(modes.integrated_currents, modes.frequencies_meV) == Approx(fsum(ints, w)).epsilon(1e-8));
    CHECK(modes.weights.sum() == Approx(1.0).epsilon(1e-9));
    CHECK((modes.frequencies_meV.array() > 0.0).all());
    for (Eigen::Index k = 1; k < n; ++k)
        CHECK(modes.frequencies_meV[k] >= modes.frequencies_meV[k - 1]);

    const double bright = modes.weights[static_cast<Eigen::Index>(modes.bright_index)];
    CHECK(bright > 0.5);
    CHECK(bright > 1.0 - bright);
    CHECK(modes.integrated_currents.minCoeff() >= 0.0);
}

TEST_CASE("MSP spectrum is blue-shifted", "[plasmons]")
{
    const auto t = well_transitions(15.0, 1.5e13);
    const auto modes = plasmon_modes(t, 12.9);
    Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(4001, 1.0, 800.0);
    const auto spec = absorption_spectrum(t, modes, 10.0, grid);
    Eigen::Index sp_peak, msp_peak;
    spec.single_particle.maxCoeff(&sp_peak);
    spec.msp.maxCoeff(&msp_peak);
    CHECK(grid[msp_peak] > grid[sp_peak] + 10.0);

    const double h = grid[1] - grid[0];
    CHECK(spec.single_particle.sum() * h == Approx(1.0).epsilon(0.02));
    CHECK(spec.msp.sum() * h == Approx(1.0).epsilon(0.02));
    CHECK_THROWS_AS(absorption_spectrum(t, modes, 0.0, grid), InvalidArgument);
}

TEST_CASE("single transition spectrum is a rigid shift", "[plasmons]")
{
    const auto t = single_transition(5e12);
    const auto modes = plasmon_modes(t, 12.9);
    const double w = t.items[0].w_meV;
    const double shift = modes.frequencies_meV[0] - w;
    Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(101, w - 20.0, w + 20.0);
    const auto a = absorption_spectrum(t, modes, 5.0, grid);
    const auto b = absorption_spectrum(t, modes, 5.0, (grid.array() + shift).matrix());
    CHECK((a.single_particle - b.msp).cwiseAbs().maxCoeff() < 1e-12 * a.single_particle.maxCoeff());
}

TEST_CASE("NonPositiveSpectrum on an unphysical coupling", "[plasmons]")
{
    const auto t = well_transitions(15.0, 1.5e13);
    TransitionSet two = select_transitions(t, {0, 1});
    CouplingMatrix cm;
    cm.bare_frequencies_meV = Eigen::Vector2d(100.0, 110.0);
    cm.xi_meV.resize(2, 2);
    cm.xi_meV << 0.1, -100.0, -100.0, 0.1;
    CHECK_THROWS_AS(diagonalize_bogoliubov(cm, two), NonPositiveSpectrum);
}

TEST_CASE("bright-mode radiative rate", "[plasmons]")
{
    const auto t = well_transitions(15.0, 1.5e13);
    const double g0 = bright_gamma0(plasmon_modes(t, 12.9), 12.9);
    CHECK(g0 > 0.0);

    const double g_tiny = bright_gamma0(plasmon_modes(scale_populations(t, 1e-9), 12.9), 12.9);
    CHECK(g_tiny < 1e-6 * g0);

    // Gamma0 = bright weight * f-sum total, and the total is linear in dN
    const auto m1 = plasmon_modes(scale_populations(t, 0.5), 12.9);
    const auto m2 = plasmon_modes(t, 12.9);
    const double w1 = m1.weights[static_cast<Eigen::Index>(m1.bright_index)];
    const double w2 = m2.weights[static_cast<Eigen::Index>(m2.bright_index)];
    CHECK(bright_gamma0(m2, 12.9) / bright_gamma0(m1, 12.9) == Approx(2.0 * w2 / w1).epsilon(1e-10));

    // doubling every population with frozen wavefunctions (100 nm well)
    const auto wide = well_transitions(100.0, 1e13, 40);
    const double g1 = bright_gamma0(plasmon_modes(wide, 12.9), 12.9);
    const double g2 = bright_gamma0(plasmon_modes(scale_populations(wide, 2.0), 12.9), 12.9);
    CHECK(g2 / g1 == Approx(2.0).epsilon(0.05));

    // area independence
    SquareWellSpec spec;
    const auto s = fill_subbands(solve_subbands(square_well(spec), 12), 1.5e13, spec.eff_mass, 0.0);
    const auto small = build_transitions(s, spec.eff_mass, 1e-10);
    CHECK(bright_gamma0(plasmon_modes(small, 12.9), 12.9) == Approx(g0).epsilon(1e-10));
}

TEST_CASE("bright frequency is monotone in density", "[plasmons]")
{
    const auto t = well_transitions(15.0, 1.5e13);
    double last = 0.0;
    for (double f : {0.01, 0.1, 0.3, 0.6, 1.0, 1.5}) {
        const auto modes = plasmon_modes(scale_populations(t, f), 12.9);
        CHECK(modes.omega0_meV >= last);
        last = modes.omega0_meV;
    }
}

TEST_CASE("100 nm well: Gamma0 roughly linear in N_s", "[plasmons][slow]")
{
    std::vector<double> lx, ly;
    for (double ns : {1e12, 3e12, 1e13, 3e13, 1e14}) {
        const auto t = well_transitions(100.0, ns, 40);
        const double g0 = bright_gamma0(plasmon_modes(t, 12.9), 12.9);
        lx.push_back(std::log(ns));
        ly.push_back(std::log(g0));
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    CHECK(sxy / sxx == Approx(1.0).epsilon(0.15));
}
