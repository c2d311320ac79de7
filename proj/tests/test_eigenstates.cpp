#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "msp/eigenstates.hpp"
#include "msp/scattering.hpp"

using Catch::Approx;
using namespace msp;

namespace {

CouplingParams map_params(double gamma0, double omega0 = 1.0)
{
    CouplingParams p;
    p.omega0 = omega0;
    p.gamma0 = gamma0 * omega0;
    p.gamma_nr = omega0 / 15.0;
    return p;
}

double theta_on_cone(double k, double omega0, double omega)
{
    return std::asin(k * omega0 / omega) * 180.0 / constants::pi;
}

} // namespace

TEST_CASE("z and |f|^2 at the bare frequency above the cone", "[eigenstates]")
{
    const auto p = map_params(1.0 / 30.0);
    for (double k : {0.0, 0.2, 0.7}) {
        CHECK(z_function(p, k, 1.0) == 0.0);
        const double rate = p.gamma_nr + gamma_k(p, k, 1.0);
        CHECK(f_weight(p, k, 1.0) == Approx(2.0 / (constants::pi * rate)).epsilon(1e-14));
        // bracket is 1 at Omega = omega0
        CHECK(plasmon_hopfield_weight(p, k, 1.0) == f_weight(p, k, 1.0));
    }
}

TEST_CASE("z diverges as the couplings vanish", "[eigenstates]")
{
    auto p = map_params(1e-8);
    p.gamma_nr = 1e-9;
    CHECK(std::abs(z_function(p, 0.5, 1.3)) > 1e8);
    CHECK(std::abs(z_function(p, 0.5, 0.2)) > 1e8);
}

TEST_CASE("normalization identity above and below the cone", "[eigenstates]")
{
    std::mt19937_64 rng(20261017);
    std::uniform_real_distribution<double> uk(0.01, 2.0), uw(0.01, 3.0), ug(0.01, 0.5);
    int above = 0, below = 0;
    for (int n = 0; n < 4000; ++n) {
        const auto p = map_params(ug(rng));
        const double k = uk(rng), w = uw(rng);
        if (std::abs(w - k) < 1e-6)
            continue;
        (w > k ? above : below)++;
        const auto s = sample(p, k, w);
        CHECK(std::abs(normalization_identity(p, k, w) - 1.0) < 1e-10);
        CHECK(s.plasmon_weight >= 0.0);
        CHECK(s.plasmon_weight <= s.f2);
    }
    CHECK(above > 1000);
    CHECK(below > 1000);
}

TEST_CASE("above-cone denominator equals the optical denominator", "[eigenstates]")
{
    for (double w0 : {1.0, 100.0}) {
        const auto p = map_params(1.0 / 6.0, w0);
        for (double k : {0.05, 0.3, 0.8, 1.5})
            for (double r : {1.01, 1.2, 2.0, 5.0}) {
                const double w = r * k * w0;
                const double d = std::norm(denominator(p, theta_on_cone(k, w0, w), w, ModelVariant::Full));
                CHECK(std::abs(f_denominator(p, k, w) - d) <= 1e-12 * d);
            }
    }
}

TEST_CASE("hopfield bracket and antiresonant ratios", "[eigenstates]")
{
    const auto p = map_params(1.0 / 30.0);
    for (double w : {0.1, 0.5, 0.9, 1.4, 3.0}) {
        const double f2 = f_weight(p, 0.3, w);
        const double ft = std::sqrt(f2) * (w - 1.0) / (w + 1.0);
        CHECK(plasmon_hopfield_weight(p, 0.3, w) == Approx(f2 - ft * ft).epsilon(1e-14));
    }
    CHECK(antiresonant_ratio(1.0, 1.0) == 0.0);
    CHECK(antiresonant_ratio(2.0, 3.0) == Approx(0.2).epsilon(1e-15));
    CHECK(antiresonant_ratio(3.0, 2.0) == Approx(-0.2).epsilon(1e-15));
}

TEST_CASE("weight vanishes far from resonance above the cone", "[eigenstates]")
{
    // k = 0 keeps the whole axis above the cone
    const auto p = map_params(1.0 / 6.0);
    double prev_lo = 1e300, prev_hi = 1e300;
    for (double d = 10.0; d <= 1e6; d *= 10.0) {
        const double lo = plasmon_hopfield_weight(p, 0.0, 1.0 / d);
        const double hi = plasmon_hopfield_weight(p, 0.0, d);
        CHECK(lo < prev_lo);
        CHECK(hi < prev_hi);
        prev_lo = lo;
        prev_hi = hi;
    }
    CHECK(prev_lo < 1e-7);
    CHECK(prev_hi < 1e-7);
    // and toward the cone from above, where Gamma_k diverges
    CHECK(plasmon_hopfield_weight(p, 0.5, 0.5 * (1.0 + 1e-9)) < 1e-3 * plasmon_hopfield_weight(p, 0.5, 1.0));
}

TEST_CASE("ENZ center solves the implicit equation", "[eigenstates]")
{
    for (double g0 : {1.0 / 30.0, 1.0 / 6.0})
        for (double k : {0.1, 0.5, 0.9, 1.5, 2.0}) {
            const auto p = map_params(g0);
            const double c = enz_center(p, k);
            CHECK(c < k);
            CHECK(c < p.omega0);
            const double resid = c * c - 1.0 - lamb_shift_G(p, k, c);
            CHECK(std::abs(resid) < 1e-8);
            CHECK(std::abs(z_function(p, k, c)) < 1e-8);

            // the weight maximum sits at the center up to a fraction of gamma
            auto f2 = [&](double w) { return f_weight(p, k, w); };
            const auto peak = numeric::golden_max(f2, std::max(1e-6, c - 0.3), std::min(c + 0.3, k * (1 - 1e-9)), 1e-13);
            CHECK(std::abs(peak.first - c) < p.gamma_nr / 10.0);
            CHECK(peak.first * peak.first - 1.0 - lamb_shift_G(p, k, peak.first) < 1e-2);
        }
}

TEST_CASE("ENZ linewidth is set by gamma", "[eigenstates]")
{
    for (double g0 : {1.0 / 30.0, 1.0 / 6.0})
        for (double k : {0.1, 0.4, 0.8, 1.2, 2.0}) {
            const auto p = map_params(g0);
            const double c = enz_center(p, k);
            CHECK(enz_linewidth(p, k) == Approx(2.0 * p.gamma_nr / (1.0 + c)).epsilon(0.01));
        }
}

TEST_CASE("eigenstate errors", "[eigenstates]")
{
    const auto p = map_params(1.0 / 30.0);
    CHECK_THROWS_AS(z_function(p, 0.5, 0.5), LightConePoint);
    CHECK_THROWS_AS(f_weight(p, 0.5, 0.5), LightConePoint);
    CHECK_THROWS_AS(z_function(p, 0.5, -1.0), InvalidArgument);
    CHECK_THROWS_AS(enz_center(p, 0.0), NoLocalizedMode);
    // Gamma0 k >= omega0 leaves no root below the cone
    CHECK_THROWS_AS(enz_center(map_params(2.0), 0.6), NoLocalizedMode);
    CHECK_NOTHROW(enz_center(map_params(2.0), 0.4));
}

TEST_CASE("radiative ridge broadens with k", "[eigenstates]")
{
    for (double g0 : {1.0 / 30.0, 1.0 / 6.0}) {
        const auto p = map_params(g0);
        double last = 0.0;
        for (double k = 0.05; k <= 0.85 + 1e-12; k += 0.05) {
            const auto r = radiative_ridge(p, k);
            CHECK(r.center > k);
            CHECK(r.fwhm > last);
            last = r.fwhm;
        }
    }
    for (double k : {0.2, 0.5, 0.8, 1.2, 1.8})
        CHECK(radiative_ridge(map_params(1.0 / 6.0), k).fwhm > radiative_ridge(map_params(1.0 / 30.0), k).fwhm);
}

TEST_CASE("dispersion maps show one ridge on each side of the cone", "[eigenstates]")
{
    for (double g0 : {1.0 / 30.0, 1.0 / 6.0}) {
        const auto p = map_params(g0);
        const auto m = dispersion_map(p);
        REQUIRE(m.weight.rows() == 512);
        REQUIRE(m.weight.cols() == 512);
        CHECK(m.weight.allFinite());
        CHECK(m.weight.minCoeff() >= 0.0);
        const double h = m.omega[1] - m.omega[0];
        int checked = 0;
        for (std::size_t i = 0; i < m.k.size(); ++i) {
            for (double w : m.omega)
                CHECK(w != m.k[i]);
            const int cone = m.cone_row(i);
            if (cone < 2)
                continue;
            const auto rad = radiative_ridge(p, m.k[i]);
            if (rad.center + 0.5 * rad.fwhm > m.omega.back())
                continue;   // radiative ridge cut by the top of the window
            const auto rs = ridges_in_column(m, i);
            INFO("column " << i << " k = " << m.k[i] << " cone row " << cone << " radiative " << rad.center);
            REQUIRE(rs.size() == 2);
            CHECK(!rs[0].above_cone);
            CHECK(rs[1].above_cone);
            CHECK(std::abs(m.omega[rs[0].row] - enz_center(p, m.k[i])) <= 1.5 * h);
            CHECK(std::abs(m.omega[rs[1].row] - rad.center) <= 1.5 * h);
            ++checked;
        }
        CHECK(checked > 480);
        const auto norm = max_normalized(m);
        CHECK(norm.maxCoeff() == 1.0);
    }
}
