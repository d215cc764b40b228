#include "penning/errors.hpp"
#include "penning/phases.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace penning;

namespace {

constexpr double pi = std::numbers::pi;

// Rotating field tuned to the 2T loop of the static fields: omegaC = 3 omega0 / 2.
PhysicalRotatingField loop_field(double alpha, double alpha0, double omega = 1.0) {
    const RotatingFieldConfig c = RotatingFieldConfig::loop_constrained(alpha, alpha0);
    return {1.0, omega, 2.0 * alpha * omega, 2.0 * alpha0 * omega, c.w * omega};
}

double energy_law(const TrapConfig& cfg, int np, int nm, int nz) {
    return cfg.omegaRho() * (np + nm + 1) + cfg.omega0() * (nz + 0.5) - 0.5 * cfg.omegaC() * (np - nm);
}

}  // namespace

TEST_SUITE("phases") {

TEST_CASE("angle reduction") {
    CHECK(reduce_angle(0.0) == 0.0);
    CHECK(reduce_angle(-pi / 2) == doctest::Approx(1.5 * pi));
    CHECK(reduce_angle(5.0 * pi) == doctest::Approx(pi));
    CHECK(reduce_angle(2.0 * pi) < 2.0 * pi);
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    for (int i = 0; i < 1000; ++i) {
        const double r = reduce_angle(u(gen));
        CHECK(r >= 0.0);
        CHECK(r < 2.0 * pi);
        CHECK(reduce_angle(r) == r);
    }
    CHECK(angular_distance(0.1, 2.0 * pi - 0.1) == doctest::Approx(0.2));
}

TEST_CASE("circular-mode energy law") {
    const TrapConfig cfg = make_trap(1.0, 1.0, 2.25);
    const LoopSpectrumModel m = LoopSpectrumModel::from_trap(cfg);
    CHECK(m.energy({2, 1, 3}) == doctest::Approx(energy_law(cfg, 2, 1, 3)));
    CHECK(m.energy({0, 0, 0}) == doctest::Approx(0.875 + 0.5));
    CHECK_THROWS_AS(m.energy({-1, 0, 0}), ParameterError);
}

TEST_CASE("loop phase of the 2T loop") {
    const TrapConfig cfg = two_period_loop_trap();
    const LoopSpectrumModel m = LoopSpectrumModel::from_trap(cfg);
    const double tau = 4.0 * pi;
    CHECK(angular_distance(loop_phase(m, tau), pi) < 1e-9);
    // each level: E tau = -2 pi n+ + 4 pi n- + 4 pi nz + 3 pi
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                CHECK(energy_law(cfg, a, b, c) * tau == doctest::Approx(-2 * pi * a + 4 * pi * b + 4 * pi * c + 3 * pi));
    CHECK(angular_distance(loop_phase(m, 2.0 * tau), 0.0) < 1e-9);
}

TEST_CASE("loop phase rejects non-loops") {
    const LoopSpectrumModel detuned = LoopSpectrumModel::from_trap(make_trap(1.0, 1.0, 1.51));
    CHECK_THROWS_AS(loop_phase(detuned, 4.0 * pi), NotALoopError);
    const LoopSpectrumModel m = LoopSpectrumModel::from_trap(two_period_loop_trap());
    CHECK_THROWS_AS(loop_phase(m, 2.0 * pi), NotALoopError);
    CHECK_THROWS_AS(loop_phase(m, 0.0), ParameterError);
}

TEST_CASE("loop beta") {
    const TrapConfig cfg = two_period_loop_trap();
    const LoopSpectrumModel m = LoopSpectrumModel::from_trap(cfg);
    const double tau = 4.0 * pi;
    const LoopPhaseResult g = beta_loop(m, tau, StateDistribution::ground());
    CHECK(angular_distance(g.beta, 0.0) < 1e-9);
    CHECK(g.betaUnreduced == doctest::Approx(pi + 3.0 * pi));

    const LoopPhaseResult p = beta_loop(m, tau, StateDistribution::pure({1, 0, 2}));
    CHECK(angular_distance(p.beta, reduce_angle(pi + tau * energy_law(cfg, 1, 0, 2))) < 1e-9);

    // a mixture averages energies, not reduced phases
    const LoopPhaseResult mix = beta_loop(m, tau, StateDistribution({{{0, 0, 0}, 0.5}, {{1, 0, 0}, 0.5}}));
    const double mean_energy = 0.5 * (energy_law(cfg, 0, 0, 0) + energy_law(cfg, 1, 0, 0));
    CHECK(angular_distance(mix.beta, reduce_angle(pi + tau * mean_energy)) < 1e-9);
    CHECK(angular_distance(mix.beta, pi) < 1e-9);
    const double pure_average = 0.5 * (beta_loop(m, tau, StateDistribution::pure({0, 0, 0})).beta +
                                       beta_loop(m, tau, StateDistribution::pure({1, 0, 0})).beta);
    CHECK(angular_distance(mix.beta, pure_average) > 1.0);
}

TEST_CASE("state distribution validation") {
    CHECK_THROWS_AS(StateDistribution({{{0, 0, 0}, 0.5}}), ParameterError);
    CHECK_THROWS_AS(StateDistribution({{{0, 0, 0}, 1.5}, {{1, 0, 0}, -0.5}}), ParameterError);
    CHECK_THROWS_AS(StateDistribution({{{-1, 0, 0}, 1.0}}), ParameterError);
    CHECK_NOTHROW(StateDistribution({{{0, 0, 0}, 0.25}, {{0, 1, 0}, 0.75}}));
}

TEST_CASE("Floquet cycle time") {
    CHECK(floquet_cycle_time(loop_field(0.1, 1.0, 2.0)) == doctest::Approx(pi));
    CHECK(beta_floquet_lz(loop_field(0.1, 1.0, 2.0), {0, 0, 0}).tau == doctest::Approx(pi));
}

TEST_CASE("Floquet phase at alpha = 0 against the closed form") {
    // Physical frequencies: omega0, |R - omegaC/2 - omega| and R + omegaC/2 + omega with
    // R = sqrt(omegaC^2/4 - omega0^2/2); d/d omega gives 0, -s and +1 where s is the sign
    // inside the absolute value, which is also the Krein sign of that mode.
    for (double alpha0 : {0.6, 1.0, 2.0}) {
        const PhysicalRotatingField p = loop_field(0.0, alpha0, 1.3);
        const double r = std::sqrt(p.omegaC * p.omegaC / 4 - p.omega0 * p.omega0 / 2);
        const double minus = std::abs(r - p.omegaC / 2 - p.omega);
        const double plus = r + p.omegaC / 2 + p.omega;
        const ModeSpectrum modes = physical_modes(p);
        for (int mask = 0; mask < 8; ++mask) {
            const std::array<int, 3> n{mask & 1, (mask >> 1) & 1, 2 * ((mask >> 2) & 1)};
            double expected = 0.0;
            for (std::size_t i = 0; i < 3; ++i) {
                // eps_i * d omega_i / d omega is -1 for the minus mode and +1 for the plus mode
                if (std::abs(modes.omegas[i] - minus) < 1e-9) expected += -2 * pi * (n[i] + 0.5) * -1.0;
                else if (std::abs(modes.omegas[i] - plus) < 1e-9) expected += -2 * pi * (n[i] + 0.5) * 1.0;
            }
            CHECK(beta_floquet_sum(p, n).betaUnreduced == doctest::Approx(expected).epsilon(1e-8));
            CHECK(beta_floquet_lz(p, n).betaUnreduced == doctest::Approx(expected).epsilon(1e-8));
        }
        // ground state: the circular-mode angular momenta cancel
        CHECK(std::abs(beta_floquet_lz(p, {0, 0, 0}).betaUnreduced) < 1e-9);
    }
}

TEST_CASE("beta is affine in the occupations") {
    const PhysicalRotatingField p = loop_field(0.2, 0.75);
    const FloquetPhase b0 = beta_floquet_sum(p, {0, 0, 0}, 1e-4);
    const FloquetPhase b1 = beta_floquet_sum(p, {1, 0, 0}, 1e-4);
    CHECK(b1.betaUnreduced - b0.betaUnreduced == doctest::Approx(2.0 * b0.modeTerms[0]).epsilon(1e-12));
}

TEST_CASE("the two routes agree") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> a(0.0, 1.5), a0(0.2, 3.0);
    int points = 0;
    while (points < 30) {
        const double alpha = a(gen), alpha0 = a0(gen);
        if (classify_stability(RotatingFieldConfig::loop_constrained(alpha, alpha0)).kind != Stability::Confined) continue;
        ++points;
        const PhysicalRotatingField p = loop_field(alpha, alpha0, 0.7);
        for (const std::array<int, 3> n : {std::array<int, 3>{0, 0, 0}, {3, 0, 1}, {1, 2, 3}, {3, 3, 3}}) {
            CAPTURE(alpha);
            CAPTURE(alpha0);
            CHECK(std::abs(beta_floquet_sum(p, n).betaUnreduced - beta_floquet_lz(p, n).betaUnreduced) < 1e-6);
        }
    }
}

TEST_CASE("central difference converges quadratically") {
    const PhysicalRotatingField p = loop_field(0.2, 0.75);
    const double ratio = richardson_ratio(p, {1, 1, 1}, 1e-2);
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
    CHECK_THROWS_AS(richardson_ratio(p, {0, 0, 0}, 0.0), ParameterError);
}

TEST_CASE("stencil errors") {
    // close to the stability edge the stencil leaves the Confined region
    const PhysicalRotatingField p = loop_field(0.17, 1.0);
    CHECK_THROWS_AS(beta_floquet_sum(p, {0, 0, 0}, 0.3), StencilError);
    CHECK_THROWS_AS(beta_floquet_sum(p, {0, 0, 0}, 2.0), ParameterError);
    CHECK_THROWS_AS(beta_floquet_sum(p, {-1, 0, 0}), ParameterError);
    CHECK_THROWS_AS(beta_floquet_lz(loop_field(0.5, 1.0), {0, 0, 0}), PreconditionError);
}

}  // TEST_SUITE
