#include "penning/phases.hpp"

#include "penning/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace penning {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kLatticeMax = 8;

void require_occupation(const std::array<int, 3>& n) {
    for (int v : n) {
        if (v < 0) throw ParameterError("occupation numbers must be nonnegative");
    }
}

}  // namespace

double reduce_angle(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r -= kTwoPi;
    return r;
}

double angular_distance(double a, double b) {
    const double d = reduce_angle(a - b);
    return std::min(d, kTwoPi - d);
}

LoopSpectrumModel LoopSpectrumModel::from_trap(const TrapConfig& cfg) {
    return {cfg.omegaRho(), cfg.omega0(), cfg.omegaC()};
}

double LoopSpectrumModel::energy(const std::array<int, 3>& n) const {
    require_occupation(n);
    const double plus = n[0], minus = n[1], axial = n[2];
    return omegaRho * (plus + minus + 1.0) + omega0 * (axial + 0.5) - 0.5 * omegaC * (plus - minus);
}

StateDistribution::StateDistribution(std::map<Occupation, double> weights) : weights_(std::move(weights)) {
    double total = 0.0;
    for (const auto& [n, w] : weights_) {
        require_occupation(n);
        if (!(w >= 0.0)) throw ParameterError("state weights must be nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-10) {
        throw ParameterError("state weights must sum to 1, got " + std::to_string(total));
    }
}

StateDistribution StateDistribution::pure(const Occupation& n) { return StateDistribution({{n, 1.0}}); }

double loop_phase(const LoopSpectrumModel& model, double tau) {
    if (!(tau > 0.0)) throw ParameterError("loop time must be positive");
    const double phi = reduce_angle(-model.energy({0, 0, 0}) * tau);
    for (int a = 0; a <= kLatticeMax; ++a) {
        for (int b = 0; b <= kLatticeMax; ++b) {
            for (int c = 0; c <= kLatticeMax; ++c) {
                const double p = -model.energy({a, b, c}) * tau;
                if (angular_distance(p, phi) > 1e-9) {
                    throw NotALoopError("phase depends on the occupation (" + std::to_string(a) + "," +
                                        std::to_string(b) + "," + std::to_string(c) +
                                        "): not an evolution loop");
                }
            }
        }
    }
    return phi;
}

LoopPhaseResult beta_loop(const LoopSpectrumModel& model, double tau, const StateDistribution& state) {
    LoopPhaseResult r;
    r.phi = loop_phase(model, tau);
    double mean_energy = 0.0;
    for (const auto& [n, w] : state.weights()) mean_energy += model.energy(n) * w;
    r.betaUnreduced = r.phi + tau * mean_energy;
    r.beta = reduce_angle(r.betaUnreduced);
    return r;
}

double floquet_cycle_time(const PhysicalRotatingField& p) {
    if (!(p.omega > 0.0)) throw ParameterError("rotation rate must be positive");
    return kTwoPi / p.omega;
}

ModeSpectrum physical_modes(const PhysicalRotatingField& p, const StabilityOptions& opts) {
    ModeSpectrum m = normal_modes(RotatingFieldConfig::from_physical(p), opts);
    for (double& w : m.omegas) w *= p.omega;
    return m;
}

namespace {

FloquetPhase central_difference_phase(const PhysicalRotatingField& p, const std::array<int, 3>& n,
                                      const ModeSpectrum& ref, double delta) {
    if (!(delta < p.omega)) throw ParameterError("finite-difference step must be below omega");
    ModeSpectrum up, down;
    try {
        up = physical_modes(p.with_omega(p.omega + delta));
        down = physical_modes(p.with_omega(p.omega - delta));
    } catch (const PreconditionError& e) {
        throw StencilError(std::string("stencil point not Confined, shrink deltaOmega: ") + e.what());
    }

    double min_gap = ref.omegas[1] - ref.omegas[0];
    min_gap = std::min(min_gap, ref.omegas[2] - ref.omegas[1]);

    // Nearest-frequency matching with sign consistency.
    auto match = [&](const ModeSpectrum& s, std::size_t i) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < 3; ++k) {
            if (std::abs(s.omegas[k] - ref.omegas[i]) < std::abs(s.omegas[best] - ref.omegas[i])) best = k;
        }
        if (std::abs(s.omegas[best] - ref.omegas[i]) >= 0.5 * min_gap || s.signs[best] != ref.signs[i]) {
            throw StencilError("mode " + std::to_string(i) +
                               " cannot be followed across the stencil; shrink deltaOmega");
        }
        return best;
    };

    FloquetPhase out;
    out.tau = floquet_cycle_time(p);
    std::array<bool, 3> used_up{}, used_down{};
    for (std::size_t i = 0; i < 3; ++i) {
        const std::size_t u = match(up, i);
        const std::size_t d = match(down, i);
        if (used_up[u] || used_down[d]) throw StencilError("ambiguous mode matching across the stencil");
        used_up[u] = used_down[d] = true;
        const double derivative = (up.omegas[u] - down.omegas[d]) / (2.0 * delta);
        out.modeTerms[i] = -kTwoPi * ref.signs[i] * (n[i] + 0.5) * derivative;
        out.betaUnreduced += out.modeTerms[i];
    }
    out.beta = reduce_angle(out.betaUnreduced);
    return out;
}

}  // namespace

FloquetPhase beta_floquet_sum(const PhysicalRotatingField& p, const std::array<int, 3>& n, double deltaOmega) {
    require_occupation(n);
    const ModeSpectrum ref = physical_modes(p);
    if (deltaOmega > 0.0) return central_difference_phase(p, n, ref, deltaOmega);

    // Richardson rule: extrapolate from steps d and d/2, halving d while
    // successive extrapolations keep converging. Once round-off takes over
    // the change grows again and the best-agreeing value is kept.
    constexpr double kAgreement = 1e-10;
    constexpr int kMaxHalvings = 8;
    auto extrapolate = [](const FloquetPhase& coarse, FloquetPhase fine) {
        for (std::size_t i = 0; i < 3; ++i) fine.modeTerms[i] += (fine.modeTerms[i] - coarse.modeTerms[i]) / 3.0;
        fine.betaUnreduced += (fine.betaUnreduced - coarse.betaUnreduced) / 3.0;
        fine.beta = reduce_angle(fine.betaUnreduced);
        return fine;
    };
    double delta = 1e-5 * p.omega;
    FloquetPhase coarse = central_difference_phase(p, n, ref, delta);
    FloquetPhase fine = central_difference_phase(p, n, ref, 0.5 * delta);
    FloquetPhase previous = extrapolate(coarse, fine);
    FloquetPhase best = previous;
    double best_change = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kMaxHalvings; ++k) {
        delta *= 0.5;
        coarse = fine;
        fine = central_difference_phase(p, n, ref, 0.5 * delta);
        const FloquetPhase next = extrapolate(coarse, fine);
        const double change = std::abs(next.betaUnreduced - previous.betaUnreduced);
        if (change >= best_change) break;
        best_change = change;
        best = previous;
        if (change < kAgreement) break;
        previous = next;
    }
    return best;
}

FloquetPhase beta_floquet_lz(const PhysicalRotatingField& p, const std::array<int, 3>& n) {
    require_occupation(n);
    const ModeSpectrum modes = normal_modes(RotatingFieldConfig::from_physical(p));
    const auto& s = modes.S.matrix();
    const Eigen::MatrixXd k = s.transpose() * angular_momentum_form() * s;

    FloquetPhase out;
    out.tau = floquet_cycle_time(p);
    for (int i = 0; i < 3; ++i) {
        // <Q^2> = <P^2> = n + 1/2 in a Fock state; cross terms vanish.
        const double lz = 0.5 * (k(i, i) + k(i + 3, i + 3)) * (n[static_cast<std::size_t>(i)] + 0.5);
        out.modeTerms[static_cast<std::size_t>(i)] = p.omega * out.tau * lz;
        out.betaUnreduced += out.modeTerms[static_cast<std::size_t>(i)];
    }
    out.beta = reduce_angle(out.betaUnreduced);
    return out;
}

double richardson_ratio(const PhysicalRotatingField& p, const std::array<int, 3>& n, double deltaOmega) {
    if (!(deltaOmega > 0.0)) throw ParameterError("finite-difference step must be positive");
    const double d1 = beta_floquet_sum(p, n, deltaOmega).betaUnreduced;
    const double d2 = beta_floquet_sum(p, n, 0.5 * deltaOmega).betaUnreduced;
    const double d4 = beta_floquet_sum(p, n, 0.25 * deltaOmega).betaUnreduced;
    return (d1 - d2) / (d2 - d4);
}

}  // namespace penning
