#include "penning/penning_model.hpp"

#include "penning/errors.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>

namespace penning {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::optional<std::int64_t> exact_isqrt(std::int64_t v) {
    if (v < 0) return std::nullopt;
    auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
    for (std::int64_t c = std::max<std::int64_t>(0, r - 2); c <= r + 2; ++c) {
        if (c * c == v) return c;
    }
    return std::nullopt;
}

bool is_two_period_loop(const TrapConfig& cfg) {
    return std::abs(cfg.omegaC() - 1.5 * cfg.omega0()) <= 1e-12 * cfg.omega0();
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (d == 0) throw ParameterError("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

std::string Rational::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

Rational Rational::parse(std::string_view text) {
    auto to_int = [&](std::string_view s) {
        std::int64_t v = 0;
        const auto* end = s.data() + s.size();
        auto [ptr, ec] = std::from_chars(s.data(), end, v);
        if (s.empty() || ec != std::errc{} || ptr != end) {
            throw ParameterError("not a rational number: '" + std::string(text) + "'");
        }
        return v;
    };
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(to_int(text));
    return Rational(to_int(text.substr(0, slash)), to_int(text.substr(slash + 1)));
}

Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
Rational operator-(Rational a, Rational b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
Rational operator/(Rational a, Rational b) {
    if (b.num == 0) throw ParameterError("rational division by zero");
    return {a.num * b.den, a.den * b.num};
}

std::optional<Rational> exact_sqrt(Rational r) {
    auto n = exact_isqrt(r.num);
    auto d = exact_isqrt(r.den);
    if (!n || !d) return std::nullopt;
    return Rational(*n, *d);
}

TrapConfig make_trap(double m, double omega0, double omegaC) {
    if (!(m > 0.0)) throw ParameterError("mass must be positive");
    if (!(omega0 > 0.0) || !(omegaC > 0.0)) {
        throw TrapRegimeError("trap frequencies must be positive");
    }
    const double rho2 = (omegaC * omegaC - 2.0 * omega0 * omega0) / 4.0;
    if (!(rho2 > 0.0)) {
        throw TrapRegimeError("not trapping: omegaC^2 must exceed 2 omega0^2");
    }
    return TrapConfig(m, omega0, omegaC, std::sqrt(rho2));
}

TrapConfig two_period_loop_trap(double m, double omega0) {
    return make_trap(m, omega0, 1.5 * omega0);
}

SymplecticMatrix trap_evolution(const TrapConfig& cfg, double t) {
    const SymplecticMatrix radial = mat_ho(cfg.omegaRho(), t, cfg.m());
    const SymplecticMatrix oscillators = embed_axes(radial, radial, mat_ho(cfg.omega0(), t, cfg.m()));
    // H_c = -(omegaC/2) L_z turns the x-y plane clockwise at rate omegaC/2.
    return embed_radial(rotation_xy(-0.5 * cfg.omegaC() * t)) * oscillators;
}

std::optional<int> find_loop_time(const TrapConfig& cfg, int maxPeriods, double tol) {
    if (maxPeriods < 1) throw ParameterError("maxPeriods must be at least 1");
    const double period = kTwoPi / cfg.omega0();
    for (int k = 1; k <= maxPeriods; ++k) {
        if (is_loop(trap_evolution(cfg, k * period), tol)) return k;
    }
    return std::nullopt;
}

std::optional<LoopSpec> exact_loop_spec(Rational ratioC, int maxPeriods) {
    const Rational rho2 = (ratioC * ratioC - Rational(2)) / Rational(4);
    if (rho2.num <= 0 || ratioC.num <= 0) {
        throw TrapRegimeError("not trapping: (omegaC/omega0)^2 must exceed 2");
    }
    const auto rho = exact_sqrt(rho2);
    if (!rho) return std::nullopt;
    // At t = kT the radial oscillator contributes (-1)^(2 k rho) when 2 k rho is
    // an integer and the rotation by k pi ratioC contributes (-1)^(k ratioC).
    for (int k = 1; k <= maxPeriods; ++k) {
        const Rational twoKRho = Rational(2 * k) * *rho;
        const Rational kC = Rational(k) * ratioC;
        if (twoKRho.den == 1 && kC.den == 1 && (twoKRho.num + kC.num) % 2 == 0) {
            return LoopSpec{ratioC, *rho, k};
        }
    }
    return std::nullopt;
}

void KickSchedule::validate() const {
    if (!(t1 > 0.0 && t1 < t2 && t2 < tau) || !std::isfinite(F1) || !std::isfinite(F2)) {
        throw ParameterError("kick schedule must satisfy 0 < t1 < t2 < tau with finite kicks");
    }
}

KickSchedule schedule_from_dimensionless(const TrapConfig& cfg, double w0t1, double w0t2,
                                         double f1OverW0, double f2OverW0) {
    const double w0 = cfg.omega0();
    return KickSchedule{w0t1 / w0, w0t2 / w0, f1OverW0 * w0, f2OverW0 * w0, 2.0 * kTwoPi / w0};
}

KickedMatrices build_kicked_matrices(const TrapConfig& cfg, const KickSchedule& sched) {
    if (!is_two_period_loop(cfg)) {
        throw ParameterError("kicked matrices require the tau = 2T loop (omegaC = 3 omega0 / 2)");
    }
    sched.validate();
    const double expected_tau = 2.0 * kTwoPi / cfg.omega0();
    if (std::abs(sched.tau - expected_tau) > 1e-9 * expected_tau) {
        throw ParameterError("schedule duration must equal the loop time 4 pi / omega0");
    }
    const double m = cfg.m();
    const double wr = cfg.omegaRho();
    const double w0 = cfg.omega0();
    const double d1 = sched.t1;
    const double d2 = sched.t2 - sched.t1;
    const double d3 = sched.tau - sched.t2;

    const SymplecticMatrix ux = -compose({mat_ho(wr, d3, m), mat_kick(-0.5 * sched.F2, m),
                                          mat_ho(wr, d2, m), mat_kick(-0.5 * sched.F1, m),
                                          mat_ho(wr, d1, m)});
    const SymplecticMatrix uz = compose({mat_ho(w0, d3, m), mat_kick(sched.F2, m), mat_ho(w0, d2, m),
                                         mat_kick(sched.F1, m), mat_ho(w0, d1, m)});
    return {ux, uz};
}

SymplecticMatrix build_full_matrix(const TrapConfig& cfg, const KickSchedule& sched) {
    const auto [ux, uz] = build_kicked_matrices(cfg, sched);
    return embed_axes(ux, ux, uz);
}

ScaleFamilyPoint scale_family(double zeta, const TrapConfig& cfg) {
    if (!(zeta > 0.0 && zeta < kTwoPi)) {
        throw DomainError("scale family parameter must lie in (0, 2 pi)");
    }
    const double cot_half = std::cos(zeta / 2.0) / std::sin(zeta / 2.0);
    const double ratio = (1.0 + std::cos(zeta / 2.0)) / std::sin(zeta / 2.0);
    ScaleFamilyPoint p;
    p.schedule = schedule_from_dimensionless(cfg, zeta, zeta + kTwoPi, -cot_half, cot_half);
    p.lambda2 = ratio * ratio;
    return p;
}

std::string_view to_string(TransformKind kind) {
    switch (kind) {
        case TransformKind::Fourier3D: return "Fourier3D";
        case TransformKind::FourierZScaleXY: return "FourierZScaleXY";
        case TransformKind::Scale3D: return "Scale3D";
        case TransformKind::Loop: return "Loop";
        case TransformKind::Other: return "Other";
    }
    return "Other";
}

Classification classify_transformation(const SymplecticMatrix& ux, const SymplecticMatrix& uz,
                                       double tol, double mOmega0) {
    if (ux.dim() != 2 || uz.dim() != 2) {
        throw ParameterError("classify_transformation expects 2x2 blocks");
    }
    auto fourier = [&](const SymplecticMatrix& u) {
        return std::abs(u(0, 0)) < tol && std::abs(u(1, 1)) < tol;
    };
    auto scale = [&](const SymplecticMatrix& u) {
        return std::abs(u(0, 1)) < tol && std::abs(u(1, 0)) < tol;
    };
    if (is_loop(ux, tol) && is_loop(uz, tol)) return {TransformKind::Loop, 1.0, 1.0};
    if (fourier(ux) && fourier(uz)) {
        return {TransformKind::Fourier3D, mOmega0 * uz(0, 1), mOmega0 * ux(0, 1)};
    }
    if (scale(ux) && fourier(uz)) {
        return {TransformKind::FourierZScaleXY, mOmega0 * uz(0, 1), ux(0, 0)};
    }
    if (scale(ux) && scale(uz)) return {TransformKind::Scale3D, uz(0, 0), ux(0, 0)};
    return {TransformKind::Other, std::nan(""), std::nan("")};
}

}  // namespace penning
