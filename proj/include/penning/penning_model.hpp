#pragma once

// Ideal Penning trap: static configuration, loop detection, and the
// two-kick perturbation of the tau = 2T Penning loop.
//
// Frequencies are angular frequencies; with m = omega0 = 1 all inputs and
// outputs coincide with the dimensionless groups omega0*t, F/omega0 and
// m*omega0*lambda.

#include "penning/symplectic.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace penning {

/// Exact rational number with positive denominator in lowest terms.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d = 1);

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;

    /// Parses "p/q" or "p".
    static Rational parse(std::string_view text);

    friend bool operator==(const Rational&, const Rational&) = default;
};

Rational operator+(Rational a, Rational b);
Rational operator-(Rational a, Rational b);
Rational operator*(Rational a, Rational b);
Rational operator/(Rational a, Rational b);

/// Square root when both numerator and denominator are perfect squares.
std::optional<Rational> exact_sqrt(Rational r);

class TrapConfig {
public:
    double m() const { return m_; }
    double omega0() const { return omega0_; }
    double omegaC() const { return omegaC_; }
    double omegaRho() const { return omegaRho_; }

    friend TrapConfig make_trap(double m, double omega0, double omegaC);

private:
    TrapConfig(double m, double w0, double wc, double wr)
        : m_(m), omega0_(w0), omegaC_(wc), omegaRho_(wr) {}
    double m_, omega0_, omegaC_, omegaRho_;
};

/// Validates the trap regime omega0 > 0, omegaC > 0, omegaC^2 > 2 omega0^2.
TrapConfig make_trap(double m, double omega0, double omegaC);

/// The tau = 2T loop: omegaC = 3 omega0 / 2, so omegaRho = omega0 / 4.
TrapConfig two_period_loop_trap(double m = 1.0, double omega0 = 1.0);

/// Unperturbed 6x6 evolution matrix over time t (axial, radial and
/// magnetron-like rotation parts).
SymplecticMatrix trap_evolution(const TrapConfig& cfg, double t);

/// Smallest k <= maxPeriods with trap_evolution(cfg, k T) an identity within tol.
std::optional<int> find_loop_time(const TrapConfig& cfg, int maxPeriods = 64, double tol = 1e-9);

/// Penning loop described by exact frequency ratios.
struct LoopSpec {
    Rational ratioC;    ///< omegaC / omega0
    Rational ratioRho;  ///< omegaRho / omega0
    int tauPeriods = 0; ///< loop time in units of T = 2 pi / omega0
};

/// Exact loop analysis of omegaC/omega0 = ratioC. Returns nothing when
/// omegaRho/omega0 is irrational or no loop closes within maxPeriods.
/// Throws TrapRegimeError for ratioC^2 <= 2.
std::optional<LoopSpec> exact_loop_spec(Rational ratioC, int maxPeriods = 64);

/// Times and strengths of the two kicks applied during one loop period.
struct KickSchedule {
    double t1 = 0.0;
    double t2 = 0.0;
    double F1 = 0.0;  ///< F' (frequency units)
    double F2 = 0.0;  ///< F''
    double tau = 0.0;

    /// Throws ParameterError unless 0 < t1 < t2 < tau.
    void validate() const;
};

/// Schedule with tau = 4 pi / omega0 from dimensionless inputs.
KickSchedule schedule_from_dimensionless(const TrapConfig& cfg, double w0t1, double w0t2,
                                         double f1OverW0, double f2OverW0);

struct KickedMatrices {
    SymplecticMatrix ux;  ///< acts on (x, p_x) and identically on (y, p_y)
    SymplecticMatrix uz;  ///< acts on (z, p_z)
};

/// Radial and axial evolution matrices at tau for the kicked tau = 2T loop.
/// The radial matrix carries the rotation's -I as its leading sign.
KickedMatrices build_kicked_matrices(const TrapConfig& cfg, const KickSchedule& sched);

/// 6x6 evolution matrix at tau assembled from build_kicked_matrices.
SymplecticMatrix build_full_matrix(const TrapConfig& cfg, const KickSchedule& sched);

struct ScaleFamilyPoint {
    KickSchedule schedule;
    double lambda2 = 0.0;
};

/// Closed-form kicks omega0 t2 = zeta + 2 pi, F''/omega0 = -F'/omega0 = cot(zeta/2),
/// which leave a loop along z and scale x-y by lambda2 = cot^2(zeta/4).
ScaleFamilyPoint scale_family(double zeta, const TrapConfig& cfg);

enum class TransformKind { Fourier3D, FourierZScaleXY, Scale3D, Loop, Other };

std::string_view to_string(TransformKind kind);

struct Classification {
    TransformKind kind = TransformKind::Other;
    /// Axial parameter: m omega0 lambda1 for a Fourier block, lambda1 for a scale block.
    double lambda1 = 0.0;
    /// Radial parameter, same convention as lambda1.
    double lambda2 = 0.0;
};

/// Recognises the target forms. Fourier blocks have vanishing diagonal and
/// lambda = m omega0 * u[0][1]; scale blocks have vanishing off-diagonal and
/// lambda = u[0][0]. Pass m*omega0 as `mOmega0`.
Classification classify_transformation(const SymplecticMatrix& ux, const SymplecticMatrix& uz,
                                       double tol, double mOmega0 = 1.0);

}  // namespace penning
