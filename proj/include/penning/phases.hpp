#pragma once

// Geometric phases of cyclic evolutions: states on a Penning loop, and
// Floquet eigenstates of the rotating-field trap.

#include "penning/floquet.hpp"
#include "penning/penning_model.hpp"

#include <array>
#include <map>

namespace penning {

/// Reduces an angle to [0, 2 pi).
double reduce_angle(double a);

/// Distance between two angles on the circle, in [0, pi].
double angular_distance(double a, double b);

/// Spectrum of the static trap Hamiltonian in circular modes:
/// E(n+, n-, nz) = omegaRho (n+ + n- + 1) + omega0 (nz + 1/2) - (omegaC/2)(n+ - n-).
struct LoopSpectrumModel {
    double omegaRho = 0.0;
    double omega0 = 0.0;
    double omegaC = 0.0;

    static LoopSpectrumModel from_trap(const TrapConfig& cfg);
    double energy(const std::array<int, 3>& n) const;
};

/// Populations |c_n|^2 over occupation triples (n+, n-, nz).
class StateDistribution {
public:
    using Occupation = std::array<int, 3>;

    /// Throws ParameterError for negative weights, negative occupations,
    /// or a total weight differing from 1 by more than 1e-10.
    explicit StateDistribution(std::map<Occupation, double> weights);

    static StateDistribution pure(const Occupation& n);
    static StateDistribution ground() { return pure({0, 0, 0}); }

    const std::map<Occupation, double>& weights() const { return weights_; }

private:
    std::map<Occupation, double> weights_;
};

/// Common phase phi = -E_n tau (mod 2 pi) acquired by every eigenstate over a
/// loop of duration tau. Checks n-independence on 0 <= n_i <= 8 and throws
/// NotALoopError when the phase varies by more than 1e-9.
double loop_phase(const LoopSpectrumModel& model, double tau);

struct LoopPhaseResult {
    double phi = 0.0;
    double beta = 0.0;           ///< reduced to [0, 2 pi)
    double betaUnreduced = 0.0;  ///< phi + tau <H>
};

/// beta = phi + tau <psi|H|psi> for a state on the loop.
LoopPhaseResult beta_loop(const LoopSpectrumModel& model, double tau, const StateDistribution& state);

struct FloquetPhase {
    double beta = 0.0;           ///< reduced to [0, 2 pi)
    double betaUnreduced = 0.0;
    double tau = 0.0;            ///< cycle time 2 pi / omega
    std::array<double, 3> modeTerms{};  ///< per-mode contributions to betaUnreduced
};

/// Cycle time of Floquet eigenstates, 2 pi / omega.
double floquet_cycle_time(const PhysicalRotatingField& p);

/// Physical mode frequencies omega * omega_i and Krein signs at the given rotation rate.
ModeSpectrum physical_modes(const PhysicalRotatingField& p, const StabilityOptions& opts = {});

/// beta = -2 pi sum_i eps_i (n_i + 1/2) d omega_i / d omega with the derivative
/// taken by central differences at fixed B, B0, omega0. A positive
/// `deltaOmega` gives the plain central difference with that step. Otherwise
/// Richardson extrapolation from steps d and d/2 starting at d = 1e-5 omega,
/// halving d until successive extrapolated values agree. Throws
/// StencilError if modes cannot be matched across the stencil.
FloquetPhase beta_floquet_sum(const PhysicalRotatingField& p, const std::array<int, 3>& n,
                              double deltaOmega = 0.0);

/// beta = 2 pi <L_z> in the Floquet eigenstate with occupations n.
FloquetPhase beta_floquet_lz(const PhysicalRotatingField& p, const std::array<int, 3>& n);

/// (D(d) - D(d/2)) / (D(d/2) - D(d/4)) for the unreduced finite-difference
/// phase D; close to 4 when the central difference is in its asymptotic range.
double richardson_ratio(const PhysicalRotatingField& p, const std::array<int, 3>& n, double deltaOmega);

}  // namespace penning
