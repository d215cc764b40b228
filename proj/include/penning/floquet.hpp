#pragma once

// Penning trap with a magnetic field rotating about z at rate omega.
//
// In the co-rotating frame the evolution is generated by the time-independent
// Floquet generator G = H(0) - omega L_z, a quadratic form in
// v = (x, y, z, p_x, p_y, p_z). Everything here is in units m = omega = 1,
// where only alpha = |e|B/(2mc omega), alpha0 = omegaC/(2 omega) and
// w = omega0/omega enter.

#include "penning/symplectic.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <string_view>
#include <vector>

namespace penning {

/// Physical rotating-field setup; frequencies in any common unit.
struct PhysicalRotatingField {
    double m = 1.0;
    double omega = 1.0;   ///< rotation rate of the transverse field
    double omegaB = 0.0;  ///< |e| B / (m c), transverse field
    double omegaC = 0.0;  ///< |e| B0 / (m c), static field
    double omega0 = 0.0;  ///< axial trap frequency

    PhysicalRotatingField with_omega(double newOmega) const {
        PhysicalRotatingField p = *this;
        p.omega = newOmega;
        return p;
    }
};

struct RotatingFieldConfig {
    double alpha = 0.0;
    double alpha0 = 0.0;
    double w = 0.0;

    /// Throws ParameterError unless alpha >= 0, alpha0 > 0, w > 0.
    void validate() const;

    static RotatingFieldConfig from_physical(const PhysicalRotatingField& p);
    /// Static fields tuned to the tau = 2T Penning loop: w = 4 alpha0 / 3.
    static RotatingFieldConfig loop_constrained(double alpha, double alpha0);
};

/// Symmetric 6x6 matrix of G(v) = v^T Hg v / 2.
Eigen::Matrix<double, 6, 6> hessian_G(const RotatingFieldConfig& cfg);

/// Symmetric K with L_z = x p_y - y p_x = v^T K v / 2.
Eigen::Matrix<double, 6, 6> angular_momentum_form();

/// Hamiltonian matrix Lambda = J Hg of the linear flow dv/dt = Lambda v.
Eigen::Matrix<double, 6, 6> lambda_matrix(const RotatingFieldConfig& cfg);

/// Eigenvalues of Lambda.
std::array<std::complex<double>, 6> lambda_spectrum(const RotatingFieldConfig& cfg);

enum class Stability { Confined, Deconfined, Marginal };

std::string_view to_string(Stability s);

struct StabilityClass {
    Stability kind = Stability::Deconfined;
    double maxRealPart = 0.0;
    /// Smallest separation among the three positive frequencies, and of the
    /// lowest one from its negative partner.
    double minFrequencyGap = 0.0;
};

struct StabilityOptions {
    double epsStab = 1e-8;
    double deltaGap = 1e-6;
};

StabilityClass classify_stability(const RotatingFieldConfig& cfg, const StabilityOptions& opts = {});

/// Normal-mode data for a Confined configuration, modes sorted by frequency.
struct ModeSpectrum {
    std::array<double, 3> omegas{};  ///< units of omega
    std::array<int, 3> signs{};      ///< Krein signs
    /// Columns (Q1, Q2, Q3, P1, P2, P3) in the original coordinates;
    /// S^-1 Lambda S has blocks generating rotation at rate signs[i]*omegas[i].
    SymplecticMatrix S = SymplecticMatrix::identity(6);
};

/// Krein-signed normal modes. Throws PreconditionError if the configuration
/// is not Confined and ConditioningError if the construction loses accuracy.
ModeSpectrum normal_modes(const RotatingFieldConfig& cfg, const StabilityOptions& opts = {});

/// Block-diagonal generator with rate signs[i]*omegas[i] on each (Q_i, P_i) pair.
Eigen::Matrix<double, 6, 6> mode_generator(const ModeSpectrum& modes);

/// Level of the Floquet generator for A_i^dag A_i = n_i:
/// sum_i eps_i omega_i n_i + sum_i omega_i / 2.
double floquet_energy(const ModeSpectrum& modes, const std::array<int, 3>& n);

struct RegionGrid {
    double alphaMin = 0.0, alphaMax = 0.0;
    double alpha0Min = 0.0, alpha0Max = 0.0;
    int nAlpha = 0, nAlpha0 = 0;
    bool loopConstraint = true;
    double w = 1.0;  ///< used only without the loop constraint
};

struct RegionPoint {
    double alpha = 0.0;
    double alpha0 = 0.0;
    StabilityClass cls;
    /// Krein signs ordered by frequency; zero when not Confined.
    std::array<int, 3> signature{};
};

/// Row-major over alpha (outer) then alpha0 (inner), endpoints included.
/// Points are evaluated independently, possibly in parallel.
std::vector<RegionPoint> region_map(const RegionGrid& grid, const StabilityOptions& opts = {},
                                    int workers = 0);

/// Connected components of the Confined set with 4-neighbour adjacency.
/// With `matchSignature`, neighbours join only if their Krein signatures agree:
/// a change of signature between neighbours means a mode collision lies between them.
/// Returns labels (0 = not Confined, components numbered from 1) and the count.
struct ComponentLabels {
    std::vector<int> labels;
    int count = 0;
};
ComponentLabels confined_components(const std::vector<RegionPoint>& points, const RegionGrid& grid,
                                    bool matchSignature = true);

}  // namespace penning
