#pragma once

// Exact phase-space propagators for quadratic Hamiltonians.
//
// Coordinates are ordered in block form v = (q_1..q_N, p_1..p_N) and the
// canonical form is J = [[0, I], [-I, 0]]. A 2x2 block acts on a single
// (q, p) pair. Units have hbar = 1.

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace penning {

/// Canonical symplectic form for a phase space of even dimension `dim`.
Eigen::MatrixXd canonical_form(int dim);

/// Real 2N x 2N matrix preserving the canonical form (an "evolution matrix").
///
/// Construction through `checked` validates M^T J M = J and det M = 1 to the
/// given tolerance. The propagator builders below produce matrices that are
/// symplectic by construction and skip the check.
class SymplecticMatrix {
public:
    static constexpr double kDefaultTolerance = 1e-10;

    static SymplecticMatrix checked(Eigen::MatrixXd m, double tol = kDefaultTolerance);
    /// No validation; the caller guarantees the symplectic property.
    static SymplecticMatrix trusted(Eigen::MatrixXd m);
    static SymplecticMatrix identity(int dim);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Eigen::MatrixXd& matrix() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }

    SymplecticMatrix inverse() const;
    SymplecticMatrix operator-() const { return trusted(-m_); }

    /// max |M^T J M - J|.
    double symplectic_defect() const;

private:
    explicit SymplecticMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {}
    Eigen::MatrixXd m_;
};

/// Later factor on the left: (a * b) applies b first.
SymplecticMatrix operator*(const SymplecticMatrix& a, const SymplecticMatrix& b);

/// Gaussian phase-space state: first and symmetrized second moments.
struct GaussianState {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;

    int dim() const { return static_cast<int>(mean.size()); }

    /// Vacuum of `pairs` unit oscillators: zero mean, covariance I/2.
    static GaussianState vacuum(int pairs);

    /// Throws ParameterError unless the covariance is symmetric positive
    /// definite and covariance + (i/2) J is positive semidefinite within tol.
    void validate(double tol = 1e-10) const;
};

/// Harmonic oscillator over time t: [[cos wt, sin wt/(m w)], [-m w sin wt, cos wt]].
SymplecticMatrix mat_ho(double omega, double t, double m = 1.0);

/// Free particle over time t (negative t runs backwards): [[1, t/m], [0, 1]].
SymplecticMatrix mat_free(double t, double m = 1.0);

/// Instantaneous kick exp(-i m F q^2 / 2): [[1, 0], [-m F, 1]].
SymplecticMatrix mat_kick(double strength, double m = 1.0);

/// Rotation by `theta` about z acting on (x, y, p_x, p_y).
SymplecticMatrix rotation_xy(double theta);

/// Product of segments written in operator order: the last segment acts
/// first and the first segment acts last, as in u3 u2 u1.
SymplecticMatrix compose(std::span<const SymplecticMatrix> segments);
SymplecticMatrix compose(std::initializer_list<SymplecticMatrix> segments);

/// `m` raised to a nonnegative integer power.
SymplecticMatrix power(const SymplecticMatrix& m, int k);

/// max |M - I|.
double distance_to_identity(const SymplecticMatrix& m);

/// True iff max |M - I| < tol. Identity at the matrix level means the
/// evolution operator is the identity up to a global phase.
bool is_loop(const SymplecticMatrix& m, double tol = 1e-9);

/// Residual of (free(lambda) kick(1/lambda))^6 = I.
double verify_identity_2(double lambda);

/// Residual of kick(1/lambda) (free(lambda) kick(1/lambda))^5 = free(-lambda).
double verify_identity_3(double lambda);

/// Heisenberg-picture moments after evolution: mean -> M mean, cov -> M cov M^T.
GaussianState evolve_covariance(const SymplecticMatrix& m, const GaussianState& s);

/// Places three (q, p) blocks on the x, y and z pairs of a 6-dim phase space.
SymplecticMatrix embed_axes(const SymplecticMatrix& ux, const SymplecticMatrix& uy,
                            const SymplecticMatrix& uz);

/// Extends a 4x4 (x, y, p_x, p_y) matrix to 6 dims, identity on (z, p_z).
SymplecticMatrix embed_radial(const SymplecticMatrix& radial);

}  // namespace penning
