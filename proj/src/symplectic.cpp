#include "penning/symplectic.hpp"

#include "penning/errors.hpp"

#include <cmath>
#include <complex>
#include <string>

namespace penning {

namespace {

void require_mass(double m) {
    if (!(m > 0.0) || !std::isfinite(m)) {
        throw ParameterError("mass must be positive, got " + std::to_string(m));
    }
}

SymplecticMatrix pair(double a, double b, double c, double d) {
    Eigen::MatrixXd m(2, 2);
    m << a, b, c, d;
    return SymplecticMatrix::trusted(std::move(m));
}

}  // namespace

Eigen::MatrixXd canonical_form(int dim) {
    if (dim <= 0 || dim % 2 != 0) {
        throw ParameterError("phase-space dimension must be even and positive");
    }
    const int n = dim / 2;
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(dim, dim);
    j.topRightCorner(n, n).setIdentity();
    j.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    return j;
}

SymplecticMatrix SymplecticMatrix::checked(Eigen::MatrixXd m, double tol) {
    if (m.rows() != m.cols() || m.rows() == 0 || m.rows() % 2 != 0) {
        throw ParameterError("symplectic matrix must be square with even dimension");
    }
    SymplecticMatrix s(std::move(m));
    if (s.symplectic_defect() >= tol) {
        throw ParameterError("matrix does not preserve the canonical form");
    }
    if (std::abs(s.m_.determinant() - 1.0) >= tol) {
        throw ParameterError("symplectic matrix must have unit determinant");
    }
    return s;
}

SymplecticMatrix SymplecticMatrix::trusted(Eigen::MatrixXd m) {
    return SymplecticMatrix(std::move(m));
}

SymplecticMatrix SymplecticMatrix::identity(int dim) {
    if (dim <= 0 || dim % 2 != 0) {
        throw ParameterError("phase-space dimension must be even and positive");
    }
    return SymplecticMatrix(Eigen::MatrixXd::Identity(dim, dim));
}

SymplecticMatrix SymplecticMatrix::inverse() const {
    // M^{-1} = -J M^T J
    const Eigen::MatrixXd j = canonical_form(dim());
    return SymplecticMatrix(-j * m_.transpose() * j);
}

double SymplecticMatrix::symplectic_defect() const {
    const Eigen::MatrixXd j = canonical_form(dim());
    return (m_.transpose() * j * m_ - j).cwiseAbs().maxCoeff();
}

SymplecticMatrix operator*(const SymplecticMatrix& a, const SymplecticMatrix& b) {
    if (a.dim() != b.dim()) {
        throw ParameterError("cannot multiply symplectic matrices of dimension " +
                             std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
    }
    return SymplecticMatrix::trusted(a.matrix() * b.matrix());
}

GaussianState GaussianState::vacuum(int pairs) {
    if (pairs <= 0) throw ParameterError("vacuum needs at least one mode");
    const int dim = 2 * pairs;
    return {Eigen::VectorXd::Zero(dim), 0.5 * Eigen::MatrixXd::Identity(dim, dim)};
}

void GaussianState::validate(double tol) const {
    const auto n = mean.size();
    if (n == 0 || n % 2 != 0 || covariance.rows() != n || covariance.cols() != n) {
        throw ParameterError("Gaussian state dimensions are inconsistent");
    }
    if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > tol) {
        throw ParameterError("covariance is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sym(covariance);
    if (sym.eigenvalues().minCoeff() <= 0.0) {
        throw ParameterError("covariance is not positive definite");
    }
    // Robertson-Schroedinger bound: cov + (i/2) J >= 0.
    const Eigen::MatrixXcd bound =
        covariance.cast<std::complex<double>>() +
        std::complex<double>(0.0, 0.5) * canonical_form(static_cast<int>(n)).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> herm(bound);
    if (herm.eigenvalues().minCoeff() < -tol) {
        throw ParameterError("covariance violates the uncertainty bound");
    }
}

SymplecticMatrix mat_ho(double omega, double t, double m) {
    require_mass(m);
    if (omega < 0.0) throw ParameterError("oscillator frequency must be nonnegative");
    if (omega == 0.0) return mat_free(t, m);
    const double c = std::cos(omega * t);
    const double s = std::sin(omega * t);
    return pair(c, s / (m * omega), -m * omega * s, c);
}

SymplecticMatrix mat_free(double t, double m) {
    require_mass(m);
    return pair(1.0, t / m, 0.0, 1.0);
}

SymplecticMatrix mat_kick(double strength, double m) {
    require_mass(m);
    return pair(1.0, 0.0, -m * strength, 1.0);
}

SymplecticMatrix rotation_xy(double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(4, 4);
    r.topLeftCorner(2, 2) << c, -s, s, c;
    r.bottomRightCorner(2, 2) << c, -s, s, c;
    return SymplecticMatrix::trusted(std::move(r));
}

SymplecticMatrix compose(std::span<const SymplecticMatrix> segments) {
    if (segments.empty()) throw ParameterError("compose needs at least one segment");
    Eigen::MatrixXd acc = segments.front().matrix();
    for (std::size_t i = 1; i < segments.size(); ++i) {
        if (segments[i].dim() != segments.front().dim()) {
            throw ParameterError("compose: segment " + std::to_string(i) +
                                 " has mismatched dimension");
        }
        acc = acc * segments[i].matrix();
    }
    return SymplecticMatrix::trusted(std::move(acc));
}

SymplecticMatrix compose(std::initializer_list<SymplecticMatrix> segments) {
    return compose(std::span<const SymplecticMatrix>(segments.begin(), segments.size()));
}

SymplecticMatrix power(const SymplecticMatrix& m, int k) {
    if (k < 0) throw ParameterError("power must be nonnegative");
    SymplecticMatrix acc = SymplecticMatrix::identity(m.dim());
    for (int i = 0; i < k; ++i) acc = m * acc;
    return acc;
}

double distance_to_identity(const SymplecticMatrix& m) {
    return (m.matrix() - Eigen::MatrixXd::Identity(m.dim(), m.dim())).cwiseAbs().maxCoeff();
}

bool is_loop(const SymplecticMatrix& m, double tol) {
    if (!(tol > 0.0)) throw ParameterError("loop tolerance must be positive");
    return distance_to_identity(m) < tol;
}

double verify_identity_2(double lambda) {
    if (!(lambda > 0.0)) throw ParameterError("lambda must be positive");
    const SymplecticMatrix step = mat_free(lambda) * mat_kick(1.0 / lambda);
    return distance_to_identity(power(step, 6));
}

double verify_identity_3(double lambda) {
    if (!(lambda > 0.0)) throw ParameterError("lambda must be positive");
    const SymplecticMatrix step = mat_free(lambda) * mat_kick(1.0 / lambda);
    const SymplecticMatrix lhs = mat_kick(1.0 / lambda) * power(step, 5);
    return (lhs.matrix() - mat_free(-lambda).matrix()).cwiseAbs().maxCoeff();
}

GaussianState evolve_covariance(const SymplecticMatrix& m, const GaussianState& s) {
    if (m.dim() != s.dim() || s.covariance.rows() != s.dim()) {
        throw ParameterError("evolve_covariance: dimension mismatch");
    }
    GaussianState out{m.matrix() * s.mean, m.matrix() * s.covariance * m.matrix().transpose()};
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
    return out;
}

SymplecticMatrix embed_axes(const SymplecticMatrix& ux, const SymplecticMatrix& uy,
                            const SymplecticMatrix& uz) {
    if (ux.dim() != 2 || uy.dim() != 2 || uz.dim() != 2) {
        throw ParameterError("embed_axes expects 2x2 blocks");
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(6, 6);
    const SymplecticMatrix* blocks[3] = {&ux, &uy, &uz};
    for (int a = 0; a < 3; ++a) {
        const auto& b = blocks[a]->matrix();
        m(a, a) = b(0, 0);
        m(a, a + 3) = b(0, 1);
        m(a + 3, a) = b(1, 0);
        m(a + 3, a + 3) = b(1, 1);
    }
    return SymplecticMatrix::trusted(std::move(m));
}

SymplecticMatrix embed_radial(const SymplecticMatrix& radial) {
    if (radial.dim() != 4) throw ParameterError("embed_radial expects a 4x4 matrix");
    // (x, y, px, py) -> indices (0, 1, 3, 4) of (x, y, z, px, py, pz)
    constexpr int idx[4] = {0, 1, 3, 4};
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(6, 6);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) m(idx[i], idx[j]) = radial(i, j);
    }
    return SymplecticMatrix::trusted(std::move(m));
}

}  // namespace penning
