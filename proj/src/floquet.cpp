#include "penning/floquet.hpp"

#include "penning/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace penning {

namespace {

using Mat6 = Eigen::Matrix<double, 6, 6>;

Mat6 j6() { return canonical_form(6); }

double grid_value(double lo, double hi, int n, int i) {
    return n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

}  // namespace

void RotatingFieldConfig::validate() const {
    if (!(alpha >= 0.0) || !(alpha0 > 0.0) || !(w > 0.0) || !std::isfinite(alpha) ||
        !std::isfinite(alpha0) || !std::isfinite(w)) {
        throw ParameterError("rotating-field parameters need alpha >= 0, alpha0 > 0, w > 0");
    }
}

RotatingFieldConfig RotatingFieldConfig::from_physical(const PhysicalRotatingField& p) {
    if (!(p.omega > 0.0) || !(p.m > 0.0)) {
        throw ParameterError("rotation rate and mass must be positive");
    }
    RotatingFieldConfig c{p.omegaB / (2.0 * p.omega), p.omegaC / (2.0 * p.omega), p.omega0 / p.omega};
    c.validate();
    return c;
}

RotatingFieldConfig RotatingFieldConfig::loop_constrained(double alpha, double alpha0) {
    RotatingFieldConfig c{alpha, alpha0, 4.0 * alpha0 / 3.0};
    c.validate();
    return c;
}

Mat6 hessian_G(const RotatingFieldConfig& cfg) {
    cfg.validate();
    const double a = cfg.alpha;
    const double a0 = cfg.alpha0;
    const double w2 = cfg.w * cfg.w;

    // Kinetic momentum p + (e/2c) r x B(0) = p + C r with B(0) = (B, 0, B0).
    Eigen::Matrix3d C;
    C << 0.0, a0, 0.0,
        -a0, 0.0, a,
        0.0, -a, 0.0;
    // L_z = p^T E r
    Eigen::Matrix3d E;
    E << 0.0, -1.0, 0.0,
        1.0, 0.0, 0.0,
        0.0, 0.0, 0.0;
    const Eigen::Vector3d trap(-0.5 * w2, -0.5 * w2, w2);

    const Eigen::Matrix3d coupling = C - E;  // minimal coupling minus the frame rotation
    Mat6 h;
    h.topLeftCorner<3, 3>() = C.transpose() * C + Eigen::Matrix3d(trap.asDiagonal());
    h.topRightCorner<3, 3>() = coupling.transpose();
    h.bottomLeftCorner<3, 3>() = coupling;
    h.bottomRightCorner<3, 3>().setIdentity();
    return h;
}

Mat6 angular_momentum_form() {
    Eigen::Matrix3d E;
    E << 0.0, -1.0, 0.0,
        1.0, 0.0, 0.0,
        0.0, 0.0, 0.0;
    Mat6 k = Mat6::Zero();
    k.topRightCorner<3, 3>() = E.transpose();
    k.bottomLeftCorner<3, 3>() = E;
    return k;
}

Mat6 lambda_matrix(const RotatingFieldConfig& cfg) { return j6() * hessian_G(cfg); }

std::array<std::complex<double>, 6> lambda_spectrum(const RotatingFieldConfig& cfg) {
    Eigen::EigenSolver<Mat6> es(lambda_matrix(cfg), false);
    std::array<std::complex<double>, 6> out;
    for (int i = 0; i < 6; ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
    return out;
}

std::string_view to_string(Stability s) {
    switch (s) {
        case Stability::Confined: return "Confined";
        case Stability::Deconfined: return "Deconfined";
        case Stability::Marginal: return "Marginal";
    }
    return "Deconfined";
}

StabilityClass classify_stability(const RotatingFieldConfig& cfg, const StabilityOptions& opts) {
    if (!(opts.epsStab > 0.0) || !(opts.deltaGap > 0.0)) {
        throw ParameterError("stability tolerances must be positive");
    }
    const auto ev = lambda_spectrum(cfg);
    StabilityClass out;
    std::array<double, 6> im{};
    for (std::size_t i = 0; i < 6; ++i) {
        out.maxRealPart = std::max(out.maxRealPart, std::abs(ev[i].real()));
        im[i] = ev[i].imag();
    }
    std::sort(im.begin(), im.end(), std::greater<>());
    const double w1 = im[0], w2 = im[1], w3 = im[2];
    out.minFrequencyGap = std::min({w1 - w2, w2 - w3, 2.0 * w3});
    if (out.maxRealPart >= opts.epsStab) {
        out.kind = Stability::Deconfined;
    } else if (out.minFrequencyGap > opts.deltaGap) {
        out.kind = Stability::Confined;
    } else {
        out.kind = Stability::Marginal;
    }
    return out;
}

ModeSpectrum normal_modes(const RotatingFieldConfig& cfg, const StabilityOptions& opts) {
    const auto cls = classify_stability(cfg, opts);
    if (cls.kind != Stability::Confined) {
        throw PreconditionError("normal modes need a Confined configuration (got " +
                                std::string(to_string(cls.kind)) +
                                ", max |Re| = " + std::to_string(cls.maxRealPart) +
                                ", min gap = " + std::to_string(cls.minFrequencyGap) + ")");
    }
    const Mat6 lambda = lambda_matrix(cfg);
    const Mat6 j = j6();
    Eigen::EigenSolver<Mat6> es(lambda, true);

    std::array<int, 6> order{0, 1, 2, 3, 4, 5};
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return es.eigenvalues()[a].imag() > es.eigenvalues()[b].imag();
    });
    std::array<int, 3> modes{order[2], order[1], order[0]};  // ascending frequency

    ModeSpectrum out;
    Mat6 s = Mat6::Zero();
    for (int i = 0; i < 3; ++i) {
        const int idx = modes[static_cast<std::size_t>(i)];
        const Eigen::Matrix<std::complex<double>, 6, 1> v = es.eigenvectors().col(idx);
        const Eigen::Matrix<double, 6, 1> re = v.real();
        const Eigen::Matrix<double, 6, 1> im = v.imag();
        const double form = re.dot(j * im);
        if (std::abs(form) < 1e-12) {
            throw ConditioningError("mode " + std::to_string(i) + " has a null symplectic norm");
        }
        const int eps = form > 0.0 ? 1 : -1;
        const double scale = 1.0 / std::sqrt(std::abs(form));
        out.omegas[static_cast<std::size_t>(i)] = es.eigenvalues()[idx].imag();
        out.signs[static_cast<std::size_t>(i)] = eps;
        s.col(i) = scale * re;
        s.col(i + 3) = (eps * scale) * im;
    }
    out.S = SymplecticMatrix::trusted(s);

    const double defect = out.S.symplectic_defect();
    const double recon = (lambda * s - s * mode_generator(out)).cwiseAbs().maxCoeff();
    if (defect > 1e-8 || recon > 1e-8) {
        throw ConditioningError("normal-mode basis inaccurate: symplectic defect " +
                                std::to_string(defect) + ", reconstruction error " +
                                std::to_string(recon) + ", min gap " +
                                std::to_string(cls.minFrequencyGap));
    }
    return out;
}

Mat6 mode_generator(const ModeSpectrum& modes) {
    Mat6 g = Mat6::Zero();
    for (int i = 0; i < 3; ++i) {
        const double rate = modes.signs[static_cast<std::size_t>(i)] * modes.omegas[static_cast<std::size_t>(i)];
        // dQ/dt = rate P, dP/dt = -rate Q
        g(i, i + 3) = rate;
        g(i + 3, i) = -rate;
    }
    return g;
}

double floquet_energy(const ModeSpectrum& modes, const std::array<int, 3>& n) {
    double e = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        if (n[i] < 0) throw ParameterError("occupation numbers must be nonnegative");
        e += modes.signs[i] * modes.omegas[i] * n[i] + 0.5 * modes.omegas[i];
    }
    return e;
}

std::vector<RegionPoint> region_map(const RegionGrid& grid, const StabilityOptions& opts, int workers) {
    if (grid.nAlpha <= 0 || grid.nAlpha0 <= 0) throw ParameterError("grid sizes must be positive");
    if (!(grid.alphaMax > grid.alphaMin) || !(grid.alpha0Max > grid.alpha0Min)) {
        throw ParameterError("grid ranges must have positive length");
    }
    const std::size_t total = static_cast<std::size_t>(grid.nAlpha) * static_cast<std::size_t>(grid.nAlpha0);
    std::vector<RegionPoint> points(total);

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k = next++; k < total; k = next++) {
            const int i = static_cast<int>(k / static_cast<std::size_t>(grid.nAlpha0));
            const int j = static_cast<int>(k % static_cast<std::size_t>(grid.nAlpha0));
            RegionPoint& p = points[k];
            p.alpha = grid_value(grid.alphaMin, grid.alphaMax, grid.nAlpha, i);
            p.alpha0 = grid_value(grid.alpha0Min, grid.alpha0Max, grid.nAlpha0, j);
            const RotatingFieldConfig cfg = grid.loopConstraint
                                                ? RotatingFieldConfig::loop_constrained(p.alpha, p.alpha0)
                                                : RotatingFieldConfig{p.alpha, p.alpha0, grid.w};
            p.cls = classify_stability(cfg, opts);
            if (p.cls.kind == Stability::Confined) {
                try {
                    p.signature = normal_modes(cfg, opts).signs;
                } catch (const ConditioningError&) {
                    p.signature = {0, 0, 0};
                }
            }
        }
    };
    unsigned n = workers > 0 ? static_cast<unsigned>(workers) : std::max(1u, std::thread::hardware_concurrency());
    n = std::min<unsigned>(n, static_cast<unsigned>(total));
    if (n <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
    }
    return points;
}

ComponentLabels confined_components(const std::vector<RegionPoint>& points, const RegionGrid& grid,
                                    bool matchSignature) {
    const int na = grid.nAlpha;
    const int nb = grid.nAlpha0;
    if (static_cast<std::size_t>(na) * static_cast<std::size_t>(nb) != points.size()) {
        throw ParameterError("grid shape does not match the number of points");
    }
    ComponentLabels out;
    out.labels.assign(points.size(), 0);
    auto confined = [&](std::size_t k) { return points[k].cls.kind == Stability::Confined; };
    std::vector<std::size_t> stack;
    for (std::size_t seed = 0; seed < points.size(); ++seed) {
        if (!confined(seed) || out.labels[seed] != 0) continue;
        const int label = ++out.count;
        out.labels[seed] = label;
        stack.push_back(seed);
        while (!stack.empty()) {
            const std::size_t k = stack.back();
            stack.pop_back();
            const int i = static_cast<int>(k) / nb;
            const int j = static_cast<int>(k) % nb;
            const int di[4] = {1, -1, 0, 0};
            const int dj[4] = {0, 0, 1, -1};
            for (int d = 0; d < 4; ++d) {
                const int ii = i + di[d];
                const int jj = j + dj[d];
                if (ii < 0 || ii >= na || jj < 0 || jj >= nb) continue;
                const std::size_t q = static_cast<std::size_t>(ii * nb + jj);
                if (!confined(q) || out.labels[q] != 0) continue;
                if (matchSignature && points[q].signature != points[k].signature) continue;
                out.labels[q] = label;
                stack.push_back(q);
            }
        }
    }
    return out;
}

}  // namespace penning
