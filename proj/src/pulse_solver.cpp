#include "penning/pulse_solver.hpp"

#include "penning/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

namespace penning {

namespace {

double norm(const std::array<double, 4>& r) {
    return std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2] + r[3] * r[3]);
}

bool feasible(const DimensionlessSchedule& x) {
    constexpr double tau = 4.0 * std::numbers::pi;
    return x[0] > 0.0 && x[0] < x[1] && x[1] < tau && std::isfinite(x[2]) && std::isfinite(x[3]);
}

double unit_interval(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

bool lex_less(const DimensionlessSchedule& a, const DimensionlessSchedule& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

std::string_view to_string(TargetClass kind) {
    switch (kind) {
        case TargetClass::Fourier3D: return "fourier3d";
        case TargetClass::FourierZScaleXY: return "fourierz-scalexy";
        case TargetClass::Scale3D: return "scale3d";
    }
    return "scale3d";
}

std::optional<TargetClass> parse_target_class(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (auto k : {TargetClass::Fourier3D, TargetClass::FourierZScaleXY, TargetClass::Scale3D}) {
        if (lower == to_string(k)) return k;
    }
    return std::nullopt;
}

TransformKind as_transform_kind(TargetClass kind) {
    switch (kind) {
        case TargetClass::Fourier3D: return TransformKind::Fourier3D;
        case TargetClass::FourierZScaleXY: return TransformKind::FourierZScaleXY;
        case TargetClass::Scale3D: return TransformKind::Scale3D;
    }
    return TransformKind::Other;
}

DimensionlessSchedule to_dimensionless(const TrapConfig& cfg, const KickSchedule& s) {
    const double w0 = cfg.omega0();
    return {w0 * s.t1, w0 * s.t2, s.F1 / w0, s.F2 / w0};
}

KickSchedule from_dimensionless(const TrapConfig& cfg, const DimensionlessSchedule& x) {
    return schedule_from_dimensionless(cfg, x[0], x[1], x[2], x[3]);
}

std::array<double, 4> residual(TargetClass kind, const KickSchedule& sched, const TrapConfig& cfg) {
    const auto [ux, uz] = build_kicked_matrices(cfg, sched);
    const double w0 = cfg.omega0();
    const double mw = cfg.m() * w0;
    // Off-diagonal entries carry units; scale them to the dimensionless groups.
    auto diag = [](const SymplecticMatrix& u) { return std::array<double, 2>{u(0, 0), u(1, 1)}; };
    auto off = [&](const SymplecticMatrix& u) {
        return std::array<double, 2>{mw * u(0, 1), u(1, 0) / mw};
    };
    std::array<double, 2> x;
    std::array<double, 2> z;
    switch (kind) {
        case TargetClass::Fourier3D:
            x = diag(ux);
            z = diag(uz);
            break;
        case TargetClass::FourierZScaleXY:
            x = off(ux);
            z = diag(uz);
            break;
        case TargetClass::Scale3D:
            x = off(ux);
            z = off(uz);
            break;
    }
    return {x[0], x[1], z[0], z[1]};
}

PolishResult newton_polish(TargetClass kind, const KickSchedule& seed, const TrapConfig& cfg,
                           const NewtonOptions& opts) {
    seed.validate();
    DimensionlessSchedule x = to_dimensionless(cfg, seed);
    auto eval = [&](const DimensionlessSchedule& p) {
        return residual(kind, from_dimensionless(cfg, p), cfg);
    };

    PolishResult out;
    std::array<double, 4> r = eval(x);
    double rn = norm(r);
    int iter = 0;
    for (; rn >= opts.tolerance; ++iter) {
        if (iter >= opts.maxIter) {
            out.iterations = iter;
            out.failure = "no convergence within " + std::to_string(opts.maxIter) + " iterations";
            return out;
        }
        Eigen::Matrix4d jac;
        for (int j = 0; j < 4; ++j) {
            DimensionlessSchedule xp = x;
            xp[j] += opts.fdStep;
            if (!feasible(xp)) xp[j] = x[j] - opts.fdStep;
            const double h = xp[j] - x[j];
            if (!feasible(xp)) {
                out.iterations = iter;
                out.failure = "iterate left the feasible region";
                return out;
            }
            const auto rp = eval(xp);
            for (int i = 0; i < 4; ++i) jac(i, j) = (rp[i] - r[i]) / h;
        }
        const Eigen::Vector4d rhs(-r[0], -r[1], -r[2], -r[3]);
        const Eigen::Vector4d step = jac.completeOrthogonalDecomposition().solve(rhs);
        if (!step.allFinite()) {
            out.iterations = iter;
            out.failure = "singular Jacobian";
            return out;
        }

        double scale = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opts.maxHalvings; ++h, scale *= 0.5) {
            DimensionlessSchedule trial = x;
            for (int j = 0; j < 4; ++j) trial[j] += scale * step[j];
            if (!feasible(trial)) continue;
            const auto rt = eval(trial);
            const double tn = norm(rt);
            if (tn < rn) {
                x = trial;
                r = rt;
                rn = tn;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            out.iterations = iter + 1;
            out.failure = "step halving failed to reduce the residual";
            return out;
        }
    }

    SolutionRecord rec;
    rec.schedule = from_dimensionless(cfg, x);
    rec.kind = kind;
    rec.residualNorm = rn;
    rec.iterations = iter;
    const auto [ux, uz] = build_kicked_matrices(cfg, rec.schedule);
    const auto cls = classify_transformation(ux, uz, 1e-8, cfg.m() * cfg.omega0());
    rec.lambda1 = cls.lambda1;
    rec.lambda2 = cls.lambda2;
    out.iterations = iter;
    out.solution = rec;
    return out;
}

std::vector<DimensionlessSchedule> draw_starts(int nStarts, std::uint64_t seed, double fMax) {
    if (nStarts < 1) throw ParameterError("multi-start solve needs at least one start");
    if (!(fMax > 0.0)) throw ParameterError("kick bound must be positive");
    constexpr double tau = 4.0 * std::numbers::pi;
    std::mt19937_64 gen(seed);
    std::vector<DimensionlessSchedule> starts;
    starts.reserve(static_cast<std::size_t>(nStarts));
    while (static_cast<int>(starts.size()) < nStarts) {
        double a = tau * unit_interval(gen);
        double b = tau * unit_interval(gen);
        const double f1 = fMax * (2.0 * unit_interval(gen) - 1.0);
        const double f2 = fMax * (2.0 * unit_interval(gen) - 1.0);
        if (a > b) std::swap(a, b);
        DimensionlessSchedule s{a, b, f1, f2};
        if (feasible(s)) starts.push_back(s);
    }
    return starts;
}

std::vector<SolutionRecord> multi_start_solve(TargetClass kind, const TrapConfig& cfg,
                                              const MultiStartOptions& opts) {
    const auto starts = draw_starts(opts.nStarts, opts.seed, opts.fMax);
    std::vector<std::optional<SolutionRecord>> results(starts.size());

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < starts.size(); i = next++) {
            auto res = newton_polish(kind, from_dimensionless(cfg, starts[i]), cfg, opts.newton);
            if (res.solution) {
                res.solution->startIndex = static_cast<int>(i);
                results[i] = std::move(res.solution);
            }
        }
    };
    unsigned workers = opts.workers > 0 ? static_cast<unsigned>(opts.workers)
                                        : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(starts.size()));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    std::vector<SolutionRecord> found;
    for (auto& r : results) {
        if (r) found.push_back(std::move(*r));
    }
    return dedup_solutions(std::move(found), cfg, opts.dedupTol);
}

std::vector<SolutionRecord> dedup_solutions(std::vector<SolutionRecord> records, const TrapConfig& cfg,
                                            double tol) {
    if (!(tol > 0.0)) throw ParameterError("dedup tolerance must be positive");
    auto key = [&](const SolutionRecord& r) { return to_dimensionless(cfg, r.schedule); };
    auto better = [](const SolutionRecord& a, const SolutionRecord& b) {
        if (a.residualNorm != b.residualNorm) return a.residualNorm < b.residualNorm;
        return a.startIndex < b.startIndex;
    };
    // Fixed processing order makes the cluster representatives independent of input order.
    std::sort(records.begin(), records.end(), [&](const SolutionRecord& a, const SolutionRecord& b) {
        const auto ka = key(a);
        const auto kb = key(b);
        if (ka != kb) return lex_less(ka, kb);
        return better(a, b);
    });

    std::vector<SolutionRecord> kept;
    std::vector<DimensionlessSchedule> anchors;
    for (auto& rec : records) {
        const auto k = key(rec);
        bool merged = false;
        for (std::size_t i = 0; i < kept.size(); ++i) {
            bool close = true;
            for (int j = 0; j < 4; ++j) close = close && std::abs(k[j] - anchors[i][j]) <= tol;
            if (close) {
                if (better(rec, kept[i])) kept[i] = rec;
                merged = true;
                break;
            }
        }
        if (!merged) {
            kept.push_back(rec);
            anchors.push_back(k);
        }
    }
    std::sort(kept.begin(), kept.end(), [&](const SolutionRecord& a, const SolutionRecord& b) {
        return lex_less(key(a), key(b));
    });
    return kept;
}

const std::vector<ReferenceRow>& reference_rows(TargetClass kind) {
    static const std::vector<ReferenceRow> fourier3d = {
        {{5.3131, 7.2533, 1.5165, 1.5165}, 3.5238, -39.0332},
        {{5.3131, 7.2533, -1.5165, -1.5165}, -0.6046, 6.6970},
        {{0.9701, 11.5962, 1.5165, 1.5165}, 0.6046, -2.3891},
        {{0.9701, 11.5962, -1.5165, -1.5165}, -3.5238, 0.4099},
    };
    static const std::vector<ReferenceRow> fourierz_scalexy = {
        {{1.2094, 5.0738, -2.1381, -2.1381}, -6.3874, -10.2781},
        {{1.9322, 4.3510, -2.1381, -2.1381}, -1.0959, -3.6353},
        {{7.4926, 11.3569, -2.1381, -2.1381}, -6.3874, -0.0973},
        {{8.2153, 10.6342, -2.1381, -2.1381}, -1.0959, -0.2751},
    };
    static const std::vector<ReferenceRow> scale3d = {
        {{1.2363, 8.4896, -1.1589, 0.7524}, 0.4712, 5.0901},
        {{2.2064, 7.5194, -0.7524, 1.1589}, 2.1222, 5.0901},
        {{4.0768, 11.3301, 0.7524, -1.1589}, 2.1222, 0.1965},
        {{5.0469, 10.3600, 1.1589, -0.7524}, 0.4712, 0.1965},
    };
    switch (kind) {
        case TargetClass::Fourier3D: return fourier3d;
        case TargetClass::FourierZScaleXY: return fourierz_scalexy;
        case TargetClass::Scale3D: return scale3d;
    }
    return scale3d;
}

std::vector<RowMatch> match_reference_rows(TargetClass kind, const std::vector<SolutionRecord>& solutions,
                                           const TrapConfig& cfg, double paramTol, double lambdaRelTol) {
    std::vector<RowMatch> out;
    for (const auto& row : reference_rows(kind)) {
        RowMatch m{row, std::nullopt};
        for (const auto& s : solutions) {
            const auto x = to_dimensionless(cfg, s.schedule);
            bool ok = true;
            for (int j = 0; j < 4; ++j) ok = ok && std::abs(x[j] - row.params[j]) <= paramTol;
            ok = ok && std::abs(s.lambda1 - row.lambda1) <= lambdaRelTol * std::abs(row.lambda1);
            ok = ok && std::abs(s.lambda2 - row.lambda2) <= lambdaRelTol * std::abs(row.lambda2);
            if (ok && (!m.match || s.residualNorm < m.match->residualNorm)) m.match = s;
        }
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace penning
