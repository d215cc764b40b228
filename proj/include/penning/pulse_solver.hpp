#pragma once

// Inverse design of the two-kick schedule: find (t1, t2, F', F'') such that
// the kicked tau = 2T loop realizes a requested transformation class.

#include "penning/penning_model.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace penning {

enum class TargetClass { Fourier3D, FourierZScaleXY, Scale3D };

std::string_view to_string(TargetClass kind);
/// Accepts "fourier3d", "fourierz-scalexy", "scale3d" (case-insensitive).
std::optional<TargetClass> parse_target_class(std::string_view name);
TransformKind as_transform_kind(TargetClass kind);

/// Point in the search space (omega0 t1, omega0 t2, F'/omega0, F''/omega0).
using DimensionlessSchedule = std::array<double, 4>;

DimensionlessSchedule to_dimensionless(const TrapConfig& cfg, const KickSchedule& sched);
KickSchedule from_dimensionless(const TrapConfig& cfg, const DimensionlessSchedule& x);

struct SolutionRecord {
    KickSchedule schedule;
    TargetClass kind = TargetClass::Scale3D;
    double lambda1 = 0.0;  ///< table convention, see Classification
    double lambda2 = 0.0;
    double residualNorm = 0.0;
    int startIndex = -1;
    int iterations = 0;
};

/// Entries of the 2x2 blocks that vanish for the target form: the diagonal of
/// a Fourier block, the off-diagonal of a scale block. Order is
/// [u_x(a), u_x(b), u_z(a), u_z(b)].
std::array<double, 4> residual(TargetClass kind, const KickSchedule& sched, const TrapConfig& cfg);

struct NewtonOptions {
    int maxIter = 100;
    double tolerance = 1e-12;
    double fdStep = 1e-7;
    int maxHalvings = 20;
};

struct PolishResult {
    std::optional<SolutionRecord> solution;
    int iterations = 0;
    std::string failure;  ///< empty on success
};

/// Damped Newton iteration on the residual with a forward-difference
/// Jacobian. Iterates stay inside 0 < t1 < t2 < tau.
PolishResult newton_polish(TargetClass kind, const KickSchedule& seed, const TrapConfig& cfg,
                           const NewtonOptions& opts = {});

struct MultiStartOptions {
    int nStarts = 2000;
    std::uint64_t seed = 42;
    double fMax = 10.0;   ///< starts draw F/omega0 uniformly in [-fMax, fMax]
    int workers = 0;      ///< 0 = hardware concurrency
    double dedupTol = 1e-6;
    NewtonOptions newton;
};

/// Seeded start points, indexed; reproducible for a given (nStarts, seed, fMax).
std::vector<DimensionlessSchedule> draw_starts(int nStarts, std::uint64_t seed, double fMax);

/// Polishes every start and returns deduplicated, sorted roots. The result
/// does not depend on the number of workers.
std::vector<SolutionRecord> multi_start_solve(TargetClass kind, const TrapConfig& cfg,
                                              const MultiStartOptions& opts = {});

/// Collapses records whose four dimensionless parameters agree within tol,
/// keeping the lowest-residual one, and sorts by (t1, t2, F', F'').
std::vector<SolutionRecord> dedup_solutions(std::vector<SolutionRecord> records, const TrapConfig& cfg,
                                            double tol = 1e-6);

/// Printed reference rows for each target class: (omega0 t1, omega0 t2,
/// F'/omega0, F''/omega0, lambda1 column, lambda2 column).
struct ReferenceRow {
    DimensionlessSchedule params;
    double lambda1;
    double lambda2;
};
const std::vector<ReferenceRow>& reference_rows(TargetClass kind);

struct RowMatch {
    ReferenceRow row;
    std::optional<SolutionRecord> match;
};

/// Matches each reference row against solutions: parameters within paramTol
/// and both lambdas within relative lambdaRelTol.
std::vector<RowMatch> match_reference_rows(TargetClass kind, const std::vector<SolutionRecord>& solutions,
                                           const TrapConfig& cfg, double paramTol = 1e-3,
                                           double lambdaRelTol = 2e-3);

}  // namespace penning
