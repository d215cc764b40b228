#pragma once

// CSV and JSON encodings of schedules, solver output, stability maps and phases.
// Numbers in CSV use '.' as decimal separator and 10 significant digits.

#include "penning/floquet.hpp"
#include "penning/pulse_solver.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace penning {

std::string format_number(double v);

nlohmann::json matrix_json(const SymplecticMatrix& m);

/// {"t1","t2","F1","F2","tau","u_x","u_z","class","lambda1","lambda2"}
nlohmann::json schedule_json(const TrapConfig& cfg, const KickSchedule& sched, double classifyTol = 1e-6);

nlohmann::json solution_json(const TrapConfig& cfg, const SolutionRecord& rec);

inline constexpr const char* kSolutionCsvHeader =
    "omega0_t1,omega0_t2,F1_over_omega0,F2_over_omega0,m_omega0_lambda1,lambda2_or_m_omega0_lambda2,kind,residual";

std::string solutions_csv(const TrapConfig& cfg, const std::vector<SolutionRecord>& records);

inline constexpr const char* kRegionCsvHeader = "alpha,alpha0,class,max_re,min_gap";

std::string region_csv(const std::vector<RegionPoint>& points);

/// {"omegas":[...], "signs":[...]}
nlohmann::json mode_spectrum_json(const ModeSpectrum& modes);

}  // namespace penning
