#include "penning/format.hpp"

#include <cstdio>
#include <sstream>

namespace penning {

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

nlohmann::json matrix_json(const SymplecticMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < m.dim(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < m.dim(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json schedule_json(const TrapConfig& cfg, const KickSchedule& sched, double classifyTol) {
    const auto [ux, uz] = build_kicked_matrices(cfg, sched);
    const auto cls = classify_transformation(ux, uz, classifyTol, cfg.m() * cfg.omega0());
    nlohmann::json j;
    j["t1"] = sched.t1;
    j["t2"] = sched.t2;
    j["F1"] = sched.F1;
    j["F2"] = sched.F2;
    j["tau"] = sched.tau;
    j["u_x"] = matrix_json(ux);
    j["u_z"] = matrix_json(uz);
    j["class"] = std::string(to_string(cls.kind));
    if (cls.kind == TransformKind::Other) {
        j["lambda1"] = nullptr;
        j["lambda2"] = nullptr;
    } else {
        j["lambda1"] = cls.lambda1;
        j["lambda2"] = cls.lambda2;
    }
    return j;
}

nlohmann::json solution_json(const TrapConfig& cfg, const SolutionRecord& rec) {
    nlohmann::json j = schedule_json(cfg, rec.schedule, 1e-8);
    j["kind"] = std::string(to_string(rec.kind));
    j["lambda1"] = rec.lambda1;
    j["lambda2"] = rec.lambda2;
    j["residual"] = rec.residualNorm;
    j["startIndex"] = rec.startIndex;
    return j;
}

std::string solutions_csv(const TrapConfig& cfg, const std::vector<SolutionRecord>& records) {
    std::ostringstream os;
    os << kSolutionCsvHeader << '\n';
    for (const auto& r : records) {
        const auto x = to_dimensionless(cfg, r.schedule);
        os << format_number(x[0]) << ',' << format_number(x[1]) << ',' << format_number(x[2]) << ','
           << format_number(x[3]) << ',' << format_number(r.lambda1) << ',' << format_number(r.lambda2) << ','
           << to_string(r.kind) << ',' << format_number(r.residualNorm) << '\n';
    }
    return os.str();
}

std::string region_csv(const std::vector<RegionPoint>& points) {
    std::ostringstream os;
    os << kRegionCsvHeader << '\n';
    for (const auto& p : points) {
        os << format_number(p.alpha) << ',' << format_number(p.alpha0) << ',' << to_string(p.cls.kind) << ','
           << format_number(p.cls.maxRealPart) << ',' << format_number(p.cls.minFrequencyGap) << '\n';
    }
    return os.str();
}

nlohmann::json mode_spectrum_json(const ModeSpectrum& modes) {
    return {{"omegas", modes.omegas}, {"signs", modes.signs}};
}

}  // namespace penning
