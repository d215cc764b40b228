#include "penning/cli.hpp"

#include "penning/errors.hpp"
#include "penning/floquet.hpp"
#include "penning/format.hpp"
#include "penning/phases.hpp"
#include "penning/pulse_solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace penning::cli {

namespace {

using nlohmann::json;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << contents;
    f.close();
    if (!f) throw IoError("failed writing '" + path + "'");
}

void write_manifest(const std::string& output, const std::string& command, const json& params,
                    const std::vector<std::string>& argv, std::optional<std::uint64_t> seed = std::nullopt) {
    json m;
    m["command"] = command;
    m["parameters"] = params;
    m["seed"] = seed ? json(*seed) : json(nullptr);
    m["version"] = kToolVersion;
    m["outputs"] = json::array({output});
    m["argv"] = argv;
    write_file(output + ".manifest.json", m.dump(2) + "\n");
}

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    int n = 0;
};

Range parse_range(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 3) throw UsageError("range must be lo:hi:count, got '" + text + "'");
    Range r;
    try {
        std::size_t pos = 0;
        r.lo = std::stod(parts[0], &pos);
        if (pos != parts[0].size()) throw std::invalid_argument(parts[0]);
        r.hi = std::stod(parts[1], &pos);
        if (pos != parts[1].size()) throw std::invalid_argument(parts[1]);
        r.n = std::stoi(parts[2], &pos);
        if (pos != parts[2].size()) throw std::invalid_argument(parts[2]);
    } catch (const std::logic_error&) {
        throw UsageError("range must be lo:hi:count, got '" + text + "'");
    }
    if (!(r.hi > r.lo) || r.n <= 0) throw UsageError("range '" + text + "' must have lo < hi and count > 0");
    return r;
}

std::array<int, 3> parse_occupation(const std::vector<int>& v) {
    if (v.size() != 3) throw UsageError("--n takes three comma-separated occupation numbers");
    for (int x : v) {
        if (x < 0) throw UsageError("occupation numbers must be nonnegative");
    }
    return {v[0], v[1], v[2]};
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
    std::vector<double> lambdas;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
    std::vector<double> lambdas = a.lambdas.empty() ? std::vector<double>{1.0} : a.lambdas;
    for (double l : lambdas) {
        if (!(l > 0.0) || !std::isfinite(l)) throw UsageError("lambda must be positive, got " + format_number(l));
    }
    bool ok = true;
    for (const char* name : {"identity2", "identity3"}) {
        for (double l : lambdas) {
            const double r = name[8] == '2' ? verify_identity_2(l) : verify_identity_3(l);
            const bool pass = r < 1e-10;
            ok = ok && pass;
            out << name << " lambda=" << format_number(l) << " residual=" << format_number(r) << ' '
                << (pass ? "PASS" : "FAIL") << '\n';
        }
    }
    return ok ? kOk : kDomain;
}

// ---------------------------------------------------------------- loops

struct LoopsArgs {
    std::vector<std::string> ratios;
    int maxPeriods = 64;
};

int cmd_loops(const LoopsArgs& a, std::ostream& out) {
    std::vector<std::string> ratios = a.ratios.empty() ? std::vector<std::string>{"3/2", "9/4", "33/8"} : a.ratios;
    if (a.maxPeriods < 1) throw UsageError("--max-periods must be at least 1");
    bool all_ok = true;
    out << "omegaC/omega0 omegaRho/omega0 tau/T\n";
    for (const auto& text : ratios) {
        Rational c;
        try {
            c = Rational::parse(text);
        } catch (const ParameterError& e) {
            throw UsageError(e.what());
        }
        try {
            const TrapConfig cfg = make_trap(1.0, 1.0, c.value());
            const auto rho = exact_sqrt((c * c - Rational(2)) / Rational(4));
            const auto k = find_loop_time(cfg, a.maxPeriods, 1e-9);
            out << c.str() << ' ' << (rho ? rho->str() : "irrational(" + format_number(cfg.omegaRho()) + ")") << ' '
                << (k ? std::to_string(*k) : "none") << '\n';
        } catch (const TrapRegimeError& e) {
            all_ok = false;
            out << c.str() << " error: " << e.what() << '\n';
        }
    }
    return all_ok ? kOk : kDomain;
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
    std::string kind;
    int starts = 2000;
    std::uint64_t seed = 42;
    double fMax = 10.0;
    int workers = 0;
    std::string output;
    std::string jsonOutput;
};

int cmd_solve(const SolveArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
    const auto kind = parse_target_class(a.kind);
    if (!kind) throw UsageError("--kind must be one of fourier3d, fourierz-scalexy, scale3d");
    if (a.starts < 1) throw UsageError("--starts must be at least 1");
    if (!(a.fMax > 0.0)) throw UsageError("--fmax must be positive");

    const TrapConfig cfg = two_period_loop_trap();
    MultiStartOptions opts;
    opts.nStarts = a.starts;
    opts.seed = a.seed;
    opts.fMax = a.fMax;
    opts.workers = a.workers;
    const auto solutions = multi_start_solve(*kind, cfg, opts);

    const std::string csv = solutions_csv(cfg, solutions);
    const json params = {{"kind", std::string(to_string(*kind))}, {"starts", a.starts}, {"fmax", a.fMax}};
    if (a.output.empty()) {
        out << csv;
    } else {
        write_file(a.output, csv);
        write_manifest(a.output, "solve", params, argv, a.seed);
    }
    if (!a.jsonOutput.empty()) {
        json arr = json::array();
        for (const auto& s : solutions) arr.push_back(solution_json(cfg, s));
        write_file(a.jsonOutput, arr.dump(2) + "\n");
    }

    const auto matches = match_reference_rows(*kind, solutions, cfg);
    int found = 0;
    for (const auto& m : matches) {
        const auto& p = m.row.params;
        out << (m.match ? "found   " : "missing ") << format_number(p[0]) << ' ' << format_number(p[1]) << ' '
            << format_number(p[2]) << ' ' << format_number(p[3]) << '\n';
        found += m.match ? 1 : 0;
    }
    out << solutions.size() << " distinct solutions; " << found << '/' << matches.size()
        << " reference table rows matched\n";
    return kOk;
}

// ---------------------------------------------------------------- map

struct MapArgs {
    std::string alpha = "0:3:200";
    std::string alpha0 = "0.1:3:200";
    bool loopConstraint = false;
    double w = 1.0;
    int workers = 0;
    std::string output;
};

int cmd_map(const MapArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
    const Range ra = parse_range(a.alpha);
    const Range rb = parse_range(a.alpha0);
    if (ra.lo < 0.0 || rb.lo <= 0.0) throw UsageError("alpha must be >= 0 and alpha0 > 0");
    if (!a.loopConstraint && !(a.w > 0.0)) throw UsageError("--w must be positive");
    RegionGrid grid{ra.lo, ra.hi, rb.lo, rb.hi, ra.n, rb.n, a.loopConstraint, a.w};
    const auto points = region_map(grid, {}, a.workers);
    const std::string csv = region_csv(points);

    json params = {{"alpha", a.alpha}, {"alpha0", a.alpha0}, {"loop_constraint", a.loopConstraint}};
    if (!a.loopConstraint) params["w"] = a.w;
    if (a.output.empty()) {
        out << csv;
        return kOk;
    }
    write_file(a.output, csv);
    write_manifest(a.output, "map", params, argv);

    std::size_t counts[3] = {0, 0, 0};
    for (const auto& p : points) ++counts[static_cast<int>(p.cls.kind)];
    const auto comps = confined_components(points, grid, true);
    out << points.size() << " points: " << counts[0] << " Confined, " << counts[1] << " Deconfined, "
        << counts[2] << " Marginal; " << comps.count << " confined components\n";
    return kOk;
}

// ---------------------------------------------------------------- phase

struct PhaseArgs {
    std::string state = "ground";
    std::vector<int> n;
    std::string ratio = "3/2";
    int periods = 2;
    double alpha = 0.0;
    double alpha0 = 0.75;
    double w = 1.0;
    bool loopConstraint = false;
    double delta = 0.0;
    std::string output;
};

void emit_json(const json& j, const std::string& output, std::ostream& out) {
    if (output.empty()) {
        out << j.dump(2) << '\n';
    } else {
        write_file(output, j.dump(2) + "\n");
    }
}

int cmd_phase_loop(const PhaseArgs& a, std::ostream& out) {
    std::array<int, 3> n{0, 0, 0};
    if (!a.n.empty()) {
        n = parse_occupation(a.n);
    } else if (a.state != "ground") {
        throw UsageError("--state must be 'ground' (use --n for other eigenstates)");
    }
    if (a.periods < 1) throw UsageError("--periods must be at least 1");
    Rational ratio;
    try {
        ratio = Rational::parse(a.ratio);
    } catch (const ParameterError& e) {
        throw UsageError(e.what());
    }
    const TrapConfig cfg = make_trap(1.0, 1.0, ratio.value());
    const auto model = LoopSpectrumModel::from_trap(cfg);
    const double tau = a.periods * 2.0 * std::numbers::pi / cfg.omega0();
    LoopPhaseResult r;
    try {
        r = beta_loop(model, tau, StateDistribution::pure(n));
    } catch (const NotALoopError& e) {
        throw DomainFailure(e.what());
    }
    json j = {{"phi", r.phi},
              {"beta", r.beta},
              {"beta_unreduced", r.betaUnreduced},
              {"method", "loop"},
              {"n", n},
              {"config",
               {{"omegaC_over_omega0", ratio.str()}, {"omegaRho_over_omega0", cfg.omegaRho()}, {"tau_periods", a.periods}}}};
    emit_json(j, a.output, out);
    return kOk;
}

int cmd_phase_floquet(const PhaseArgs& a, std::ostream& out, std::ostream& err) {
    const std::array<int, 3> n = a.n.empty() ? std::array<int, 3>{0, 0, 0} : parse_occupation(a.n);
    if (!(a.alpha >= 0.0) || !(a.alpha0 > 0.0)) throw UsageError("need alpha >= 0 and alpha0 > 0");
    const double w = a.loopConstraint ? 4.0 * a.alpha0 / 3.0 : a.w;
    if (!(w > 0.0)) throw UsageError("--w must be positive");
    // Rotation rate as the frequency unit.
    PhysicalRotatingField phys{1.0, 1.0, 2.0 * a.alpha, 2.0 * a.alpha0, w};
    const RotatingFieldConfig cfg = RotatingFieldConfig::from_physical(phys);
    const auto cls = classify_stability(cfg);
    if (cls.kind != Stability::Confined) {
        err << "not confined: class=" << to_string(cls.kind) << " max_re=" << format_number(cls.maxRealPart)
            << " min_gap=" << format_number(cls.minFrequencyGap) << '\n';
        return kDomain;
    }
    FloquetPhase sum, lz;
    ModeSpectrum modes;
    try {
        modes = physical_modes(phys);
        sum = beta_floquet_sum(phys, n, a.delta);
        lz = beta_floquet_lz(phys, n);
    } catch (const std::runtime_error& e) {
        throw DomainFailure(e.what());
    }
    double level = 0.0;
    for (std::size_t i = 0; i < 3; ++i) level += modes.signs[i] * modes.omegas[i] * (n[i] + 0.5);
    const double phi = reduce_angle(-level * sum.tau);
    const json config = {{"alpha", cfg.alpha}, {"alpha0", cfg.alpha0}, {"w", cfg.w}, {"loop_constraint", a.loopConstraint}};
    auto entry = [&](const FloquetPhase& f, const char* method) {
        return json{{"phi", phi}, {"beta", f.beta}, {"beta_unreduced", f.betaUnreduced}, {"method", method},
                    {"n", n}, {"config", config}};
    };
    const double diff = std::abs(sum.betaUnreduced - lz.betaUnreduced);
    json j = {{"results", json::array({entry(sum, "sum"), entry(lz, "lz")})},
              {"difference", diff},
              {"modes", mode_spectrum_json(modes)}};
    emit_json(j, a.output, out);
    out << "|beta_sum - beta_lz| = " << format_number(diff) << (diff < 1e-6 ? " (agree)" : " (DISAGREE)") << '\n';
    return kOk;
}

// ---------------------------------------------------------------- rerun

int run_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth);

int cmd_rerun(const std::string& manifestPath, std::ostream& out, std::ostream& err, int depth) {
    std::ifstream f(manifestPath);
    if (!f) throw IoError("cannot read manifest '" + manifestPath + "'");
    json m;
    try {
        m = json::parse(f);
    } catch (const json::exception& e) {
        throw UsageError(std::string("invalid manifest: ") + e.what());
    }
    if (!m.contains("argv") || !m["argv"].is_array()) throw UsageError("manifest has no argv");
    if (m.value("version", std::string{}) != kToolVersion) {
        err << "warning: manifest written by version " << m.value("version", std::string{"?"}) << '\n';
    }
    return run_args(m["argv"].get<std::vector<std::string>>(), out, err, depth + 1);
}

int run_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth) {
    if (depth > 1) {
        err << "error: nested rerun\n";
        return kUsage;
    }
    CLI::App app{"Penning-trap dynamical manipulation toolkit", "penning"};
    app.set_version_flag("--version", kToolVersion);
    app.set_config("--config", "", "Read options from a key=value file");
    app.require_subcommand(1);

    VerifyArgs verify;
    auto* v = app.add_subcommand("verify", "Check the sixfold loop identity and the reversed free evolution");
    v->add_option("--lambda", verify.lambdas, "Comma-separated lambda values (default 1)")->delimiter(',');

    LoopsArgs loops;
    auto* l = app.add_subcommand("loops", "Find Penning-loop times for rational omegaC/omega0");
    l->add_option("--ratio", loops.ratios, "Comma-separated ratios p/q")->delimiter(',');
    l->add_option("--max-periods", loops.maxPeriods, "Search bound in periods T");

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "Multi-start search for kick schedules");
    s->add_option("--kind", solve.kind, "fourier3d | fourierz-scalexy | scale3d")->required();
    s->add_option("--starts", solve.starts, "Number of random starts");
    s->add_option("--seed", solve.seed, "Generator seed");
    s->add_option("--fmax", solve.fMax, "Bound on |F/omega0| for starts");
    s->add_option("--workers", solve.workers, "Worker threads (0 = all cores)");
    s->add_option("-o,--output", solve.output, "CSV output path");
    s->add_option("--json", solve.jsonOutput, "Also write solutions as JSON");

    MapArgs map;
    auto* mp = app.add_subcommand("map", "Stability classification over the alpha-alpha0 plane");
    mp->add_option("--alpha", map.alpha, "lo:hi:count");
    mp->add_option("--alpha0", map.alpha0, "lo:hi:count");
    mp->add_flag("--loop-constraint", map.loopConstraint, "Pin w = 4 alpha0 / 3");
    mp->add_option("--w", map.w, "omega0/omega without the loop constraint");
    mp->add_option("--workers", map.workers, "Worker threads (0 = all cores)");
    mp->add_option("-o,--output", map.output, "CSV output path");

    PhaseArgs phase;
    auto* ph = app.add_subcommand("phase", "Geometric phases");
    ph->require_subcommand(1);
    auto* pl = ph->add_subcommand("loop", "Phase of a Penning-loop eigenstate");
    pl->add_option("--state", phase.state, "ground");
    pl->add_option("--n", phase.n, "Occupations n+,n-,nz")->delimiter(',');
    pl->add_option("--ratio", phase.ratio, "omegaC/omega0 as p/q");
    pl->add_option("--periods", phase.periods, "Loop time in periods T");
    pl->add_option("-o,--output", phase.output, "JSON output path");
    auto* pf = ph->add_subcommand("floquet", "Geometric phase of a Floquet eigenstate, two methods");
    pf->add_option("--n", phase.n, "Occupations n1,n2,n3 (modes by increasing frequency)")->delimiter(',');
    pf->add_option("--alpha", phase.alpha, "Rotating-field strength");
    pf->add_option("--alpha0", phase.alpha0, "Static-field strength omegaC/(2 omega)");
    pf->add_option("--w", phase.w, "omega0/omega");
    pf->add_flag("--loop-constraint", phase.loopConstraint, "Pin w = 4 alpha0 / 3");
    pf->add_option("--delta", phase.delta, "Fixed finite-difference step in omega (default: Richardson rule from 1e-5 omega)");
    pf->add_option("-o,--output", phase.output, "JSON output path");

    std::string manifest;
    auto* rr = app.add_subcommand("rerun", "Repeat the command recorded in a manifest");
    rr->add_option("manifest", manifest, "Manifest JSON path")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*v) return cmd_verify(verify, out);
        if (*l) return cmd_loops(loops, out);
        if (*s) return cmd_solve(solve, args, out);
        if (*mp) return cmd_map(map, args, out);
        if (*pl) return cmd_phase_loop(phase, out);
        if (*pf) return cmd_phase_floquet(phase, out, err);
        if (*rr) return cmd_rerun(manifest, out, err, depth);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const DomainFailure& e) {
        err << "error: " << e.what() << '\n';
        return kDomain;
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << '\n';
        return kDomain;
    }
    return kUsage;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    return run_args(args, out, err, 0);
}

}  // namespace penning::cli
