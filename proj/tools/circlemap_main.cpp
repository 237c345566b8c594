// circlemap: analysis, metrization and normalization of expanding circle
// coverings given as lift expression trees (JSON map specs).
//
// Subcommands:
//   analyze    orbit census + weak-expansion certificate
//   metrize    conjugate to a metrically expanding map, emit certificate
//   normalize  two-step averaging conjugacy, local-form report
//   geometry   nice intervals, first-entry branches, distortion data
//   verify     randomized invariant suites (core / claims / geometry)
//
// Exit codes: 0 success, 1 operational error, 2 certificate or verification
// failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "circlemap/claims.hpp"
#include "circlemap/config.hpp"
#include "circlemap/fourier.hpp"
#include "circlemap/geometry.hpp"
#include "circlemap/metrize.hpp"
#include "circlemap/normalize.hpp"
#include "circlemap/orbits.hpp"

using namespace circlemap;
using nlohmann::json;

namespace {

json read_map_spec(const std::string& path) {
    try {
        if (path == "-") {
            json j;
            std::cin >> j;
            return j;
        }
        std::ifstream in(path);
        if (!in) fail(ErrorCode::BadInput, "cannot open map spec '" + path + "'");
        json j;
        in >> j;
        return j;
    } catch (const json::exception& e) {
        fail(ErrorCode::BadInput, std::string("map spec is not valid JSON: ") + e.what());
    }
}

void write_output(const RunConfig& cfg, const json& report) {
    if (cfg.out_path.empty()) return;
    std::ofstream out(cfg.out_path);
    out << report.dump(2) << "\n";
}

struct CommonFlags {
    std::string map_path = "-";
    int fourier_modes = 0;
};

void add_config_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--grid", cfg.grid, "scan grid size (power of two)");
    cmd->add_option("--orbit-grid", cfg.orbit_grid, "periodic point scan grid");
    cmd->add_option("--tol", cfg.class_tol, "neutral-multiplier classification band");
    cmd->add_option("--max-period", cfg.max_period, "largest orbit period examined");
    cmd->add_option("--order", cfg.jet_order, "default jet truncation order");
    cmd->add_option("--precision-bits", cfg.precision_bits, "mantissa bits for jets");
    cmd->add_option("--eps-par", cfg.eps_par, "collar radius around parabolic points");
    cmd->add_option("--quad-tol", cfg.quad_tol, "quadrature absolute tolerance");
    cmd->add_option("--strata-levels", cfg.strata_levels, "preimage strata depth");
    cmd->add_option("--horizon-max", cfg.horizon_max, "expansion horizon budget");
    cmd->add_option("--threads", cfg.threads, "worker threads for grid scans");
    cmd->add_option("--seed", cfg.seed, "seed for randomized sweeps");
    cmd->add_option("--out", cfg.out_path, "write the JSON report here");
    cmd->add_option("--csv", cfg.csv_path, "write CSV samples here");
}

OrbitOptions orbit_options(const RunConfig& cfg) {
    OrbitOptions o;
    o.class_tol = cfg.class_tol;
    o.precision_bits = cfg.precision_bits;
    o.jet_order = cfg.jet_order;
    return o;
}

int cmd_analyze(const RunConfig& cfg, const CommonFlags& fl) {
    json spec = read_map_spec(fl.map_path);
    MapPtr H = MapExpr::from_json(spec);
    CertificateReport cert = certify_Tdstar(*H, cfg.max_period, cfg.orbit_grid,
                                            orbit_options(cfg));
    json payload = certificate_to_json(cert);
    if (fl.fourier_modes > 0) {
        TrigProjection pr = trig_projection(*H, fl.fourier_modes, cfg.grid);
        payload["fourier"] = {{"mean", pr.mean}, {"cos", pr.cos_coeffs}, {"sin", pr.sin_coeffs}};
    }
    json report = report_envelope(cfg, spec, "analyze", payload);
    write_output(cfg, report);

    int parabolic = 0;
    for (const auto& o : cert.orbits)
        if (o.cls == OrbitClass::Parabolic) ++parabolic;
    std::cout << "degree " << H->degree() << ", orbits up to period "
              << cfg.max_period << ": " << cert.orbits.size() << " (" << parabolic
              << " parabolic)\n"
              << (cert.certified ? "certified weakly expanding"
                                 : "NOT certified: " + cert.failure_reason)
              << "\n";
    return cert.certified ? 0 : 2;
}

int cmd_metrize(const RunConfig& cfg, const CommonFlags& fl) {
    json spec = read_map_spec(fl.map_path);
    MapPtr H = MapExpr::from_json(spec);
    MetrizeOptions opt;
    opt.max_period = cfg.max_period;
    opt.orbit_grid = cfg.orbit_grid;
    opt.grid = cfg.grid;
    opt.eps_par = cfg.eps_par;
    opt.quad_tol = cfg.quad_tol;
    opt.density.strata_levels = cfg.strata_levels;
    opt.density.floor_levels = cfg.strata_levels;
    opt.horizon.grid = cfg.grid;
    opt.horizon.max_horizon = cfg.horizon_max;
    opt.orbit = orbit_options(cfg);
    opt.threads = cfg.threads;

    MetrizationResult res = metrize(H, opt);
    json report = report_envelope(cfg, spec, "metrize",
                                  metrization_report_to_json(res.report));
    write_output(cfg, report);

    if (!cfg.csv_path.empty()) {
        std::ofstream csv(cfg.csv_path);
        csv << "x,dh,dg_at_phi_x\n";
        int samples = std::min(cfg.grid, 1 << 12);
        for (int i = 0; i < samples; ++i) {
            double x = static_cast<double>(i) / samples;
            csv << x << "," << H->deriv(x) << ","
                << res.g->deriv(res.phi->eval(x)) << "\n";
        }
    }

    const auto& r = res.report;
    std::cout << "regime " << r.regime << ", horizon N = " << r.horizon
              << ", eta = " << r.eta << "\n"
              << "min Dg = " << r.min_dg << " (off-collar " << r.min_dg_off_par
              << "), conjugator residual " << r.conjugator_residual << "\n"
              << (r.expanding_certificate ? "metrization certificate PASSED"
                                          : "metrization certificate FAILED")
              << "\n";
    return r.expanding_certificate ? 0 : 2;
}

int cmd_normalize(const RunConfig& cfg, const CommonFlags& fl) {
    json spec = read_map_spec(fl.map_path);
    MapPtr H = MapExpr::from_json(spec);
    NormalizeOptions opt;
    opt.max_period = cfg.max_period;
    opt.orbit_grid = cfg.orbit_grid;
    opt.precision_bits = cfg.precision_bits;
    opt.eps_par = cfg.eps_par;
    opt.orbit = orbit_options(cfg);

    NormalizationResult res = normalize(H, opt);
    json report = report_envelope(cfg, spec, "normalize", normalization_to_json(res));
    write_output(cfg, report);

    bool ok = true;
    for (const auto& c : res.cycles) {
        if (c.cross_discrepancy > 1e-8 || std::abs(c.P_check_at_0) < 1e-12) ok = false;
        std::cout << "cycle at " << c.orbit.points[0] << ": n = " << c.n
                  << ", P(0) = " << c.P_check_at_0 << ", cross discrepancy "
                  << c.cross_discrepancy << "\n";
    }
    std::cout << "N = " << res.N << ", L = " << res.L << ", derivative-identity residuals "
              << res.step0.max_residual << " / " << res.step1.max_residual << "\n";
    if (res.cycles.empty())
        std::cout << "no parabolic cycles: normalization is trivial\n";
    return ok ? 0 : 2;
}

int cmd_geometry(const RunConfig& cfg, const CommonFlags& fl, double center,
                 int orbit_period, int depth, int time_cap) {
    json spec = read_map_spec(fl.map_path);
    MapPtr H = MapExpr::from_json(spec);

    // Generating orbit: a repelling orbit of the requested period whose orbit
    // avoids the center point.
    auto orbits = find_periodic_orbits(*H, orbit_period, cfg.orbit_grid,
                                       orbit_options(cfg));
    const PeriodicOrbit* gen = nullptr;
    for (const auto& o : orbits) {
        if (o.cls != OrbitClass::Repelling) continue;
        bool hits = false;
        for (double p : o.points)
            if (circle_dist(p, center) < 1e-6) hits = true;
        if (!hits) {
            gen = &o;
            break;
        }
    }
    if (!gen) fail(ErrorCode::BadInput, "no repelling generating orbit found");

    NiceInterval A = build_nice_interval(*H, center, gen->points, depth);
    auto branches = return_branches(*H, A.arc, time_cap);
    double tv = total_variation_log_deriv(*H);

    json barr = json::array();
    for (const auto& b : branches)
        barr.push_back({{"start", b.domain.start},
                        {"length", b.domain.length},
                        {"entry_time", b.entry_time},
                        {"inside", b.inside},
                        {"min_deriv", b.min_deriv},
                        {"max_deriv", b.max_deriv}});
    json payload = {{"interval", {{"start", A.arc.start}, {"length", A.arc.length}, {"depth", depth}}},
                    {"generator_orbit", gen->points},
                    {"branches", barr},
                    {"total_variation_log_deriv", tv}};
    json report = report_envelope(cfg, spec, "geometry", payload);
    write_output(cfg, report);

    if (!cfg.csv_path.empty()) {
        std::ofstream csv(cfg.csv_path);
        csv << "branch,x,dra\n";
        int id = 0;
        for (const auto& b : branches) {
            for (int i = 1; i < 16; ++i) {
                double x = b.domain.at(i / 16.0);
                csv << id << "," << x << ","
                    << iterate_with_deriv(*H, x, b.entry_time).second << "\n";
            }
            ++id;
        }
    }

    std::cout << "nice interval (" << A.arc.start << ", +" << A.arc.length
              << "), branches with entry time <= " << time_cap << ": "
              << branches.size() << ", TV(log Dh) = " << tv << "\n";
    return 0;
}

// ---- randomized invariant suites -------------------------------------------

int run_checks(const std::vector<std::pair<std::string, bool>>& checks) {
    int failures = 0;
    for (const auto& [name, ok] : checks) {
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
        if (!ok) ++failures;
    }
    std::cout << (failures == 0 ? "suite passed" : "suite FAILED") << "\n";
    return failures == 0 ? 0 : 2;
}

int suite_core(const RunConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::pair<std::string, MapPtr>> zoo = {
        {"trig_lift", MapExpr::trig_lift(2, {0.03, -0.01}, {0.05})},
        {"blaschke", MapExpr::blaschke_power(2, 1.0 / 3.0)},
        {"hd", MapExpr::hd_map(3)},
        {"average", MapExpr::average_lift(MapExpr::hd_map(2), 2)},
        {"adjustment", MapExpr::adjustment({0.1, 0.5, 0.8}, {0.11, 0.49, 0.8})},
        {"compose", MapExpr::compose({MapExpr::adjustment({0.2}, {0.25}),
                                      MapExpr::trig_lift(2, {}, {0.04})})},
    };
    std::vector<std::pair<std::string, bool>> checks;
    for (const auto& [name, H] : zoo) {
        bool periodicity = true, deriv_fd = true, cocycle = true;
        for (int i = 0; i < 1000; ++i) {
            double x = unif(rng) * 3.0 - 1.0;
            if (std::abs(H->eval(x + 1.0) - H->eval(x) - H->degree()) > 1e-9)
                periodicity = false;
            if (i % 10 == 0) {
                double h = 1e-6;
                double fd = (H->eval(x + h) - H->eval(x - h)) / (2 * h);
                double dv = H->deriv(x);
                if (std::abs(dv - fd) > 1e-5 * (1.0 + std::abs(dv))) deriv_fd = false;
                auto [v2, d2] = iterate_with_deriv(*H, x, 2);
                auto [v1, d1] = iterate_with_deriv(*H, x, 1);
                auto [vv, dd] = H->eval_with_deriv(v1);
                if (std::abs(d2 - dd * d1) > 1e-9 * (1.0 + std::abs(d2))) cocycle = false;
            }
        }
        checks.emplace_back(name + ": periodicity H(x+1) = H(x) + d", periodicity);
        checks.emplace_back(name + ": derivative vs centered difference", deriv_fd);
        checks.emplace_back(name + ": cocycle DH^2 = DH(Hx) DH(x)", cocycle);
    }
    // conjugacy roundtrip through a diffeo
    MapPtr phi = MapExpr::adjustment({0.2, 0.6}, {0.22, 0.58});
    MapPtr H = MapExpr::hd_map(2);
    MapPtr g = conjugate(phi, H);
    MapPtr back = conjugate(MapExpr::inverse(phi), g);
    bool round = true;
    for (int i = 0; i < 200; ++i) {
        double x = unif(rng);
        if (std::abs(back->eval(x) - H->eval(x)) > 1e-8) round = false;
    }
    checks.emplace_back("conjugacy roundtrip phi^{-1} . (phi . H . phi^{-1}) . phi", round);
    return run_checks(checks);
}

int suite_claims(const RunConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    auto rnd_rat = [&rng](int lo, int hi) {
        std::uniform_int_distribution<int> num(lo, hi), den(1, 9);
        return Rational(num(rng), den(rng));
    };
    std::vector<std::pair<std::string, bool>> checks;

    bool c1 = true;
    for (int t = 0; t < 20; ++t) {
        int s = 1 + static_cast<int>(rng() % 3), m = 1 + static_cast<int>(rng() % 2);
        int d = 2 + static_cast<int>(rng() % 2), N = s * (1 + static_cast<int>(rng() % 2));
        std::vector<RatPoly> P;
        for (int k = 0; k < s; ++k) {
            std::vector<Rational> c(static_cast<size_t>(2 * m));
            for (auto& v : c) v = rnd_rat(-4, 4);
            c[0] = abs(rnd_rat(1, 4)) + Rational(1, 7);
            P.emplace_back(std::move(c));
        }
        std::vector<Rational> pts;
        for (int k = 0; k < s; ++k) pts.push_back(Rational(k, s) + Rational(1, 17 + k));
        if (!verify_claim1(P, s, m, d, N, pts, 1).exact) c1 = false;
    }
    checks.emplace_back("averaging step preserves the 4m-form with the summed polynomial (exact)", c1);

    bool c2 = true;
    for (int t = 0; t < 10; ++t) {
        int s = 1 + static_cast<int>(rng() % 2), n = 1 + static_cast<int>(rng() % 2);
        int d = 2, N = s;
        std::vector<Rational> pc(static_cast<size_t>(2 * n));
        for (auto& v : pc) v = rnd_rat(-3, 3);
        pc[0] = abs(rnd_rat(1, 3)) + Rational(1, 5);
        RatPoly P(pc);
        std::vector<RatPoly> R;
        for (int k = 0; k < s; ++k) {
            std::vector<Rational> rc(static_cast<size_t>(2 * n));
            for (auto& v : rc) v = rnd_rat(-3, 3);
            R.emplace_back(std::move(rc));
        }
        std::vector<Rational> pts;
        for (int k = 0; k < s; ++k) pts.push_back(Rational(2 * k + 1, 2 * s));
        if (!verify_claim2(P, R, s, n, d, N, pts, 1).exact) c2 = false;
    }
    checks.emplace_back("averaging step preserves the 6n-form with point-independent remainder (exact)", c2);

    bool pofh = true;
    for (int t = 0; t < 20; ++t) {
        int n = 1 + static_cast<int>(rng() % 3);
        std::vector<Rational> pc(static_cast<size_t>(2 * n));
        for (auto& v : pc) v = rnd_rat(-5, 5);
        if (!verify_pofh_identity(RatPoly(pc), n)) pofh = false;
    }
    checks.emplace_back("P(x(1+x^{2n}P)) = P + x^{2n+1} P' P + O(x^{4n}) (exact)", pofh);
    return run_checks(checks);
}

int suite_geometry(const RunConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    std::vector<std::pair<std::string, bool>> checks;
    std::vector<MapPtr> maps = {MapExpr::blaschke_power(2, 1.0 / 3.0),
                                MapExpr::trig_lift(2, {0.02}, {0.06})};
    bool dist_ok = true;
    int sampled = 0;
    for (const auto& H : maps) {
        double tv = total_variation_log_deriv(*H);
        auto orbits = find_periodic_orbits(*H, 1, cfg.orbit_grid);
        double p = orbits.empty() ? 0.0 : orbits.back().points[0];
        NiceInterval A = build_nice_interval(*H, frac(p + 0.21), orbits.back().points, 3);
        for (const auto& b : return_branches(*H, A.arc, 14)) {
            if (!iterates_disjoint(*H, b.domain, b.entry_time)) continue;
            ++sampled;
            if (distortion(*H, b.domain, b.entry_time, 64) > tv * 1.02) dist_ok = false;
            if (sampled >= 60) break;
        }
    }
    checks.emplace_back("distortion of disjoint-iterate branches <= TV(log Dh) (" +
                            std::to_string(sampled) + " samples)",
                        dist_ok && sampled >= 40);
    (void)rng;
    return run_checks(checks);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"expanding circle coverings: analysis, metrization, normalization"};
    app.require_subcommand(1);

    RunConfig cfg;
    cfg.apply_env();
    CommonFlags fl;

    auto* analyze = app.add_subcommand("analyze", "orbit census and certificate");
    analyze->add_option("--map", fl.map_path, "map spec JSON file ('-' for stdin)");
    analyze->add_option("--fourier", fl.fourier_modes, "also export this many Fourier modes");
    add_config_flags(analyze, cfg);

    auto* metrizec = app.add_subcommand("metrize", "build the metrizing conjugacy");
    metrizec->add_option("--map", fl.map_path, "map spec JSON file ('-' for stdin)");
    add_config_flags(metrizec, cfg);

    auto* normalizec = app.add_subcommand("normalize", "two-step averaging normalization");
    normalizec->add_option("--map", fl.map_path, "map spec JSON file ('-' for stdin)");
    add_config_flags(normalizec, cfg);

    double center = 0.25;
    int orbit_period = 1, depth = 3, time_cap = 20;
    auto* geometryc = app.add_subcommand("geometry", "nice intervals and entry branches");
    geometryc->add_option("--map", fl.map_path, "map spec JSON file ('-' for stdin)");
    geometryc->add_option("--center", center, "point the nice interval must contain");
    geometryc->add_option("--orbit-period", orbit_period, "period of the generating orbit");
    geometryc->add_option("--depth", depth, "pullback depth of the generating set");
    geometryc->add_option("--time-cap", time_cap, "largest entry time enumerated");
    add_config_flags(geometryc, cfg);

    std::string suite = "core";
    auto* verifyc = app.add_subcommand("verify", "randomized invariant suites");
    verifyc->add_option("suite", suite, "core | claims | geometry");
    add_config_flags(verifyc, cfg);

    CLI11_PARSE(app, argc, argv);

    try {
        cfg.validate();
        if (analyze->parsed()) return cmd_analyze(cfg, fl);
        if (metrizec->parsed()) return cmd_metrize(cfg, fl);
        if (normalizec->parsed()) return cmd_normalize(cfg, fl);
        if (geometryc->parsed())
            return cmd_geometry(cfg, fl, center, orbit_period, depth, time_cap);
        if (verifyc->parsed()) {
            if (suite == "core") return suite_core(cfg);
            if (suite == "claims") return suite_claims(cfg);
            if (suite == "geometry") return suite_geometry(cfg);
            fail(ErrorCode::BadInput, "unknown suite '" + suite + "'");
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
