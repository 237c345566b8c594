#include "circlemap/config.hpp"

#include <cstdlib>

#include "circlemap/errors.hpp"

namespace circlemap {

namespace {

bool power_of_two(long v) { return v > 0 && (v & (v - 1)) == 0; }

template <class T, class Parse>
void env_override(const char* name, T& slot, Parse parse) {
    if (const char* v = std::getenv(name)) slot = parse(v);
}

} // namespace

void RunConfig::validate() const {
    if (!power_of_two(grid) || !power_of_two(orbit_grid))
        fail(ErrorCode::BadInput, "grid sizes must be powers of two");
    if (!(class_tol > 0 && eps_par > 0 && quad_tol > 0))
        fail(ErrorCode::BadInput, "tolerances must be positive");
    if (max_period < 1 || jet_order < 1 || strata_levels < 0 || horizon_max < 1)
        fail(ErrorCode::BadInput, "counts must be positive");
    if (threads < 1) fail(ErrorCode::BadInput, "threads must be >= 1");
    if (precision_bits < 24) fail(ErrorCode::BadInput, "precision below 24 bits");
}

void RunConfig::apply_env() {
    env_override("CIRCLEMAP_GRID", grid, [](const char* v) { return std::atoi(v); });
    env_override("CIRCLEMAP_ORBIT_GRID", orbit_grid,
                 [](const char* v) { return std::atoi(v); });
    env_override("CIRCLEMAP_MAX_PERIOD", max_period,
                 [](const char* v) { return std::atoi(v); });
    env_override("CIRCLEMAP_TOL", class_tol, [](const char* v) { return std::atof(v); });
    env_override("CIRCLEMAP_EPS_PAR", eps_par, [](const char* v) { return std::atof(v); });
    env_override("CIRCLEMAP_QUAD_TOL", quad_tol,
                 [](const char* v) { return std::atof(v); });
    env_override("CIRCLEMAP_ORDER", jet_order, [](const char* v) { return std::atoi(v); });
    env_override("CIRCLEMAP_PRECISION_BITS", precision_bits, [](const char* v) {
        return static_cast<unsigned>(std::atoi(v));
    });
    env_override("CIRCLEMAP_STRATA_LEVELS", strata_levels,
                 [](const char* v) { return std::atoi(v); });
    env_override("CIRCLEMAP_HORIZON_MAX", horizon_max,
                 [](const char* v) { return std::atoi(v); });
    env_override("CIRCLEMAP_THREADS", threads, [](const char* v) { return std::atoi(v); });
    env_override("CIRCLEMAP_SEED", seed, [](const char* v) {
        return static_cast<std::uint64_t>(std::strtoull(v, nullptr, 10));
    });
}

nlohmann::json RunConfig::to_json() const {
    return {{"grid", grid},
            {"orbit_grid", orbit_grid},
            {"max_period", max_period},
            {"class_tol", class_tol},
            {"eps_par", eps_par},
            {"quad_tol", quad_tol},
            {"jet_order", jet_order},
            {"precision_bits", precision_bits},
            {"strata_levels", strata_levels},
            {"horizon_max", horizon_max},
            {"threads", threads},
            {"seed", seed}};
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig c;
    c.grid = j.value("grid", c.grid);
    c.orbit_grid = j.value("orbit_grid", c.orbit_grid);
    c.max_period = j.value("max_period", c.max_period);
    c.class_tol = j.value("class_tol", c.class_tol);
    c.eps_par = j.value("eps_par", c.eps_par);
    c.quad_tol = j.value("quad_tol", c.quad_tol);
    c.jet_order = j.value("jet_order", c.jet_order);
    c.precision_bits = j.value("precision_bits", c.precision_bits);
    c.strata_levels = j.value("strata_levels", c.strata_levels);
    c.horizon_max = j.value("horizon_max", c.horizon_max);
    c.threads = j.value("threads", c.threads);
    c.seed = j.value("seed", c.seed);
    c.validate();
    return c;
}

std::string content_hash(const nlohmann::json& j) {
    std::string s = j.dump();
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 0; i < 16; ++i) out[i] = hex[(h >> (60 - 4 * i)) & 0xF];
    return out;
}

nlohmann::json report_envelope(const RunConfig& cfg, const nlohmann::json& map_spec,
                               const std::string& kind, nlohmann::json payload) {
    nlohmann::json j;
    j["kind"] = kind;
    j["config"] = cfg.to_json();
    j["map"] = map_spec;
    j["map_hash"] = content_hash(map_spec);
    j["report"] = std::move(payload);
    return j;
}

} // namespace circlemap
