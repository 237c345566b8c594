#ifndef CIRCLEMAP_CONFIG_HPP
#define CIRCLEMAP_CONFIG_HPP

#include <cstdint>
#include <string>

#include <json.hpp>

namespace circlemap {

/// Run settings shared by the CLI subcommands.  Precedence: command-line
/// flags > CIRCLEMAP_* environment variables > defaults.  Every report embeds
/// the effective config together with a content hash of the map spec.
struct RunConfig {
    int grid = 1 << 14;           // certificate / scan grid (power of two)
    int orbit_grid = 1 << 10;     // periodic-point scan resolution
    int max_period = 6;
    double class_tol = 1e-8;      // |multiplier - 1| band treated as neutral
    double eps_par = 1e-3;        // collar radius around parabolic points
    double quad_tol = 1e-11;      // quadrature absolute tolerance
    int jet_order = 8;
    unsigned precision_bits = 96;
    int strata_levels = 8;
    int horizon_max = 64;
    int threads = 1;
    std::uint64_t seed = 20240817;
    std::string out_path;
    std::string csv_path;

    void validate() const;
    void apply_env();

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
};

/// FNV-1a over the canonical (sorted-key) dump; stable content identity for
/// report provenance.
std::string content_hash(const nlohmann::json& j);

/// Report envelope: config + map hash + payload.  Timestamps deliberately
/// excluded so identical inputs reproduce identical bytes.
nlohmann::json report_envelope(const RunConfig& cfg, const nlohmann::json& map_spec,
                               const std::string& kind, nlohmann::json payload);

} // namespace circlemap

#endif
