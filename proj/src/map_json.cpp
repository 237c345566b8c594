#include "circlemap/map_expr.hpp"

namespace circlemap {

using nlohmann::json;

json MapExpr::to_json() const {
    return std::visit(
        [](const auto& n) -> json {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, TrigLiftNode>) {
                json j = {{"kind", "trig_lift"}, {"degree", n.degree}};
                if (!n.cos_coeffs.empty()) j["cos"] = n.cos_coeffs;
                if (!n.sin_coeffs.empty()) j["sin"] = n.sin_coeffs;
                return j;
            } else if constexpr (std::is_same_v<N, BlaschkePowerNode>) {
                return {{"kind", "blaschke_power"}, {"degree", n.degree}, {"r", n.r}};
            } else if constexpr (std::is_same_v<N, HdMapNode>) {
                return {{"kind", "hd"}, {"degree", n.degree}};
            } else if constexpr (std::is_same_v<N, ComposeNode>) {
                json parts = json::array();
                for (const auto& p : n.parts) parts.push_back(p->to_json());
                return {{"kind", "compose"}, {"parts", parts}};
            } else if constexpr (std::is_same_v<N, InverseNode>) {
                return {{"kind", "inverse"}, {"of", n.inner->to_json()}};
            } else if constexpr (std::is_same_v<N, AverageNode>) {
                return {{"kind", "average"}, {"of", n.base->to_json()}, {"N", n.iterates}};
            } else if constexpr (std::is_same_v<N, QuadratureNode>) {
                return {{"kind", "quadrature"},
                        {"density", n.density->spec()},
                        {"quad_tol", n.quad_tol},
                        {"normalizer", n.normalizer}};
            } else {  // AdjustmentNode
                return {{"kind", "adjustment"}, {"xs", n.anchors}, {"ys", n.targets}};
            }
        },
        node());
}

MapPtr MapExpr::from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        fail(ErrorCode::BadInput, "map spec must be an object with a 'kind' field");
    std::string kind = j.at("kind").get<std::string>();
    try {
        if (kind == "trig_lift") {
            std::vector<double> cc, sc;
            if (j.contains("cos")) cc = j.at("cos").get<std::vector<double>>();
            if (j.contains("sin")) sc = j.at("sin").get<std::vector<double>>();
            return trig_lift(j.at("degree").get<int>(), std::move(cc), std::move(sc));
        }
        if (kind == "blaschke_power")
            return blaschke_power(j.at("degree").get<int>(), j.at("r").get<double>());
        if (kind == "hd") return hd_map(j.at("degree").get<int>());
        if (kind == "compose") {
            std::vector<MapPtr> parts;
            for (const auto& p : j.at("parts")) parts.push_back(from_json(p));
            return compose(std::move(parts));
        }
        if (kind == "inverse") return inverse(from_json(j.at("of")));
        if (kind == "average")
            return average_lift(from_json(j.at("of")), j.at("N").get<int>());
        if (kind == "quadrature")
            return quadrature_diffeo(density_from_json(j.at("density")),
                                     j.value("quad_tol", 1e-11));
        if (kind == "adjustment")
            return adjustment(j.at("xs").get<std::vector<double>>(),
                              j.at("ys").get<std::vector<double>>());
    } catch (const json::exception& e) {
        fail(ErrorCode::BadInput,
             "malformed '" + kind + "' map spec: " + std::string(e.what()));
    }
    fail(ErrorCode::BadInput, "unknown map kind '" + kind + "'");
}

} // namespace circlemap
