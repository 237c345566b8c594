#include "circlemap/map_expr.hpp"

#include <cmath>

namespace circlemap {

namespace {

int node_degree(const MapNode& node) {
    return std::visit(
        [](const auto& n) -> int {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, TrigLiftNode>) {
                return n.degree;
            } else if constexpr (std::is_same_v<N, BlaschkePowerNode>) {
                return n.degree;
            } else if constexpr (std::is_same_v<N, HdMapNode>) {
                return n.degree;
            } else if constexpr (std::is_same_v<N, ComposeNode>) {
                int d = 1;
                for (const auto& p : n.parts) d *= p->degree();
                return d;
            } else {
                return 1;
            }
        },
        node);
}

void validate(const MapNode& node) {
    std::visit(
        [](const auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, TrigLiftNode>) {
                if (n.degree < 1) fail(ErrorCode::BadInput, "trig lift degree must be >= 1");
            } else if constexpr (std::is_same_v<N, BlaschkePowerNode>) {
                if (n.degree < 2) fail(ErrorCode::BadInput, "blaschke power degree must be >= 2");
                if (!(n.r > 0.0 && n.r < 1.0)) fail(ErrorCode::BadInput, "blaschke parameter must lie in (0,1)");
            } else if constexpr (std::is_same_v<N, HdMapNode>) {
                if (n.degree < 2) fail(ErrorCode::BadInput, "hd degree must be >= 2");
            } else if constexpr (std::is_same_v<N, ComposeNode>) {
                if (n.parts.empty()) fail(ErrorCode::BadInput, "empty composition");
            } else if constexpr (std::is_same_v<N, InverseNode>) {
                if (n.inner->degree() != 1)
                    fail(ErrorCode::NotInvertible, "only degree-1 lifts can be inverted");
            } else if constexpr (std::is_same_v<N, AverageNode>) {
                if (n.iterates < 1) fail(ErrorCode::BadInput, "average needs N >= 1");
            } else if constexpr (std::is_same_v<N, QuadratureNode>) {
                if (!n.density || !n.table) fail(ErrorCode::BadInput, "quadrature node incomplete");
            } else if constexpr (std::is_same_v<N, AdjustmentNode>) {
                if (n.anchors.size() != n.targets.size() || n.anchors.empty())
                    fail(ErrorCode::BadInput, "adjustment anchors/targets mismatch");
                for (size_t i = 0; i < n.anchors.size(); ++i) {
                    if (n.anchors[i] < 0.0 || n.anchors[i] >= 1.0)
                        fail(ErrorCode::BadInput, "adjustment anchors must lie in [0,1)");
                    if (i + 1 < n.anchors.size() && !(n.anchors[i] < n.anchors[i + 1]))
                        fail(ErrorCode::BadInput, "adjustment anchors must be strictly increasing");
                }
            }
        },
        node);
}

} // namespace

MapExpr::MapExpr(MapNode node) : node_(std::move(node)) {
    validate(node_);
    degree_ = node_degree(node_);
    value_at_zero_ = 0.0;
    value_at_zero_ = eval<double>(0.0);
}

MapPtr MapExpr::trig_lift(int degree, std::vector<double> cos_coeffs,
                          std::vector<double> sin_coeffs) {
    return std::make_shared<MapExpr>(
        MapNode(TrigLiftNode{degree, std::move(cos_coeffs), std::move(sin_coeffs)}));
}

MapPtr MapExpr::blaschke_power(int degree, double r) {
    return std::make_shared<MapExpr>(MapNode(BlaschkePowerNode{degree, r}));
}

MapPtr MapExpr::hd_map(int degree) {
    return std::make_shared<MapExpr>(MapNode(HdMapNode{degree}));
}

MapPtr MapExpr::compose(std::vector<MapPtr> parts) {
    return std::make_shared<MapExpr>(MapNode(ComposeNode{std::move(parts)}));
}

MapPtr MapExpr::inverse(MapPtr inner) {
    return std::make_shared<MapExpr>(MapNode(InverseNode{std::move(inner)}));
}

MapPtr MapExpr::average_lift(MapPtr base, int iterates) {
    return std::make_shared<MapExpr>(MapNode(AverageNode{std::move(base), iterates}));
}

MapPtr MapExpr::quadrature_diffeo(DensityPtr density, double quad_tol) {
    QuadratureNode node;
    node.density = density;
    node.quad_tol = quad_tol;
    if (const OrbitSumForm* os = density->orbit_sum()) {
        node.orbit_map = os->map;
        node.base = os->base;
        node.orbit_terms = os->terms;
    } else {
        node.base = density;
        node.orbit_terms = 1;
    }
    node.table = std::make_shared<CumulativeQuadrature>(
        [base = node.base](double x) { return base->value<double>(x); }, quad_tol);
    double base_total = node.table->total();
    if (!(base_total > 0.0))
        fail(ErrorCode::QuadratureFailure, "nonpositive period integral");
    double v = 0.0, L = 0.0;
    int d = node.orbit_map ? node.orbit_map->degree() : 1;
    double dj = 1.0;
    for (int j = 0; j < node.orbit_terms; ++j) {
        node.h0.push_back(v);
        L += dj;
        dj *= d;
        if (j + 1 < node.orbit_terms) v = node.orbit_map->eval(v);
    }
    // integral over one period: sum_j d^j * integral(base) by the substitution
    node.normalizer = 1.0 / (L * base_total);
    return std::make_shared<MapExpr>(MapNode(std::move(node)));
}

MapPtr MapExpr::adjustment(std::vector<double> anchors, std::vector<double> targets) {
    return std::make_shared<MapExpr>(
        MapNode(AdjustmentNode{std::move(anchors), std::move(targets)}));
}

void check_local_diffeo(const MapExpr& H, int grid) {
    for (int i = 0; i < grid; ++i) {
        double x = static_cast<double>(i) / grid;
        if (!(H.deriv(x) > 0.0))
            fail(ErrorCode::NotADiffeo,
                 "derivative not positive at x = " + std::to_string(x));
    }
}

MapPtr conjugate(MapPtr phi, MapPtr H, int check_grid) {
    if (phi->degree() != 1)
        fail(ErrorCode::NotADiffeo, "conjugator must have degree 1");
    check_local_diffeo(*phi, check_grid);
    return MapExpr::compose({phi, std::move(H), MapExpr::inverse(phi)});
}

DensityPtr Density::constant(double v) {
    if (!(v > 0.0)) fail(ErrorCode::BadInput, "density must be positive");
    nlohmann::json spec = {{"kind", "const"}, {"value", v}};
    return std::make_shared<Density>(
        [v](double) { return v; }, [v](const BigFloat&) { return BigFloat(v); },
        [v](double, int order) { return Series<double>::constant(v, order); },
        [v](const BigFloat&, int order) { return Series<BigFloat>::constant(BigFloat(v), order); },
        v, v, std::move(spec));
}

} // namespace circlemap
