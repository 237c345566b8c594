#ifndef CIRCLEMAP_DENSITY_HPP
#define CIRCLEMAP_DENSITY_HPP

#include <functional>
#include <memory>
#include <optional>
#include <type_traits>

#include <json.hpp>

#include "circlemap/series.hpp"

namespace circlemap {

/// Strictly positive 1-periodic weight with evaluation and local-series
/// handles in double and extended precision.  Instances are immutable; the
/// JSON spec describes how to rebuild the handles (see density_from_json).
class Density;
using DensityPtr = std::shared_ptr<const Density>;
class MapExpr;
using MapPtr = std::shared_ptr<const MapExpr>;

/// Structure marker for densities of the form
///   rho_*(x) = sum_{j<terms} base(H^j x) DH^j(x);
/// its antiderivative reduces to the base's by the orbit substitution
/// u = H^j(t), which is what makes the integral conjugator computable when
/// pulled-back features are far below any feasible quadrature resolution.
struct OrbitSumForm {
    MapPtr map;
    DensityPtr base;
    int terms = 1;
};

class Density {
  public:
    using ValueD = std::function<double(double)>;
    using ValueB = std::function<BigFloat(const BigFloat&)>;
    using SeriesD = std::function<Series<double>(double, int)>;
    using SeriesB = std::function<Series<BigFloat>(const BigFloat&, int)>;

    Density(ValueD vd, ValueB vb, SeriesD sd, SeriesB sb, double floor_val,
            double ceiling_val, nlohmann::json spec,
            std::optional<OrbitSumForm> orbit_sum = std::nullopt)
        : value_d_(std::move(vd)), value_b_(std::move(vb)),
          series_d_(std::move(sd)), series_b_(std::move(sb)),
          floor_(floor_val), ceiling_(ceiling_val), spec_(std::move(spec)),
          orbit_sum_(std::move(orbit_sum)) {}

    template <class T>
    T value(const T& x) const {
        if constexpr (std::is_same_v<T, double>)
            return value_d_(x);
        else
            return value_b_(x);
    }

    template <class T>
    Series<T> series_at(const T& p, int order) const {
        if constexpr (std::is_same_v<T, double>)
            return series_d_(p, order);
        else
            return series_b_(p, order);
    }

    double floor() const { return floor_; }
    double ceiling() const { return ceiling_; }
    const nlohmann::json& spec() const { return spec_; }
    const OrbitSumForm* orbit_sum() const {
        return orbit_sum_ ? &*orbit_sum_ : nullptr;
    }

    static std::shared_ptr<const Density> constant(double v);

  private:
    ValueD value_d_;
    ValueB value_b_;
    SeriesD series_d_;
    SeriesB series_b_;
    double floor_;
    double ceiling_;
    nlohmann::json spec_;
    std::optional<OrbitSumForm> orbit_sum_;
};

/// One analytic well of the admissible-density family: a raised-cosine bump
/// cos^{2q}(pi (x - center)) scaled by depth, multiplied by a factor vanishing
/// to fourth order at every parabolic point (so the density keeps value 1,
/// zero slope and positive curvature there).
struct WellSpec {
    double center = 0.0;
    double depth = 0.0;
    long q = 1;
};

/// rho(x) = 1 + beta * prod_p sin^2(pi (x - p)) - sum_j depth_j * U_j(x).
DensityPtr make_well_density(std::vector<double> parabolic_points, double beta,
                             std::vector<WellSpec> wells);

/// rho_*(x) = sum_{j=0}^{N-1} rho(H^j x) DH^j(x).
DensityPtr make_rho_star(MapPtr H, DensityPtr rho, int N);

DensityPtr density_from_json(const nlohmann::json& j);

} // namespace circlemap

#endif
