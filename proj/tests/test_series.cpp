#include <doctest.h>
#include "circlemap/map_expr.hpp"
using namespace circlemap;
TEST_CASE("smoke: doubling lift evaluates") {
    auto H = MapExpr::trig_lift(2);
    CHECK(H->eval(0.25) == doctest::Approx(0.5));
    CHECK(H->deriv(0.1) == doctest::Approx(2.0));
    auto mu = MapExpr::blaschke_power(2, 1.0 / 3.0);
    CHECK(mu->eval(0.0) == doctest::Approx(0.0));
    CHECK(mu->deriv(0.0) == doctest::Approx(1.0));
    auto s = mu->series_at(0.0, 4);
    CHECK(s[1] == doctest::Approx(1.0));
    CHECK(s[3] == doctest::Approx(9.8696044010893586 / 4.0));
}
