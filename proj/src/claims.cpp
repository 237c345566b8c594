#include "circlemap/claims.hpp"

#include <algorithm>

namespace circlemap {

namespace {

Rational rat_pow(const Rational& b, int e) {
    Rational r(1);
    for (int i = 0; i < e; ++i) r = r * b;
    return r;
}

RatJet form_jet(const Rational& base, const Rational& image, int d, int order) {
    RatJet j;
    j.base = base;
    j.ser = Series<Rational>(order);
    j.ser[0] = image;
    if (order >= 1) j.ser[1] = Rational(1);
    j.lift_degree = d;
    return j;
}

void check_cycle_inputs(size_t s, const std::vector<Rational>& points, int wrap) {
    if (points.size() != s) fail(ErrorCode::BadInput, "point count != s");
    for (size_t i = 0; i < s; ++i)
        for (size_t j = i + 1; j < s; ++j)
            if (points[i] == points[j]) fail(ErrorCode::BadInput, "cycle points must be distinct");
    if (wrap < 0) fail(ErrorCode::BadInput, "wrap must be >= 0");
}

} // namespace

RationalCycle make_cycle_order4m(const std::vector<Rational>& points, int wrap,
                                 int d, int m, const std::vector<RatPoly>& P,
                                 int order,
                                 const std::vector<std::vector<Rational>>& tails) {
    size_t s = P.size();
    check_cycle_inputs(s, points, wrap);
    if (order < 4 * m) fail(ErrorCode::InsufficientOrder, "order must reach 4m");
    RationalCycle cyc;
    cyc.d = d;
    cyc.s = static_cast<int>(s);
    for (size_t k = 0; k < s; ++k) {
        if (P[k].degree() > 2 * m - 1) fail(ErrorCode::DegreeTooHigh, "deg P_k > 2m-1");
        Rational image = (k + 1 < s) ? points[k + 1] : points[0] + Rational(wrap);
        RatJet j = form_jet(points[k], image, d, order);
        for (int i = 0; i < 2 * m; ++i)
            if (2 * m + 1 + i <= order) j.ser[2 * m + 1 + i] = P[k].coeff(i);
        if (!tails.empty()) {
            const auto& t = tails[k];
            for (size_t i = 0; i < t.size(); ++i) {
                int idx = 4 * m + 1 + static_cast<int>(i);
                if (idx <= order) j.ser[idx] = t[i];
            }
        }
        cyc.jets.push_back(std::move(j));
    }
    return cyc;
}

RationalCycle make_cycle_order6n(const std::vector<Rational>& points, int wrap,
                                 int d, int n, const RatPoly& P,
                                 const std::vector<RatPoly>& R) {
    size_t s = R.size();
    check_cycle_inputs(s, points, wrap);
    if (P.degree() > 2 * n - 1) fail(ErrorCode::DegreeTooHigh, "deg P > 2n-1");
    int order = 6 * n;
    RationalCycle cyc;
    cyc.d = d;
    cyc.s = static_cast<int>(s);
    for (size_t k = 0; k < s; ++k) {
        if (R[k].degree() > 2 * n - 1) fail(ErrorCode::DegreeTooHigh, "deg R_k > 2n-1");
        Rational image = (k + 1 < s) ? points[k + 1] : points[0] + Rational(wrap);
        RatJet j = form_jet(points[k], image, d, order);
        for (int i = 0; i < 2 * n; ++i) j.ser[2 * n + 1 + i] = P.coeff(i);
        for (int i = 0; i < 2 * n; ++i) j.ser[4 * n + 1 + i] = R[k].coeff(i);
        cyc.jets.push_back(std::move(j));
    }
    return cyc;
}

AveragingStep averaging_step(const RationalCycle& cycle, int N) {
    if (N % cycle.s != 0)
        fail(ErrorCode::BadInput, "N must be a multiple of the cycle period");
    AveragingStep st;
    Rational L(0), p(1);
    for (int j = 0; j < N; ++j) {
        L += p;
        p = p * Rational(cycle.d);
    }
    st.L = L;
    st.lambda = L / Rational(N);

    int s = cycle.s;
    for (int k = 0; k < s; ++k) {
        Series<Rational> acc = jet_cycle_iterate(cycle.jets, k, 0).ser;
        for (int j = 1; j < N; ++j) acc += jet_cycle_iterate(cycle.jets, k, j).ser;
        RatJet phi;
        phi.base = cycle.jets[static_cast<size_t>(k)].base;
        phi.ser = (Rational(1) / L) * acc;
        phi.lift_degree = 1;
        st.phi.push_back(std::move(phi));
    }

    st.conjugated.d = cycle.d;
    st.conjugated.s = s;
    for (int k = 0; k < s; ++k) {
        RatJet inv = jet_invert(st.phi[static_cast<size_t>(k)]);
        RatJet mid = jet_compose(cycle.jets[static_cast<size_t>(k)], inv);
        RatJet out = jet_compose(st.phi[static_cast<size_t>((k + 1) % s)], mid);
        st.conjugated.jets.push_back(std::move(out));
    }
    return st;
}

namespace {

RatPoly sum_formula(const std::vector<RatPoly>& P, int order_exp,
                    const Rational& scale, int s) {
    RatPoly acc;
    for (const auto& pk : P) acc = acc + pk.scale_arg(scale);
    return (rat_pow(scale, order_exp) / Rational(s)) * acc;
}

RatPoly block_of(const RatJet& j, int lo, int hi) {
    std::vector<Rational> c;
    for (int i = lo; i <= hi; ++i) c.push_back(j.ser[i]);
    return RatPoly(std::move(c));
}

void require_form_low_orders(const RatJet& j, int lead) {
    if (j.ser[1] != Rational(1))
        fail(ErrorCode::NotParabolic, "conjugated germ lost the unit multiplier");
    for (int i = 2; i < lead; ++i)
        if (j.ser[i] != Rational(0))
            fail(ErrorCode::NotParabolic,
                 "conjugated germ has a spurious low-order term at " + std::to_string(i));
}

} // namespace

Claim1Result verify_claim1(const std::vector<RatPoly>& P, int s, int m, int d,
                           int N, const std::vector<Rational>& points, int wrap,
                           const std::vector<std::vector<Rational>>& tails) {
    bool one_positive = false;
    for (const auto& pk : P)
        if (pk.coeff(0) > 0) one_positive = true;
    if (!one_positive)
        fail(ErrorCode::HypothesisViolated, "need P_k(0) > 0 for at least one k");

    int order = 4 * m + (tails.empty() ? 0 : static_cast<int>(tails[0].size()));
    RationalCycle cyc = make_cycle_order4m(points, wrap, d, m, P, order, tails);
    AveragingStep st = averaging_step(cyc, N);

    Claim1Result res;
    res.L = st.L;
    res.lambda = st.lambda;
    res.formula = sum_formula(P, 2 * m, st.lambda, s);
    res.printed_formula = sum_formula(P, 2 * m, st.L, s);
    res.exact = true;
    res.printed_matches = true;
    for (const auto& j : st.conjugated.jets) {
        RatJet jt;
        jt.base = j.base;
        jt.ser = j.ser.truncated(4 * m);
        jt.lift_degree = j.lift_degree;
        require_form_low_orders(jt, 2 * m + 1);
        RatPoly got = block_of(jt, 2 * m + 1, 4 * m);
        res.extracted.push_back(got);
        RatPoly resid = got - res.formula;
        res.residuals.push_back(resid);
        if (!resid.is_zero()) res.exact = false;
        if (!(got - res.printed_formula).is_zero()) res.printed_matches = false;
    }
    return res;
}

Claim2Result verify_claim2(const RatPoly& P, const std::vector<RatPoly>& R,
                           int s, int n, int d, int N,
                           const std::vector<Rational>& points, int wrap) {
    if (!(P.coeff(0) > 0))
        fail(ErrorCode::HypothesisViolated, "shared P needs P(0) > 0");
    RationalCycle cyc = make_cycle_order6n(points, wrap, d, n, P, R);
    AveragingStep st = averaging_step(cyc, N);

    Claim2Result res;
    res.L = st.L;
    res.lambda = st.lambda;
    res.P_hat_formula = rat_pow(st.lambda, 2 * n) * P.scale_arg(st.lambda);
    res.exact = true;
    std::vector<RatPoly> rhats;
    for (const auto& j : st.conjugated.jets) {
        require_form_low_orders(j, 2 * n + 1);
        RatPoly phat = block_of(j, 2 * n + 1, 4 * n);
        RatPoly rhat = block_of(j, 4 * n + 1, 6 * n);
        if (!(phat - res.P_hat_formula).is_zero()) res.exact = false;
        res.P_hat.push_back(std::move(phat));
        rhats.push_back(std::move(rhat));
    }
    res.R_hat = rhats[0];
    for (size_t k = 0; k < rhats.size(); ++k) {
        RatPoly diff = rhats[k] - rhats[0];
        if (k > 0) {
            if (!diff.is_zero()) res.exact = false;
            res.R_cross.push_back(std::move(diff));
        }
    }
    return res;
}

bool verify_pofh_identity(const RatPoly& P, int n) {
    int order = 4 * n;
    Series<Rational> x = Series<Rational>::variable(Rational(0), order);
    Series<Rational> Ps = P.as_series(order);
    Series<Rational> inner = x * (Series<Rational>::constant(Rational(1), order) +
                                  x.pow_int(2 * n) * Ps);
    Series<Rational> lhs = Ps.compose(inner);
    Series<Rational> rhs = Ps + x.pow_int(2 * n + 1) * P.derivative().as_series(order) * Ps;
    for (int i = 0; i < 4 * n; ++i)
        if (lhs[i] != rhs[i]) return false;
    return true;
}

int verify_iterate_form(const RatPoly& P, const std::vector<RatPoly>& R, int s,
                        int n, int d, int j, const std::vector<Rational>& points,
                        int wrap) {
    RationalCycle cyc = make_cycle_order6n(points, wrap, d, n, P, R);
    int order = 6 * n;
    for (int k = 0; k < s; ++k) {
        RatJet it = jet_cycle_iterate(cyc.jets, k, j);
        // F_j(u) + u^{4n+1} sum_{l<j} R_{l+k}(u), relative to the start point
        Series<Rational> u = Series<Rational>::variable(Rational(0), order);
        Series<Rational> Ps = P.as_series(order);
        Series<Rational> dPs = P.derivative().as_series(order);
        Series<Rational> G =
            Rational(2 * n + 1) * Ps * Ps + u * dPs * Ps;
        Series<Rational> target =
            u * (Series<Rational>::constant(Rational(1), order) +
                 Rational(j) * u.pow_int(2 * n) * Ps +
                 (Rational(j) * Rational(j - 1) / Rational(2)) * u.pow_int(4 * n) * G);
        Series<Rational> rsum(order);
        for (int l = 0; l < j; ++l)
            rsum += R[static_cast<size_t>((l + k) % s)].as_series(order);
        target += u.pow_int(4 * n + 1) * rsum;
        target[0] = it.ser[0];  // the orbit point itself
        for (int i = 0; i <= order; ++i)
            if (it.ser[i] != target[i]) return i;
    }
    return -1;
}

Claim1Result verify_claim1_unit_scale(const std::vector<RatPoly>& P, int s, int m,
                                      const Rational& L,
                                      const std::vector<Rational>& points, int wrap,
                                      int d) {
    int order = 4 * m;
    RationalCycle cyc = make_cycle_order4m(points, wrap, d, m, P, order);

    // Telescoping blocks: T_{k+1} - T_k = (1/s) sum_l P_l - P_k, T_0 = 0.
    RatPoly mean;
    for (const auto& pk : P) mean = mean + pk;
    mean = (Rational(1) / Rational(s)) * mean;
    std::vector<RatPoly> T(static_cast<size_t>(s));
    for (int k = 0; k + 1 < s; ++k)
        T[static_cast<size_t>(k + 1)] = T[static_cast<size_t>(k)] + mean - P[static_cast<size_t>(k)];

    std::vector<RatJet> phi;
    for (int k = 0; k < s; ++k) {
        RatJet f;
        f.base = points[static_cast<size_t>(k)];
        f.lift_degree = 1;
        f.ser = Series<Rational>(order);
        f.ser[0] = points[static_cast<size_t>(k)];  // keep the base points in place
        Series<Rational> u = Series<Rational>::variable(Rational(0), order);
        Series<Rational> body =
            u * (Series<Rational>::constant(Rational(1), order) +
                 u.pow_int(2 * m) * T[static_cast<size_t>(k)].as_series(order));
        body = (Rational(1) / L) * body;
        for (int i = 1; i <= order; ++i) f.ser[i] = body[i];
        phi.push_back(std::move(f));
    }

    Claim1Result res;
    res.L = L;
    res.lambda = L;
    res.formula = sum_formula(P, 2 * m, L, s);
    res.printed_formula = res.formula;
    res.exact = true;
    res.printed_matches = true;
    for (int k = 0; k < s; ++k) {
        RatJet inv = jet_invert(phi[static_cast<size_t>(k)]);
        RatJet mid = jet_compose(cyc.jets[static_cast<size_t>(k)], inv);
        RatJet out = jet_compose(phi[static_cast<size_t>((k + 1) % s)], mid);
        require_form_low_orders(out, 2 * m + 1);
        RatPoly got = block_of(out, 2 * m + 1, 4 * m);
        res.extracted.push_back(got);
        RatPoly resid = got - res.formula;
        res.residuals.push_back(resid);
        if (!resid.is_zero()) res.exact = false;
    }
    return res;
}

} // namespace circlemap
