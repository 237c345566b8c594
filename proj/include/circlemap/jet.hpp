#ifndef CIRCLEMAP_JET_HPP
#define CIRCLEMAP_JET_HPP

#include <optional>
#include <vector>

#include "circlemap/errors.hpp"
#include "circlemap/polynomial.hpp"
#include "circlemap/series.hpp"

namespace circlemap {

/// Truncated Taylor expansion of a lift germ at a base point:
///   H(base + t) = ser[0] + ser[1] t + ... + ser[M] t^M.
/// lift_degree is the covering degree of the represented lift, used for the
/// translation identity H(x + m) = H(x) + deg*m when chaining germs whose
/// base points differ by integers.
template <class T>
struct Jet {
    T base{};
    Series<T> ser;
    int lift_degree = 1;

    int order() const { return ser.order(); }
    const T& image() const { return ser[0]; }
    T multiplier() const { return ser.order() >= 1 ? ser[1] : T(0); }

    static Jet identity(T base, int order) {
        Jet j;
        j.ser = Series<T>::variable(base, order);
        j.base = std::move(base);
        j.lift_degree = 1;
        return j;
    }

    /// The same germ seen at base + m (m integer): coefficients are unchanged
    /// except the image shifts by lift_degree * m.
    Jet shifted_base(long m) const {
        Jet j = *this;
        j.base = j.base + T(m);
        j.ser[0] = j.ser[0] + T(lift_degree) * T(m);
        return j;
    }
};

namespace detail {

template <class T>
std::optional<long> as_integer(const T& x, const T& tol) {
    if constexpr (scalar_traits<T>::is_exact) {
        Rational r = x;
        if (denominator(r) == 1) {
            long v = numerator(r).template convert_to<long>();
            return v;
        }
        return std::nullopt;
    } else {
        T r = floor(x + T(0.5));
        if (abs(x - r) <= tol) return static_cast<long>(scalar_traits<T>::to_double(r));
        return std::nullopt;
    }
}

template <class T>
T default_match_tol() {
    if constexpr (scalar_traits<T>::is_exact)
        return T(0);
    else
        return sqrt(scalar_traits<T>::eps());
}

} // namespace detail

/// Jet of f∘g.  Requires g.image() == f.base up to an integer shift (exact in
/// rational mode, within match_tol otherwise); the shift is absorbed through
/// f's translation identity.
template <class T>
Jet<T> jet_compose(const Jet<T>& f, const Jet<T>& g,
                   std::optional<T> match_tol = std::nullopt) {
    T tol = match_tol ? *match_tol : detail::default_match_tol<T>();
    T shift = g.image() - f.base;
    auto m = detail::as_integer(shift, tol);
    if (!m) fail(ErrorCode::BasePointMismatch, "g image does not meet f base (mod Z)");
    Jet<T> fa = (*m == 0) ? f : f.shifted_base(*m);

    int order = std::min(f.order(), g.order());
    Series<T> inner = g.ser.truncated(order);
    // Fold any sub-tolerance mismatch into zero: composition needs an exactly
    // zero inner constant term.
    inner[0] = T(0);
    Jet<T> r;
    r.base = g.base;
    r.ser = fa.ser.truncated(order).compose(inner);
    r.lift_degree = f.lift_degree * g.lift_degree;
    return r;
}

/// Jet of the inverse germ: requires multiplier != 0 and lift degree 1.
template <class T>
Jet<T> jet_invert(const Jet<T>& f) {
    if (f.lift_degree != 1)
        fail(ErrorCode::NotInvertible, "only degree-1 lifts are globally invertible");
    if (f.order() < 1 || f.ser[1] == T(0))
        fail(ErrorCode::NotInvertible, "vanishing multiplier");
    Series<T> centered = f.ser;
    centered[0] = T(0);
    Jet<T> r;
    r.base = f.image();
    r.ser = centered.reversion();
    r.ser[0] = f.base;
    r.lift_degree = 1;
    return r;
}

/// Jet of the j-fold composition along a cycle of germs, starting at index k:
/// jets[i] is the germ of one map at the i-th orbit point, and consecutive
/// images meet consecutive bases modulo integer shifts.  j = 0 gives the
/// identity germ at jets[k].base.
template <class T>
Jet<T> jet_cycle_iterate(const std::vector<Jet<T>>& jets, int k, int j,
                         std::optional<T> match_tol = std::nullopt) {
    int s = static_cast<int>(jets.size());
    if (s == 0) fail(ErrorCode::ChainMismatch, "empty cycle");
    int order = jets[static_cast<size_t>(k % s)].order();
    if (j == 0) return Jet<T>::identity(jets[static_cast<size_t>(k % s)].base, order);
    Jet<T> cur = jets[static_cast<size_t>(k % s)];
    for (int i = 1; i < j; ++i) {
        const Jet<T>& next = jets[static_cast<size_t>((k + i) % s)];
        try {
            cur = jet_compose(next, cur, match_tol);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::BasePointMismatch)
                fail(ErrorCode::ChainMismatch, "cycle jets do not chain");
            throw;
        }
    }
    return cur;
}

/// Local normal form of a multiplier-one germ:
///   f(base + t) = image + t (1 + t^{2n} P(t) + t^{4n} R(t) + O(t^{6n})),
/// with deg P, deg R <= 2n-1.  R is present only when the jet order reaches 6n.
template <class T>
struct ParabolicForm {
    int n = 0;
    Polynomial<T> P;
    std::optional<Polynomial<T>> R;
};

template <class T>
struct ExtractOptions {
    T mult_tol;        // |c1 - 1| tolerance
    T zero_tol;        // relative threshold below which a coefficient counts as zero
    ExtractOptions() {
        if constexpr (scalar_traits<T>::is_exact) {
            mult_tol = T(0);
            zero_tol = T(0);
        } else {
            mult_tol = sqrt(scalar_traits<T>::eps());
            zero_tol = sqrt(scalar_traits<T>::eps());
        }
    }
};

template <class T>
ParabolicForm<T> extract_parabolic_form(const Jet<T>& f,
                                        const ExtractOptions<T>& opt = {}) {
    if (f.order() < 2) fail(ErrorCode::InsufficientOrder, "jet order < 2");
    T one_err = f.ser[1] - T(1);
    bool mult_ok;
    if constexpr (scalar_traits<T>::is_exact)
        mult_ok = (one_err == T(0));
    else
        mult_ok = abs(one_err) <= opt.mult_tol;
    if (!mult_ok) fail(ErrorCode::NotParabolic, "multiplier differs from 1");

    T scale = T(1);
    if constexpr (!scalar_traits<T>::is_exact) {
        for (int i = 2; i <= f.order(); ++i)
            if (abs(f.ser[i]) > scale) scale = abs(f.ser[i]);
    }
    auto is_zero = [&](const T& v) {
        if constexpr (scalar_traits<T>::is_exact)
            return v == T(0);
        else
            return abs(v) <= opt.zero_tol * scale;
    };

    int lead = 0;
    for (int i = 2; i <= f.order(); ++i) {
        if (!is_zero(f.ser[i])) {
            lead = i;
            break;
        }
    }
    if (lead == 0) fail(ErrorCode::InsufficientOrder, "no nonlinear term within jet order");
    if (lead % 2 == 0) fail(ErrorCode::EvenLeadingOrder, "leading nonlinear term has even order");
    int n = (lead - 1) / 2;

    ParabolicForm<T> form;
    form.n = n;
    if (f.order() < 4 * n)
        fail(ErrorCode::InsufficientOrder, "jet order below 4n, cannot read P");
    {
        std::vector<T> p(static_cast<size_t>(2 * n));
        for (int i = 0; i < 2 * n; ++i) p[static_cast<size_t>(i)] = f.ser[2 * n + 1 + i];
        form.P = Polynomial<T>(std::move(p));
    }
    if (f.order() >= 6 * n) {
        std::vector<T> r(static_cast<size_t>(2 * n));
        for (int i = 0; i < 2 * n; ++i) r[static_cast<size_t>(i)] = f.ser[4 * n + 1 + i];
        form.R = Polynomial<T>(std::move(r));
    }
    return form;
}

/// Rebuild the jet of base + t(1 + t^{2n}P + t^{4n}R) at the given order.
template <class T>
Jet<T> reconstruct_parabolic_jet(T base, T image, const ParabolicForm<T>& form,
                                 int order, int lift_degree = 1) {
    Jet<T> j;
    j.base = std::move(base);
    j.lift_degree = lift_degree;
    j.ser = Series<T>(order);
    j.ser[0] = std::move(image);
    if (order >= 1) j.ser[1] = T(1);
    int n = form.n;
    for (int i = 0; i < 2 * n; ++i) {
        int k = 2 * n + 1 + i;
        if (k <= order) j.ser[k] = form.P.coeff(i);
    }
    if (form.R) {
        for (int i = 0; i < 2 * n; ++i) {
            int k = 4 * n + 1 + i;
            if (k <= order) j.ser[k] = form.R->coeff(i);
        }
    }
    return j;
}

} // namespace circlemap

#endif
