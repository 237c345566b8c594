#ifndef CIRCLEMAP_SERIES_HPP
#define CIRCLEMAP_SERIES_HPP

#include <algorithm>
#include <cassert>
#include <vector>

#include "circlemap/errors.hpp"
#include "circlemap/scalars.hpp"

namespace circlemap {

/// Truncated Taylor series c[0] + c[1] t + ... + c[M] t^M.  All operations
/// truncate to the smaller order of their operands; the truncation order is
/// part of the value.
template <class T>
class Series {
  public:
    Series() = default;
    explicit Series(int order) : c_(static_cast<size_t>(order) + 1, T(0)) {}
    Series(int order, T c0) : Series(order) { c_[0] = std::move(c0); }

    static Series constant(T c0, int order) { return Series(order, std::move(c0)); }

    /// c0 + t
    static Series variable(T c0, int order) {
        Series s(order, std::move(c0));
        if (order >= 1) s.c_[1] = T(1);
        return s;
    }

    int order() const { return static_cast<int>(c_.size()) - 1; }
    const T& operator[](int i) const { return c_[static_cast<size_t>(i)]; }
    T& operator[](int i) { return c_[static_cast<size_t>(i)]; }
    const std::vector<T>& coeffs() const { return c_; }

    Series truncated(int order) const {
        Series r(order);
        int m = std::min(order, this->order());
        for (int i = 0; i <= m; ++i) r.c_[i] = c_[i];
        return r;
    }

    friend Series operator+(const Series& a, const Series& b) {
        int m = std::min(a.order(), b.order());
        Series r(m);
        for (int i = 0; i <= m; ++i) r.c_[i] = a.c_[i] + b.c_[i];
        return r;
    }
    friend Series operator-(const Series& a, const Series& b) {
        int m = std::min(a.order(), b.order());
        Series r(m);
        for (int i = 0; i <= m; ++i) r.c_[i] = a.c_[i] - b.c_[i];
        return r;
    }
    friend Series operator-(const Series& a) {
        Series r(a.order());
        for (int i = 0; i <= a.order(); ++i) r.c_[i] = -a.c_[i];
        return r;
    }
    friend Series operator*(const T& s, const Series& a) {
        Series r(a.order());
        for (int i = 0; i <= a.order(); ++i) r.c_[i] = s * a.c_[i];
        return r;
    }
    friend Series operator*(const Series& a, const Series& b) {
        int m = std::min(a.order(), b.order());
        Series r(m);
        for (int i = 0; i <= m; ++i)
            for (int j = 0; j <= m - i; ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
        return r;
    }
    Series& operator+=(const Series& b) { return *this = *this + b; }

    friend Series operator+(const Series& a, const T& s) {
        Series r = a;
        r.c_[0] += s;
        return r;
    }
    friend Series operator-(const Series& a, const T& s) {
        Series r = a;
        r.c_[0] -= s;
        return r;
    }

    /// a / b with b[0] != 0.
    friend Series operator/(const Series& a, const Series& b) {
        int m = std::min(a.order(), b.order());
        if (b.c_[0] == T(0)) fail(ErrorCode::NotInvertible, "series division by zero constant term");
        Series r(m);
        for (int i = 0; i <= m; ++i) {
            T acc = i <= a.order() ? a.c_[i] : T(0);
            for (int j = 1; j <= i; ++j) acc -= b.c_[j] * r.c_[i - j];
            r.c_[i] = acc / b.c_[0];
        }
        return r;
    }

    /// Composition this(inner), inner[0] must be exactly zero.
    Series compose(const Series& inner) const {
        int m = std::min(order(), inner.order());
        assert(inner.c_[0] == T(0));
        Series in = inner.truncated(m);
        // Horner over the outer coefficients.
        Series r = Series::constant(c_[static_cast<size_t>(std::min(order(), m))], m);
        for (int i = std::min(order(), m) - 1; i >= 0; --i) {
            r = r * in;
            r.c_[0] += c_[static_cast<size_t>(i)];
        }
        return r;
    }

    /// Compositional inverse: this[0] == 0, this[1] != 0; returns g with
    /// this(g(t)) = t up to the truncation order.
    Series reversion() const {
        int m = order();
        if (c_[0] != T(0)) fail(ErrorCode::NotInvertible, "reversion needs zero constant term");
        if (m < 1 || c_[1] == T(0)) fail(ErrorCode::NotInvertible, "reversion needs nonzero linear term");
        Series g(m);
        g.c_[1] = T(1) / c_[1];
        for (int k = 2; k <= m; ++k) {
            // With g known through order k-1 (and g_k = 0), the coefficient of
            // t^k in f(g(t)) is c1*g_k + [t^k](f∘g_{<k}); solve for g_k.
            Series fg = this->truncated(k).compose(g.truncated(k));
            g.c_[k] = -fg.c_[k] / c_[1];
        }
        return g;
    }

    Series derivative() const {
        int m = order();
        Series r(std::max(0, m - 1));
        for (int i = 1; i <= m; ++i) r.c_[i - 1] = T(i) * c_[i];
        return r;
    }

    /// Antiderivative with given constant term; raises the order by one.
    Series antiderivative(T c0) const {
        int m = order();
        Series r(m + 1);
        r.c_[0] = std::move(c0);
        for (int i = 0; i <= m; ++i) r.c_[i + 1] = c_[i] / T(i + 1);
        return r;
    }

    T eval(const T& t) const {
        T r = c_[static_cast<size_t>(order())];
        for (int i = order() - 1; i >= 0; --i) r = r * t + c_[static_cast<size_t>(i)];
        return r;
    }

    /// Integer power by repeated squaring.
    Series pow_int(long e) const {
        assert(e >= 0);
        Series r = Series::constant(T(1), order());
        Series b = *this;
        while (e > 0) {
            if (e & 1) r = r * b;
            b = b * b;
            e >>= 1;
        }
        return r;
    }

    bool operator==(const Series& o) const { return c_ == o.c_; }

  private:
    std::vector<T> c_;
};

// ---- analytic series (float scalars only) ----------------------------------

/// exp(u) where u[0] == 0 (no scalar exp needed); valid over any field.
template <class T>
Series<T> exp_zero_const(const Series<T>& u) {
    assert(u[0] == T(0));
    int m = u.order();
    Series<T> e(m);
    e[0] = T(1);
    for (int k = 1; k <= m; ++k) {
        T acc = T(0);
        for (int j = 1; j <= k; ++j) acc += T(j) * u[j] * e[k - j];
        e[k] = acc / T(k);
    }
    return e;
}

/// log(u) with caller-supplied constant term log(u[0]); u[0] != 0.
template <class T>
Series<T> log_with_const(const Series<T>& u, T log_c0) {
    int m = u.order();
    Series<T> l(m);
    l[0] = std::move(log_c0);
    for (int k = 1; k <= m; ++k) {
        T acc = T(k) * u[k];
        for (int j = 1; j < k; ++j) acc -= T(j) * l[j] * u[k - j];
        l[k] = acc / (T(k) * u[0]);
    }
    return l;
}

template <class T>
struct SinCosSeries {
    Series<T> sin, cos;
};

/// sin/cos of a series, computed jointly via s' = c u', c' = -s u'.
template <class T>
SinCosSeries<T> sincos_of(const Series<T>& u) {
    static_assert(!scalar_traits<T>::is_exact, "transcendental series need float scalars");
    int m = u.order();
    SinCosSeries<T> r{Series<T>(m), Series<T>(m)};
    r.sin[0] = sin(u[0]);
    r.cos[0] = cos(u[0]);
    for (int k = 1; k <= m; ++k) {
        T sa = T(0), ca = T(0);
        for (int j = 1; j <= k; ++j) {
            sa += T(j) * u[j] * r.cos[k - j];
            ca += T(j) * u[j] * r.sin[k - j];
        }
        r.sin[k] = sa / T(k);
        r.cos[k] = -ca / T(k);
    }
    return r;
}

template <class T>
Series<T> exp_of(const Series<T>& u) {
    static_assert(!scalar_traits<T>::is_exact, "transcendental series need float scalars");
    Series<T> z = u;
    T c0 = z[0];
    z[0] = T(0);
    return exp(c0) * exp_zero_const(z);
}

template <class T>
Series<T> log_of(const Series<T>& u) {
    static_assert(!scalar_traits<T>::is_exact, "transcendental series need float scalars");
    return log_with_const(u, log(u[0]));
}

template <class T>
Series<T> atan_of(const Series<T>& u) {
    static_assert(!scalar_traits<T>::is_exact, "transcendental series need float scalars");
    int m = u.order();
    if (m == 0) return Series<T>::constant(atan(u[0]), 0);
    Series<T> one = Series<T>::constant(T(1), m - 1);
    Series<T> w = u.derivative() / (one + u.truncated(m - 1) * u.truncated(m - 1));
    return w.antiderivative(atan(u[0]));
}

} // namespace circlemap

#endif
