#ifndef CIRCLEMAP_POLYNOMIAL_HPP
#define CIRCLEMAP_POLYNOMIAL_HPP

#include <vector>

#include "circlemap/errors.hpp"
#include "circlemap/series.hpp"

namespace circlemap {

/// Dense polynomial with exact (or float) coefficients, lowest degree first.
template <class T>
class Polynomial {
  public:
    Polynomial() : c_{T(0)} {}
    explicit Polynomial(std::vector<T> coeffs) : c_(std::move(coeffs)) {
        if (c_.empty()) c_.push_back(T(0));
    }
    static Polynomial constant(T v) { return Polynomial(std::vector<T>{std::move(v)}); }

    int degree() const {
        for (int i = static_cast<int>(c_.size()) - 1; i >= 0; --i)
            if (c_[static_cast<size_t>(i)] != T(0)) return i;
        return 0;
    }
    bool is_zero() const {
        for (const auto& x : c_)
            if (x != T(0)) return false;
        return true;
    }
    const std::vector<T>& coeffs() const { return c_; }
    T coeff(int i) const {
        return i < static_cast<int>(c_.size()) ? c_[static_cast<size_t>(i)] : T(0);
    }

    T eval(const T& x) const {
        T r = T(0);
        for (int i = static_cast<int>(c_.size()) - 1; i >= 0; --i)
            r = r * x + c_[static_cast<size_t>(i)];
        return r;
    }

    Polynomial derivative() const {
        if (c_.size() <= 1) return Polynomial();
        std::vector<T> d(c_.size() - 1);
        for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = T(static_cast<long>(i)) * c_[i];
        return Polynomial(std::move(d));
    }

    /// P(lambda * x)
    Polynomial scale_arg(const T& lambda) const {
        std::vector<T> d(c_.size());
        T p = T(1);
        for (size_t i = 0; i < c_.size(); ++i) {
            d[i] = c_[i] * p;
            p = p * lambda;
        }
        return Polynomial(std::move(d));
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        std::vector<T> d(std::max(a.c_.size(), b.c_.size()), T(0));
        for (size_t i = 0; i < a.c_.size(); ++i) d[i] += a.c_[i];
        for (size_t i = 0; i < b.c_.size(); ++i) d[i] += b.c_[i];
        return Polynomial(std::move(d));
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
        std::vector<T> d(std::max(a.c_.size(), b.c_.size()), T(0));
        for (size_t i = 0; i < a.c_.size(); ++i) d[i] += a.c_[i];
        for (size_t i = 0; i < b.c_.size(); ++i) d[i] -= b.c_[i];
        return Polynomial(std::move(d));
    }
    friend Polynomial operator*(const T& s, const Polynomial& a) {
        std::vector<T> d(a.c_.size());
        for (size_t i = 0; i < a.c_.size(); ++i) d[i] = s * a.c_[i];
        return Polynomial(std::move(d));
    }

    bool equals(const Polynomial& o) const { return (*this - o).is_zero(); }

    Series<T> as_series(int order) const {
        Series<T> s(order);
        for (int i = 0; i <= order && i < static_cast<int>(c_.size()); ++i)
            s[i] = c_[static_cast<size_t>(i)];
        return s;
    }

  private:
    std::vector<T> c_;
};

/// Q = (2n+1) P + x P', i.e. x^{2n} Q(x) = d/dx (x^{2n+1} P(x)).
/// Coefficientwise Q_i = (2n+1+i) P_i.
template <class T>
Polynomial<T> q_from_p(const Polynomial<T>& P, int n) {
    if (P.degree() > 2 * n - 1)
        fail(ErrorCode::DegreeTooHigh, "deg P exceeds 2n-1");
    std::vector<T> q(P.coeffs().size());
    for (size_t i = 0; i < q.size(); ++i)
        q[i] = T(2 * n + 1 + static_cast<long>(i)) * P.coeffs()[i];
    return Polynomial<T>(std::move(q));
}

/// S = (4n+1) R + x R', i.e. x^{4n} S(x) = d/dx (x^{4n+1} R(x)).
template <class T>
Polynomial<T> s_from_r(const Polynomial<T>& R, int n) {
    if (R.degree() > 2 * n - 1)
        fail(ErrorCode::DegreeTooHigh, "deg R exceeds 2n-1");
    std::vector<T> s(R.coeffs().size());
    for (size_t i = 0; i < s.size(); ++i)
        s[i] = T(4 * n + 1 + static_cast<long>(i)) * R.coeffs()[i];
    return Polynomial<T>(std::move(s));
}

} // namespace circlemap

#endif
