#ifndef CIRCLEMAP_SCALARS_HPP
#define CIRCLEMAP_SCALARS_HPP

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace circlemap {

namespace mp = boost::multiprecision;

/// Arbitrary-precision binary float; working precision is set globally via
/// PrecisionGuard (mantissa bits), new values pick it up at construction.
using BigFloat = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;

/// Exact rational scalar for the jet-level identity checks.
using Rational = mp::number<mp::gmp_rational, mp::et_off>;

inline unsigned bits_to_digits10(unsigned bits) {
    return static_cast<unsigned>(bits * 0.3010299956639812) + 2;
}

/// Scoped working precision for BigFloat (restores the previous one).
class PrecisionGuard {
  public:
    explicit PrecisionGuard(unsigned bits)
        : saved_(BigFloat::default_precision()) {
        BigFloat::default_precision(bits_to_digits10(bits));
    }
    ~PrecisionGuard() { BigFloat::default_precision(saved_); }
    PrecisionGuard(const PrecisionGuard&) = delete;
    PrecisionGuard& operator=(const PrecisionGuard&) = delete;

  private:
    unsigned saved_;
};

template <class T>
struct scalar_traits {
    static constexpr bool is_exact = false;
};

template <>
struct scalar_traits<double> {
    static constexpr bool is_exact = false;
    static double eps() { return std::numeric_limits<double>::epsilon(); }
    static double pi() { return 3.14159265358979323846264338327950288; }
    static double from_double(double x) { return x; }
    static double to_double(double x) { return x; }
};

template <>
struct scalar_traits<BigFloat> {
    static constexpr bool is_exact = false;
    static BigFloat eps() {
        return std::numeric_limits<BigFloat>::epsilon();
    }
    static BigFloat pi() { return 4 * atan(BigFloat(1)); }
    static BigFloat from_double(double x) { return BigFloat(x); }
    static double to_double(const BigFloat& x) {
        return x.convert_to<double>();
    }
};

template <>
struct scalar_traits<Rational> {
    static constexpr bool is_exact = true;
    static Rational from_double(double x) {
        // Exact: every finite double is rational.
        return Rational(x);
    }
    static double to_double(const Rational& x) {
        return x.convert_to<double>();
    }
};

using std::abs;
using std::atan;
using std::atan2;
using std::cos;
using std::exp;
using std::floor;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;

/// Minimal complex pair over any scalar field (std::complex is not
/// guaranteed to work with multiprecision types).
template <class T>
struct Cx {
    T re{};
    T im{};

    Cx() = default;
    Cx(T r, T i) : re(std::move(r)), im(std::move(i)) {}
    explicit Cx(T r) : re(std::move(r)), im(T(0)) {}

    friend Cx operator+(const Cx& a, const Cx& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend Cx operator-(const Cx& a, const Cx& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend Cx operator-(const Cx& a) { return {-a.re, -a.im}; }
    friend Cx operator*(const Cx& a, const Cx& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend Cx operator*(const T& s, const Cx& a) {
        return {s * a.re, s * a.im};
    }
    friend Cx operator/(const Cx& a, const Cx& b) {
        T den = b.re * b.re + b.im * b.im;
        return {(a.re * b.re + a.im * b.im) / den,
                (a.im * b.re - a.re * b.im) / den};
    }
    Cx& operator+=(const Cx& b) {
        re += b.re;
        im += b.im;
        return *this;
    }
    Cx& operator-=(const Cx& b) {
        re -= b.re;
        im -= b.im;
        return *this;
    }
    friend bool operator==(const Cx& a, const Cx& b) {
        return a.re == b.re && a.im == b.im;
    }
};

template <class T>
struct scalar_traits<Cx<T>> {
    static constexpr bool is_exact = scalar_traits<T>::is_exact;
};

inline double frac(double x) {
    double f = x - std::floor(x);
    if (f >= 1.0) f -= 1.0;  // guard against rounding at the seam
    return f;
}

/// Distance on the circle R/Z.
inline double circle_dist(double a, double b) {
    double d = frac(a - b);
    return d <= 0.5 ? d : 1.0 - d;
}

} // namespace circlemap

#endif
