#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cha/errors.hpp"
#include "cha/quadrature.hpp"

namespace cha {

/// Series value together with an estimate of its absolute rounding error.
struct SeriesEstimate {
    double value;
    double abs_error;
};

namespace detail {

inline bool is_nonpositive_integer(double b) { return b <= 0.0 && b == std::floor(b); }

template <class T>
struct KummerSum {
    T value;
    T abs_error;
};

// Ascending series for 1F1(a;b;x). Terms are summed with Neumaier compensation;
// the error estimate charges each term for the ~3k roundings in its product.
template <class T>
KummerSum<T> kummer_series(const T& a, const T& b, const T& x) {
    using std::abs;
    const T eps = std::numeric_limits<T>::epsilon();
    T term = 1, sum = 1, comp = 0, mass = 1;
    for (int k = 0; k < 100000; ++k) {
        T factor = (a + k) / (b + k) * x / (k + 1);
        term *= factor;
        if (term == 0) break;
        T next = sum + term;
        if (abs(sum) >= abs(term))
            comp += (sum - next) + term;
        else
            comp += (term - next) + sum;
        sum = next;
        mass += 3 * (k + 2) * abs(term);
        // stop once past the sign change of (a+k) with shrinking, negligible terms
        if (a + k > 0 && abs(factor) < 0.5 && abs(term) < eps * abs(sum + comp)) break;
    }
    T value = sum + comp;
    return {value, eps * mass};
}

inline SeriesEstimate kummer_estimate_positive(double a, double b, double x, double rel_tol,
                                               bool allow_throw) {
    using namespace boost::multiprecision;
    auto s = kummer_series<double>(a, b, x);
    if (s.abs_error <= rel_tol * std::abs(s.value)) return {s.value, s.abs_error};

    auto s50 = kummer_series<cpp_bin_float_50>(a, b, x);
    if (s50.abs_error <= rel_tol * abs(s50.value))
        return {s50.value.convert_to<double>(), s50.abs_error.convert_to<double>()};
    auto s100 = kummer_series<cpp_bin_float_100>(a, b, x);
    if (s100.abs_error <= rel_tol * abs(s100.value))
        return {s100.value.convert_to<double>(), s100.abs_error.convert_to<double>()};
    using float250 = number<cpp_bin_float<250>>;
    auto s250 = kummer_series<float250>(a, b, x);
    if (s250.abs_error <= rel_tol * abs(s250.value) || !allow_throw) {
        // double rounding dominates once the wide sum is accurate
        double v = s250.value.convert_to<double>();
        double e = s250.abs_error.convert_to<double>();
        return {v, std::max(e, std::abs(v) * std::numeric_limits<double>::epsilon())};
    }
    throw PrecisionLossError("kummer_1f1: series cancellation exceeds 250-bit-digit accumulation");
}

// Re[e^{-iy} 1F1(b/2 + i eta; b; 2iy)], which is real by Kummer's transformation.
// Plain complex series; the error estimate follows kummer_series.
template <class T>
KummerSum<T> kummer_series_imag(const T& b, const T& eta, const T& y) {
    using std::abs;
    using std::cos;
    using std::sin;
    using std::sqrt;
    const T eps = std::numeric_limits<T>::epsilon();
    T tr = 1, ti = 0, sr = 1, si = 0, mass = 1;
    for (int k = 0; k < 100000; ++k) {
        // (a + k) * 2iy / ((b + k)(k + 1)) with a = b/2 + i eta
        T den = (b + k) * (k + 1);
        T fr = -2 * y * eta / den, fi = 2 * y * (b / 2 + k) / den;
        T nr = tr * fr - ti * fi;
        ti = tr * fi + ti * fr;
        tr = nr;
        sr += tr;
        si += ti;
        T mag = sqrt(tr * tr + ti * ti);
        mass += 3 * (k + 2) * mag;
        if (mag == 0) break;
        if (sqrt(fr * fr + fi * fi) < 0.5 && mag < eps * sqrt(sr * sr + si * si)) break;
    }
    return {cos(y) * sr + sin(y) * si, eps * mass};
}

inline SeriesEstimate kummer_estimate_imag(double b, double eta, double y, double rel_tol) {
    using namespace boost::multiprecision;
    auto s = kummer_series_imag<double>(b, eta, y);
    if (s.abs_error <= rel_tol * std::abs(s.value)) return {s.value, s.abs_error};
    auto s50 = kummer_series_imag<cpp_bin_float_50>(b, eta, y);
    if (s50.abs_error <= rel_tol * abs(s50.value))
        return {s50.value.convert_to<double>(), s50.abs_error.convert_to<double>()};
    auto s100 = kummer_series_imag<cpp_bin_float_100>(b, eta, y);
    double v = s100.value.convert_to<double>();
    double e = s100.abs_error.convert_to<double>();
    return {v, std::max(e, std::abs(v) * std::numeric_limits<double>::epsilon())};
}

}  // namespace detail

/// 1F1(a;b;x) with its absolute error estimate. Never throws on precision;
/// callers that need sign information near a root use this form.
inline SeriesEstimate kummer_1f1_estimate(double a, double b, double x) {
    if (detail::is_nonpositive_integer(b)) throw DomainError("kummer_1f1: b is a non-positive integer");
    if (x == 0.0) return {1.0, 0.0};
    if (x < 0.0) {
        // Kummer transformation: M(a,b,x) = e^x M(b-a,b,-x)
        auto s = detail::kummer_estimate_positive(b - a, b, -x, 1e-13, false);
        double ex = std::exp(x);
        return {ex * s.value, ex * s.abs_error};
    }
    return detail::kummer_estimate_positive(a, b, x, 1e-13, false);
}

inline double kummer_1f1(double a, double b, double x) {
    if (detail::is_nonpositive_integer(b)) throw DomainError("kummer_1f1: b is a non-positive integer");
    if (x == 0.0) return 1.0;
    if (x < 0.0) return std::exp(x) * detail::kummer_estimate_positive(b - a, b, -x, 1e-13, true).value;
    return detail::kummer_estimate_positive(a, b, x, 1e-13, true).value;
}

/// Associated Legendre function P_l^m(u) without the Condon-Shortley phase.
inline double assoc_legendre(int l, int m, double u) {
    if (l < 0 || std::abs(m) > l) throw DomainError("assoc_legendre: need 0 <= |m| <= l");
    if (!(std::abs(u) <= 1.0)) throw DomainError("assoc_legendre: |u| > 1");
    if (m < 0) {
        int mm = -m;
        double ratio = 1.0;  // (l-mm)!/(l+mm)!
        for (int k = l - mm + 1; k <= l + mm; ++k) ratio /= k;
        double sign = (mm % 2 == 0) ? 1.0 : -1.0;
        return sign * ratio * assoc_legendre(l, mm, u);
    }
    double pmm = 1.0;
    if (m > 0) {
        double s = std::sqrt((1.0 - u) * (1.0 + u));
        double fact = 1.0;
        for (int i = 1; i <= m; ++i) {
            pmm *= fact * s;
            fact += 2.0;
        }
    }
    if (l == m) return pmm;
    double pmm1 = u * (2 * m + 1) * pmm;
    if (l == m + 1) return pmm1;
    double pll = 0.0;
    for (int ll = m + 2; ll <= l; ++ll) {
        pll = (u * (2 * ll - 1) * pmm1 - (ll + m - 1) * pmm) / (ll - m);
        pmm = pmm1;
        pmm1 = pll;
    }
    return pll;
}

namespace detail {

inline double bessel_series(int l, double x) {
    // x^l / (2l+1)!! * sum_k (-x^2/2)^k / (k! (2l+3)(2l+5)...(2l+2k+1))
    double lead = 1.0;
    for (int k = 1; k <= l; ++k) lead *= x / (2 * k + 1);
    double term = 1.0, sum = 1.0;
    const double y = -0.5 * x * x;
    for (int k = 1; k < 60; ++k) {
        term *= y / (k * (2.0 * l + 2 * k + 1));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return lead * sum;
}

inline double bessel_miller(int l, double x) {
    const int top = l + 30 + static_cast<int>(std::sqrt(40.0 * (l + 1)));
    double f_next = 0.0, f = 1e-100;
    double f_l = 0.0, f0 = 0.0, f1 = 0.0;
    double norm = 0.0;  // sum (2k+1) f_k^2
    for (int k = top; k >= 0; --k) {
        if (k == l) f_l = f;
        if (k == 1) f1 = f;
        if (k == 0) f0 = f;
        norm += (2.0 * k + 1.0) * f * f;
        if (k == 0) break;
        double f_prev = (2.0 * k + 1.0) / x * f - f_next;
        f_next = f;
        f = f_prev;
        if (std::abs(f) > 1e100) {
            f *= 1e-100;
            f_next *= 1e-100;
            f_l *= 1e-100;
            f1 *= 1e-100;
            norm *= 1e-200;
        }
    }
    double scale = 1.0 / std::sqrt(norm);
    double j0 = std::sin(x) / x;
    double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
    double sign = (std::abs(j0) >= std::abs(j1)) ? (j0 * f0 >= 0 ? 1.0 : -1.0) : (j1 * f1 >= 0 ? 1.0 : -1.0);
    return sign * scale * f_l;
}

inline double bessel_upward(int l, double x) {
    double s = std::sin(x), c = std::cos(x);
    double j0 = s / x;
    if (l == 0) return j0;
    double j1 = s / (x * x) - c / x;
    for (int k = 1; k < l; ++k) {
        double j2 = (2.0 * k + 1.0) / x * j1 - j0;
        j0 = j1;
        j1 = j2;
    }
    return j1;
}

}  // namespace detail

/// Spherical Bessel function j_l(x), x >= 0.
inline double spherical_bessel_j(int l, double x) {
    if (l < 0) throw DomainError("spherical_bessel_j: l < 0");
    if (x < 0.0) throw DomainError("spherical_bessel_j: x < 0");
    if (x == 0.0) return l == 0 ? 1.0 : 0.0;
    if (x <= 0.5 || x * x < 0.1 * (2 * l + 3)) return detail::bessel_series(l, x);
    if (x < l) return detail::bessel_miller(l, x);
    return detail::bessel_upward(l, x);
}

}  // namespace cha
