#pragma once

#include <cmath>

namespace flatcert {

// Forward-mode AD scalar. Nesting Dual<Dual<double>> yields second
// derivatives.
template <class T>
struct Dual {
    T val{};
    T dot{};

    Dual() = default;
    Dual(T v) : val(std::move(v)) {}
    Dual(T v, T d) : val(std::move(v)), dot(std::move(d)) {}
};

inline double scalar_value(double x) { return x; }

template <class T>
double scalar_value(const Dual<T>& x) {
    return scalar_value(x.val);
}

// Embeds a plain double constant into the scalar type T.
template <class T>
struct ScalarLift {
    static T from(double v) { return T(v); }
};

template <class T>
struct ScalarLift<Dual<T>> {
    static Dual<T> from(double v) {
        return Dual<T>(ScalarLift<T>::from(v), ScalarLift<T>::from(0.0));
    }
};

template <class T>
T lift(double v) {
    return ScalarLift<T>::from(v);
}

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
    return {a.val + b.val, a.dot + b.dot};
}
template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
    return {a.val - b.val, a.dot - b.dot};
}
template <class T>
Dual<T> operator-(const Dual<T>& a) {
    return {-a.val, -a.dot};
}
template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
    return {a.val * b.val, a.dot * b.val + a.val * b.dot};
}
template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
    T q = a.val / b.val;
    return {q, (a.dot - q * b.dot) / b.val};
}

using std::atan;
using std::atan2;
using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;
using std::tan;

template <class T>
Dual<T> sin(const Dual<T>& a) {
    return {sin(a.val), cos(a.val) * a.dot};
}
template <class T>
Dual<T> cos(const Dual<T>& a) {
    return {cos(a.val), -sin(a.val) * a.dot};
}
template <class T>
Dual<T> tan(const Dual<T>& a) {
    T t = tan(a.val);
    return {t, (lift<T>(1.0) + t * t) * a.dot};
}
template <class T>
Dual<T> atan(const Dual<T>& a) {
    return {atan(a.val), a.dot / (lift<T>(1.0) + a.val * a.val)};
}
template <class T>
Dual<T> atan2(const Dual<T>& y, const Dual<T>& x) {
    T denom = x.val * x.val + y.val * y.val;
    return {atan2(y.val, x.val), (x.val * y.dot - y.val * x.dot) / denom};
}
template <class T>
Dual<T> exp(const Dual<T>& a) {
    T e = exp(a.val);
    return {e, e * a.dot};
}
template <class T>
Dual<T> log(const Dual<T>& a) {
    return {log(a.val), a.dot / a.val};
}
template <class T>
Dual<T> sqrt(const Dual<T>& a) {
    T s = sqrt(a.val);
    return {s, a.dot / (lift<T>(2.0) * s)};
}

// x^c for a literal exponent c; valid for negative bases where the power
// itself is defined, unlike the exp(c*ln x) route.
inline double pow_const(double x, double c) { return std::pow(x, c); }

template <class T>
Dual<T> pow_const(const Dual<T>& a, double c) {
    return {pow_const(a.val, c), lift<T>(c) * pow_const(a.val, c - 1.0) * a.dot};
}

// General x^y, requires x > 0.
template <class T>
Dual<T> pow(const Dual<T>& a, const Dual<T>& b) {
    T p = pow(a.val, b.val);
    T la = log(a.val);
    return {p, p * (b.dot * la + b.val * a.dot / a.val)};
}

}  // namespace flatcert
