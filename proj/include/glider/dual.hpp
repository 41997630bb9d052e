#pragma once

#include <array>
#include <cmath>
#include <type_traits>

#include "glider/interval.hpp"

namespace glider {

// Forward-mode dual number with N tangent directions over a base scalar T
// (double for point Jacobians, Interval for Jacobian enclosures).
template <class T, int N>
struct Dual {
    T v{};
    std::array<T, N> d{};

    Dual() = default;
    Dual(const T& value) : v(value) { d.fill(T(0.0)); }  // NOLINT
    Dual(double value) requires(!std::is_same_v<T, double>) : v(value) { d.fill(T(0.0)); }  // NOLINT

    static Dual variable(const T& value, int index)
    {
        Dual r(value);
        r.d[static_cast<std::size_t>(index)] = T(1.0);
        return r;
    }
};

namespace detail {

template <class T, int N>
Dual<T, N> chain(const Dual<T, N>& a, const T& value, const T& slope)
{
    Dual<T, N> r;
    r.v = value;
    for (int i = 0; i < N; ++i) r.d[i] = slope * a.d[i];
    return r;
}

}  // namespace detail

template <class T, int N>
Dual<T, N> operator+(const Dual<T, N>& a, const Dual<T, N>& b)
{
    Dual<T, N> r;
    r.v = a.v + b.v;
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] + b.d[i];
    return r;
}
template <class T, int N>
Dual<T, N> operator-(const Dual<T, N>& a, const Dual<T, N>& b)
{
    Dual<T, N> r;
    r.v = a.v - b.v;
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] - b.d[i];
    return r;
}
template <class T, int N>
Dual<T, N> operator-(const Dual<T, N>& a)
{
    Dual<T, N> r;
    r.v = -a.v;
    for (int i = 0; i < N; ++i) r.d[i] = -a.d[i];
    return r;
}
template <class T, int N>
Dual<T, N> operator*(const Dual<T, N>& a, const Dual<T, N>& b)
{
    Dual<T, N> r;
    r.v = a.v * b.v;
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
    return r;
}
template <class T, int N>
Dual<T, N> operator/(const Dual<T, N>& a, const Dual<T, N>& b)
{
    Dual<T, N> r;
    r.v = a.v / b.v;
    const T inv2 = T(1.0) / (b.v * b.v);
    for (int i = 0; i < N; ++i) r.d[i] = (a.d[i] * b.v - a.v * b.d[i]) * inv2;
    return r;
}

template <class T, int N>
Dual<T, N> operator+(const Dual<T, N>& a, double c) { return a + Dual<T, N>(T(c)); }
template <class T, int N>
Dual<T, N> operator+(double c, const Dual<T, N>& a) { return Dual<T, N>(T(c)) + a; }
template <class T, int N>
Dual<T, N> operator-(const Dual<T, N>& a, double c) { return a - Dual<T, N>(T(c)); }
template <class T, int N>
Dual<T, N> operator-(double c, const Dual<T, N>& a) { return Dual<T, N>(T(c)) - a; }
template <class T, int N>
Dual<T, N> operator*(const Dual<T, N>& a, double c)
{
    Dual<T, N> r;
    r.v = a.v * T(c);
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * T(c);
    return r;
}
template <class T, int N>
Dual<T, N> operator*(double c, const Dual<T, N>& a) { return a * c; }
template <class T, int N>
Dual<T, N> operator/(const Dual<T, N>& a, double c) { return a / Dual<T, N>(T(c)); }
template <class T, int N>
Dual<T, N> operator/(double c, const Dual<T, N>& a) { return Dual<T, N>(T(c)) / a; }

template <class T, int N>
Dual<T, N> sin(const Dual<T, N>& a)
{
    using std::cos;
    using std::sin;
    return detail::chain(a, T(sin(a.v)), T(cos(a.v)));
}
template <class T, int N>
Dual<T, N> cos(const Dual<T, N>& a)
{
    using std::cos;
    using std::sin;
    return detail::chain(a, T(cos(a.v)), T(-sin(a.v)));
}
template <class T, int N>
Dual<T, N> tanh(const Dual<T, N>& a)
{
    using std::tanh;
    const T t = tanh(a.v);
    return detail::chain(a, t, T(1.0) - sqr(t));
}
template <class T, int N>
Dual<T, N> sqrt(const Dual<T, N>& a)
{
    using std::sqrt;
    const T s = sqrt(a.v);
    return detail::chain(a, s, T(0.5) / s);
}
template <class T, int N>
Dual<T, N> abs(const Dual<T, N>& a)
{
    using std::abs;
    return detail::chain(a, T(abs(a.v)), sign_enclosure(a.v));
}
template <class T, int N>
Dual<T, N> sqr(const Dual<T, N>& a)
{
    return detail::chain(a, T(sqr(a.v)), T(2.0) * a.v);
}
template <class T, int N>
Dual<T, N> atan2(const Dual<T, N>& y, const Dual<T, N>& x)
{
    using std::atan2;
    Dual<T, N> r;
    r.v = atan2(y.v, x.v);
    const T den = sqr(x.v) + sqr(y.v);
    for (int i = 0; i < N; ++i) r.d[i] = (x.v * y.d[i] - y.v * x.d[i]) / den;
    return r;
}

}  // namespace glider
