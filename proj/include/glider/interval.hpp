#pragma once

#include <algorithm>
#include <cmath>
#include <iosfwd>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace glider {

// Closed interval [lo, hi] with outward-rounded arithmetic. Every result is
// widened by a few ulps so the enclosure survives libm and rounding error.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    constexpr Interval() = default;
    constexpr Interval(double v) : lo(v), hi(v) {}  // NOLINT: implicit by design
    Interval(double l, double h) : lo(l), hi(h)
    {
        if (!(l <= h)) {
            throw std::invalid_argument("Interval: lower bound exceeds upper bound");
        }
    }

    static Interval entire()
    {
        constexpr double inf = std::numeric_limits<double>::infinity();
        return {-inf, inf};
    }

    double mid() const { return 0.5 * lo + 0.5 * hi; }
    double rad() const { return 0.5 * (hi - lo); }
    double width() const { return hi - lo; }
    double mag() const { return std::max(std::abs(lo), std::abs(hi)); }
    bool contains(double v) const { return lo <= v && v <= hi; }
    bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
    bool is_finite() const { return std::isfinite(lo) && std::isfinite(hi); }

    Interval& operator+=(const Interval& o);
    Interval& operator-=(const Interval& o);
    Interval& operator*=(const Interval& o);
    Interval& operator/=(const Interval& o);
};

using IntervalVector = std::vector<Interval>;

namespace detail {

inline double down(double x, int ulps = 1)
{
    for (int i = 0; i < ulps; ++i) x = std::nextafter(x, -std::numeric_limits<double>::infinity());
    return x;
}
inline double up(double x, int ulps = 1)
{
    for (int i = 0; i < ulps; ++i) x = std::nextafter(x, std::numeric_limits<double>::infinity());
    return x;
}
inline Interval outward(double l, double h, int ulps = 1)
{
    Interval r;
    r.lo = down(l, ulps);
    r.hi = up(h, ulps);
    return r;
}

}  // namespace detail

inline Interval operator+(const Interval& a, const Interval& b)
{
    return detail::outward(a.lo + b.lo, a.hi + b.hi);
}
inline Interval operator-(const Interval& a, const Interval& b)
{
    return detail::outward(a.lo - b.hi, a.hi - b.lo);
}
inline Interval operator-(const Interval& a)
{
    Interval r;
    r.lo = -a.hi;
    r.hi = -a.lo;
    return r;
}
inline Interval operator*(const Interval& a, const Interval& b)
{
    if (a.lo == a.hi && a.lo == 0.0) return Interval(0.0);
    if (b.lo == b.hi && b.lo == 0.0) return Interval(0.0);
    const double p1 = a.lo * b.lo;
    const double p2 = a.lo * b.hi;
    const double p3 = a.hi * b.lo;
    const double p4 = a.hi * b.hi;
    return detail::outward(std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4}));
}
inline Interval operator/(const Interval& a, const Interval& b)
{
    if (b.lo <= 0.0 && b.hi >= 0.0) return Interval::entire();
    const double q1 = a.lo / b.lo;
    const double q2 = a.lo / b.hi;
    const double q3 = a.hi / b.lo;
    const double q4 = a.hi / b.hi;
    return detail::outward(std::min({q1, q2, q3, q4}), std::max({q1, q2, q3, q4}));
}

inline Interval& Interval::operator+=(const Interval& o) { return *this = *this + o; }
inline Interval& Interval::operator-=(const Interval& o) { return *this = *this - o; }
inline Interval& Interval::operator*=(const Interval& o) { return *this = *this * o; }
inline Interval& Interval::operator/=(const Interval& o) { return *this = *this / o; }

inline bool operator==(const Interval& a, const Interval& b) { return a.lo == b.lo && a.hi == b.hi; }

inline Interval hull(const Interval& a, const Interval& b)
{
    Interval r;
    r.lo = std::min(a.lo, b.lo);
    r.hi = std::max(a.hi, b.hi);
    return r;
}

// Empty intersection is reported by returning false.
inline bool intersect(const Interval& a, const Interval& b, Interval& out)
{
    const double l = std::max(a.lo, b.lo);
    const double h = std::min(a.hi, b.hi);
    if (l > h) return false;
    out.lo = l;
    out.hi = h;
    return true;
}

inline Interval abs(const Interval& a)
{
    if (a.lo >= 0.0) return a;
    if (a.hi <= 0.0) return -a;
    Interval r;
    r.lo = 0.0;
    r.hi = std::max(-a.lo, a.hi);
    return r;
}

inline Interval sqr(const Interval& a)
{
    const Interval m = abs(a);
    return detail::outward(m.lo * m.lo, m.hi * m.hi);
}

inline Interval sqrt(const Interval& a)
{
    if (a.hi < 0.0) throw std::domain_error("Interval sqrt of a negative interval");
    Interval r = detail::outward(std::sqrt(std::max(a.lo, 0.0)), std::sqrt(a.hi), 2);
    r.lo = std::max(r.lo, 0.0);
    return r;
}

inline Interval tanh(const Interval& a)
{
    Interval r = detail::outward(std::tanh(a.lo), std::tanh(a.hi), 4);
    r.lo = std::max(r.lo, -1.0);
    r.hi = std::min(r.hi, 1.0);
    return r;
}

inline Interval atan(const Interval& a)
{
    return detail::outward(std::atan(a.lo), std::atan(a.hi), 4);
}

inline Interval sin(const Interval& a)
{
    constexpr double pi = std::numbers::pi;
    if (!a.is_finite() || a.width() >= 2.0 * pi) return {-1.0, 1.0};
    const double s1 = std::sin(a.lo);
    const double s2 = std::sin(a.hi);
    Interval r = detail::outward(std::min(s1, s2), std::max(s1, s2), 4);
    // Peaks at pi/2 + 2k pi, troughs at -pi/2 + 2k pi. The tests are slightly
    // generous so that a peak sitting on an endpoint is never missed.
    const double slack = 1e-12 * (1.0 + a.mag());
    const double kmax = std::ceil((a.lo - slack - pi / 2.0) / (2.0 * pi));
    if (pi / 2.0 + 2.0 * pi * kmax <= a.hi + slack) r.hi = 1.0;
    const double kmin = std::ceil((a.lo - slack + pi / 2.0) / (2.0 * pi));
    if (-pi / 2.0 + 2.0 * pi * kmin <= a.hi + slack) r.lo = -1.0;
    r.lo = std::max(r.lo, -1.0);
    r.hi = std::min(r.hi, 1.0);
    return r;
}

inline Interval cos(const Interval& a)
{
    constexpr double pi = std::numbers::pi;
    if (!a.is_finite() || a.width() >= 2.0 * pi) return {-1.0, 1.0};
    const double c1 = std::cos(a.lo);
    const double c2 = std::cos(a.hi);
    Interval r = detail::outward(std::min(c1, c2), std::max(c1, c2), 4);
    const double slack = 1e-12 * (1.0 + a.mag());
    const double kmax = std::ceil((a.lo - slack) / (2.0 * pi));
    if (2.0 * pi * kmax <= a.hi + slack) r.hi = 1.0;
    const double kmin = std::ceil((a.lo - slack - pi) / (2.0 * pi));
    if (pi + 2.0 * pi * kmin <= a.hi + slack) r.lo = -1.0;
    r.lo = std::max(r.lo, -1.0);
    r.hi = std::min(r.hi, 1.0);
    return r;
}

// Enclosure of atan2(y, x) over the box y x x. Exact-monotone pieces are used
// when the box avoids the origin's half-planes; otherwise the whole range.
inline Interval atan2(const Interval& y, const Interval& x)
{
    constexpr double pi = std::numbers::pi;
    if (x.lo > 0.0) return atan(y / x);
    if (y.lo > 0.0) return Interval(pi / 2.0) - atan(x / y);
    if (y.hi < 0.0) return Interval(-pi / 2.0) - atan(x / y);
    return detail::outward(-pi, pi, 2);
}

// Enclosure of d|x|/dx, used by forward-mode differentiation.
inline Interval sign_enclosure(const Interval& a)
{
    if (a.lo >= 0.0) return Interval(1.0);
    if (a.hi <= 0.0) return Interval(-1.0);
    return {-1.0, 1.0};
}
inline double sign_enclosure(double a) { return a >= 0.0 ? 1.0 : -1.0; }

inline double sqr(double a) { return a * a; }

inline double midpoint(double v) { return v; }
inline double midpoint(const Interval& v) { return v.mid(); }

std::ostream& operator<<(std::ostream& os, const Interval& a);

IntervalVector hull(std::span<const Interval> a, std::span<const Interval> b);

}  // namespace glider
