#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <random>

#include "glider/dual.hpp"
#include "glider/interval.hpp"

using namespace glider;

namespace {

Interval random_interval(std::mt19937_64& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> u(lo, hi);
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    return {a, b};
}

double sample(const Interval& a, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double t = u(rng);
    return a.lo + t * (a.hi - a.lo);
}

// Every point image must land inside the interval image.
void check_unary(const std::function<Interval(const Interval&)>& fi, const std::function<double(double)>& fd,
                 double lo, double hi)
{
    std::mt19937_64 rng(11);
    for (int k = 0; k < 2000; ++k) {
        const Interval a = random_interval(rng, lo, hi);
        const Interval r = fi(a);
        for (int s = 0; s < 20; ++s) {
            const double x = sample(a, rng);
            REQUIRE(r.contains(fd(x)));
        }
        REQUIRE(r.contains(fd(a.lo)));
        REQUIRE(r.contains(fd(a.hi)));
    }
}

}  // namespace

TEST_CASE("interval constructor rejects inverted bounds")
{
    CHECK_THROWS_AS(Interval(1.0, 0.0), std::invalid_argument);
    CHECK(Interval(2.0).width() == 0.0);
}

TEST_CASE("binary arithmetic encloses sampled results")
{
    std::mt19937_64 rng(3);
    for (int k = 0; k < 2000; ++k) {
        const Interval a = random_interval(rng, -5, 5);
        Interval b = random_interval(rng, -5, 5);
        const double x = sample(a, rng), y = sample(b, rng);
        CHECK((a + b).contains(x + y));
        CHECK((a - b).contains(x - y));
        CHECK((a * b).contains(x * y));
        if (b.lo > 0.0 || b.hi < 0.0) CHECK((a / b).contains(x / y));
    }
}

TEST_CASE("division by an interval containing zero is unbounded")
{
    const Interval r = Interval(1.0, 2.0) / Interval(-1.0, 1.0);
    CHECK_FALSE(r.is_finite());
}

TEST_CASE("elementary functions enclose sampled results")
{
    check_unary([](const Interval& a) { return sin(a); }, [](double x) { return std::sin(x); }, -10, 10);
    check_unary([](const Interval& a) { return cos(a); }, [](double x) { return std::cos(x); }, -10, 10);
    check_unary([](const Interval& a) { return tanh(a); }, [](double x) { return std::tanh(x); }, -6, 6);
    check_unary([](const Interval& a) { return atan(a); }, [](double x) { return std::atan(x); }, -20, 20);
    check_unary([](const Interval& a) { return abs(a); }, [](double x) { return std::abs(x); }, -3, 3);
    check_unary([](const Interval& a) { return sqr(a); }, [](double x) { return x * x; }, -3, 3);
    check_unary([](const Interval& a) { return sqrt(a); }, [](double x) { return std::sqrt(x); }, 0, 9);
}

TEST_CASE("atan2 encloses sampled results in every quadrant")
{
    std::mt19937_64 rng(5);
    for (int k = 0; k < 3000; ++k) {
        const Interval y = random_interval(rng, -2, 2);
        const Interval x = random_interval(rng, -2, 2);
        const Interval r = atan2(y, x);
        for (int s = 0; s < 10; ++s) {
            const double a = sample(y, rng), b = sample(x, rng);
            CHECK(r.contains(std::atan2(a, b)));
        }
    }
}

TEST_CASE("sin and cos reach their extrema inside wide intervals")
{
    CHECK(sin(Interval(0.0, 2.0)).hi == doctest::Approx(1.0));
    CHECK(cos(Interval(3.0, 3.5)).lo == doctest::Approx(-1.0));
    CHECK(sin(Interval(-100.0, 100.0)).contains(Interval(-1.0, 1.0)));
}

TEST_CASE("rounding is outward for inexact results")
{
    const Interval third = Interval(1.0) / Interval(3.0);
    CHECK(third.lo < third.hi);
    CHECK(third.contains(1.0 / 3.0));
}

TEST_CASE("hull of vectors is componentwise")
{
    const IntervalVector a{Interval(0, 1), Interval(2, 3)};
    const IntervalVector b{Interval(-1, 0.5), Interval(4, 5)};
    const auto h = hull(a, b);
    CHECK(h[0] == Interval(-1, 1));
    CHECK(h[1] == Interval(2, 5));
    CHECK_THROWS(hull(a, IntervalVector{Interval(0)}));
}

TEST_CASE("dual numbers match central differences")
{
    using D = Dual<double, 2>;
    const auto f = [](const auto& x, const auto& y) {
        using std::atan2;
        using std::sin;
        using std::sqrt;
        using std::tanh;
        return sin(x * y) + tanh(x / (y + 3.0)) * sqrt(x * x + y * y) + atan2(y, x);
    };
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.2, 2.0);
    for (int k = 0; k < 200; ++k) {
        const double x = u(rng), y = u(rng);
        const D r = f(D::variable(x, 0), D::variable(y, 1));
        const double h = 1e-6;
        const double dx = (f(x + h, y) - f(x - h, y)) / (2 * h);
        const double dy = (f(x, y + h) - f(x, y - h)) / (2 * h);
        CHECK(r.v == doctest::Approx(f(x, y)).epsilon(1e-14));
        CHECK(r.d[0] == doctest::Approx(dx).epsilon(1e-6));
        CHECK(r.d[1] == doctest::Approx(dy).epsilon(1e-6));
    }
}

TEST_CASE("interval duals enclose point derivatives")
{
    using DI = Dual<Interval, 1>;
    using DD = Dual<double, 1>;
    const auto f = [](const auto& x) {
        using std::abs;
        using std::cos;
        using std::sin;
        return sin(2.0 * x) * cos(x) + abs(x) * x - 0.5 * x;
    };
    std::mt19937_64 rng(21);
    for (int k = 0; k < 300; ++k) {
        const Interval a = random_interval(rng, -2, 2);
        const DI r = f(DI::variable(a, 0));
        for (int s = 0; s < 20; ++s) {
            const double x = sample(a, rng);
            const DD p = f(DD::variable(x, 0));
            CHECK(r.v.contains(p.v));
            CHECK(r.d[0].contains(p.d[0]));
        }
    }
}
