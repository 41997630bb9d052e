#include "glider/interval.hpp"

#include <ostream>
#include <stdexcept>

namespace glider {

std::ostream& operator<<(std::ostream& os, const Interval& a)
{
    return os << '[' << a.lo << ", " << a.hi << ']';
}

IntervalVector hull(std::span<const Interval> a, std::span<const Interval> b)
{
    if (a.size() != b.size()) throw std::invalid_argument("hull: dimension mismatch");
    IntervalVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = hull(a[i], b[i]);
    return r;
}

}  // namespace glider
