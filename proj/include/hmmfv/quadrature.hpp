#pragma once

#include "hmmfv/types.hpp"

#include <array>
#include <cmath>

namespace hmmfv {

/// Degree-5 seven-point rule on a triangle (barycentric points, weights sum to 1).
struct TriangleRule7 {
    std::array<std::array<double, 3>, 7> points;
    std::array<double, 7> weights;
};

inline const TriangleRule7& triangle_rule7()
{
    static const TriangleRule7 rule = [] {
        const double s = std::sqrt(15.0);
        const double a1 = (9.0 - 2.0 * s) / 21.0, b1 = (6.0 + s) / 21.0;
        const double a2 = (9.0 + 2.0 * s) / 21.0, b2 = (6.0 - s) / 21.0;
        const double w1 = (155.0 + s) / 1200.0, w2 = (155.0 - s) / 1200.0;
        TriangleRule7 r;
        r.points = {{{1.0 / 3, 1.0 / 3, 1.0 / 3},
                     {a1, b1, b1}, {b1, a1, b1}, {b1, b1, a1},
                     {a2, b2, b2}, {b2, a2, b2}, {b2, b2, a2}}};
        r.weights = {9.0 / 40, w1, w1, w1, w2, w2, w2};
        return r;
    }();
    return rule;
}

template <class Fn>
double integrate_triangle(const Point& p0, const Point& p1, const Point& p2, Fn&& fn)
{
    const double area = 0.5 * std::abs((p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x());
    const auto& rule = triangle_rule7();
    double sum = 0.0;
    for (std::size_t q = 0; q < 7; ++q) {
        const auto& l = rule.points[q];
        sum += rule.weights[q] * fn(Point(l[0] * p0 + l[1] * p1 + l[2] * p2));
    }
    return area * sum;
}

} // namespace hmmfv
