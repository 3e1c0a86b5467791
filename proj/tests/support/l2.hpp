/// L2 distance between a P1 field and a closed-form function, by a
/// seven-point degree-5 rule per triangle.
#pragma once

#include <cmath>
#include <functional>

#include "sectorsym/fem.hpp"

namespace oracle {

inline double l2_distance(const sectorsym::ScalarField& u, const std::function<double(sectorsym::Vec2)>& exact) {
    static const double w[7] = {0.225,
                                0.132394152788506, 0.132394152788506, 0.132394152788506,
                                0.125939180544827, 0.125939180544827, 0.125939180544827};
    const double a1 = 0.059715871789770, b1 = 0.470142064105115;
    const double a2 = 0.797426985353087, b2 = 0.101286507323456;
    static const double L[7][3] = {{1.0 / 3, 1.0 / 3, 1.0 / 3}, {a1, b1, b1}, {b1, a1, b1}, {b1, b1, a1},
                                   {a2, b2, b2}, {b2, a2, b2}, {b2, b2, a2}};
    const sectorsym::Mesh& m = *u.mesh;
    double s = 0.0;
    for (std::size_t t = 0; t < m.triangles().size(); ++t) {
        const auto& tr = m.triangles()[t];
        const double A = m.triangle_area(static_cast<int>(t));
        for (int q = 0; q < 7; ++q) {
            sectorsym::Vec2 x = m.vertices()[tr[0]] * L[q][0] + m.vertices()[tr[1]] * L[q][1] + m.vertices()[tr[2]] * L[q][2];
            double uh = u.values[tr[0]] * L[q][0] + u.values[tr[1]] * L[q][1] + u.values[tr[2]] * L[q][2];
            double d = uh - exact(x);
            s += A * w[q] * d * d;
        }
    }
    return std::sqrt(s);
}

}  // namespace oracle
