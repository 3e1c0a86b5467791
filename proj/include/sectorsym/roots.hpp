#pragma once

#include <cmath>
#include <optional>

namespace sectorsym {

/// Bisection for a sign change of g on [lo, hi]. Returns nullopt when the
/// endpoints do not bracket a root.
template <class F>
std::optional<double> bisect(F&& g, double lo, double hi, double tol = 1e-12, int max_iter = 200) {
    double glo = g(lo);
    double ghi = g(hi);
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    if (!(std::signbit(glo) != std::signbit(ghi))) return std::nullopt;
    for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
        double mid = 0.5 * (lo + hi);
        double gm = g(mid);
        if (gm == 0.0) return mid;
        if (std::signbit(gm) == std::signbit(glo)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace sectorsym
