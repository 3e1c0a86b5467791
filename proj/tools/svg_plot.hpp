#pragma once

#include <string>

#include "sectorsym/fem.hpp"

namespace sectorsym::plot {

/// Triangles coloured by the mean nodal value.
std::string heatmap(const ScalarField& u);
/// Triangles coloured by the sign of u_x1 (blue < -tol, red > tol, grey between).
std::string sign_map_x1(const ScalarField& u, double tol);
/// max_violation - tolerance against lambda, one polyline per check id.
/// Throws Error(parse) when the CSV has no usable rows.
std::string margin_curves(const std::string& report_csv);

}  // namespace sectorsym::plot
