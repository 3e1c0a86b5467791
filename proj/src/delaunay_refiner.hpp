#pragma once

#include <array>
#include <vector>

#include "sectorsym/mesh.hpp"

namespace sectorsym::detail {

/// A boundary piece of the domain: a straight segment or a circle arc.
struct Piece {
    bool arc = false;
    bool axis = false;  ///< symmetry axis of a half-domain (becomes interior after mirroring)
    BoundaryTag tag = BoundaryTag::dirichlet_arc;
};

struct RefinerInput {
    Vec2 arc_center;
    double radius = 1.0;
    std::vector<Piece> pieces;
    /// Initial triangle (counter-clockwise); edge i joins corner i and corner i+1.
    std::array<Vec2, 3> corners;
    /// Polar angle about arc_center for corners lying on the arc, NaN otherwise.
    std::array<double, 3> corner_theta;
    std::array<double, 3> corner_angle;
    std::array<int, 3> edge_piece;
    /// Points around which the size field is graded.
    std::vector<Vec2> grading_points;
    double h = 0.1;
    double grading = 4.0;
    double quality_angle_deg = 25.0;
};

struct RefinerOutput {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    struct Edge {
        int v0, v1, piece;
    };
    std::vector<Edge> boundary;
};

RefinerOutput delaunay_refine(const RefinerInput& in);

}  // namespace sectorsym::detail
