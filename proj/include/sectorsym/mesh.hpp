/// @file mesh.hpp
/// Triangulations of wedge-and-arc domains: the sector itself and the thin
/// vertex slices used by the small-volume maximum principle.
#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sectorsym/sector_geometry.hpp"
#include "sectorsym/vec2.hpp"

namespace sectorsym {

enum class BoundaryTag { dirichlet_arc, neumann_lower, neumann_upper };

const char* to_string(BoundaryTag t);
BoundaryTag boundary_tag_from_string(const std::string& s);

struct BoundaryEdge {
    int v0 = 0;
    int v1 = 0;
    BoundaryTag tag = BoundaryTag::dirichlet_arc;
};

/// Wedge of opening beta with apex at the origin, symmetric about the x1-axis,
/// closed by an arc of the circle |x - arc_center| = radius.
struct MeshDomain {
    double beta = 0.0;
    Vec2 arc_center;
    double radius = 1.0;
    /// Polar angle of p_plus around arc_center.
    double arc_half_angle = 0.0;
    Vec2 p_plus, p_minus;

    bool operator==(const MeshDomain&) const = default;
};

MeshDomain sector_domain(const Sector& s);
/// { x : |x| < rho } inside the wedge of opening beta.
MeshDomain slice_domain(double beta, double rho);
double domain_area(const MeshDomain& d);

struct Location {
    int triangle = -1;
    std::array<double, 3> bary{};
};

struct MeshQuality {
    double min_angle_deg = 0.0;
    double max_angle_deg = 0.0;
    double h_max = 0.0;
    double h_min = 0.0;
    double area = 0.0;
    std::size_t n_vertices = 0;
    std::size_t n_triangles = 0;
    std::size_t n_boundary_edges = 0;
};

class Mesh {
public:
    Mesh(MeshDomain domain, std::optional<SectorSpec> spec, std::vector<Vec2> vertices,
         std::vector<std::array<int, 3>> triangles, std::vector<BoundaryEdge> boundary_edges, double h,
         bool symmetric, double grading);

    const MeshDomain& domain() const { return domain_; }
    const std::optional<SectorSpec>& spec() const { return spec_; }
    const std::vector<Vec2>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
    const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }
    double h() const { return h_; }
    bool symmetric() const { return symmetric_; }
    double grading() const { return grading_; }

    /// Vertices carrying the Dirichlet condition (endpoints of arc edges).
    const std::vector<char>& dirichlet_mask() const { return dirichlet_; }
    double triangle_area(int t) const;
    Vec2 barycenter(int t) const;
    /// Constant gradients of the three barycentric coordinate functions.
    std::array<Vec2, 3> shape_gradients(int t) const;

    std::optional<Location> try_locate(Vec2 x, double tol = 1e-12) const;
    /// Throws Error(point_outside).
    Location locate(Vec2 x) const;
    /// All triangles containing x within tol (more than one on edges and vertices).
    std::vector<Location> locate_all(Vec2 x, double tol = 1e-12) const;

private:
    void build_index();

    MeshDomain domain_;
    std::optional<SectorSpec> spec_;
    std::vector<Vec2> vertices_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<BoundaryEdge> boundary_edges_;
    double h_;
    bool symmetric_;
    double grading_;
    std::vector<char> dirichlet_;

    // uniform bucket grid over the bounding box
    Vec2 lo_, hi_;
    int nx_ = 1, ny_ = 1;
    double cell_ = 1.0;
    std::vector<int> cell_start_;
    std::vector<int> cell_items_;
};

using MeshPtr = std::shared_ptr<const Mesh>;

Mesh generate(const SectorSpec& spec, double h, bool symmetric = false, double grading = 4.0);
Mesh generate(const MeshDomain& domain, double h, bool symmetric = false, double grading = 4.0);
Mesh generate_slice(double beta, double rho, double h, double grading = 4.0);

/// Uniform quadrisection; new arc nodes are snapped back onto the circle.
Mesh refine(const Mesh& mesh);

MeshQuality quality(const Mesh& mesh);

/// Problems found by the structural checks (empty when the mesh is valid).
std::vector<std::string> validate(const Mesh& mesh);

/// Vertex permutation realising x2 -> -x2, or nullopt if it is not an automorphism.
std::optional<std::vector<int>> mirror_map(const Mesh& mesh, double tol = 1e-12);

}  // namespace sectorsym
