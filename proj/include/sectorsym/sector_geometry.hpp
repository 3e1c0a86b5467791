/// @file sector_geometry.hpp
/// Closed-form geometry of the sub-spherical sector in the canonical frame:
/// vertex V at the origin, arc centre O = (-a, 0), unit arc radius.
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "sectorsym/vec2.hpp"

namespace sectorsym {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kBoundaryTol = 1e-12;

struct SectorSpec {
    double alpha = 0.0;
    double beta = 0.0;
    bool operator==(const SectorSpec&) const = default;
};

/// Throws Error(invalid_argument) unless 0 < beta <= alpha <= pi.
/// With allow_equal = false the audit-grade condition beta < alpha is required.
void validate(const SectorSpec& spec, bool allow_equal = true);

struct DerivedConstants {
    double a = 0.0;
    double l_N = 0.0;
    double lambda_C = 0.0;
    double lambda_sharp = 0.0;
    double l_perp = 0.0;
    double lambda_max = 0.0;
    double beta_flat = 0.0;
    double zeta_flat = 0.0;
    double lambda_flat = 0.0;
    std::optional<double> l_star;
};

DerivedConstants derive_constants(const SectorSpec& spec);

enum class PointClass {
    interior,
    dirichlet_arc,
    neumann_lower,
    neumann_upper,
    vertex,
    mixed_plus,
    mixed_minus,
    exterior,
};

const char* to_string(PointClass c);

/// A validated spec with its derived constants and frame points.
class Sector {
public:
    explicit Sector(SectorSpec spec);

    const SectorSpec& spec() const { return spec_; }
    double alpha() const { return spec_.alpha; }
    double beta() const { return spec_.beta; }
    const DerivedConstants& constants() const { return k_; }
    double a() const { return k_.a; }
    double l_N() const { return k_.l_N; }

    Vec2 vertex() const { return {0.0, 0.0}; }
    Vec2 center() const { return {-k_.a, 0.0}; }
    Vec2 p_plus() const { return p_plus_; }
    Vec2 p_minus() const { return p_minus_; }
    /// e_{-beta/2} and e_{+beta/2}.
    Vec2 lower_dir() const { return lower_dir_; }
    Vec2 upper_dir() const { return upper_dir_; }
    /// P_lambda on the ray carrying the lower Neumann side.
    Vec2 pivot(double lambda) const { return lower_dir_ * lambda; }

    /// Open-set membership, valid for every beta < 2 pi.
    bool contains(Vec2 x) const;
    /// Distance to the boundary for points inside (negative outside).
    /// Requires a convex sector (beta <= pi).
    double depth(Vec2 x) const;
    PointClass classify(Vec2 x, double tol = kBoundaryTol) const;
    /// Exact area (triangle V P- P+ plus circular segment).
    double area() const;

    double distance_to_lower_side(Vec2 x) const;
    double distance_to_upper_side(Vec2 x) const;
    double distance_to_arc(Vec2 x) const;
    /// Parameter of the orthogonal projection onto the lower ray.
    double lower_ray_param(Vec2 x) const { return dot(x, lower_dir_); }

private:
    SectorSpec spec_;
    DerivedConstants k_;
    Vec2 p_plus_, p_minus_, lower_dir_, upper_dir_;
};

/// The line T_{lambda,theta} through P_lambda forming angle theta with the lower
/// Neumann side; the mirrored variant is its image under x2 -> -x2.
struct MovingLine {
    double lambda = 0.0;
    double theta = 0.0;
    bool mirrored = false;
    Vec2 pivot;
    Vec2 direction;
    /// D lies on the side where signed_distance > 0.
    Vec2 normal;

    double signed_distance(Vec2 x) const { return dot(x - pivot, normal); }
    Vec2 reflect(Vec2 x) const { return x - normal * (2.0 * signed_distance(x)); }
};

/// theta may be any real angle here (lines such as T_{0,-beta} are needed by the
/// double-domain construction).
MovingLine moving_line(const Sector& s, double lambda, double theta, bool mirrored = false);
Vec2 reflect(const MovingLine& line, Vec2 x);

/// Polar angle around P_lambda measured from the lower Neumann direction, in [0, 2 pi).
double sigma(const Sector& s, double lambda, Vec2 x);

struct AngleInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_open = false;
    bool hi_open = false;
    bool contains(double t) const;
};

struct AdmissibleSet {
    std::vector<AngleInterval> intervals;
    double theta_A = 0.0;
    double theta_B = 0.0;
    double theta_A_cap = 0.0;
    double theta_B_cap = 0.0;
    bool contains(double theta) const;
};

double theta_A(const Sector& s, double lambda);
double theta_B(const Sector& s, double lambda);
AdmissibleSet critical_angles(const Sector& s, double lambda);

double lambda_hat(const Sector& s, double lambda, double theta);
double lambda_check(const Sector& s, double lambda, double theta);
double zeta(const Sector& s, double theta);
double lambda_star(const Sector& s, double lambda, double theta);

double theta_lambda(const Sector& s, double lambda);
double omega_bar(const Sector& s, double lambda);
double iota(const Sector& s, double lambda);
double jmath(const Sector& s, double value);

/// Parameter interval [s0, s1] of T ∩ Σ along pivot + t * direction.
std::optional<std::array<double, 2>> line_section(const Sector& s, const MovingLine& line);
/// sup{lambda : T_{lambda,theta} ∩ Σ nonempty}, by bisection.
double lambda_M(const Sector& s, double theta);

enum class BoundaryPiece { none, gamma0, gamma1, gamma2A, gamma2B, other };
const char* to_string(BoundaryPiece p);

struct HValues {
    std::optional<double> h0, h1, h2, h3;
};
HValues h_values(const Sector& s, double lambda, double theta);

struct TaggedPolygon {
    std::vector<Vec2> vertices;
    /// tags[i] labels the edge vertices[i] -> vertices[i+1].
    std::vector<BoundaryPiece> tags;
};

class MovingDomain {
public:
    MovingDomain(const Sector& s, double lambda, double theta, std::optional<double> theta1 = std::nullopt);

    double lambda() const { return lambda_; }
    double theta() const { return theta_; }
    double theta1() const { return theta1_; }
    bool empty() const { return empty_; }
    const MovingLine& line() const { return line_; }
    const MovingLine& line_theta1() const { return line1_; }
    const HValues& h() const { return h_; }
    double theta_check() const { return 2.0 * theta_ - beta_; }
    double theta_hat() const { return kPi - 2.0 * theta_ + 2.0 * beta_; }

    bool contains(Vec2 x) const;
    /// Distance to the boundary of D for members; negative otherwise.
    double depth(Vec2 x) const;
    BoundaryPiece classify_boundary(Vec2 x, double tol = 1e-9) const;
    /// Convex outline with the arcs resolved by `arc_points` chords.
    TaggedPolygon outline(int arc_points = 256) const;

private:
    Sector s_;
    double lambda_, theta_, theta1_, beta_;
    bool empty_;
    MovingLine line_, line1_;
    HValues h_;
};

MovingDomain moving_domain(const Sector& s, double lambda, double theta, std::optional<double> theta1 = std::nullopt);

Vec2 reflect_across_lower_neumann(const Sector& s, Vec2 x);
bool double_domain_contains(const Sector& s, Vec2 x);
/// Distance to the boundary of the doubled domain for members.
double double_domain_depth(const Sector& s, Vec2 x);

/// The moving domain of the doubled sector (even extension across the lower side).
class DoubleMovingDomain {
public:
    DoubleMovingDomain(const Sector& s, double lambda, double theta);

    bool in_regime() const { return in_regime_; }
    const MovingLine& line() const { return line_; }
    /// T_{h1, 2 theta - beta} and T_{h3, 2 theta + beta - pi}.
    const MovingLine& side_line() const { return side_; }
    const std::optional<MovingLine>& far_line() const { return far_; }
    const HValues& h() const { return h_; }

    bool contains(Vec2 x) const;
    double depth(Vec2 x) const;
    BoundaryPiece classify_boundary(Vec2 x, double tol = 1e-9) const;

private:
    Sector s_;
    double lambda_, theta_;
    bool in_regime_;
    MovingLine line_, side_;
    std::optional<MovingLine> far_;
    HValues h_;
};

}  // namespace sectorsym
