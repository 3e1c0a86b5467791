#include "sectorsym/sector_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "sectorsym/error.hpp"
#include "sectorsym/roots.hpp"

namespace sectorsym {

namespace {

double arccot(double t) { return 0.5 * kPi - std::atan(t); }

double segment_distance(Vec2 x, Vec2 p, Vec2 q) {
    Vec2 d = q - p;
    double L2 = norm2(d);
    double t = L2 > 0.0 ? std::clamp(dot(x - p, d) / L2, 0.0, 1.0) : 0.0;
    return dist(x, p + d * t);
}

double lambda_flat_of(double a, double beta, double beta_flat, double lambda_C) {
    if (a == 0.0) return 0.0;
    // inverse of theta_A: theta_A(l) = t  <=>  l = |a| sin(t - beta/2) / sin t
    double inv = std::abs(a) * std::sin(beta_flat - 0.5 * beta) / std::sin(beta_flat);
    return std::min(lambda_C, std::max(inv, 0.0));
}

double zeta_raw(double beta, double theta) {
    double sw = 0.25 * (kPi + 3.0 * beta);
    if (theta <= sw) {
        double s2 = std::sin(2.0 * theta - beta);
        return s2 / (std::sin(beta) + s2);
    }
    return std::sin(theta - beta) / std::sin(theta);
}

}  // namespace

const char* to_string(ErrorCode c) {
    switch (c) {
        case ErrorCode::invalid_argument: return "invalid_argument";
        case ErrorCode::domain_violation: return "domain_violation";
        case ErrorCode::root_bracket: return "root_bracket";
        case ErrorCode::degenerate: return "degenerate";
        case ErrorCode::point_outside: return "point_outside";
        case ErrorCode::mesh_failure: return "mesh_failure";
        case ErrorCode::singular_system: return "singular_system";
        case ErrorCode::divergence: return "divergence";
        case ErrorCode::no_convergence: return "no_convergence";
        case ErrorCode::io: return "io";
        case ErrorCode::parse: return "parse";
    }
    return "unknown";
}

void validate(const SectorSpec& spec, bool allow_equal) {
    const double a = spec.alpha, b = spec.beta;
    if (!std::isfinite(a) || !std::isfinite(b))
        throw Error(ErrorCode::invalid_argument, "sector angles must be finite");
    if (!(b > 0.0)) throw Error(ErrorCode::invalid_argument, "beta must be positive");
    if (!(a <= kPi + 1e-15)) throw Error(ErrorCode::invalid_argument, "alpha must not exceed pi");
    if (allow_equal ? !(b <= a) : !(b < a))
        throw Error(ErrorCode::invalid_argument,
                    allow_equal ? "beta must not exceed alpha" : "beta must be smaller than alpha");
}

DerivedConstants derive_constants(const SectorSpec& spec) {
    validate(spec);
    const double al = spec.alpha, be = spec.beta;
    DerivedConstants k;
    k.a = std::cos(0.5 * al) - std::sin(0.5 * al) / std::tan(0.5 * be);
    if (al == be) k.a = 0.0;
    k.l_N = std::sin(0.5 * al) / std::sin(0.5 * be);
    k.lambda_C = k.a == 0.0 ? 0.0 : std::abs(k.a) * std::sin(0.5 * al) / std::sin(0.5 * (be + al));
    const double num = std::sin(0.5 * (al - be));
    k.lambda_sharp = num == 0.0 ? 0.0 : num / std::sin(be);
    k.l_perp = std::max(k.l_N * std::cos(be), 0.0);
    k.lambda_max = (1.0 - k.a) / std::cos(0.5 * be);
    k.beta_flat = std::max((kPi + 2.0 * be) / 3.0, 0.5 * kPi);

    // zeta increases then decreases on its first branch (peak where 2 theta - beta = pi/2)
    // and increases on the second; the maximum over [beta/2, beta_flat] is attained at
    // one of these candidates.
    {
        const double lo = 0.5 * be, hi = k.beta_flat;
        double best = 0.0;
        for (double t : {lo, hi, 0.25 * (kPi + 2.0 * be), 0.25 * (kPi + 3.0 * be)}) {
            if (t >= lo && t <= hi) best = std::max(best, zeta_raw(be, t));
        }
        k.zeta_flat = best;
    }
    k.lambda_flat = lambda_flat_of(k.a, be, k.beta_flat, k.lambda_C);

    // l_* solves lambda_check(l, theta_B(l)) = l_N.
    const double lN = k.l_N;
    auto g = [&](double l) {
        double tB = arccot((lN * std::cos(be) - l) / (lN * std::sin(be)));
        double s2 = std::sin(2.0 * tB - be);
        if (!(s2 > 0.0)) return 1.0;
        return l + l * std::sin(be) / s2 - lN;
    };
    if (be < kPi) k.l_star = bisect(g, lN * 1e-12, lN * (1.0 - 1e-12));
    return k;
}

const char* to_string(PointClass c) {
    switch (c) {
        case PointClass::interior: return "interior";
        case PointClass::dirichlet_arc: return "dirichlet_arc";
        case PointClass::neumann_lower: return "neumann_lower";
        case PointClass::neumann_upper: return "neumann_upper";
        case PointClass::vertex: return "vertex";
        case PointClass::mixed_plus: return "mixed_plus";
        case PointClass::mixed_minus: return "mixed_minus";
        case PointClass::exterior: return "exterior";
    }
    return "unknown";
}

Sector::Sector(SectorSpec spec) : spec_(spec), k_(derive_constants(spec)) {
    const double h = 0.5 * spec_.alpha;
    p_plus_ = {std::cos(h) - k_.a, std::sin(h)};
    p_minus_ = {p_plus_.x, -p_plus_.y};
    lower_dir_ = {std::cos(0.5 * spec_.beta), -std::sin(0.5 * spec_.beta)};
    upper_dir_ = mirror_x1(lower_dir_);
}

bool Sector::contains(Vec2 x) const {
    if (!(std::abs(x.y) < 1.0)) return false;
    const double cotb = 1.0 / std::tan(0.5 * spec_.beta);
    return x.x > std::abs(x.y) * cotb && x.x < std::sqrt(1.0 - x.y * x.y) - k_.a;
}

double Sector::distance_to_lower_side(Vec2 x) const { return segment_distance(x, vertex(), p_minus_); }
double Sector::distance_to_upper_side(Vec2 x) const { return segment_distance(x, vertex(), p_plus_); }

double Sector::distance_to_arc(Vec2 x) const {
    Vec2 r = x - center();
    double phi = std::atan2(r.y, r.x);
    if (std::abs(phi) <= 0.5 * spec_.alpha) return std::abs(norm(r) - 1.0);
    return std::min(dist(x, p_plus_), dist(x, p_minus_));
}

double Sector::depth(Vec2 x) const {
    double d = std::min({distance_to_lower_side(x), distance_to_upper_side(x), distance_to_arc(x)});
    return contains(x) ? d : -d;
}

PointClass Sector::classify(Vec2 x, double tol) const {
    if (norm(x) <= tol) return PointClass::vertex;
    if (dist(x, p_plus_) <= tol) return PointClass::mixed_plus;
    if (dist(x, p_minus_) <= tol) return PointClass::mixed_minus;
    const double sb = std::sin(0.5 * spec_.beta), cb = std::cos(0.5 * spec_.beta);
    {
        Vec2 r = x - center();
        bool in_wedge = x.x * sb - std::abs(x.y) * cb >= -tol;
        if (std::abs(norm(r) - 1.0) <= tol && in_wedge && x.x >= -k_.a - tol) return PointClass::dirichlet_arc;
    }
    auto on_ray = [&](Vec2 e) {
        double t = dot(x, e);
        return std::abs(cross(e, x)) <= tol && t > tol && t < k_.l_N - tol;
    };
    if (on_ray(lower_dir_)) return PointClass::neumann_lower;
    if (on_ray(upper_dir_)) return PointClass::neumann_upper;
    return contains(x) ? PointClass::interior : PointClass::exterior;
}

double Sector::area() const {
    const double h = 0.5 * spec_.alpha;
    double tri = std::sin(h) * (std::cos(h) - k_.a);
    double seg = 0.5 * (spec_.alpha - std::sin(spec_.alpha));
    return tri + seg;
}

MovingLine moving_line(const Sector& s, double lambda, double theta, bool mirrored) {
    const double b2 = 0.5 * s.beta();
    MovingLine L;
    L.lambda = lambda;
    L.theta = theta;
    L.mirrored = mirrored;
    L.pivot = s.pivot(lambda);
    L.direction = unit(theta - b2);
    L.normal = {std::sin(theta - b2), -std::cos(theta - b2)};
    if (mirrored) {
        L.pivot = mirror_x1(L.pivot);
        L.direction = mirror_x1(L.direction);
        L.normal = mirror_x1(L.normal);
    }
    return L;
}

Vec2 reflect(const MovingLine& line, Vec2 x) { return line.reflect(x); }

double sigma(const Sector& s, double lambda, Vec2 x) {
    Vec2 r = x - s.pivot(lambda);
    if (norm(r) <= 1e-15) throw Error(ErrorCode::domain_violation, "point coincides with the pivot");
    double t = std::atan2(r.y, r.x) + 0.5 * s.beta();
    const double two_pi = 2.0 * kPi;
    t = std::fmod(t, two_pi);
    if (t < 0.0) t += two_pi;
    if (t < 1e-12 || two_pi - t < 1e-12) t = 0.0;
    return t;
}

bool AngleInterval::contains(double t) const {
    bool lo_ok = lo_open ? t > lo : t >= lo;
    bool hi_ok = hi_open ? t < hi : t <= hi;
    return lo_ok && hi_ok;
}

bool AdmissibleSet::contains(double theta) const {
    return std::any_of(intervals.begin(), intervals.end(), [&](const AngleInterval& i) { return i.contains(theta); });
}

double theta_A(const Sector& s, double lambda) {
    const double a = std::abs(s.a());
    if (a == 0.0) return kPi;
    const double b2 = 0.5 * s.beta();
    return arccot((a * std::cos(b2) - lambda) / (a * std::sin(b2)));
}

double theta_B(const Sector& s, double lambda) {
    const double lN = s.l_N(), b = s.beta();
    return arccot((lN * std::cos(b) - lambda) / (lN * std::sin(b)));
}

AdmissibleSet critical_angles(const Sector& s, double lambda) {
    if (!(lambda > 0.0)) throw Error(ErrorCode::invalid_argument, "lambda must be positive");
    AdmissibleSet J;
    J.theta_A = theta_A(s, lambda);
    J.theta_B = theta_B(s, lambda);
    const double top = 0.5 * (kPi + s.beta());
    J.theta_A_cap = std::min({J.theta_A, J.theta_B, top});
    J.theta_B_cap = std::min(J.theta_B, top);
    if (lambda >= s.constants().lambda_C) {
        J.intervals.push_back({0.0, top, true, false});
    } else {
        J.intervals.push_back({0.0, std::min(J.theta_A, top), true, false});
        if (J.theta_B <= top) J.intervals.push_back({J.theta_B, top, false, false});
    }
    return J;
}

double lambda_hat(const Sector& s, double lambda, double theta) {
    double d = std::sin(theta - s.beta());
    if (std::abs(d) < 1e-14) throw Error(ErrorCode::domain_violation, "lambda_hat singular: sin(theta - beta) = 0");
    return lambda * std::sin(theta) / d;
}

double lambda_check(const Sector& s, double lambda, double theta) {
    double d = std::sin(2.0 * theta - s.beta());
    if (std::abs(d) < 1e-14)
        throw Error(ErrorCode::domain_violation, "lambda_check singular: sin(2 theta - beta) = 0");
    return lambda + lambda * std::sin(s.beta()) / d;
}

double zeta(const Sector& s, double theta) {
    const double b = s.beta();
    if (theta < 0.5 * b - 1e-12 || theta > 0.5 * (kPi + b) + 1e-12)
        throw Error(ErrorCode::domain_violation, "zeta is defined on [beta/2, (pi+beta)/2]");
    return zeta_raw(b, theta);
}

double lambda_star(const Sector& s, double lambda, double theta) {
    double z = zeta(s, theta);
    if (!(z > 0.0)) throw Error(ErrorCode::domain_violation, "lambda_star undefined where zeta vanishes");
    return lambda / z;
}

double theta_lambda(const Sector& s, double lambda) {
    const double b = s.beta(), lN = s.l_N();
    if (!(lambda > 0.0 && lambda < lN / (1.0 + std::sin(b))))
        throw Error(ErrorCode::domain_violation, "theta_lambda requires 0 < lambda < l_N/(1 + sin beta)");
    const double lo = 0.25 * kPi + 0.5 * b, hi = 0.5 * kPi + 0.5 * b;
    auto g = [&](double t) {
        double d = std::sin(2.0 * t - b);
        if (!(d > 0.0)) return 1.0;
        return lambda + lambda * std::sin(b) / d - lN;
    };
    auto r = bisect(g, lo, hi);
    if (!r) throw Error(ErrorCode::root_bracket, "theta_lambda: no sign change");
    return *r;
}

double omega_bar(const Sector& s, double lambda) {
    const auto& ls = s.constants().l_star;
    if (!ls) throw Error(ErrorCode::domain_violation, "omega_bar requires l_star");
    if (lambda > *ls) return std::min(theta_B(s, lambda), 0.5 * (kPi + s.beta()));
    return std::min(0.5 * (kPi + theta_A(s, lambda)), theta_lambda(s, lambda));
}

double iota(const Sector& s, double lambda) { return lambda_hat(s, lambda, omega_bar(s, lambda)); }

double jmath(const Sector& s, double value) {
    const auto& ls = s.constants().l_star;
    if (!ls) throw Error(ErrorCode::domain_violation, "jmath requires l_star");
    if (!(s.beta() <= 0.5 * kPi)) throw Error(ErrorCode::domain_violation, "jmath requires beta <= pi/2");
    const double top = iota(s, *ls);
    if (!(value > 0.0 && value <= top + 1e-14))
        throw Error(ErrorCode::domain_violation, "jmath: value outside the range of iota");
    if (value >= top) return *ls;
    auto r = bisect([&](double l) { return iota(s, l) - value; }, *ls * 1e-14, *ls);
    if (!r) throw Error(ErrorCode::root_bracket, "jmath: no sign change");
    return *r;
}

std::optional<std::array<double, 2>> line_section(const Sector& s, const MovingLine& line) {
    if (s.beta() > kPi) throw Error(ErrorCode::domain_violation, "line sections require a convex sector");
    const Vec2 p = line.pivot, d = line.direction;
    std::vector<double> ts;
    auto seg_hit = [&](Vec2 a, Vec2 b) {
        Vec2 e = b - a;
        double den = cross(d, e);
        if (std::abs(den) < 1e-300) return;
        double t = cross(a - p, e) / den;
        double u = cross(a - p, d) / den;
        if (u >= -1e-14 && u <= 1.0 + 1e-14) ts.push_back(t);
    };
    seg_hit(s.vertex(), s.p_minus());
    seg_hit(s.vertex(), s.p_plus());
    {
        Vec2 q = p - s.center();
        double B = dot(d, q), C = norm2(q) - 1.0;
        double disc = B * B - C;
        if (disc > 0.0) {
            double sq = std::sqrt(disc);
            for (double t : {-B - sq, -B + sq}) {
                Vec2 r = p + d * t - s.center();
                if (std::abs(std::atan2(r.y, r.x)) <= 0.5 * s.alpha() + 1e-14) ts.push_back(t);
            }
        }
    }
    if (ts.size() < 2) return std::nullopt;
    auto [mn, mx] = std::minmax_element(ts.begin(), ts.end());
    if (*mx - *mn < 1e-13) return std::nullopt;
    if (!s.contains(p + d * (0.5 * (*mn + *mx)))) return std::nullopt;
    return std::array<double, 2>{*mn, *mx};
}

double lambda_M(const Sector& s, double theta) {
    auto nonempty = [&](double l) { return line_section(s, moving_line(s, l, theta)).has_value(); };
    const double top = s.constants().lambda_max * (1.0 + 1e-9);
    double lo = 0.5 * s.l_N(), hi = top;
    if (!nonempty(lo)) return 0.0;
    if (nonempty(hi)) return hi;
    for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
        double mid = 0.5 * (lo + hi);
        (nonempty(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

const char* to_string(BoundaryPiece p) {
    switch (p) {
        case BoundaryPiece::none: return "none";
        case BoundaryPiece::gamma0: return "gamma0";
        case BoundaryPiece::gamma1: return "gamma1";
        case BoundaryPiece::gamma2A: return "gamma2A";
        case BoundaryPiece::gamma2B: return "gamma2B";
        case BoundaryPiece::other: return "other";
    }
    return "unknown";
}

HValues h_values(const Sector& s, double lambda, double theta) {
    auto safe = [](auto&& f) -> std::optional<double> {
        try {
            return f();
        } catch (const Error&) {
            return std::nullopt;
        }
    };
    HValues h;
    h.h0 = safe([&] { return lambda_hat(s, lambda, theta); });
    h.h1 = safe([&] { return lambda_check(s, lambda, theta); });
    h.h2 = safe([&] { return lambda_hat(s, lambda, kPi - theta); });
    h.h3 = safe([&] { return lambda_check(s, lambda, kPi - theta); });
    return h;
}

// ---------------------------------------------------------------------------
// Moving domain

MovingDomain::MovingDomain(const Sector& s, double lambda, double theta, std::optional<double> theta1)
    : s_(s), lambda_(lambda), theta_(theta), beta_(s.beta()) {
    if (!(lambda > 0.0)) throw Error(ErrorCode::invalid_argument, "lambda must be positive");
    if (!(theta > 0.0 && theta <= kPi)) throw Error(ErrorCode::invalid_argument, "theta must lie in (0, pi]");
    theta1_ = theta1 ? *theta1 : std::max(2.0 * theta - kPi, 0.0);
    if (!(theta1_ >= 0.0 && theta1_ < theta)) throw Error(ErrorCode::invalid_argument, "need 0 <= theta1 < theta");
    line_ = moving_line(s, lambda, theta);
    line1_ = moving_line(s, lambda, theta1_);
    h_ = h_values(s, lambda, theta);
    empty_ = !line_section(s, line_).has_value();
}

double MovingDomain::depth(Vec2 x) const {
    double d1 = s_.depth(x);
    double d2 = s_.depth(line_.reflect(x));
    double d3 = line_.signed_distance(x);
    double d4 = -line1_.signed_distance(x);
    return std::min({d1, d2, d3, d4});
}

bool MovingDomain::contains(Vec2 x) const {
    if (empty_) return false;
    if (!s_.contains(x) || !s_.contains(line_.reflect(x))) return false;
    if (!(line_.signed_distance(x) > 0.0)) return false;
    if (norm(x - line_.pivot) <= 1e-15) return false;
    double sg = sigma(s_, lambda_, x);
    return sg > theta1_ && sg < theta_;
}

BoundaryPiece MovingDomain::classify_boundary(Vec2 x, double tol) const {
    if (std::abs(depth(x)) > tol) return BoundaryPiece::none;
    const Vec2 xr = line_.reflect(x);
    const bool default_theta1 = theta1_ == std::max(2.0 * theta_ - kPi, 0.0);
    if (std::abs(line_.signed_distance(x)) <= tol) return BoundaryPiece::gamma0;
    if (std::abs(line1_.signed_distance(x)) <= tol) return BoundaryPiece::gamma2A;
    if (s_.distance_to_arc(x) <= tol || s_.distance_to_arc(xr) <= tol) return BoundaryPiece::gamma1;
    if (s_.distance_to_upper_side(xr) <= tol) return BoundaryPiece::gamma2B;
    if (theta1_ == 0.0 && s_.distance_to_lower_side(x) <= tol) return BoundaryPiece::gamma2A;
    if (default_theta1 && s_.distance_to_lower_side(xr) <= tol) return BoundaryPiece::gamma2A;
    return BoundaryPiece::other;
}

namespace {

using Poly = TaggedPolygon;

// Keeps the part where f >= 0 (f affine); edges created along f = 0 get `tag`.
Poly clip(const Poly& in, const std::function<double(Vec2)>& f, BoundaryPiece tag) {
    Poly out;
    const std::size_t n = in.vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 p = in.vertices[i], q = in.vertices[(i + 1) % n];
        double fp = f(p), fq = f(q);
        bool pin = fp >= 0.0, qin = fq >= 0.0;
        if (pin) {
            out.vertices.push_back(p);
            out.tags.push_back(in.tags[i]);
        }
        if (pin != qin) {
            Vec2 I = p + (q - p) * (fp / (fp - fq));
            out.vertices.push_back(I);
            out.tags.push_back(pin ? tag : in.tags[i]);
        }
    }
    return out;
}

Poly sector_polygon(const Sector& s, int arc_points, BoundaryPiece lower, BoundaryPiece arc, BoundaryPiece upper) {
    Poly P;
    P.vertices.push_back(s.vertex());
    P.tags.push_back(lower);
    const double h = 0.5 * s.alpha();
    for (int i = 0; i < arc_points; ++i) {
        double t = -h + 2.0 * h * i / arc_points;
        P.vertices.push_back(s.center() + unit(t));
        P.tags.push_back(arc);
    }
    P.vertices.push_back(s.p_plus());
    P.tags.push_back(upper);
    P.vertices[1] = s.p_minus();
    return P;
}

}  // namespace

TaggedPolygon MovingDomain::outline(int arc_points) const {
    if (empty_) return {};
    const bool default_theta1 = theta1_ == std::max(2.0 * theta_ - kPi, 0.0);
    Poly P = sector_polygon(s_, arc_points, theta1_ == 0.0 ? BoundaryPiece::gamma2A : BoundaryPiece::other,
                            BoundaryPiece::gamma1, BoundaryPiece::other);
    P = clip(P, [&](Vec2 x) { return line_.signed_distance(x); }, BoundaryPiece::gamma0);
    P = clip(P, [&](Vec2 x) { return -line1_.signed_distance(x); }, BoundaryPiece::gamma2A);
    // Reflected sector; reflection reverses orientation, so walk it backwards.
    Poly R = sector_polygon(s_, arc_points, default_theta1 ? BoundaryPiece::gamma2A : BoundaryPiece::other,
                            BoundaryPiece::gamma1, BoundaryPiece::gamma2B);
    const std::size_t m = R.vertices.size();
    std::vector<Vec2> rv(m);
    std::vector<BoundaryPiece> rt(m);
    for (std::size_t i = 0; i < m; ++i) {
        rv[i] = line_.reflect(R.vertices[m - 1 - i]);
        // edge (m-1-i) -> (m-i) reversed becomes edge i -> i+1 after reversal
        rt[i] = R.tags[(2 * m - 2 - i) % m];
    }
    for (std::size_t i = 0; i < m && !P.vertices.empty(); ++i) {
        Vec2 a = rv[i], b = rv[(i + 1) % m];
        P = clip(P, [a, b](Vec2 x) { return orient(a, b, x); }, rt[i]);
    }
    return P;
}

MovingDomain moving_domain(const Sector& s, double lambda, double theta, std::optional<double> theta1) {
    return MovingDomain(s, lambda, theta, theta1);
}

// ---------------------------------------------------------------------------
// Doubled sector

Vec2 reflect_across_lower_neumann(const Sector& s, Vec2 x) {
    Vec2 e = s.lower_dir();
    return e * (2.0 * dot(x, e)) - x;
}

bool double_domain_contains(const Sector& s, Vec2 x) {
    if (s.contains(x) || s.contains(reflect_across_lower_neumann(s, x))) return true;
    double t = s.lower_ray_param(x);
    return std::abs(cross(s.lower_dir(), x)) <= kBoundaryTol && t > kBoundaryTol && t < s.l_N() - kBoundaryTol;
}

double double_domain_depth(const Sector& s, Vec2 x) {
    Vec2 m = reflect_across_lower_neumann(s, x);
    double d = std::min({s.distance_to_upper_side(x), s.distance_to_arc(x), s.distance_to_upper_side(m),
                         s.distance_to_arc(m)});
    return double_domain_contains(s, x) ? d : -d;
}

DoubleMovingDomain::DoubleMovingDomain(const Sector& s, double lambda, double theta)
    : s_(s), lambda_(lambda), theta_(theta) {
    const double b = s.beta();
    const double eps = 1e-12;
    in_regime_ = lambda > 0.0 && lambda <= s.constants().l_perp + eps && theta >= theta_B(s, lambda) - eps &&
                 theta <= 0.5 * kPi + eps;
    line_ = moving_line(s, lambda, theta);
    h_ = h_values(s, lambda, theta);
    if (!h_.h1) throw Error(ErrorCode::domain_violation, "reflected upper side is parallel to the lower side");
    side_ = moving_line(s, *h_.h1, 2.0 * theta - b);
    if (h_.h3) far_ = moving_line(s, *h_.h3, 2.0 * theta + b - kPi);
}

bool DoubleMovingDomain::contains(Vec2 x) const {
    return line_.signed_distance(x) > 0.0 && double_domain_contains(s_, x) &&
           double_domain_contains(s_, line_.reflect(x));
}

double DoubleMovingDomain::depth(Vec2 x) const {
    return std::min({line_.signed_distance(x), double_domain_depth(s_, x), double_domain_depth(s_, line_.reflect(x))});
}

BoundaryPiece DoubleMovingDomain::classify_boundary(Vec2 x, double tol) const {
    if (std::abs(depth(x)) > tol) return BoundaryPiece::none;
    if (std::abs(line_.signed_distance(x)) <= tol) return BoundaryPiece::gamma0;
    if (far_ && std::abs(far_->signed_distance(x)) <= tol) return BoundaryPiece::gamma1;
    if (std::abs(side_.signed_distance(x)) <= tol)
        return s_.contains(x) ? BoundaryPiece::gamma2A : BoundaryPiece::gamma2B;
    return BoundaryPiece::other;
}

}  // namespace sectorsym
