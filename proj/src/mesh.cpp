#include "sectorsym/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "delaunay_refiner.hpp"
#include "sectorsym/error.hpp"

namespace sectorsym {

const char* to_string(BoundaryTag t) {
    switch (t) {
        case BoundaryTag::dirichlet_arc: return "DIRICHLET_ARC";
        case BoundaryTag::neumann_lower: return "NEUMANN_LOWER";
        case BoundaryTag::neumann_upper: return "NEUMANN_UPPER";
    }
    return "?";
}

BoundaryTag boundary_tag_from_string(const std::string& s) {
    if (s == "DIRICHLET_ARC") return BoundaryTag::dirichlet_arc;
    if (s == "NEUMANN_LOWER") return BoundaryTag::neumann_lower;
    if (s == "NEUMANN_UPPER") return BoundaryTag::neumann_upper;
    throw Error(ErrorCode::parse, "unknown boundary tag: " + s);
}

MeshDomain sector_domain(const Sector& s) {
    MeshDomain d;
    d.beta = s.beta();
    d.arc_center = s.center();
    d.radius = 1.0;
    d.arc_half_angle = 0.5 * s.alpha();
    d.p_plus = s.p_plus();
    d.p_minus = s.p_minus();
    return d;
}

MeshDomain slice_domain(double beta, double rho) {
    if (!(beta > 0.0 && beta <= kPi) || !(rho > 0.0)) throw Error(ErrorCode::invalid_argument, "slice needs 0 < beta <= pi and rho > 0");
    MeshDomain d;
    d.beta = beta;
    d.arc_center = {0.0, 0.0};
    d.radius = rho;
    d.arc_half_angle = 0.5 * beta;
    d.p_plus = unit(0.5 * beta) * rho;
    d.p_minus = unit(-0.5 * beta) * rho;
    return d;
}

double domain_area(const MeshDomain& d) {
    double tri = 0.5 * cross(d.p_minus, d.p_plus);
    double th = 2.0 * d.arc_half_angle;
    return tri + 0.5 * d.radius * d.radius * (th - std::sin(th));
}

namespace {

BoundaryTag swap_tag(BoundaryTag t) {
    if (t == BoundaryTag::neumann_lower) return BoundaryTag::neumann_upper;
    if (t == BoundaryTag::neumann_upper) return BoundaryTag::neumann_lower;
    return t;
}

double corner_angle_at(const MeshDomain& d, Vec2 p, double theta) {
    // arc tangent pointing into the domain, and direction towards the vertex
    Vec2 t = theta > 0 ? Vec2{std::sin(theta), -std::cos(theta)} : Vec2{-std::sin(theta), std::cos(theta)};
    Vec2 v = Vec2{0.0, 0.0} - p;
    (void)d;
    return std::acos(std::clamp(dot(t, v) / norm(v), -1.0, 1.0));
}

double min_angle_deg(const std::vector<Vec2>& P, const std::array<int, 3>& t) {
    double m = 180.0;
    for (int k = 0; k < 3; ++k) {
        Vec2 a = P[t[k]], b = P[t[(k + 1) % 3]], c = P[t[(k + 2) % 3]];
        double cosv = dot(b - a, c - a) / (norm(b - a) * norm(c - a));
        m = std::min(m, std::acos(std::clamp(cosv, -1.0, 1.0)) * 180.0 / kPi);
    }
    return m;
}

Mesh build(const MeshDomain& dom, std::optional<SectorSpec> spec, double h, bool symmetric, double grading) {
    if (!(h > 0.0 && h <= 0.2)) throw Error(ErrorCode::invalid_argument, "mesh size must satisfy 0 < h <= 0.2");
    if (!(grading >= 1.0)) throw Error(ErrorCode::invalid_argument, "grading must be >= 1");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double th = dom.arc_half_angle;
    detail::RefinerInput in;
    in.arc_center = dom.arc_center;
    in.radius = dom.radius;
    in.h = h;
    in.grading = grading;
    const double ang_p = corner_angle_at(dom, dom.p_plus, th);
    const double apex = symmetric ? 0.5 * dom.beta : dom.beta;
    if (apex < 20.0 * kPi / 180.0)
        throw Error(ErrorCode::mesh_failure, "apex angle below 20 deg cannot be meshed in this mode");
    if (!symmetric) {
        in.pieces = {{false, false, BoundaryTag::neumann_lower},
                     {true, false, BoundaryTag::dirichlet_arc},
                     {false, false, BoundaryTag::neumann_upper}};
        in.corners = {Vec2{0.0, 0.0}, dom.p_minus, dom.p_plus};
        in.corner_theta = {nan, -th, th};
        in.corner_angle = {dom.beta, ang_p, ang_p};
        in.edge_piece = {0, 1, 2};
        in.grading_points = {in.corners[0], dom.p_minus, dom.p_plus};
    } else {
        in.pieces = {{false, false, BoundaryTag::neumann_lower},
                     {true, false, BoundaryTag::dirichlet_arc},
                     {false, true, BoundaryTag::neumann_lower}};
        Vec2 e = dom.arc_center + Vec2{dom.radius, 0.0};
        in.corners = {Vec2{0.0, 0.0}, dom.p_minus, e};
        in.corner_theta = {nan, -th, 0.0};
        in.corner_angle = {0.5 * dom.beta, ang_p, 0.5 * kPi};
        in.edge_piece = {0, 1, 2};
        in.grading_points = {in.corners[0], dom.p_minus, dom.p_plus};
    }
    detail::RefinerOutput out = detail::delaunay_refine(in);

    std::vector<Vec2> V = std::move(out.vertices);
    std::vector<std::array<int, 3>> T = std::move(out.triangles);
    std::vector<BoundaryEdge> B;
    for (const auto& e : out.boundary)
        if (!in.pieces[e.piece].axis) B.push_back({e.v0, e.v1, in.pieces[e.piece].tag});

    if (symmetric) {
        const int n = static_cast<int>(V.size());
        std::vector<int> m(n);
        for (int i = 0; i < n; ++i) {
            if (V[i].y == 0.0) {
                m[i] = i;
            } else {
                m[i] = static_cast<int>(V.size());
                V.push_back(mirror_x1(V[i]));
            }
        }
        const std::size_t nt = T.size();
        for (std::size_t k = 0; k < nt; ++k) T.push_back({m[T[k][0]], m[T[k][2]], m[T[k][1]]});
        const std::size_t nb = B.size();
        for (std::size_t k = 0; k < nb; ++k) B.push_back({m[B[k].v1], m[B[k].v0], swap_tag(B[k].tag)});
    }

    double worst = 180.0;
    for (const auto& t : T) worst = std::min(worst, min_angle_deg(V, t));
    if (worst < 20.0) {
        std::ostringstream os;
        os << "minimum angle " << worst << " deg below 20 deg (opening too small for this mode)";
        throw Error(ErrorCode::mesh_failure, os.str());
    }
    return Mesh(dom, spec, std::move(V), std::move(T), std::move(B), h, symmetric, grading);
}

}  // namespace

Mesh::Mesh(MeshDomain domain, std::optional<SectorSpec> spec, std::vector<Vec2> vertices,
           std::vector<std::array<int, 3>> triangles, std::vector<BoundaryEdge> boundary_edges, double h, bool symmetric,
           double grading)
    : domain_(domain),
      spec_(spec),
      vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      boundary_edges_(std::move(boundary_edges)),
      h_(h),
      symmetric_(symmetric),
      grading_(grading) {
    const int n = static_cast<int>(vertices_.size());
    for (const auto& t : triangles_)
        for (int v : t)
            if (v < 0 || v >= n) throw Error(ErrorCode::invalid_argument, "triangle index out of range");
    dirichlet_.assign(vertices_.size(), 0);
    for (const auto& e : boundary_edges_) {
        if (e.v0 < 0 || e.v0 >= n || e.v1 < 0 || e.v1 >= n) throw Error(ErrorCode::invalid_argument, "edge index out of range");
        if (e.tag == BoundaryTag::dirichlet_arc) dirichlet_[e.v0] = dirichlet_[e.v1] = 1;
    }
    build_index();
}

double Mesh::triangle_area(int t) const {
    const auto& v = triangles_[t];
    return 0.5 * orient(vertices_[v[0]], vertices_[v[1]], vertices_[v[2]]);
}

Vec2 Mesh::barycenter(int t) const {
    const auto& v = triangles_[t];
    return (vertices_[v[0]] + vertices_[v[1]] + vertices_[v[2]]) / 3.0;
}

std::array<Vec2, 3> Mesh::shape_gradients(int t) const {
    const auto& v = triangles_[t];
    Vec2 p0 = vertices_[v[0]], p1 = vertices_[v[1]], p2 = vertices_[v[2]];
    double d = orient(p0, p1, p2);
    // grad lambda_i = perp(edge opposite i) / (2 area), with perp(x, y) = (-y, x)
    auto g = [d](Vec2 a, Vec2 b) { return Vec2{a.y - b.y, b.x - a.x} / d; };
    return {g(p1, p2), g(p2, p0), g(p0, p1)};
}

void Mesh::build_index() {
    lo_ = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    hi_ = {-lo_.x, -lo_.y};
    for (Vec2 p : vertices_) {
        lo_.x = std::min(lo_.x, p.x);
        lo_.y = std::min(lo_.y, p.y);
        hi_.x = std::max(hi_.x, p.x);
        hi_.y = std::max(hi_.y, p.y);
    }
    const double w = std::max(hi_.x - lo_.x, 1e-300), ht = std::max(hi_.y - lo_.y, 1e-300);
    const double nt = std::max<double>(1.0, static_cast<double>(triangles_.size()));
    cell_ = std::sqrt(w * ht / nt) * 1.5;
    nx_ = std::clamp(static_cast<int>(std::ceil(w / cell_)), 1, 4096);
    ny_ = std::clamp(static_cast<int>(std::ceil(ht / cell_)), 1, 4096);
    cell_ = std::max(w / nx_, ht / ny_);
    nx_ = std::max(1, static_cast<int>(std::ceil(w / cell_)));
    ny_ = std::max(1, static_cast<int>(std::ceil(ht / cell_)));
    const double pad = 1e-9 * std::max(w, ht);
    auto cell_range = [&](double a, double b, double o, int nmax, int* i0, int* i1) {
        *i0 = std::clamp(static_cast<int>(std::floor((a - pad - o) / cell_)), 0, nmax - 1);
        *i1 = std::clamp(static_cast<int>(std::floor((b + pad - o) / cell_)), 0, nmax - 1);
    };
    std::vector<int> count(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
    std::vector<std::array<int, 4>> box(triangles_.size());
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        const auto& v = triangles_[t];
        double x0 = std::min({vertices_[v[0]].x, vertices_[v[1]].x, vertices_[v[2]].x});
        double x1 = std::max({vertices_[v[0]].x, vertices_[v[1]].x, vertices_[v[2]].x});
        double y0 = std::min({vertices_[v[0]].y, vertices_[v[1]].y, vertices_[v[2]].y});
        double y1 = std::max({vertices_[v[0]].y, vertices_[v[1]].y, vertices_[v[2]].y});
        cell_range(x0, x1, lo_.x, nx_, &box[t][0], &box[t][1]);
        cell_range(y0, y1, lo_.y, ny_, &box[t][2], &box[t][3]);
        for (int j = box[t][2]; j <= box[t][3]; ++j)
            for (int i = box[t][0]; i <= box[t][1]; ++i) ++count[j * nx_ + i + 1];
    }
    for (std::size_t k = 1; k < count.size(); ++k) count[k] += count[k - 1];
    cell_start_ = count;
    cell_items_.assign(count.back(), 0);
    std::vector<int> fill(count.begin(), count.end() - 1);
    for (std::size_t t = 0; t < triangles_.size(); ++t)
        for (int j = box[t][2]; j <= box[t][3]; ++j)
            for (int i = box[t][0]; i <= box[t][1]; ++i) cell_items_[fill[j * nx_ + i]++] = static_cast<int>(t);
}

namespace {

std::array<double, 3> bary_of(const std::vector<Vec2>& P, const std::array<int, 3>& v, Vec2 x) {
    Vec2 a = P[v[0]], b = P[v[1]], c = P[v[2]];
    double d = orient(a, b, c);
    return {orient(x, b, c) / d, orient(a, x, c) / d, orient(a, b, x) / d};
}

}  // namespace

std::vector<Location> Mesh::locate_all(Vec2 x, double tol) const {
    std::vector<Location> out;
    const double slack = 1e-9 * std::max(hi_.x - lo_.x, hi_.y - lo_.y);
    if (x.x < lo_.x - slack || x.x > hi_.x + slack || x.y < lo_.y - slack || x.y > hi_.y + slack) return out;
    int i = std::clamp(static_cast<int>(std::floor((x.x - lo_.x) / cell_)), 0, nx_ - 1);
    int j = std::clamp(static_cast<int>(std::floor((x.y - lo_.y) / cell_)), 0, ny_ - 1);
    int c = j * nx_ + i;
    for (int k = cell_start_[c]; k < cell_start_[c + 1]; ++k) {
        int t = cell_items_[k];
        auto b = bary_of(vertices_, triangles_[t], x);
        if (std::min({b[0], b[1], b[2]}) >= -tol) out.push_back({t, b});
    }
    return out;
}

std::optional<Location> Mesh::try_locate(Vec2 x, double tol) const {
    auto all = locate_all(x, tol);
    if (all.empty()) return std::nullopt;
    auto best = std::max_element(all.begin(), all.end(), [](const Location& a, const Location& b) {
        return std::min({a.bary[0], a.bary[1], a.bary[2]}) < std::min({b.bary[0], b.bary[1], b.bary[2]});
    });
    return *best;
}

Location Mesh::locate(Vec2 x) const {
    auto r = try_locate(x);
    if (!r) {
        std::ostringstream os;
        os.precision(17);
        os << "point (" << x.x << ", " << x.y << ") is outside the meshed region";
        throw Error(ErrorCode::point_outside, os.str());
    }
    return *r;
}

Mesh generate(const SectorSpec& spec, double h, bool symmetric, double grading) {
    Sector s(spec);
    return build(sector_domain(s), spec, h, symmetric, grading);
}

Mesh generate(const MeshDomain& domain, double h, bool symmetric, double grading) {
    return build(domain, std::nullopt, h, symmetric, grading);
}

Mesh generate_slice(double beta, double rho, double h, double grading) {
    return build(slice_domain(beta, rho), std::nullopt, h, false, grading);
}

Mesh refine(const Mesh& mesh) {
    const auto& P = mesh.vertices();
    std::vector<Vec2> V = P;
    std::map<std::pair<int, int>, int> mid;
    std::set<std::pair<int, int>> arc_edges;
    for (const auto& e : mesh.boundary_edges())
        if (e.tag == BoundaryTag::dirichlet_arc) arc_edges.insert({std::min(e.v0, e.v1), std::max(e.v0, e.v1)});
    const MeshDomain& d = mesh.domain();
    auto midpoint = [&](int a, int b) {
        std::pair<int, int> key{std::min(a, b), std::max(a, b)};
        auto it = mid.find(key);
        if (it != mid.end()) return it->second;
        Vec2 m = (P[a] + P[b]) * 0.5;
        if (arc_edges.count(key)) {
            Vec2 r = m - d.arc_center;
            m = d.arc_center + r * (d.radius / norm(r));
        }
        int id = static_cast<int>(V.size());
        V.push_back(m);
        mid.emplace(key, id);
        return id;
    };
    std::vector<std::array<int, 3>> T;
    T.reserve(4 * mesh.triangles().size());
    for (const auto& t : mesh.triangles()) {
        int a = t[0], b = t[1], c = t[2];
        int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
        T.push_back({a, ab, ca});
        T.push_back({ab, b, bc});
        T.push_back({ca, bc, c});
        T.push_back({ab, bc, ca});
    }
    std::vector<BoundaryEdge> B;
    for (const auto& e : mesh.boundary_edges()) {
        int m = midpoint(e.v0, e.v1);
        B.push_back({e.v0, m, e.tag});
        B.push_back({m, e.v1, e.tag});
    }
    return Mesh(d, mesh.spec(), std::move(V), std::move(T), std::move(B), 0.5 * mesh.h(), mesh.symmetric(),
                mesh.grading());
}

MeshQuality quality(const Mesh& mesh) {
    MeshQuality q;
    q.min_angle_deg = 180.0;
    q.h_min = std::numeric_limits<double>::infinity();
    const auto& P = mesh.vertices();
    for (std::size_t t = 0; t < mesh.triangles().size(); ++t) {
        const auto& v = mesh.triangles()[t];
        for (int k = 0; k < 3; ++k) {
            Vec2 a = P[v[k]], b = P[v[(k + 1) % 3]], c = P[v[(k + 2) % 3]];
            double ang = std::acos(std::clamp(dot(b - a, c - a) / (norm(b - a) * norm(c - a)), -1.0, 1.0)) * 180.0 / kPi;
            q.min_angle_deg = std::min(q.min_angle_deg, ang);
            q.max_angle_deg = std::max(q.max_angle_deg, ang);
            double l = dist(b, c);
            q.h_min = std::min(q.h_min, l);
            q.h_max = std::max(q.h_max, l);
        }
        q.area += mesh.triangle_area(static_cast<int>(t));
    }
    q.n_vertices = P.size();
    q.n_triangles = mesh.triangles().size();
    q.n_boundary_edges = mesh.boundary_edges().size();
    return q;
}

std::vector<std::string> validate(const Mesh& mesh) {
    std::vector<std::string> errs;
    const auto& P = mesh.vertices();
    const auto& d = mesh.domain();
    std::map<std::pair<int, int>, int> edge_use;
    for (std::size_t t = 0; t < mesh.triangles().size(); ++t) {
        const auto& v = mesh.triangles()[t];
        if (mesh.triangle_area(static_cast<int>(t)) <= 0.0) errs.push_back("triangle " + std::to_string(t) + " is not positively oriented");
        for (int k = 0; k < 3; ++k) {
            int a = v[k], b = v[(k + 1) % 3];
            ++edge_use[{std::min(a, b), std::max(a, b)}];
        }
    }
    std::set<std::pair<int, int>> hull;
    for (const auto& [e, n] : edge_use) {
        if (n > 2) errs.push_back("edge shared by more than two triangles");
        if (n == 1) hull.insert(e);
    }
    std::set<std::pair<int, int>> tagged;
    for (const auto& e : mesh.boundary_edges()) tagged.insert({std::min(e.v0, e.v1), std::max(e.v0, e.v1)});
    if (tagged != hull || tagged.size() != mesh.boundary_edges().size())
        errs.push_back("tagged boundary edges do not match the triangulation boundary");

    const Vec2 lo_dir = unit(-0.5 * d.beta), up_dir = unit(0.5 * d.beta);
    auto on_ray = [](Vec2 dir, Vec2 x) { return std::abs(cross(dir, x)) <= 1e-12 && dot(dir, x) >= -1e-12; };
    std::map<BoundaryTag, std::map<int, int>> chain;
    for (const auto& e : mesh.boundary_edges()) {
        chain[e.tag][e.v0] = e.v1;
        for (int v : {e.v0, e.v1}) {
            if (e.tag == BoundaryTag::dirichlet_arc) {
                if (std::abs(dist(P[v], d.arc_center) - d.radius) > 1e-12) errs.push_back("arc vertex off the circle");
            } else {
                Vec2 dir = e.tag == BoundaryTag::neumann_lower ? lo_dir : up_dir;
                if (!on_ray(dir, P[v])) errs.push_back(std::string(to_string(e.tag)) + " vertex off its ray");
            }
        }
    }
    auto find_vertex = [&](Vec2 x) {
        for (std::size_t i = 0; i < P.size(); ++i)
            if (dist(P[i], x) <= 1e-12) return static_cast<int>(i);
        return -1;
    };
    const int iv = find_vertex({0.0, 0.0}), im = find_vertex(d.p_minus), ip = find_vertex(d.p_plus);
    if (iv < 0 || im < 0 || ip < 0) {
        errs.push_back("corner vertices missing");
    } else {
        auto follow = [&](BoundaryTag tag, int from, int to) {
            const auto& c = chain[tag];
            int cur = from;
            std::size_t steps = 0;
            while (cur != to && steps <= c.size()) {
                auto it = c.find(cur);
                if (it == c.end()) break;
                cur = it->second;
                ++steps;
            }
            if (cur != to || steps != c.size()) errs.push_back(std::string(to_string(tag)) + " edges do not form a chain between corners");
        };
        follow(BoundaryTag::neumann_lower, iv, im);
        follow(BoundaryTag::dirichlet_arc, im, ip);
        follow(BoundaryTag::neumann_upper, ip, iv);
    }
    if (!mesh.triangles().empty() && quality(mesh).min_angle_deg < 20.0) errs.push_back("minimum angle below 20 degrees");
    if (mesh.symmetric() && !mirror_map(mesh)) errs.push_back("mirror map is not a mesh automorphism");
    return errs;
}

std::optional<std::vector<int>> mirror_map(const Mesh& mesh, double tol) {
    const auto& P = mesh.vertices();
    const int n = static_cast<int>(P.size());
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return P[a].x < P[b].x; });
    std::vector<int> m(n, -1);
    for (int i = 0; i < n; ++i) {
        Vec2 q = mirror_x1(P[i]);
        auto it = std::lower_bound(order.begin(), order.end(), q.x - tol, [&](int a, double x) { return P[a].x < x; });
        for (; it != order.end() && P[*it].x <= q.x + tol; ++it)
            if (std::abs(P[*it].y - q.y) <= tol) {
                m[i] = *it;
                break;
            }
        if (m[i] < 0) return std::nullopt;
    }
    auto canon = [](std::array<int, 3> t) {
        // rotate so that the smallest index comes first (keeps orientation)
        int k = static_cast<int>(std::min_element(t.begin(), t.end()) - t.begin());
        return std::array<int, 3>{t[k], t[(k + 1) % 3], t[(k + 2) % 3]};
    };
    std::set<std::array<int, 3>> tris;
    for (const auto& t : mesh.triangles()) tris.insert(canon(t));
    for (const auto& t : mesh.triangles())
        if (!tris.count(canon({m[t[0]], m[t[2]], m[t[1]]}))) return std::nullopt;
    std::set<std::tuple<int, int, int>> edges;
    for (const auto& e : mesh.boundary_edges()) edges.insert({e.v0, e.v1, static_cast<int>(e.tag)});
    for (const auto& e : mesh.boundary_edges())
        if (!edges.count({m[e.v1], m[e.v0], static_cast<int>(swap_tag(e.tag))})) return std::nullopt;
    return m;
}

}  // namespace sectorsym
