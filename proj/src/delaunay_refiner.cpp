// Delaunay refinement (Ruppert-style) of a convex wedge-and-arc domain.
// Boundary segments are the only constraints and always lie on the hull, so
// a plain Lawson-flip Delaunay structure suffices.
#include "delaunay_refiner.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "sectorsym/error.hpp"

namespace sectorsym::detail {

namespace {

constexpr int next(int i) { return i == 2 ? 0 : i + 1; }
constexpr int prev(int i) { return i == 0 ? 2 : i - 1; }

double incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    double adx = a.x - d.x, ady = a.y - d.y;
    double bdx = b.x - d.x, bdy = b.y - d.y;
    double cdx = c.x - d.x, cdy = c.y - d.y;
    return (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy) + (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy) +
           (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady);
}

Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c) {
    Vec2 ab = b - a, ac = c - a;
    double d = 2.0 * cross(ab, ac);
    double ab2 = norm2(ab), ac2 = norm2(ac);
    return a + Vec2{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
}

class Refiner {
public:
    explicit Refiner(const RefinerInput& in) : in_(in) {
        min_sin_ = std::sin(in.quality_angle_deg * kPi / 180.0);
    }

    RefinerOutput run() {
        init();
        presplit_boundary();
        refine();
        return output();
    }

private:
    struct Tri {
        std::array<int, 3> v{};
        std::array<int, 3> n{};    // neighbour across the edge opposite v[i]
        std::array<int, 3> seg{};  // segment index of that edge, -1 if interior
    };
    struct Seg {
        int a, b, piece, owner;
        bool alive;
    };
    struct Pending {
        int t;
        std::array<int, 3> v;
    };

    const RefinerInput& in_;
    double min_sin_;
    std::vector<Vec2> P_;
    std::vector<double> theta_;
    std::vector<double> corner_angle_;
    std::vector<Tri> T_;
    std::vector<Seg> S_;
    std::vector<int> touched_;

    double size_at(Vec2 x) const {
        double d = std::numeric_limits<double>::infinity();
        for (Vec2 g : in_.grading_points) d = std::min(d, dist(x, g));
        return std::min(in_.h, in_.h / in_.grading + 0.25 * d);
    }

    int add_point(Vec2 p, double theta = std::numeric_limits<double>::quiet_NaN(), double corner = 0.0) {
        P_.push_back(p);
        theta_.push_back(theta);
        corner_angle_.push_back(corner);
        return static_cast<int>(P_.size()) - 1;
    }

    int add_seg(int a, int b, int piece) {
        S_.push_back({a, b, piece, -1, true});
        return static_cast<int>(S_.size()) - 1;
    }

    void set_tri(int t, std::array<int, 3> v, std::array<int, 3> n, std::array<int, 3> seg) {
        T_[t].v = v;
        T_[t].n = n;
        T_[t].seg = seg;
        for (int i = 0; i < 3; ++i)
            if (seg[i] >= 0) S_[seg[i]].owner = t;
        touched_.push_back(t);
    }

    int new_tri() {
        T_.push_back({});
        return static_cast<int>(T_.size()) - 1;
    }

    void repoint(int t, int from, int to) {
        if (t < 0) return;
        for (int k = 0; k < 3; ++k)
            if (T_[t].n[k] == from) {
                T_[t].n[k] = to;
                return;
            }
    }

    int index_of(int t, int vertex) const {
        for (int k = 0; k < 3; ++k)
            if (T_[t].v[k] == vertex) return k;
        return -1;
    }

    void init() {
        std::array<int, 3> id{};
        for (int i = 0; i < 3; ++i) id[i] = add_point(in_.corners[i], in_.corner_theta[i], in_.corner_angle[i]);
        if (orient(P_[0], P_[1], P_[2]) <= 0.0) throw Error(ErrorCode::mesh_failure, "initial triangle is not CCW");
        std::array<int, 3> seg{};
        // edge i joins corner i and i+1, i.e. it is opposite corner i+2
        for (int i = 0; i < 3; ++i) seg[(i + 2) % 3] = add_seg(id[i], id[(i + 1) % 3], in_.edge_piece[i]);
        int t = new_tri();
        set_tri(t, id, {-1, -1, -1}, seg);
    }

    Vec2 split_point(const Seg& s, double* theta) const {
        const Piece& pc = in_.pieces[s.piece];
        if (pc.arc) {
            double tm = 0.5 * (theta_[s.a] + theta_[s.b]);
            *theta = tm;
            return in_.arc_center + unit(tm) * in_.radius;
        }
        *theta = std::numeric_limits<double>::quiet_NaN();
        // concentric shells around sharp corners stop mutual encroachment of
        // the two sides
        for (int end = 0; end < 2; ++end) {
            int c = end == 0 ? s.a : s.b, o = end == 0 ? s.b : s.a;
            double ca = corner_angle_[c];
            if (ca > 0.0 && ca < kPi / 3.0) {
                double len = dist(P_[c], P_[o]);
                double d = std::exp2(std::round(std::log2(0.5 * len)));
                return P_[c] + (P_[o] - P_[c]) * (d / len);
            }
        }
        return (P_[s.a] + P_[s.b]) * 0.5;
    }

    // Splits boundary segment `si` at its midpoint (arc midpoint for arcs).
    void split_segment(int si) {
        Seg s = S_[si];
        if (dist(P_[s.a], P_[s.b]) < 1e-8 * in_.h / in_.grading)
            throw Error(ErrorCode::mesh_failure, "boundary refinement collapsed near a corner");
        int t = s.owner;
        int i = -1;
        for (int k = 0; k < 3; ++k)
            if (T_[t].seg[k] == si) i = k;
        if (i < 0) throw Error(ErrorCode::mesh_failure, "segment owner out of sync");
        double th;
        Vec2 pm = split_point(s, &th);
        int p = add_point(pm, th);
        const Tri old = T_[t];
        int a = old.v[i], b = old.v[next(i)], c = old.v[prev(i)];
        S_[si].alive = false;
        // the segment runs b -> c inside this triangle
        int sbp = add_seg(b, p, s.piece);
        int spc = add_seg(p, c, s.piece);
        int t1 = new_tri();
        set_tri(t, {a, b, p}, {-1, t1, old.n[prev(i)]}, {sbp, -1, old.seg[prev(i)]});
        set_tri(t1, {a, p, c}, {-1, old.n[next(i)], t}, {spc, old.seg[next(i)], -1});
        repoint(old.n[next(i)], t, t1);
        legalize({{t, 2}, {t1, 1}});
    }

    void split_interior_edge(int t, int i, Vec2 pm) {
        const Tri ot = T_[t];
        int u = ot.n[i];
        int a = ot.v[i], b = ot.v[next(i)], c = ot.v[prev(i)];
        const Tri ou = T_[u];
        int j = -1;
        for (int k = 0; k < 3; ++k)
            if (ou.n[k] == t) j = k;
        int d = ou.v[j];
        int p = add_point(pm);
        int t1 = new_tri(), u1 = new_tri();
        // t: (a,b,c) -> (a,b,p), (a,p,c); u: (d,c,b) -> (d,c,p), (d,p,b)
        set_tri(t, {a, b, p}, {u1, t1, ot.n[prev(i)]}, {-1, -1, ot.seg[prev(i)]});
        set_tri(t1, {a, p, c}, {u, ot.n[next(i)], t}, {-1, ot.seg[next(i)], -1});
        set_tri(u, {d, c, p}, {t1, u1, ou.n[prev(j)]}, {-1, -1, ou.seg[prev(j)]});
        set_tri(u1, {d, p, b}, {t, ou.n[next(j)], u}, {-1, ou.seg[next(j)], -1});
        repoint(ot.n[next(i)], t, t1);
        repoint(ou.n[next(j)], u, u1);
        legalize({{t, 2}, {t1, 1}, {u, 2}, {u1, 1}});
    }

    void insert_in_triangle(int t, Vec2 pm) {
        const Tri o = T_[t];
        int a = o.v[0], b = o.v[1], c = o.v[2];
        int p = add_point(pm);
        int t1 = new_tri(), t2 = new_tri();
        set_tri(t, {p, b, c}, {o.n[0], t1, t2}, {o.seg[0], -1, -1});
        set_tri(t1, {a, p, c}, {t, o.n[1], t2}, {-1, o.seg[1], -1});
        set_tri(t2, {a, b, p}, {t, t1, o.n[2]}, {-1, -1, o.seg[2]});
        repoint(o.n[1], t, t1);
        repoint(o.n[2], t, t2);
        legalize({{t, 0}, {t1, 1}, {t2, 2}});
    }

    // Restores the Delaunay property around edges opposite the new vertex.
    void legalize(std::vector<std::pair<int, int>> stack) {
        while (!stack.empty()) {
            auto [t, i] = stack.back();
            stack.pop_back();
            const Tri ot = T_[t];
            int u = ot.n[i];
            if (u < 0) continue;
            int a = ot.v[i], b = ot.v[next(i)], c = ot.v[prev(i)];
            const Tri ou = T_[u];
            int j = -1;
            for (int k = 0; k < 3; ++k)
                if (ou.n[k] == t) j = k;
            if (j < 0) throw Error(ErrorCode::mesh_failure, "adjacency out of sync");
            int d = ou.v[j];
            double scale = norm2(P_[b] - P_[c]);
            if (incircle(P_[a], P_[b], P_[c], P_[d]) <= 1e-12 * scale * scale) continue;
            // flip edge (b,c) -> (a,d)
            int tA = ot.n[next(i)], sA = ot.seg[next(i)];
            int tB = ot.n[prev(i)], sB = ot.seg[prev(i)];
            int uA = ou.n[next(j)], suA = ou.seg[next(j)];
            int uB = ou.n[prev(j)], suB = ou.seg[prev(j)];
            set_tri(t, {a, b, d}, {uA, u, tB}, {suA, -1, sB});
            set_tri(u, {a, d, c}, {uB, tA, t}, {suB, sA, -1});
            repoint(uA, u, t);
            repoint(tA, t, u);
            stack.push_back({t, 0});
            stack.push_back({u, 0});
        }
    }

    struct WalkResult {
        int t;
        int exit_edge;  // >= 0 when the walk left the domain through this edge of t
    };

    WalkResult walk(int t, Vec2 p) const {
        const int limit = 4 * static_cast<int>(T_.size()) + 100;
        for (int step = 0; step < limit; ++step) {
            const Tri& tr = T_[t];
            int moved = -1;
            for (int r = 0; r < 3; ++r) {
                int k = (r + step) % 3;
                if (orient(P_[tr.v[next(k)]], P_[tr.v[prev(k)]], p) < 0.0) {
                    if (tr.n[k] < 0) return {t, k};
                    moved = tr.n[k];
                    break;
                }
            }
            if (moved < 0) return {t, -1};
            t = moved;
        }
        throw Error(ErrorCode::mesh_failure, "point location did not terminate");
    }

    void presplit_boundary() {
        for (std::size_t k = 0; k < S_.size(); ++k) {
            if (!S_[k].alive) continue;
            const Seg s = S_[k];
            double th;
            Vec2 m = split_point(s, &th);
            if (dist(P_[s.a], P_[s.b]) > size_at(m)) split_segment(static_cast<int>(k));
        }
        touched_.clear();
    }

    bool encroached(int t, int i) const {
        const Tri& tr = T_[t];
        Vec2 a = P_[tr.v[i]], b = P_[tr.v[next(i)]], c = P_[tr.v[prev(i)]];
        return dot(b - a, c - a) < -1e-12 * dist(b, c) * dist(b, c);
    }

    bool is_bad(int t) const {
        const Tri& tr = T_[t];
        Vec2 p[3] = {P_[tr.v[0]], P_[tr.v[1]], P_[tr.v[2]]};
        double l[3];
        for (int k = 0; k < 3; ++k) l[k] = dist(p[next(k)], p[prev(k)]);  // l[k] opposite vertex k
        double lmax = std::max({l[0], l[1], l[2]});
        Vec2 cen = (p[0] + p[1] + p[2]) / 3.0;
        if (lmax > size_at(cen)) return true;
        int kmin = 0;
        for (int k = 1; k < 3; ++k)
            if (l[k] < l[kmin]) kmin = k;
        double area2 = orient(p[0], p[1], p[2]);
        // sin of the smallest angle: opposite the shortest edge
        double s = area2 / (l[next(kmin)] * l[prev(kmin)]);
        if (s >= min_sin_) return false;
        // a triangle that spans a sharp input corner completely cannot be improved
        for (int k = 0; k < 3; ++k) {
            double ca = corner_angle_[tr.v[k]];
            if (ca <= 0.0) continue;
            double ang = std::acos(std::clamp(dot(p[next(k)] - p[k], p[prev(k)] - p[k]) / (l[next(k)] * l[prev(k)]), -1.0, 1.0));
            if (ang >= ca - 1e-9 && ang <= std::asin(std::min(1.0, s)) + 1e-9) return false;
        }
        return true;
    }

    void push_touched(std::deque<Pending>& q) {
        for (int t : touched_) q.push_back({t, T_[t].v});
        touched_.clear();
    }

    void refine() {
        std::deque<Pending> q;
        for (int t = 0; t < static_cast<int>(T_.size()); ++t) q.push_back({t, T_[t].v});
        double hmin = in_.h / in_.grading;
        double area_est = 4.0 * in_.radius * in_.radius;
        std::size_t cap = static_cast<std::size_t>(50.0 * area_est / (hmin * hmin)) + 20000;
        while (!q.empty()) {
            Pending pd = q.front();
            q.pop_front();
            int t = pd.t;
            if (T_[t].v != pd.v) continue;
            if (P_.size() > cap) throw Error(ErrorCode::mesh_failure, "refinement exceeded the point budget");
            bool split = false;
            for (int i = 0; i < 3 && !split; ++i) {
                if (T_[t].seg[i] >= 0 && encroached(t, i)) {
                    split_segment(T_[t].seg[i]);
                    split = true;
                }
            }
            if (split) {
                push_touched(q);
                continue;
            }
            if (!is_bad(t)) continue;
            const Tri& tr = T_[t];
            Vec2 cc = circumcenter(P_[tr.v[0]], P_[tr.v[1]], P_[tr.v[2]]);
            std::vector<int> enc;
            for (std::size_t k = 0; k < S_.size(); ++k) {
                const Seg& s = S_[k];
                if (!s.alive) continue;
                Vec2 m = (P_[s.a] + P_[s.b]) * 0.5;
                double r2 = 0.25 * norm2(P_[s.b] - P_[s.a]);
                if (norm2(cc - m) < r2 * (1.0 - 1e-12)) enc.push_back(static_cast<int>(k));
            }
            if (!enc.empty()) {
                for (int k : enc)
                    if (S_[k].alive) split_segment(k);
                push_touched(q);
                q.push_back({t, T_[t].v});
                continue;
            }
            WalkResult w = walk(t, cc);
            if (w.exit_edge >= 0) {
                int sg = T_[w.t].seg[w.exit_edge];
                if (sg < 0) throw Error(ErrorCode::mesh_failure, "walk exited through an interior edge");
                split_segment(sg);
                push_touched(q);
                q.push_back({t, T_[t].v});
                continue;
            }
            const Tri& host = T_[w.t];
            Vec2 h0 = P_[host.v[0]], h1 = P_[host.v[1]], h2 = P_[host.v[2]];
            double A = orient(h0, h1, h2);
            std::array<double, 3> bc = {orient(cc, h1, h2) / A, orient(h0, cc, h2) / A, orient(h0, h1, cc) / A};
            int kmin = static_cast<int>(std::min_element(bc.begin(), bc.end()) - bc.begin());
            double lref = std::sqrt(std::abs(A));
            bool near_vertex = false;
            for (int k = 0; k < 3; ++k)
                if (dist(cc, P_[host.v[k]]) < 1e-9 * lref) near_vertex = true;
            if (near_vertex) continue;
            if (bc[kmin] < 1e-10) {
                if (host.seg[kmin] >= 0) {
                    split_segment(host.seg[kmin]);
                } else {
                    // project onto the edge to keep both halves valid
                    Vec2 e0 = P_[host.v[next(kmin)]], e1 = P_[host.v[prev(kmin)]];
                    double s = std::clamp(dot(cc - e0, e1 - e0) / norm2(e1 - e0), 0.0, 1.0);
                    split_interior_edge(w.t, kmin, e0 + (e1 - e0) * s);
                }
            } else {
                insert_in_triangle(w.t, cc);
            }
            push_touched(q);
            if (T_[t].v == pd.v) q.push_back({t, T_[t].v});
        }
    }

    RefinerOutput output() const {
        RefinerOutput out;
        out.vertices = P_;
        out.triangles.reserve(T_.size());
        for (const Tri& t : T_) out.triangles.push_back(t.v);
        for (const Seg& s : S_)
            if (s.alive) out.boundary.push_back({s.a, s.b, s.piece});
        return out;
    }
};

}  // namespace

RefinerOutput delaunay_refine(const RefinerInput& in) { return Refiner(in).run(); }

}  // namespace sectorsym::detail
