#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "../support/oracles.hpp"
#include "sectorsym/error.hpp"
#include "sectorsym/mesh.hpp"

using namespace sectorsym;
using oracle::pi;

namespace {

double max_edge(const Mesh& m) {
    double h = 0.0;
    for (const auto& t : m.triangles())
        for (int k = 0; k < 3; ++k) h = std::max(h, dist(m.vertices()[t[k]], m.vertices()[t[(k + 1) % 3]]));
    return h;
}

double min_angle_deg(const Mesh& m) {
    double best = 180.0;
    for (const auto& t : m.triangles()) {
        for (int k = 0; k < 3; ++k) {
            Vec2 a = m.vertices()[t[k]], b = m.vertices()[t[(k + 1) % 3]], c = m.vertices()[t[(k + 2) % 3]];
            double ang = std::atan2(std::abs(cross(b - a, c - a)), dot(b - a, c - a));
            best = std::min(best, ang * 180.0 / pi);
        }
    }
    return best;
}

/// Checks each tag forms a single chain and returns its two end vertices.
std::map<BoundaryTag, std::pair<int, int>> chain_ends(const Mesh& m) {
    std::map<BoundaryTag, std::map<int, int>> degree;
    for (const auto& e : m.boundary_edges()) {
        ++degree[e.tag][e.v0];
        ++degree[e.tag][e.v1];
    }
    std::map<BoundaryTag, std::pair<int, int>> out;
    for (auto& [tag, deg] : degree) {
        std::vector<int> ends;
        for (auto [v, d] : deg) {
            REQUIRE(d <= 2);
            if (d == 1) ends.push_back(v);
        }
        REQUIRE(ends.size() == 2);
        out[tag] = {ends[0], ends[1]};
    }
    return out;
}

}  // namespace

TEST_CASE("generated mesh satisfies the structural invariants") {
    for (auto sp : {SectorSpec{2 * pi / 3, 5 * pi / 12}, SectorSpec{pi, 7 * pi / 12}, SectorSpec{pi / 2, pi / 2}}) {
        Sector s(sp);
        Mesh m = generate(sp, 0.05);
        CHECK(validate(m).empty());
        CHECK(min_angle_deg(m) >= 20.0);
        double arc_err = 0.0, ray_err = 0.0;
        for (const auto& e : m.boundary_edges()) {
            for (int v : {e.v0, e.v1}) {
                Vec2 x = m.vertices()[v];
                if (e.tag == BoundaryTag::dirichlet_arc) arc_err = std::max(arc_err, std::abs(dist(x, s.center()) - 1.0));
                if (e.tag == BoundaryTag::neumann_lower) ray_err = std::max(ray_err, std::abs(cross(s.lower_dir(), x)));
                if (e.tag == BoundaryTag::neumann_upper) ray_err = std::max(ray_err, std::abs(cross(s.upper_dir(), x)));
            }
        }
        CHECK(arc_err <= 1e-12);
        CHECK(ray_err <= 1e-12);

        // tag chains run V -> P- (lower), V -> P+ (upper), P- -> P+ (arc)
        auto ends = chain_ends(m);
        auto at = [&](int v, Vec2 p) { return dist(m.vertices()[v], p) < 1e-12; };
        auto joins = [&](std::pair<int, int> e, Vec2 p, Vec2 q) {
            return (at(e.first, p) && at(e.second, q)) || (at(e.first, q) && at(e.second, p));
        };
        CHECK(joins(ends[BoundaryTag::neumann_lower], s.vertex(), s.p_minus()));
        CHECK(joins(ends[BoundaryTag::neumann_upper], s.vertex(), s.p_plus()));
        CHECK(joins(ends[BoundaryTag::dirichlet_arc], s.p_minus(), s.p_plus()));
    }
}

TEST_CASE("symmetric mode is a tag-swapping automorphism") {
    Mesh m = generate(SectorSpec{pi / 2, pi / 2}, 0.05, true);
    CHECK(m.symmetric());
    auto perm = mirror_map(m);
    REQUIRE(perm.has_value());
    std::set<std::tuple<int, int, BoundaryTag>> edges;
    for (const auto& e : m.boundary_edges()) edges.insert({std::min(e.v0, e.v1), std::max(e.v0, e.v1), e.tag});
    int bad = 0;
    for (const auto& e : m.boundary_edges()) {
        BoundaryTag t = e.tag == BoundaryTag::neumann_lower   ? BoundaryTag::neumann_upper
                        : e.tag == BoundaryTag::neumann_upper ? BoundaryTag::neumann_lower
                                                              : e.tag;
        int a = (*perm)[e.v0], b = (*perm)[e.v1];
        bad += !edges.count({std::min(a, b), std::max(a, b), t});
    }
    CHECK(bad == 0);

    Mesh u = generate(SectorSpec{2 * pi / 3, 5 * pi / 12}, 0.05, false);
    CHECK_FALSE(mirror_map(u).has_value());
}

TEST_CASE("refine halves the edge length and keeps tags and flags") {
    Mesh m = generate(SectorSpec{2 * pi / 3, 5 * pi / 12}, 0.1, true);
    Mesh r = refine(m);
    double ratio = max_edge(r) / max_edge(m);
    CHECK(ratio >= 0.5 / 1.2);
    CHECK(ratio <= 0.5 * 1.2);
    CHECK(r.symmetric());
    CHECK(r.triangles().size() == 4 * m.triangles().size());
    CHECK(r.boundary_edges().size() == 2 * m.boundary_edges().size());
    CHECK(validate(r).empty());
    CHECK(mirror_map(r).has_value());
    std::map<BoundaryTag, int> before, after;
    for (const auto& e : m.boundary_edges()) ++before[e.tag];
    for (const auto& e : r.boundary_edges()) ++after[e.tag];
    for (auto [t, n] : before) CHECK(after[t] == 2 * n);
    // new arc nodes land on the circle
    Sector s({2 * pi / 3, 5 * pi / 12});
    double worst = 0.0;
    for (const auto& e : r.boundary_edges())
        if (e.tag == BoundaryTag::dirichlet_arc)
            for (int v : {e.v0, e.v1}) worst = std::max(worst, std::abs(dist(r.vertices()[v], s.center()) - 1.0));
    CHECK(worst <= 1e-12);
}

TEST_CASE("minimum angle survives three refinements") {
    Mesh m = generate(SectorSpec{2 * pi / 3, 5 * pi / 12}, 0.1);
    for (int i = 0; i < 3; ++i) m = refine(m);
    CHECK(quality(m).min_angle_deg >= 20.0);
    CHECK(min_angle_deg(m) == doctest::Approx(quality(m).min_angle_deg).epsilon(1e-9));
}

TEST_CASE("mesh area converges to the sector area at second order") {
    SectorSpec sp{2 * pi / 3, 5 * pi / 12};
    Sector s(sp);
    // exact area: triangle V P- P+ plus circular segment of angle alpha
    const double al = sp.alpha;
    oracle::Frame F(sp.alpha, sp.beta);
    double tri = 0.5 * std::abs(oracle::crossp(F.Pp, F.Pm));
    double seg = 0.5 * (al - std::sin(al));
    double exact = tri + seg;
    CHECK(s.area() == doctest::Approx(exact).epsilon(1e-13));
    Mesh m = generate(sp, 0.1);
    double e0 = exact - quality(m).area;
    Mesh r = refine(m);
    double e1 = exact - quality(r).area;
    CHECK(e0 > 0.0);  // chords cut inside the disk
    CHECK(e1 > 0.0);
    CHECK(e0 / e1 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("locate") {
    Mesh m = generate(SectorSpec{2 * pi / 3, 5 * pi / 12}, 0.05);
    const auto& V = m.vertices();
    for (int i : {0, 7, static_cast<int>(V.size()) - 1}) {
        Location L = m.locate(V[i]);
        std::array<double, 3> b = L.bary;
        std::sort(b.begin(), b.end());
        CHECK(std::abs(b[0]) < 1e-12);
        CHECK(std::abs(b[1]) < 1e-12);
        CHECK(b[2] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(dist(V[m.triangles()[L.triangle][std::max_element(L.bary.begin(), L.bary.end()) - L.bary.begin()]], V[i]) <
              1e-14);
    }
    Vec2 x = m.barycenter(11);
    Location L = m.locate(x);
    CHECK(L.triangle == 11);
    for (double b : L.bary) CHECK(b == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    try {
        m.locate({-1.0, 0.0});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::point_outside);
    }
}

TEST_CASE("generate rejects out-of-range sizes") {
    CHECK_THROWS_AS(generate(SectorSpec{2.0, 1.0}, 0.3), Error);
    CHECK_THROWS_AS(generate(SectorSpec{2.0, 1.0}, 0.0), Error);
    CHECK_THROWS_AS(generate(SectorSpec{2.0, 1.0}, 0.05, false, 0.5), Error);
}

TEST_CASE("slices") {
    Mesh m = generate_slice(pi / 3, 0.2, 0.02);
    CHECK(validate(m).empty());
    double exact = 0.5 * (pi / 3) * 0.04;
    CHECK(quality(m).area == doctest::Approx(exact).epsilon(5e-3));
    CHECK(domain_area(slice_domain(pi / 3, 0.2)) == doctest::Approx(exact).epsilon(1e-13));
}

TEST_CASE("re-snapped arc nodes stay in the closed disk") {
    Mesh m = refine(generate(SectorSpec{pi, 7 * pi / 12}, 0.1));
    Sector s({pi, 7 * pi / 12});
    double worst = 0.0;
    for (Vec2 v : m.vertices()) worst = std::max(worst, dist(v, s.center()) - 1.0);
    CHECK(worst <= 1e-12);
}
