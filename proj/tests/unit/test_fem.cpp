#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "../support/l2.hpp"
#include "../support/oracles.hpp"
#include "sectorsym/error.hpp"
#include "sectorsym/fem.hpp"

using namespace sectorsym;
using oracle::pi;

namespace {

MeshPtr make(SectorSpec sp, double h, bool symmetric = false) {
    return std::make_shared<const Mesh>(generate(sp, h, symmetric));
}

double radial_of(Vec2 x) { return oracle::radial({x.x, x.y}); }

double l2_error(const ScalarField& u) { return oracle::l2_distance(u, radial_of); }

}  // namespace

TEST_CASE("nonlinearity specs") {
    auto c = NonlinearitySpec::parse("const:1");
    CHECK(c.f(3.0) == 1.0);
    CHECK(c.df(3.0) == 0.0);
    auto l = NonlinearitySpec::parse("linear:2");
    CHECK(l.f(0.5) == doctest::Approx(1.0));
    CHECK(l.df(0.5) == doctest::Approx(2.0));
    auto p = NonlinearitySpec::parse("power:1,2");
    CHECK(p.f(0.3) == doctest::Approx(0.09));
    CHECK(p.df(0.3) == doctest::Approx(0.6));
    CHECK(p.f(-0.3) == 0.0);
    auto t = NonlinearitySpec::parse("table:0,0;1,2;2,3");
    CHECK(t.f(0.5) == doctest::Approx(1.0));
    CHECK(t.f(1.5) == doctest::Approx(2.5));
    CHECK(t.f(5.0) == doctest::Approx(3.0));
    CHECK(t.df(0.5) == doctest::Approx(2.0));
    for (const auto& s : {c, l, p, t}) CHECK(NonlinearitySpec::parse(s.to_string()) == s);
    CHECK_THROWS_AS(NonlinearitySpec::parse("cubic:1"), Error);
    CHECK_THROWS_AS(NonlinearitySpec::parse("power:1"), Error);
    CHECK_THROWS_AS(NonlinearitySpec::parse("nonsense"), Error);
}

TEST_CASE("const(0) gives the zero field") {
    auto m = make({2 * pi / 3, 5 * pi / 12}, 0.08);
    SolveResult r = solve_semilinear(m, NonlinearitySpec::constant(0.0));
    for (double v : r.field.values) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("const(1) on the spherical sector converges at second order") {
    SectorSpec sp{1.0, 1.0};
    double e_prev = 0.0, rate = 0.0;
    auto m = make(sp, 0.08);
    for (double h : {0.08, 0.04}) {
        if (h < 0.08) m = std::make_shared<const Mesh>(refine(*m));
        SolveResult r = solve_semilinear(m, NonlinearitySpec::constant(1.0));
        CHECK(r.report.residual <= 1e-10);
        CHECK(r.report.positive);
        double e = l2_error(r.field);
        CHECK(e <= 0.2 * h * h);
        if (e_prev > 0) rate = std::log2(e_prev / e);
        e_prev = e;
    }
    CHECK(rate >= 1.8);
}

TEST_CASE("Dirichlet nodes carry zero; vertex evaluation is exact") {
    auto m = make({2 * pi / 3, 5 * pi / 12}, 0.08);
    SolveResult r = solve_semilinear(m, NonlinearitySpec::constant(1.0));
    const auto& mask = m->dirichlet_mask();
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) CHECK(r.field.values[i] == 0.0);
        if (mask[i]) CHECK(evaluate(r.field, m->vertices()[i]) == 0.0);
    }
    for (int i : {3, 40, 100}) CHECK(evaluate(r.field, m->vertices()[i]) == doctest::Approx(r.field.values[i]).epsilon(1e-14));
    CHECK(r.report.min_interior > 0.0);
}

TEST_CASE("gradient of the radial solution") {
    auto m = make({1.0, 1.0}, 0.02);
    SolveResult r = solve_semilinear(m, NonlinearitySpec::constant(1.0));
    Sector s({1.0, 1.0});
    double worst = 0.0;
    for (std::size_t t = 0; t < m->triangles().size(); t += 7) {
        Vec2 x = m->barycenter(static_cast<int>(t));
        if (s.depth(x) < 0.04) continue;
        Vec2 g = gradient(r.field, x);
        oracle::P want = oracle::radial_grad({x.x, x.y});
        worst = std::max(worst, std::hypot(g.x - want.x, g.y - want.y));
    }
    CHECK(worst < 0.02);
    CHECK_THROWS_AS(gradient(r.field, {-1.0, 0.0}), Error);
    CHECK_FALSE(try_evaluate(r.field, {5.0, 0.0}).has_value());
}

TEST_CASE("power(1,2) reaches a positive solution with a quadratic tail") {
    auto m = make({2 * pi / 3, 5 * pi / 12}, 0.05);
    auto f = NonlinearitySpec::power(1.0, 2.0);
    SolveOptions o;
    o.initial_guess = scaled_guess(m, f);
    SolveResult r = solve_semilinear(m, f, o);
    CHECK(r.report.residual <= 1e-10);
    CHECK(r.report.positive);
    CHECK(r.report.min_interior > 0.0);
    CHECK(semilinear_residual(*m, f, r.field.values) == doctest::Approx(r.report.residual).epsilon(1e-6).scale(1e-12));
    const auto& h = r.report.residual_history;
    REQUIRE(h.size() >= 2);
    bool tail = false;
    for (std::size_t k = 0; k + 1 < h.size(); ++k) {
        if (h[k] <= 1e-4 && h[k] > 1e-13) {
            CHECK(h[k + 1] <= 100.0 * h[k] * h[k] + 1e-13);
            tail = true;
        }
    }
    CHECK(tail);
}

TEST_CASE("symmetric mesh gives a mirror-invariant solution") {
    auto m = make({2 * pi / 3, 5 * pi / 12}, 0.05, true);
    SolveResult r = solve_semilinear(m, NonlinearitySpec::constant(1.0));
    auto perm = mirror_map(*m);
    REQUIRE(perm.has_value());
    double worst = 0.0;
    for (std::size_t i = 0; i < perm->size(); ++i) worst = std::max(worst, std::abs(r.field.values[i] - r.field.values[(*perm)[i]]));
    CHECK(worst <= 1e-12);
}

TEST_CASE("linear solves") {
    auto m = make({1.0, 1.0}, 0.04);
    LinearProblem p;
    p.source = Coefficient(-1.0);
    ScalarField u = solve_linear(m, p);
    SolveResult r = solve_semilinear(m, NonlinearitySpec::constant(1.0));
    double worst = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) worst = std::max(worst, std::abs(u.values[i] - r.field.values[i]));
    CHECK(worst < 1e-12);
    CHECK(l2_error(u) < 0.2 * 0.04 * 0.04);

    ScalarField z = solve_linear(m, LinearProblem{});
    for (double v : z.values) CHECK(v == 0.0);

    // nonzero Dirichlet data and inhomogeneous Neumann data on the unit-radius sector:
    // u = x1 has u = x1 on the arc and outward derivative n.x-hat on the rays
    LinearProblem q;
    q.dirichlet = Coefficient::function([](Vec2 x) { return x.x; });
    Sector s({1.0, 1.0});
    Vec2 nl = perp(s.lower_dir()) * -1.0, nu = perp(s.upper_dir());
    q.neumann = Coefficient::function([&](Vec2 x) { return x.y < 0 ? nl.x : nu.x; });
    ScalarField lin = solve_linear(m, q);
    double err = 0.0;
    for (std::size_t i = 0; i < lin.values.size(); ++i) err = std::max(err, std::abs(lin.values[i] - m->vertices()[i].x));
    CHECK(err < 1e-10);
}

TEST_CASE("bounded reaction with nonpositive data keeps the sign on a thin slice") {
    const double c0 = 25.0;
    auto m = std::make_shared<const Mesh>(generate_slice(pi / 6, 0.1, 0.01));
    LinearProblem p;
    p.c = Coefficient(c0 / 2);
    p.dirichlet = Coefficient(-1.0);
    p.source = Coefficient(0.5);
    ScalarField u = solve_linear(m, p);
    CHECK(*std::max_element(u.values.begin(), u.values.end()) <= 1e-10);
}

TEST_CASE("principal eigenvalue on the spherical sector") {
    auto m = make({1.0, 1.0}, 0.05);
    EigenResult e = principal_eigenvalue(m);
    const double j0 = 2.404825557695773;
    CHECK(e.lambda1 == doctest::Approx(j0 * j0).epsilon(0.01));
    double mn = *std::min_element(e.eigenfield.values.begin(), e.eigenfield.values.end());
    double mx = *std::max_element(e.eigenfield.values.begin(), e.eigenfield.values.end());
    CHECK(mn >= -1e-10);
    CHECK(mx == doctest::Approx(1.0).epsilon(1e-12));
    // the mode is radial: J0(j0 r) up to discretisation
    double worst = 0.0;
    for (std::size_t i = 0; i < e.eigenfield.values.size(); i += 5) {
        double r = norm(m->vertices()[i]);
        worst = std::max(worst, std::abs(e.eigenfield.values[i] - std::cyl_bessel_j(0.0, j0 * r)));
    }
    CHECK(worst < 0.01);
}

TEST_CASE("interpolate reproduces linear functions") {
    auto m = make({2 * pi / 3, 5 * pi / 12}, 0.08);
    ScalarField u = interpolate(m, [](Vec2 x) { return 2.0 * x.x - 3.0 * x.y + 1.0; });
    Vec2 x{0.4, 0.05};
    CHECK(evaluate(u, x) == doctest::Approx(2.0 * 0.4 - 0.15 + 1.0).epsilon(1e-13));
    Vec2 g = gradient(u, x);
    CHECK(g.x == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(g.y == doctest::Approx(-3.0).epsilon(1e-12));
}
