#include <doctest.h>

#include <cmath>
#include <memory>
#include <sstream>

#include "../support/oracles.hpp"
#include "sectorsym/audit.hpp"
#include "sectorsym/error.hpp"

using namespace sectorsym;
using oracle::pi;

namespace {

const SectorSpec kRadial{2 * pi / 3, 2 * pi / 3};
const SectorSpec kSub{2 * pi / 3, 5 * pi / 12};

double radial_of(Vec2 x) { return oracle::radial({x.x, x.y}); }

/// Nodal interpolant of the exact radial solution.
const ScalarField& radial_field() {
    static ScalarField u = interpolate(std::make_shared<const Mesh>(generate(kRadial, 0.02)), radial_of);
    return u;
}

const ScalarField& radial_symmetric() {
    static ScalarField u = interpolate(std::make_shared<const Mesh>(generate(kRadial, 0.02, true)), radial_of);
    return u;
}

const ScalarField& sub_field() {
    static ScalarField u =
        solve_semilinear(std::make_shared<const Mesh>(generate(kSub, 0.03)), NonlinearitySpec::constant(1.0)).field;
    return u;
}

const AuditConfig& sub_cfg() {
    static AuditConfig c = [] {
        AuditConfig c = default_audit_config(sub_field());
        c.f = NonlinearitySpec::constant(1.0);
        return c;
    }();
    return c;
}

AuditConfig fixed(double tol, double h) {
    AuditConfig c;
    c.h = h;
    c.fixed_tolerance = tol;
    return c;
}

}  // namespace

TEST_CASE("tolerance is 1e-8 + kappa h^2 unless fixed") {
    AuditConfig c;
    c.h = 0.02;
    c.kappa = 8.0;
    CHECK(c.tolerance() == doctest::Approx(1e-8 + 8.0 * 4e-4).epsilon(1e-15));
    c.fixed_tolerance = 0.5;
    CHECK(c.tolerance() == 0.5);
}

TEST_CASE("kappa calibration measures the radial error") {
    KappaCalibration k = calibrate_kappa(pi / 2, 0.05);
    CHECK(k.h == 0.05);
    CHECK(k.kappa > 0.0);
    CHECK(k.kappa == doctest::Approx(std::max(k.value_error, k.gradient_error) / (0.05 * 0.05)).epsilon(1e-12));
    CHECK(k.kappa < 100.0);
}

TEST_CASE("difference_w: line points, radial closed form, axis symmetry") {
    const ScalarField& u = radial_field();
    Sector s = field_sector(u);
    const double lam = 0.4, th = 1.3;
    MovingLine L = moving_line(s, lam, th);
    Vec2 on = L.pivot + L.direction * 0.2;
    CHECK(std::abs(difference_w(u, lam, th, on)) < 1e-14);

    double worst = 0.0;
    for (Vec2 x : {Vec2{0.5, -0.2}, Vec2{0.7, -0.05}, Vec2{0.3, -0.1}}) {
        Vec2 y = L.reflect(x);
        double want = (norm2(y) - norm2(x)) / 4.0;
        worst = std::max(worst, std::abs(difference_w(u, lam, th, x) - want));
    }
    CHECK(worst < 1e-3);  // interpolation error, O(h^2)

    // lambda = 0, theta = beta/2 is the x1 axis
    const ScalarField& v = radial_symmetric();
    Sector sv = field_sector(v);
    double axis = 0.0;
    for (Vec2 x : {Vec2{0.4, 0.3}, Vec2{0.2, -0.05}, Vec2{0.8, 0.1}})
        axis = std::max(axis, std::abs(difference_w(v, 0.0, 0.5 * sv.beta(), x)));
    CHECK(axis < 1e-15);
    CHECK_THROWS_AS(difference_w(u, lam, th, {-1.0, 0.0}), Error);
}

TEST_CASE("check_w_negative on the radial field") {
    const ScalarField& u = radial_field();
    Sector s = field_sector(u);
    AuditConfig c = fixed(1e-8, 0.02);
    for (double lam : {0.2, 0.5, 0.8}) {
        AuditRow r = check_w_negative(u, lam, pi / 2, std::nullopt, c);
        CHECK(r.pass);
        CHECK(r.n_points > 0);
        CHECK(r.max_violation < 0.0);
    }
    AuditRow e = check_w_negative(u, 1.01 * s.constants().lambda_max, 1.0, std::nullopt, c);
    CHECK(e.vacuous);
    CHECK(e.pass);
    CHECK(e.n_points == 0);
}

TEST_CASE("check_w_negative on the sub-spherical const(1) field") {
    const ScalarField& u = sub_field();
    Sector s = field_sector(u);
    const double ls = s.constants().lambda_sharp;
    AuditRow r = check_w_negative(u, ls, s.beta(), std::nullopt, sub_cfg());
    CHECK(r.pass);
    CHECK(r.n_points > 0);
    CHECK(r.note.find("c_max=") != std::string::npos);
}

TEST_CASE("directional sign: radial closed form") {
    const ScalarField& u = radial_field();
    AuditConfig c = fixed(1e-8, 0.02);
    for (double lam : {0.3, 0.6}) {
        for (double th : {0.8, 1.6}) {
            AuditRow r = directional_sign(u, lam, th, LineSide::lower, c);
            // along the line the expression is -lambda sin(theta)/2 exactly
            CHECK(r.n_points > 0);
            CHECK(r.max_violation == doctest::Approx(-lam * std::sin(th) / 2).epsilon(0.05));
            AuditRow q = directional_sign(u, lam, th, LineSide::upper, c);
            CHECK(q.max_violation == doctest::Approx(-lam * std::sin(th) / 2).epsilon(0.05));
            AuditRow p = directional_sign(u, lam, th, LineSide::lower, c, true);
            CHECK(p.n_points == r.n_points + 1);
            CHECK(p.check_id == "directional_lower_endpoint");
        }
    }
    // theta = beta/2: the normal is (0, -1), so the audited quantity is -u_x2
    Sector s = field_sector(u);
    AuditRow h = directional_sign(u, 0.3, 0.5 * s.beta(), LineSide::lower, c);
    CHECK(h.max_violation == doctest::Approx(-0.3 * std::sin(0.5 * s.beta()) / 2).epsilon(0.05));
    CHECK_THROWS_AS(directional_sign(u, 10.0, 1.0, LineSide::lower, c), Error);
}

TEST_CASE("least-squares gradient is exact on quadratics") {
    const ScalarField& u = radial_field();
    Sector s = field_sector(u);
    for (double lam : {0.2, 0.5, 0.8}) {
        Vec2 p = s.pivot(lam);
        Vec2 g = lsq_gradient(u, p);
        CHECK(g.x == doctest::Approx(-p.x / 2).epsilon(1e-9));
        CHECK(g.y == doctest::Approx(-p.y / 2).epsilon(1e-9));
    }
}

TEST_CASE("neumann tangential") {
    const ScalarField& u = radial_field();
    AuditConfig c = fixed(1e-8, 0.02);
    for (double lam : {0.25, 0.5, 0.75}) {
        AuditRow r = neumann_tangential(u, lam, LineSide::lower, c);
        CHECK(r.max_violation == doctest::Approx(-lam / 2).epsilon(1e-9));
        CHECK(r.pass);
    }
    const ScalarField& v = radial_symmetric();
    AuditRow lo = neumann_tangential(v, 0.5, LineSide::lower, c);
    AuditRow hi = neumann_tangential(v, 0.5, LineSide::upper, c);
    CHECK(lo.max_violation == doctest::Approx(hi.max_violation).epsilon(1e-10));
    CHECK_THROWS_AS(neumann_tangential(u, 1.5, LineSide::lower, c), Error);
    CHECK_THROWS_AS(neumann_tangential(u, 0.0, LineSide::lower, c), Error);

    const ScalarField& w = sub_field();
    Sector s = field_sector(w);
    AuditRow q = neumann_tangential(w, 0.5 * s.l_N(), LineSide::lower, sub_cfg());
    CHECK(q.max_violation < 0.0);
}

TEST_CASE("rotation function") {
    const ScalarField& u = radial_field();
    Sector s = field_sector(u);
    const double lam = 0.5, b = s.beta();
    Vec2 P = s.pivot(lam);
    CHECK(std::abs(rotation_v(u, P, P)) < 1e-14);
    double worst = 0.0;
    for (Vec2 x : {Vec2{0.4, 0.1}, Vec2{0.6, -0.2}, Vec2{0.2, 0.05}}) {
        double want = lam / 2 * (std::cos(b / 2) * x.y + std::sin(b / 2) * x.x);
        worst = std::max(worst, std::abs(rotation_v(u, P, x) - want));
        // positive above the lower ray's line
        CHECK(rotation_v(u, P, x) > 0.0);
    }
    CHECK(worst < 0.02);
}

TEST_CASE("hw exponent") {
    const ScalarField& u = radial_field();
    Sector s = field_sector(u);
    const double lam = 0.5 * s.l_N();
    HwFit f = hw_exponent(u, lam, hw_default_radii(u, lam));
    CHECK(f.exponent == doctest::Approx(1.0).epsilon(0.05));
    CHECK(f.radii.size() == f.max_abs_v.size());

    ScalarField z = interpolate(u.mesh, [](Vec2) { return 0.0; });
    try {
        hw_exponent(z, lam, hw_default_radii(z, lam));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::degenerate);
    }
    CHECK_THROWS_AS(hw_exponent(u, lam, {0.1, 0.2}), Error);
    CHECK_THROWS_AS(hw_exponent(u, lam, {0.01, 0.1, 0.2}), Error);
}

TEST_CASE("symmetry and monotonicity rows") {
    AuditConfig c = fixed(1e-8, 0.02);
    const ScalarField& v = radial_symmetric();
    CHECK(symmetry_defect(v).max_defect <= 1e-10);
    CHECK(symmetry_defect(v).n_points > 0);
    CHECK(symmetry_row(v, c).pass);
    CHECK(monotonicity_x1(v, c).pass);
    CHECK(monotonicity_x2_half(v, c).pass);
    CHECK(monotonicity_x1(v, c).max_violation < 0.0);

    const ScalarField& u = radial_field();
    // the exact field is even, so the defect on an unsymmetric mesh is interpolation error only
    CHECK(symmetry_defect(u).max_defect < 1e-4);

    // solved on a symmetric mesh
    auto m = std::make_shared<const Mesh>(generate(kSub, 0.05, true));
    ScalarField w = solve_semilinear(m, NonlinearitySpec::constant(1.0)).field;
    CHECK(symmetry_defect(w).max_defect <= 1e-10);
}

TEST_CASE("even extension") {
    const ScalarField& u = sub_field();
    Sector s = field_sector(u);
    EvenExtension E = even_extension(u);
    double jump = 0.0;
    for (int i = 1; i < 20; ++i) {
        Vec2 on = s.lower_dir() * (s.l_N() * i / 20.0);
        Vec2 n = perp(s.lower_dir()) * 1e-13;
        jump = std::max(jump, std::abs(E.value(on + n) - E.value(on - n)));
    }
    CHECK(jump <= 1e-12);
    CHECK_THROWS_AS(E.value({-2.0, 0.0}), Error);

    // the radial formula is invariant under the reflection, so the extension matches it
    const ScalarField& r = radial_field();
    Sector sr = field_sector(r);
    EvenExtension Er(r);
    double worst = 0.0;
    for (Vec2 x : {Vec2{0.3, 0.1}, Vec2{0.5, -0.2}}) {
        Vec2 y = reflect_across_lower_neumann(sr, x);
        CHECK_FALSE(sr.contains(y));
        worst = std::max(worst, std::abs(Er.value(y) - radial_of(y)));
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("double-domain negativity") {
    const ScalarField& u = sub_field();
    Sector s = field_sector(u);
    const double lam = 0.8 * s.constants().l_perp;
    AuditRow r = check_double_negative(u, lam, theta_B(s, lam), sub_cfg());
    CHECK(r.pass);
    CHECK(r.n_points > 0);
    CHECK(r.note.find("h1=") != std::string::npos);
    CHECK_THROWS_AS(check_double_negative(u, lam, 0.5 * theta_B(s, lam), sub_cfg()), Error);
}

TEST_CASE("sub-cap directional sign preconditions") {
    const ScalarField& u = sub_field();
    Sector s = field_sector(u);
    const double lc = s.constants().lambda_C;
    const double Lam = 0.3 * lc, lam = 0.6 * lc;
    const double th = 0.5 * (theta_A(s, lam) + theta_B(s, lam));
    AuditRow r = subcap_directional_sign(u, Lam, lam, th, sub_cfg());
    CHECK(r.check_id == "subcap_directional");
    CHECK(r.note.find("Lambda=") != std::string::npos);
    CHECK_THROWS_AS(subcap_directional_sign(u, lam, Lam, th, sub_cfg()), Error);
    CHECK_THROWS_AS(subcap_directional_sign(u, Lam, lam, theta_A(s, lam), sub_cfg()), Error);
    CHECK_THROWS_AS(subcap_directional_sign(radial_field(), 0.1, 0.2, 1.0, fixed(1e-8, 0.02)), Error);
}

TEST_CASE("chain comparison") {
    const ScalarField& u = sub_field();
    Sector s = field_sector(u);
    const double ls = s.constants().lambda_sharp;
    AuditRow r = chain_comparison(u, 0.5 * ls, sub_cfg());
    CHECK(r.pass);
    CHECK(r.n_points > 0);
    CHECK_THROWS_AS(chain_comparison(u, 1.1 * ls, sub_cfg()), Error);
}

TEST_CASE("sweep angles stay in J_lambda and are sorted") {
    Sector s(kSub);
    for (double lam : {0.1, 0.5, 1.0}) {
        AdmissibleSet J = critical_angles(s, lam);
        std::vector<double> t = sweep_angles(s, lam, 3);
        CHECK_FALSE(t.empty());
        for (std::size_t i = 0; i < t.size(); ++i) {
            CHECK(J.contains(t[i]));
            if (i) CHECK(t[i] > t[i - 1]);
        }
    }
    std::vector<double> e = sweep_angles(s, 0.5, 3, {0.5, 0.0, 100.0});
    CHECK(e.size() == 1);
}

TEST_CASE("audit sweep") {
    AuditConfig c = fixed(1e-8, 0.02);
    AuditReport empty = audit_sweep(radial_field(), {}, SweepPolicy{}, c);
    CHECK(empty.rows.empty());
    CHECK(empty.all_pass());

    AuditConfig rc = default_audit_config(radial_field());
    Sector s = field_sector(radial_field());
    std::vector<double> lams;
    for (double f : {0.1, 0.3, 0.5, 0.7, 0.9}) lams.push_back(f * s.constants().lambda_max);
    AuditReport all = audit_sweep(radial_field(), lams, SweepPolicy{}, rc);
    CHECK(all.rows.size() > 20);
    CHECK(all.all_pass());
    CHECK(all.rows[0].check_id == "symmetry_defect");

    // thread count does not change the rows
    SweepPolicy p;
    p.threads = 4;
    AuditReport par = audit_sweep(radial_field(), lams, p, rc);
    CHECK(par.to_csv() == all.to_csv());

    std::istringstream is(all.to_csv());
    std::string line;
    int comments = 0;
    while (std::getline(is, line) && line[0] == '#') ++comments;
    CHECK(comments == 5);
    CHECK(line == "check_id,alpha,beta,lambda,theta,theta1,n_points,max_violation,tolerance,pass,note");
}

TEST_CASE("audit sweep on the right-angle sub-spherical sector") {
    auto m = std::make_shared<const Mesh>(generate(SectorSpec{3 * pi / 4, pi / 2}, 0.04));
    ScalarField u = solve_semilinear(m, NonlinearitySpec::constant(1.0)).field;
    AuditConfig c = default_audit_config(u);
    Sector s = field_sector(u);
    std::vector<double> lams;
    for (double f : {0.1, 0.25, 0.5, 0.75, 0.9}) lams.push_back(f * s.constants().lambda_max);
    AuditReport r = audit_sweep(u, lams, SweepPolicy{}, c);
    int bad = 0;
    for (const auto& row : r.rows) {
        if (row.check_id != "w_negative" && row.check_id.rfind("directional", 0) != 0) continue;
        if (row.theta > theta_B(s, row.lambda) + 1e-12) continue;
        bad += !row.pass;
    }
    CHECK(bad == 0);
    CHECK(r.all_pass());
}

TEST_CASE("all_pass treats expected failures") {
    AuditReport r;
    AuditRow ok;
    ok.pass = true;
    AuditRow xf;
    xf.pass = false;
    xf.expected_fail = true;
    r.rows = {ok, xf};
    CHECK(r.all_pass());
    r.rows[1].pass = true;
    CHECK_FALSE(r.all_pass());
    r.rows = {ok, ok};
    r.rows[0].pass = false;
    CHECK_FALSE(r.all_pass());
}
