#include <doctest.h>

#include <cmath>
#include <memory>

#include "../support/oracles.hpp"
#include "sectorsym/error.hpp"
#include "sectorsym/fem.hpp"
#include "sectorsym/sobolev_mp.hpp"

using namespace sectorsym;
using oracle::pi;

TEST_CASE("J0 against the standard library") {
    CHECK(bessel_j0(0.0) == 1.0);
    double worst = 0.0;
    for (int i = 0; i <= 4000; ++i) {
        double x = 0.01 * i;
        worst = std::max(worst, std::abs(bessel_j0(x) - std::cyl_bessel_j(0.0, x)));
        worst = std::max(worst, std::abs(bessel_j0(-x) - std::cyl_bessel_j(0.0, x)));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("first zero of J0") {
    const double j0 = bessel_j0_first_zero();
    CHECK(std::abs(j0 - 2.4048255577) <= 1e-9);
    CHECK(std::abs(bessel_j0(j0)) <= 1e-11);
    CHECK(std::abs(std::cyl_bessel_j(0.0, j0)) <= 1e-11);
}

TEST_CASE("narrow band barrier") {
    CHECK(narrow_band_threshold(1.0) == doctest::Approx(pi / 2).epsilon(1e-15));
    CHECK(narrow_band_threshold(25.0) == doctest::Approx(pi / 10).epsilon(1e-15));
    BarrierReport r = check_barrier_narrow(25.0, 10000, 4);
    CHECK(r.samples == 10000);
    CHECK(r.max_value < 0.0);
    CHECK(r.max_margin_excess <= 1e-12);
    // near x1 = 0 the barrier vanishes, so the largest value is close to zero
    CHECK(r.max_value > -1e-2);
}

TEST_CASE("vertex sector barrier") {
    const double j0 = bessel_j0_first_zero();
    CHECK(sector_band_threshold(1.0) == doctest::Approx(j0).epsilon(1e-15));
    BarrierReport r = check_barrier_sector(25.0, 10000, 4, pi / 3);
    CHECK(r.max_value < 0.0);
    CHECK(r.max_margin_excess <= 1e-12);
    CHECK(r.fd_max_rel_error <= 1e-6);

    // g depends on the radius only, so its gradient is radial and has no
    // normal component on either flat side
    const double eta = sector_band_threshold(25.0);
    auto g = [&](double x, double y) { return bessel_j0(j0 * std::hypot(x, y) / eta); };
    const double d = 1e-6;
    for (double rho : {0.1, 0.3}) {
        for (double side : {0.0, pi / 3}) {
            double x = rho * std::cos(side), y = rho * std::sin(side);
            double gx = (g(x + d, y) - g(x - d, y)) / (2 * d), gy = (g(x, y + d) - g(x, y - d)) / (2 * d);
            double nx = -std::sin(side), ny = std::cos(side);
            CHECK(std::abs(gx * nx + gy * ny) < 1e-8);
        }
    }
}

TEST_CASE("small volume threshold scales with the opening") {
    double t1 = small_volume_threshold(25.0, pi / 6, 0.6);
    double t2 = small_volume_threshold(25.0, pi / 3, 0.6);
    CHECK(t2 == doctest::Approx(2.0 * t1).epsilon(1e-14));
    // eta = (2 sqrt(c0) C)^-2
    CHECK(t1 == doctest::Approx(pi / 6 / (4.0 * 25.0 * 0.36)).epsilon(1e-14));
}

TEST_CASE("small volume maximum principle") {
    SmallVolumeOptions o;
    o.c0 = 25.0;
    o.trials = 4;
    const double beta = pi / 3;
    // choose a slice well inside the threshold
    SmallVolumeReport probe = verify_small_volume_mp(beta, 0.05, o);
    CHECK(probe.below_threshold);
    CHECK(probe.nonpositive);
    CHECK(probe.pass);
    CHECK(probe.trial_seeds.size() == 4);
    CHECK(probe.measure == doctest::Approx(0.5 * beta * 0.05 * 0.05).epsilon(1e-12));

    // c = 0 keeps the sign on any slice
    SmallVolumeOptions z = o;
    z.fixed_c = 0.0;
    SmallVolumeReport big = verify_small_volume_mp(beta, 2.0, z);
    CHECK(big.nonpositive);
    CHECK_FALSE(big.below_threshold);
    CHECK(big.pass);
}

TEST_CASE("coefficient above the slice eigenvalue breaks the sign") {
    const double beta = pi / 3, rho = 1.0;
    auto m = std::make_shared<const Mesh>(generate_slice(beta, rho, 0.1 * rho));
    const double lam1 = principal_eigenvalue(m).lambda1;
    // radial mode: j0^2 / rho^2
    const double j0 = bessel_j0_first_zero();
    CHECK(lam1 == doctest::Approx(j0 * j0).epsilon(0.03));
    SmallVolumeOptions o;
    o.c0 = 25.0;
    o.fixed_c = lam1 * 1.05;
    SmallVolumeReport r = verify_small_volume_mp(beta, rho, o);
    CHECK_FALSE(r.nonpositive);
    CHECK(r.max_nodal > 0.0);
    // below the eigenvalue the sign survives
    o.fixed_c = lam1 * 0.9;
    CHECK(verify_small_volume_mp(beta, rho, o).nonpositive);
}

TEST_CASE("failure measure sits at the slice eigenvalue radius") {
    const double c0 = 25.0, beta = pi / 3;
    FailureMeasure f = failure_measure(beta, c0);
    CHECK(f.measure == doctest::Approx(0.5 * beta * f.rho * f.rho).epsilon(1e-12));
    CHECK(f.measure_over_beta == doctest::Approx(f.measure / beta).epsilon(1e-14));
    // the radial mixed eigenvalue j0^2/rho^2 reaches c0 at rho = j0/sqrt(c0)
    CHECK(f.rho == doctest::Approx(bessel_j0_first_zero() / 5.0).epsilon(0.03));
}

TEST_CASE("test functions: values and gradients") {
    TestFunction v{{0.5, 0.2}, 0.3, 2.0, 1.0, false};
    CHECK(v.value({0.5, 0.2}) == 1.0);
    CHECK(v.value({0.9, 0.2}) == 0.0);
    const double d = 1e-6;
    Vec2 x{0.6, 0.25};
    Vec2 g = v.grad(x);
    CHECK(g.x == doctest::Approx((v.value({x.x + d, x.y}) - v.value({x.x - d, x.y})) / (2 * d)).epsilon(1e-6));
    CHECK(g.y == doctest::Approx((v.value({x.x, x.y + d}) - v.value({x.x, x.y - d})) / (2 * d)).epsilon(1e-6));

    TestFunction r = reflect_double(v, 1.0);
    CHECK(r.sector == 2.0);
    // even across the ray at angle 1
    Vec2 y = rotate(Vec2{0.7, 0.0}, 0.8), ym = rotate(Vec2{0.7, 0.0}, 1.2);
    CHECK(r.value(y) == doctest::Approx(r.value(ym)).epsilon(1e-14));
    CHECK(r.value(y) == doctest::Approx(v.value(y)).epsilon(1e-15));
    CHECK_THROWS_AS(reflect_double(r, 2.0), Error);
    CHECK_THROWS_AS(reflect_double(v, 0.5), Error);
}

TEST_CASE("reflection doubles the norms") {
    for (double beta : {pi / 8, pi / 4, pi / 2}) {
        for (const TestFunction& v : test_family(beta)) {
            SobolevNorms a = sobolev_norms(v, 1.0, 2, 128, 64);
            SobolevNorms b = sobolev_norms(reflect_double(v, beta), 1.0, 2, 128, 128);
            // q = 2, p = 1
            CHECK(b.norm_q == doctest::Approx(std::sqrt(2.0) * a.norm_q).epsilon(1e-10));
            CHECK(b.grad_norm_p == doctest::Approx(2.0 * a.grad_norm_p).epsilon(1e-10));
        }
    }
}

TEST_CASE("ratio is dilation invariant for p = 1, n = 2") {
    TestFunction v{{0.0, 0.0}, 1.0, 3.0, pi / 4, false};
    double r1 = sobolev_ratio(v, 1.0, 2, 512, 128);
    double r2 = sobolev_ratio(v.dilated(2.0), 1.0, 2, 512, 128);
    CHECK(r2 == doctest::Approx(r1).epsilon(1e-6));
}

TEST_CASE("an interior bump does not see the opening") {
    // centred at distance 0.8 on the bisector with radius 0.4: inside both sectors
    // and inside the truncation disk
    auto bump = [](double beta) {
        return TestFunction{rotate(Vec2{0.8, 0.0}, beta / 2), 0.4, 2.0, beta, false};
    };
    double r1 = sobolev_ratio(bump(pi / 2), 1.0, 2, 1024, 1024);
    double r2 = sobolev_ratio(bump(pi), 1.0, 2, 1024, 2048);
    CHECK(r1 == doctest::Approx(r2).epsilon(1e-3));
    // exact L2 norm of (1 - s^2)^2 on a disk of radius R: pi R^2 / 5
    SobolevNorms n = sobolev_norms(bump(pi / 2), 1.0, 2, 2048, 2048);
    CHECK(n.norm_q == doctest::Approx(std::sqrt(pi * 0.16 / 5.0)).epsilon(2e-3));
}

TEST_CASE("zero gradient is rejected") {
    TestFunction v{{100.0, 0.0}, 0.1, 2.0, pi / 4, false};
    try {
        sobolev_ratio(v, 1.0, 2, 32, 32);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::degenerate);
    }
    CHECK_THROWS_AS(sobolev_ratio(TestFunction{}, 2.0), Error);
}

TEST_CASE("family lower bound ordering on a coarse grid") {
    for (double beta : {pi / 8, pi / 4}) {
        double L1 = sobolev_lower_bound(beta, 128, 64).L;
        double L2 = sobolev_lower_bound(2 * beta, 128, 128).L;
        CHECK(L2 <= L1 * (1 + 1e-3));
    }
}
