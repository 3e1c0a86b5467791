#include "sectorsym/sobolev_mp.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include "sectorsym/error.hpp"
#include "sectorsym/fem.hpp"
#include "sectorsym/mesh.hpp"
#include "sectorsym/roots.hpp"

namespace sectorsym {

namespace {

long double j0_series(long double x) {
    const long double q = x * x / 4.0L;
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k < 200; ++k) {
        term *= -q / (static_cast<long double>(k) * k);
        sum += term;
        if (std::fabs(term) < 1e-30L && k > x) break;
    }
    return sum;
}

// Hankel asymptotic expansion, summed until the terms stop decreasing.
double j0_asymptotic(double x) {
    long double P = 0.0L, Q = 0.0L, a = 1.0L, prev = INFINITY;
    for (int k = 0; k < 200; ++k) {
        if (k > 0) {
            long double odd = 2.0L * k - 1.0L;
            a *= -odd * odd / (8.0L * k);
        }
        long double term = a / std::pow(static_cast<long double>(x), k);
        if (std::fabs(term) > prev) break;
        prev = std::fabs(term);
        // P collects even orders with sign (-1)^(k/2), Q the odd ones with (-1)^((k-1)/2)
        if (k % 2 == 0)
            P += ((k / 2) % 2 ? -term : term);
        else
            Q += (((k - 1) / 2) % 2 ? -term : term);
        if (prev < 1e-20L) break;
    }
    const long double chi = x - 0.25L * 3.14159265358979323846264338327950288L;
    return static_cast<double>(std::sqrt(2.0L / (3.14159265358979323846264338327950288L * x)) *
                               (P * std::cos(chi) - Q * std::sin(chi)));
}

}  // namespace

double bessel_j0(double x) {
    x = std::abs(x);
    if (x <= 20.0) return static_cast<double>(j0_series(x));
    return j0_asymptotic(x);
}

double bessel_j0_first_zero() {
    auto r = bisect([](double x) { return bessel_j0(x); }, 2.0, 3.0, 1e-15, 200);
    if (!r) throw Error(ErrorCode::root_bracket, "J0 has no sign change on [2, 3]");
    return *r;
}

// ---------------------------------------------------------------- barriers

double narrow_band_threshold(double c0) {
    if (!(c0 > 0.0)) throw Error(ErrorCode::invalid_argument, "c0 must be positive");
    return kPi / (2.0 * std::sqrt(c0));
}

BarrierReport check_barrier_narrow(double c0, int samples, std::uint64_t seed) {
    const double eta = narrow_band_threshold(c0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    BarrierReport r;
    r.max_value = -INFINITY;
    r.max_margin_excess = -INFINITY;
    for (int i = 0; i < samples; ++i) {
        double x1 = 0.0;
        while (!(x1 > 0.0 && x1 < eta)) x1 = eta * (1.0 - U(rng));
        double c = c0 * (2.0 * U(rng) - 1.0);
        double g = std::sin(kPi * x1 / (2.0 * eta));
        double lap = -c0 * g;  // (π / 2η)^2 = c0
        double v = lap + c * g;
        r.max_value = std::max(r.max_value, v);
        r.max_margin_excess = std::max(r.max_margin_excess, v + (c0 - std::abs(c)) * g);
    }
    r.samples = samples;
    return r;
}

double sector_band_threshold(double c0) {
    if (!(c0 > 0.0)) throw Error(ErrorCode::invalid_argument, "c0 must be positive");
    return bessel_j0_first_zero() / std::sqrt(c0);
}

BarrierReport check_barrier_sector(double c0, int samples, std::uint64_t seed, double beta) {
    const double eta = sector_band_threshold(c0);
    const long double k = static_cast<long double>(bessel_j0_first_zero()) / eta;
    auto g = [k](long double x, long double y) { return j0_series(k * std::sqrt(x * x + y * y)); };
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    BarrierReport r;
    r.max_value = -INFINITY;
    r.max_margin_excess = -INFINITY;
    const long double hs = 1e-5L;
    for (int i = 0; i < samples; ++i) {
        double rho = 0.0;
        // area-uniform radius in (0, eta)
        while (!(rho > 0.0 && rho < eta)) rho = eta * std::sqrt(1.0 - U(rng));
        double th = beta * U(rng);
        double c = c0 * (2.0 * U(rng) - 1.0);
        long double x = rho * std::cos(th), y = rho * std::sin(th);
        long double gv = g(x, y);
        double lap = static_cast<double>(-k * k * gv);
        double v = lap + c * static_cast<double>(gv);
        r.max_value = std::max(r.max_value, v);
        r.max_margin_excess = std::max(r.max_margin_excess, v + (c0 - std::abs(c)) * static_cast<double>(gv));
        long double fd = (g(x + hs, y) + g(x - hs, y) + g(x, y + hs) + g(x, y - hs) - 4.0L * gv) / (hs * hs);
        r.fd_max_rel_error = std::max(r.fd_max_rel_error, static_cast<double>(std::fabs(fd + c0 * gv) / c0));
    }
    r.samples = samples;
    return r;
}

// ---------------------------------------------------------------- small volume

double small_volume_threshold(double c0, double beta, double C) {
    if (!(c0 > 0.0) || !(beta > 0.0) || !(C > 0.0)) throw Error(ErrorCode::invalid_argument, "c0, beta and C must be positive");
    double eta = 1.0 / (4.0 * c0 * C * C);
    return eta * beta;
}

namespace {

std::uint64_t trial_seed(std::uint64_t seed, int t) {
    // splitmix64 step so neighbouring trials get unrelated streams
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(t + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

SmallVolumeReport verify_small_volume_mp(double beta, double rho, const SmallVolumeOptions& o) {
    if (!(o.c0 > 0.0)) throw Error(ErrorCode::invalid_argument, "c0 must be positive");
    if (o.trials < 1 || o.cells < 1) throw Error(ErrorCode::invalid_argument, "trials and cells must be positive");
    auto mesh = std::make_shared<const Mesh>(generate_slice(beta, rho, o.h_rel * rho));
    SmallVolumeReport rep;
    rep.beta = beta;
    rep.rho = rho;
    rep.measure = domain_area(slice_domain(beta, rho));
    rep.sobolev_constant = o.sobolev_constant ? *o.sobolev_constant : sobolev_lower_bound(beta).L_sqrt_beta;
    rep.threshold = small_volume_threshold(o.c0, beta, rep.sobolev_constant);
    rep.below_threshold = rep.measure < rep.threshold;
    rep.max_nodal = -INFINITY;
    const int trials = o.fixed_c ? 1 : o.trials;
    for (int t = 0; t < trials; ++t) {
        LinearProblem pb;
        pb.reaction = ReactionAssembly::lumped;
        if (o.fixed_c) {
            pb.c = Coefficient(*o.fixed_c);
            pb.dirichlet = Coefficient(-1.0);
        } else {
            std::uint64_t s = trial_seed(o.seed, t);
            rep.trial_seeds.push_back(s);
            std::mt19937_64 rng(s);
            std::uniform_real_distribution<double> U(0.0, 1.0);
            const int nc = o.cells;
            std::vector<double> cval(nc * nc), sval(nc * nc);
            for (int k = 0; k < nc * nc; ++k) {
                cval[k] = o.c0 * (2.0 * U(rng) - 1.0);
                sval[k] = U(rng);
            }
            double amp = U(rng), phase = 2.0 * kPi * U(rng);
            int m = 1 + static_cast<int>(4.0 * U(rng));
            auto cell = [=](Vec2 x) {
                double th = std::atan2(x.y, x.x) + 0.5 * beta;
                int i = std::clamp(static_cast<int>(th / beta * nc), 0, nc - 1);
                int j = std::clamp(static_cast<int>(norm(x) / rho * nc), 0, nc - 1);
                return j * nc + i;
            };
            pb.c = Coefficient::function([=](Vec2 x) { return cval[cell(x)]; });
            pb.source = Coefficient::function([=](Vec2 x) { return sval[cell(x)]; });
            pb.dirichlet = Coefficient::function(
                [=](Vec2 x) { return -0.5 * amp * (1.0 + std::cos(m * std::atan2(x.y, x.x) + phase)); });
        }
        ScalarField w = solve_linear(mesh, pb);
        for (double v : w.values) rep.max_nodal = std::max(rep.max_nodal, v);
    }
    rep.trials = trials;
    rep.nonpositive = rep.max_nodal <= 1e-10;
    rep.pass = !rep.below_threshold || rep.nonpositive;
    return rep;
}

FailureMeasure failure_measure(double beta, double c0, double h_rel, double rel_tol) {
    SmallVolumeOptions o;
    o.c0 = c0;
    o.h_rel = h_rel;
    o.fixed_c = c0;
    o.sobolev_constant = 1.0;  // threshold unused here
    auto fails = [&](double rho) { return verify_small_volume_mp(beta, rho, o).max_nodal > 1e-10; };
    double lo = 0.5 / std::sqrt(c0), hi = 3.5 / std::sqrt(c0);
    if (fails(lo) || !fails(hi)) throw Error(ErrorCode::root_bracket, "failure radius not bracketed");
    while (hi - lo > rel_tol * hi) {
        double mid = 0.5 * (lo + hi);
        (fails(mid) ? hi : lo) = mid;
    }
    FailureMeasure f;
    f.beta = beta;
    f.rho = hi;
    f.measure = domain_area(slice_domain(beta, hi));
    f.measure_over_beta = f.measure / beta;
    return f;
}

// ---------------------------------------------------------------- Sobolev ratio

namespace {

// Angle of x folded back into the un-reflected sector.
double polar_angle(Vec2 x) {
    double t = std::atan2(x.y, x.x);
    return t < 0.0 ? t + 2.0 * kPi : t;
}

}  // namespace

double TestFunction::value(Vec2 x) const {
    if (reflected) {
        double half = 0.5 * sector;
        if (polar_angle(x) > half) x = rotate(mirror_x1(x), 2.0 * half);
    }
    double s = norm2(x - center) / (radius * radius);
    return s < 1.0 ? std::pow(1.0 - s, exponent) : 0.0;
}

Vec2 TestFunction::grad(Vec2 x) const {
    bool flip = reflected && polar_angle(x) > 0.5 * sector;
    if (flip) x = rotate(mirror_x1(x), sector);
    double s = norm2(x - center) / (radius * radius);
    if (s >= 1.0) return {0.0, 0.0};
    Vec2 g = (x - center) * (-2.0 * exponent * std::pow(1.0 - s, exponent - 1.0) / (radius * radius));
    // the reflection across the ray at angle sector/2 is its own inverse
    return flip ? rotate(mirror_x1(g), sector) : g;
}

TestFunction TestFunction::dilated(double s) const {
    TestFunction v = *this;
    v.center = center / s;
    v.radius = radius / s;
    return v;
}

TestFunction reflect_double(const TestFunction& v, double beta) {
    if (v.reflected) throw Error(ErrorCode::invalid_argument, "test function is already a reflection");
    if (std::abs(v.sector - beta) > 1e-15 * beta) throw Error(ErrorCode::invalid_argument, "test function lives on another sector");
    TestFunction r = v;
    r.sector = 2.0 * beta;
    r.reflected = true;
    return r;
}

SobolevNorms sobolev_norms(const TestFunction& v, double p, int n, int n_r, int n_theta) {
    if (n != 2) throw Error(ErrorCode::invalid_argument, "only n = 2 quadrature is supported");
    if (!(p >= 1.0 && p < n)) throw Error(ErrorCode::invalid_argument, "need 1 <= p < n");
    const double q = n * p / (n - p);
    const double R = 4.0 * v.radius;
    const double dr = R / n_r, dt = v.sector / n_theta;
    long double sq = 0.0L, sp = 0.0L;
    for (int j = 0; j < n_theta; ++j) {
        double th = (j + 0.5) * dt;
        Vec2 e = unit(th);
        long double cq = 0.0L, cp = 0.0L;
        for (int i = 0; i < n_r; ++i) {
            double r = (i + 0.5) * dr;
            Vec2 x = e * r;
            double val = v.value(x);
            if (val == 0.0) continue;
            cq += std::pow(std::abs(val), q) * r;
            cp += std::pow(norm(v.grad(x)), p) * r;
        }
        sq += cq;
        sp += cp;
    }
    SobolevNorms out;
    out.norm_q = static_cast<double>(std::pow(sq * dr * dt, 1.0L / q));
    out.grad_norm_p = static_cast<double>(std::pow(sp * dr * dt, 1.0L / p));
    if (!(out.grad_norm_p > 0.0)) throw Error(ErrorCode::degenerate, "test function has zero gradient on the grid");
    out.ratio = out.norm_q / out.grad_norm_p;
    return out;
}

double sobolev_ratio(const TestFunction& v, double p, int n, int n_r, int n_theta) {
    return sobolev_norms(v, p, n, n_r, n_theta).ratio;
}

std::vector<TestFunction> test_family(double beta) {
    std::vector<TestFunction> fam;
    const Vec2 bis = unit(0.5 * beta);
    for (double k : {2.0, 3.0, 4.0, 6.0})
        for (double s : {0.0, 0.5, 1.0, 2.0, 3.0}) {
            TestFunction v;
            v.center = bis * s;
            v.radius = 1.0;
            v.exponent = k;
            v.sector = beta;
            fam.push_back(v);
        }
    return fam;
}

SobolevRow sobolev_lower_bound(double beta, int n_r, int n_theta) {
    SobolevRow row;
    row.beta = beta;
    for (const auto& v : test_family(beta)) row.L = std::max(row.L, sobolev_ratio(v, 1.0, 2, n_r, n_theta));
    row.L_sqrt_beta = row.L * std::sqrt(beta);
    return row;
}

std::string sobolev_csv(const std::vector<SobolevRow>& rows) {
    std::ostringstream os;
    os.precision(12);
    os << "beta,L_beta,L_beta_sqrt_beta\n";
    for (const auto& r : rows) os << r.beta << "," << r.L << "," << r.L_sqrt_beta << "\n";
    return os.str();
}

std::string failure_csv(const std::vector<FailureMeasure>& rows) {
    std::ostringstream os;
    os.precision(12);
    os << "beta,rho,measure,measure_over_beta\n";
    for (const auto& r : rows) os << r.beta << "," << r.rho << "," << r.measure << "," << r.measure_over_beta << "\n";
    return os.str();
}

}  // namespace sectorsym
