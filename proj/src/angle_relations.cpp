#include "sectorsym/angle_relations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "sectorsym/error.hpp"
#include "sectorsym/sector_geometry.hpp"

namespace sectorsym {

namespace {

double angle_between(Vec2 u, Vec2 v) {
    double nu = norm(u), nv = norm(v);
    if (nu < 1e-300 || nv < 1e-300) throw Error(ErrorCode::degenerate, "zero-length ray in angle computation");
    return std::atan2(std::abs(cross(u, v)), dot(u, v));
}

std::optional<Vec2> line_intersection(Vec2 p, Vec2 d, Vec2 q, Vec2 e) {
    double den = cross(d, e);
    if (std::abs(den) < 1e-15 * norm(d) * norm(e)) return std::nullopt;
    return p + d * (cross(q - p, e) / den);
}

}  // namespace

TrianglePoints construct(const TriangleConfig& c) {
    if (!(c.beta > 0.0 && c.beta < c.alpha && c.alpha <= kPi + 1e-15))
        throw Error(ErrorCode::degenerate, "triangle configuration needs 0 < beta < alpha <= pi");
    if (!(c.s > 0.0 && c.s < 1.0)) throw Error(ErrorCode::degenerate, "s must lie in (0, 1)");
    TrianglePoints t;
    const double hb = 0.5 * c.beta;
    t.V = {0.0, 0.0};
    t.A1 = {std::cos(hb), -std::sin(hb)};
    t.A2 = {std::cos(hb), std::sin(hb)};
    t.H = (t.A1 + t.A2) * 0.5;
    // O on VH seeing the base A1 A2 under the angle alpha.
    t.O = {t.H.x - t.A2.y / std::tan(0.5 * c.alpha), 0.0};
    if (c.alpha >= kPi) t.O = t.H;
    if (!(t.O.x > 0.0 && t.O.x <= t.H.x)) throw Error(ErrorCode::degenerate, "O is not on the segment VH");
    auto Pbar = line_intersection(t.A2, t.O - t.A2, t.V, t.A1 - t.V);
    if (!Pbar) throw Error(ErrorCode::degenerate, "lines A2O and VA1 are parallel");
    t.Pbar = *Pbar;
    t.P = t.Pbar * c.s;
    return t;
}

AnglesAtP angles_at_P(const TriangleConfig& c) {
    TrianglePoints t = construct(c);
    AnglesAtP r;
    r.theta_A = angle_between(t.A1 - t.P, t.O - t.P);
    r.theta_B = angle_between(t.A1 - t.P, t.A2 - t.P);
    if (!(r.theta_A > 0.0 && r.theta_A < kPi && r.theta_B > 0.0 && r.theta_B < kPi))
        throw Error(ErrorCode::degenerate, "collinear configuration");
    return r;
}

AngleMargins check_angle_inequalities(const TriangleConfig& c) {
    AnglesAtP a = angles_at_P(c);
    AngleMargins m;
    const double gap = 2.0 * a.theta_B - a.theta_A;
    m.m1 = 2.0 * a.theta_A - a.theta_B;
    if (a.theta_B < 0.5 * kPi) m.m2 = 0.5 * (kPi + c.beta) - gap;
    if (c.beta <= 2.0 * kPi / 3.0) m.m3 = kPi - gap;
    if (a.theta_A >= c.beta) m.m4 = kPi - gap;
    return m;
}

double angle_gap_function(double t, double kappa, double epsilon) {
    const double k = kappa, e = epsilon;
    double num = (k + e * k + 2.0 * t + e * t) * k;
    double den = k + e * k + e * t;
    return 2.0 * std::atan(num / den) - std::atan(t) + std::atan(k) - kPi;
}

const char* to_string(AngleRegime r) {
    switch (r) {
        case AngleRegime::always: return "always";
        case AngleRegime::theta_B_acute: return "theta_B_acute";
        case AngleRegime::beta_le_two_thirds_pi: return "beta_le_two_thirds_pi";
        case AngleRegime::theta_A_ge_beta: return "theta_A_ge_beta";
    }
    return "?";
}

AngleSweep sweep_angle_inequality(AngleRegime regime, int samples, std::uint64_t seed, double s_min) {
    std::mt19937_64 rng(seed);
    auto unif = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    AngleSweep out;
    out.regime = regime;
    out.min_margin = std::numeric_limits<double>::infinity();
    const int max_draws = 200 * std::max(samples, 1);
    for (int draw = 0; out.checked < samples && draw < max_draws; ++draw) {
        TriangleConfig c;
        c.alpha = kPi * (1.0 - unif());
        c.beta = c.alpha * (1.0 - unif());
        if (regime == AngleRegime::beta_le_two_thirds_pi) c.beta = std::min(c.alpha, 2.0 * kPi / 3.0) * (1.0 - unif());
        c.s = s_min + (1.0 - s_min) * unif();
        std::optional<double> m;
        try {
            if (!(c.beta < c.alpha)) throw Error(ErrorCode::degenerate, "beta = alpha");
            AngleMargins g = check_angle_inequalities(c);
            switch (regime) {
                case AngleRegime::always: m = g.m1; break;
                case AngleRegime::theta_B_acute: m = g.m2; break;
                case AngleRegime::beta_le_two_thirds_pi: m = g.m3; break;
                case AngleRegime::theta_A_ge_beta: m = g.m4; break;
            }
        } catch (const Error&) {
        }
        if (!m) {
            ++out.rejected;
            continue;
        }
        ++out.checked;
        if (*m < out.min_margin) {
            out.min_margin = *m;
            out.worst = c;
        }
    }
    out.pass = out.checked == samples && out.min_margin > 1e-10;
    return out;
}

}  // namespace sectorsym
