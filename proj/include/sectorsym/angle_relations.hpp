#pragma once

#include <cstdint>
#include <optional>

#include "sectorsym/vec2.hpp"

namespace sectorsym {

/// Isosceles triangle V A2 A1 (|VA1| = |VA2| = 1) with O on the median VH,
/// angle A1 O A2 = alpha, angle A1 V A2 = beta, and P = s * Pbar where Pbar is
/// the intersection of line A2 O with line V A1.
struct TriangleConfig {
    double alpha = 0.0;
    double beta = 0.0;
    double s = 0.0;
};

struct TrianglePoints {
    Vec2 V, O, H, A1, A2, Pbar, P;
};

/// Throws Error(degenerate) when the points cannot be constructed.
TrianglePoints construct(const TriangleConfig& c);

struct AnglesAtP {
    double theta_A = 0.0;  ///< angle A1 P O
    double theta_B = 0.0;  ///< angle A1 P A2
};

AnglesAtP angles_at_P(const TriangleConfig& c);

/// Signed margins of the four inequalities; the optional ones are reported only
/// inside their hypotheses.
struct AngleMargins {
    double m1 = 0.0;                ///< 2 theta_A - theta_B
    std::optional<double> m2;       ///< (pi + beta)/2 - (2 theta_B - theta_A), when theta_B < pi/2
    std::optional<double> m3;       ///< pi - (2 theta_B - theta_A), when beta <= 2 pi/3
    std::optional<double> m4;       ///< pi - (2 theta_B - theta_A), when theta_A >= beta
};

AngleMargins check_angle_inequalities(const TriangleConfig& c);

/// f(t, k, e) = 2 atan(((k + e k + 2t + e t) k) / (k + e k + e t)) - atan t + atan k - pi.
double angle_gap_function(double t, double kappa, double epsilon);

enum class AngleRegime { always, theta_B_acute, beta_le_two_thirds_pi, theta_A_ge_beta };

const char* to_string(AngleRegime r);

struct AngleSweep {
    AngleRegime regime = AngleRegime::always;
    /// configs that satisfied the regime hypothesis and were checked
    int checked = 0;
    /// draws rejected by the hypothesis or by degenerate construction
    int rejected = 0;
    double min_margin = 0.0;
    TriangleConfig worst;
    bool pass = false;
};

/// Draws (alpha, beta, s) uniformly with 0 < beta < alpha <= pi and
/// s in [s_min, 1) until `samples` configs meet the regime hypothesis, and
/// records the smallest margin of that regime's inequality. pass iff every
/// margin exceeds 1e-10.
AngleSweep sweep_angle_inequality(AngleRegime regime, int samples, std::uint64_t seed, double s_min = 1e-3);

}  // namespace sectorsym
