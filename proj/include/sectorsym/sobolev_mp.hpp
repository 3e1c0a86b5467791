/// @file sobolev_mp.hpp
/// Barriers and thresholds for the narrow-band, vertex-sector and small-volume
/// maximum principles, Bessel J0, and Sobolev-ratio quadrature on sectors.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sectorsym/vec2.hpp"

namespace sectorsym {

/// J0 with absolute error below 1e-12 on the whole real line.
double bessel_j0(double x);
/// First positive zero of J0, by bisection on [2, 3].
double bessel_j0_first_zero();

struct BarrierReport {
    /// max over samples of Δg + c g (strictly negative when the barrier works)
    double max_value = 0.0;
    /// max over samples of Δg + c g + (c0 - |c|) g, which the identity Δg = -c0 g makes <= 0
    double max_margin_excess = 0.0;
    int samples = 0;
    /// sector barrier only: max |Δ_h g + c0 g| / c0 with the five-point Laplacian
    double fd_max_rel_error = 0.0;
};

/// Width of the band on which sin(π x1 / (2η)) is an upper solution.
double narrow_band_threshold(double c0);
BarrierReport check_barrier_narrow(double c0, int samples, std::uint64_t seed = 1);

/// Radius of the vertex sector on which J0(j0 ρ / η) is an upper solution.
double sector_band_threshold(double c0);
/// Samples lie in the sector {0 < θ < beta, ρ < η}.
BarrierReport check_barrier_sector(double c0, int samples, std::uint64_t seed = 1, double beta = 1.0);

/// Measure bound η·β with η = (2 c0^{1/2} C)^{-2}; C is the β-normalised
/// Sobolev constant sup_v ‖v‖_2 / ‖∇v‖_1 · β^{1/2}.
double small_volume_threshold(double c0, double beta, double sobolev_constant);

struct SmallVolumeOptions {
    double c0 = 25.0;
    int trials = 8;
    std::uint64_t seed = 1;
    /// mesh size relative to the slice radius
    double h_rel = 0.1;
    /// coefficient cells per direction (angular x radial)
    int cells = 4;
    /// Use c ≡ fixed_c (and fixed data) instead of random trials.
    std::optional<double> fixed_c;
    /// Sobolev constant for the threshold; the family lower bound at beta when absent.
    std::optional<double> sobolev_constant;
};

struct SmallVolumeReport {
    double beta = 0.0;
    double rho = 0.0;
    double measure = 0.0;
    double threshold = 0.0;
    double sobolev_constant = 0.0;
    bool below_threshold = false;
    /// max nodal value over all trials
    double max_nodal = 0.0;
    bool nonpositive = false;
    /// nonpositive whenever below_threshold
    bool pass = false;
    int trials = 0;
    std::vector<std::uint64_t> trial_seeds;
};

/// Slice {|x| < rho} of the wedge of opening beta: Dirichlet on the arc, zero
/// Neumann on the sides. Each trial solves Δw + c w = s ≥ 0 with w ≤ 0 on the
/// arc and |c| < c0 piecewise constant, then scans the sign of w.
SmallVolumeReport verify_small_volume_mp(double beta, double rho, const SmallVolumeOptions& opts);

struct FailureMeasure {
    double beta = 0.0;
    double rho = 0.0;
    double measure = 0.0;
    double measure_over_beta = 0.0;
};

/// Smallest slice measure at which c ≡ c0 produces a positive w, by bisection on rho.
FailureMeasure failure_measure(double beta, double c0, double h_rel = 0.1, double rel_tol = 1e-3);

/// (1 - |x - c|^2 / R^2)_+^k restricted to the sector {0 < θ < sector}; the
/// reflected form is the even extension across the ray θ = sector / 2.
struct TestFunction {
    Vec2 center;
    double radius = 1.0;
    double exponent = 2.0;
    double sector = 1.0;
    bool reflected = false;

    double value(Vec2 x) const;
    Vec2 grad(Vec2 x) const;
    /// v(s x)
    TestFunction dilated(double s) const;
};

/// Even reflection of v (a test function on the sector of opening beta) across
/// its flat side θ = beta, giving a test function on the sector of opening 2 beta.
TestFunction reflect_double(const TestFunction& v, double beta);

struct SobolevNorms {
    double norm_q = 0.0;
    double grad_norm_p = 0.0;
    double ratio = 0.0;
};

/// ‖v‖_q / ‖∇v‖_p with q = n p / (n - p) by a midpoint polar grid over the
/// sector truncated at 4 R. Throws Error(degenerate) on a zero gradient.
SobolevNorms sobolev_norms(const TestFunction& v, double p = 1.0, int n = 2, int n_r = 512, int n_theta = 512);
double sobolev_ratio(const TestFunction& v, double p = 1.0, int n = 2, int n_r = 512, int n_theta = 512);

/// Unit-radius bumps centred at s on the bisector, s in {0, .5, 1, 2, 3}, k in {2, 3, 4, 6}.
std::vector<TestFunction> test_family(double beta);

struct SobolevRow {
    double beta = 0.0;
    double L = 0.0;  ///< max ratio over the family
    double L_sqrt_beta = 0.0;
};

SobolevRow sobolev_lower_bound(double beta, int n_r = 512, int n_theta = 512);

std::string sobolev_csv(const std::vector<SobolevRow>& rows);
std::string failure_csv(const std::vector<FailureMeasure>& rows);

}  // namespace sectorsym
