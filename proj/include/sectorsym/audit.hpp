/// @file audit.hpp
/// Sign checks of the moving-plane argument evaluated on a computed field.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sectorsym/fem.hpp"
#include "sectorsym/sector_geometry.hpp"

namespace sectorsym {

struct AuditConfig {
    double h = 0.0;
    /// tolerance = 1e-8 + kappa h^2
    double kappa = 0.0;
    /// Lipschitz bound of f; the w rows report max |c^{λ,ϑ}| against it.
    double c0 = 25.0;
    std::optional<NonlinearitySpec> f;
    /// replaces the calibrated tolerance when set
    std::optional<double> fixed_tolerance;

    double tolerance() const { return fixed_tolerance ? *fixed_tolerance : 1e-8 + kappa * h * h; }
};

struct AuditRow {
    std::string check_id;
    double alpha = 0.0;
    double beta = 0.0;
    double lambda = 0.0;
    double theta = 0.0;
    double theta1 = 0.0;
    int n_points = 0;
    /// Largest signed value of the audited quantity; negative is good.
    double max_violation = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    /// The predicate is known to fail for these parameters; not a regression.
    bool expected_fail = false;
    /// No sample points (empty domain or collar swallowed everything).
    bool vacuous = false;
    std::string note;
};

struct AuditReport {
    SectorSpec spec;
    double h = 0.0;
    double kappa = 0.0;
    double c0 = 0.0;
    std::vector<AuditRow> rows;

    /// Every row passes, except expected-fail rows which must fail.
    bool all_pass() const;
    /// "# key=value" header lines followed by the CSV table.
    std::string to_csv() const;
};

enum class LineSide { lower, upper };

/// Radial error of the solver on the a = 0 sector of the same opening.
struct KappaCalibration {
    double kappa = 0.0;
    double h = 0.0;
    double value_error = 0.0;
    double gradient_error = 0.0;
};

/// Solves Δu + 1 = 0 on the sector alpha = beta (exact solution (1 - |x|^2)/4)
/// at mesh size h and returns max(value error, interior gradient error) / h^2.
KappaCalibration calibrate_kappa(double beta, double h, double grading = 4.0);

/// Config for a field: h from its mesh, kappa from the radial calibration.
AuditConfig default_audit_config(const ScalarField& u, double c0 = 25.0);

/// The sector carried by the field's mesh; throws Error(invalid_argument) on slices.
Sector field_sector(const ScalarField& u);

/// (1 - |x|^2) / 4, the exact const(1) solution when a = 0.
double radial_exact(Vec2 x);

/// u(x) - u(x^{λ,ϑ}); λ = 0 is allowed (lines through the vertex).
/// Throws Error(point_outside) if x or its reflection is off the mesh.
double difference_w(const ScalarField& u, double lambda, double theta, Vec2 x, bool mirrored = false);

/// max w over barycenters of D_{λ,ϑ,ϑ1} deeper than 2h.
AuditRow check_w_negative(const ScalarField& u, double lambda, double theta, std::optional<double> theta1,
                          const AuditConfig& cfg);

/// max of ∇u·n over T ∩ Σ (lower) or its mirror image (upper), n the normal
/// pointing into D. Samples keep a 2h collar; with include_endpoint the
/// Neumann endpoint P_λ is added using the least-squares gradient.
/// Throws Error(domain_violation) when the line misses Σ.
AuditRow directional_sign(const ScalarField& u, double lambda, double theta, LineSide side,
                          const AuditConfig& cfg, bool include_endpoint = false);

/// Quadratic least-squares gradient at x from the nodes within radius 4h.
Vec2 lsq_gradient(const ScalarField& u, Vec2 x);

/// Tangential derivative along the Neumann side at P_λ (or its mirror).
/// Throws Error(invalid_argument) unless 0 < λ < l_N.
AuditRow neumann_tangential(const ScalarField& u, double lambda, LineSide side, const AuditConfig& cfg);

/// (x1 - p1) u_x2 - (x2 - p2) u_x1. Throws Error(point_outside).
double rotation_v(const ScalarField& u, Vec2 pivot, Vec2 x);

struct HwFit {
    double exponent = 0.0;
    std::vector<double> radii;
    std::vector<double> max_abs_v;
};

/// Radii admissible for hw_exponent: geometric between 3h and 0.9 of
/// min(λ, l_N - λ) / 2. Throws Error(invalid_argument) if that range is empty.
std::vector<double> hw_default_radii(const ScalarField& u, double lambda, int n = 8);

/// Least-squares slope of log max_ϑ |v_λ(r, ϑ)| against log r around P_λ.
/// Throws Error(invalid_argument) for bad radii, Error(degenerate) for a flat or zero fit.
HwFit hw_exponent(const ScalarField& u, double lambda, const std::vector<double>& radii);

struct SymmetryDefect {
    double max_defect = 0.0;
    int n_points = 0;
};

/// max |u(x1, x2) - u(x1, -x2)| over barycenters with depth > min_depth.
SymmetryDefect symmetry_defect(const ScalarField& u, double min_depth = 0.0);
AuditRow symmetry_row(const ScalarField& u, const AuditConfig& cfg);
AuditRow monotonicity_x1(const ScalarField& u, const AuditConfig& cfg);
AuditRow monotonicity_x2_half(const ScalarField& u, const AuditConfig& cfg);

/// u on Σ, u(mirror x) on the reflection of Σ across the lower Neumann side.
class EvenExtension {
public:
    explicit EvenExtension(const ScalarField& u);
    std::optional<double> try_value(Vec2 x) const;
    /// Throws Error(point_outside).
    double value(Vec2 x) const;

private:
    const ScalarField* u_;
    Sector s_;
};

EvenExtension even_extension(const ScalarField& u);

/// max w over D̃_{λ,ϑ} of the doubled sector. Throws Error(domain_violation)
/// outside ϑ_B(λ) <= ϑ <= π/2, λ <= l_⊥.
AuditRow check_double_negative(const ScalarField& u, double lambda, double theta, const AuditConfig& cfg);

/// directional_sign restricted to the cap of Σ beyond T_{Λ,ϑ_A(Λ)}.
/// Throws Error(domain_violation) unless 0 < Λ < λ < λ_C and ϑ_A(λ) < ϑ < ϑ_B(λ).
AuditRow subcap_directional_sign(const ScalarField& u, double Lambda, double lambda, double theta,
                                 const AuditConfig& cfg);

/// Along the lower Neumann side beyond P_λ: x̄, its reflection ȳ across T_{λ,β/2},
/// and z̄ = reflection of ȳ across T_{λ,ϑ_A(λ)}. max of u(x̄) - u(z̄) and u(z̄) - u(ȳ).
/// Throws Error(domain_violation) unless 0 < λ < λ♯.
AuditRow chain_comparison(const ScalarField& u, double lambda, const AuditConfig& cfg);

struct SweepPolicy {
    /// uniform interior points added to each admissible interval
    int fill = 3;
    /// explicit angles (kept where admissible); empty means the default set
    std::vector<double> thetas;
    bool include_double = true;
    bool include_chain = true;
    int threads = 1;
};

/// Angles of J_λ audited by the sweep: the admissible ones among
/// {ϑ_A, ϑ_B, β, π/2, (π+β)/2} plus the fill, ascending. A nonempty
/// `explicit_thetas` replaces that set (still filtered by J_λ).
std::vector<double> sweep_angles(const Sector& s, double lambda, int fill,
                                 const std::vector<double>& explicit_thetas = {});

/// Global rows (symmetry, monotonicity) then per-λ rows in input order.
AuditReport audit_sweep(const ScalarField& u, const std::vector<double>& lambdas, const SweepPolicy& policy,
                        const AuditConfig& cfg);

}  // namespace sectorsym
