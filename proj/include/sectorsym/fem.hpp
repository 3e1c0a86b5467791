/// @file fem.hpp
/// P1 finite elements for Δu + f(u) = 0 with u = 0 on the arc and zero normal
/// derivative on the straight sides.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sectorsym/mesh.hpp"

namespace sectorsym {

struct NonlinearitySpec {
    enum class Kind { constant, linear, power, tabulated };
    Kind kind = Kind::constant;
    double c = 1.0;   ///< constant value, or power prefactor
    double mu = 0.0;  ///< linear slope: f(u) = mu u
    double p = 1.0;   ///< power exponent: f(u) = c (u+)^p
    /// Tabulated f: increasing abscissae with piecewise-linear interpolation,
    /// held constant outside the table.
    std::vector<double> table_u, table_f;

    static NonlinearitySpec constant(double c);
    static NonlinearitySpec linear(double mu);
    static NonlinearitySpec power(double c, double p);
    static NonlinearitySpec tabulated(std::vector<double> u, std::vector<double> f);

    double f(double u) const;
    double df(double u) const;
    /// Compact text form, e.g. "const:1", "linear:2", "power:1,2", "table:0,0;1,2".
    std::string to_string() const;
    /// Throws Error(parse or invalid_argument).
    static NonlinearitySpec parse(const std::string& s);
    bool operator==(const NonlinearitySpec&) const = default;
};

struct ScalarField {
    MeshPtr mesh;
    std::vector<double> values;
};

struct SolveReport {
    int newton_iterations = 0;
    double residual = 0.0;
    std::vector<double> residual_history;
    int damping_events = 0;
    /// min nodal value over non-Dirichlet vertices
    double min_interior = 0.0;
    bool positive = false;
};

struct SolveOptions {
    double tolerance = 1e-10;
    int max_iterations = 50;
    /// Nodal initial guess; the const(1) solution is used when absent.
    std::optional<std::vector<double>> initial_guess;
};

struct SolveResult {
    ScalarField field;
    SolveReport report;
};

/// Damped Newton for the weak form ∫∇u·∇φ = ∫f(u)φ, residual measured in the
/// Euclidean norm over free nodes. Throws Error(singular_system, divergence,
/// no_convergence).
SolveResult solve_semilinear(const MeshPtr& mesh, const NonlinearitySpec& f, const SolveOptions& opts = {});

/// Weak-form residual norm of a nodal field (free nodes only).
double semilinear_residual(const Mesh& mesh, const NonlinearitySpec& f, const std::vector<double>& u);

/// A scalar datum given as a constant, nodal values, or a function of position.
class Coefficient {
public:
    Coefficient(double c = 0.0) : const_(c) {}
    static Coefficient nodal(std::vector<double> v);
    static Coefficient function(std::function<double(Vec2)> fn);
    double at_vertex(const Mesh& m, int i) const;
    double at(Vec2 x) const;
    bool is_zero() const { return !nodal_ && !fn_ && const_ == 0.0; }

private:
    double const_ = 0.0;
    std::optional<std::vector<double>> nodal_;
    std::function<double(Vec2)> fn_;
};

enum class ReactionAssembly { consistent, lumped };

struct LinearProblem {
    Coefficient c;          ///< zeroth-order coefficient in Δu + c u = source
    Coefficient source;
    Coefficient dirichlet;  ///< values of u on the arc
    Coefficient neumann;    ///< outward normal derivative on the straight sides
    /// Lumped reaction and source terms keep the system an M-matrix on
    /// acute-enough meshes; consistent is the default.
    ReactionAssembly reaction = ReactionAssembly::consistent;
};

/// Throws Error(singular_system).
ScalarField solve_linear(const MeshPtr& mesh, const LinearProblem& problem);

struct EigenResult {
    double lambda1 = 0.0;
    ScalarField eigenfield;
    int iterations = 0;
};

/// Smallest eigenvalue of −Δ with the mixed conditions, by inverse iteration.
/// Throws Error(no_convergence) after max_iterations.
EigenResult principal_eigenvalue(const MeshPtr& mesh, double rel_tol = 1e-8, int max_iterations = 500);

/// Nodal interpolant of fn.
ScalarField interpolate(const MeshPtr& mesh, const std::function<double(Vec2)>& fn);

/// Throws Error(point_outside).
double evaluate(const ScalarField& u, Vec2 x);
std::optional<double> try_evaluate(const ScalarField& u, Vec2 x);
/// Element gradient; averaged over all elements sharing x when x is on an edge or vertex.
Vec2 gradient(const ScalarField& u, Vec2 x);
std::optional<Vec2> try_gradient(const ScalarField& u, Vec2 x);
Vec2 element_gradient(const ScalarField& u, int triangle);

/// Starting guess for superlinear powers: the const(1) solution w scaled so
/// that ∫|∇(s w)|² = ∫f(s w) s w, which keeps Newton away from the zero branch.
std::vector<double> scaled_guess(const MeshPtr& mesh, const NonlinearitySpec& f);

}  // namespace sectorsym
