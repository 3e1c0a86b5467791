#include "sectorsym/fem.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "sectorsym/error.hpp"

namespace sectorsym {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

// ---------------------------------------------------------------- nonlinearity

NonlinearitySpec NonlinearitySpec::constant(double c) {
    NonlinearitySpec s;
    s.kind = Kind::constant;
    s.c = c;
    return s;
}

NonlinearitySpec NonlinearitySpec::linear(double mu) {
    NonlinearitySpec s;
    s.kind = Kind::linear;
    s.c = 0.0;
    s.mu = mu;
    return s;
}

NonlinearitySpec NonlinearitySpec::power(double c, double p) {
    if (!(p >= 1.0)) throw Error(ErrorCode::invalid_argument, "power nonlinearity needs p >= 1 (local Lipschitz)");
    NonlinearitySpec s;
    s.kind = Kind::power;
    s.c = c;
    s.p = p;
    return s;
}

NonlinearitySpec NonlinearitySpec::tabulated(std::vector<double> u, std::vector<double> f) {
    if (u.size() != f.size() || u.size() < 2) throw Error(ErrorCode::invalid_argument, "table needs at least two (u, f) pairs");
    for (std::size_t i = 1; i < u.size(); ++i)
        if (!(u[i] > u[i - 1])) throw Error(ErrorCode::invalid_argument, "table abscissae must increase");
    NonlinearitySpec s;
    s.kind = Kind::tabulated;
    s.c = 0.0;
    s.table_u = std::move(u);
    s.table_f = std::move(f);
    return s;
}

double NonlinearitySpec::f(double u) const {
    switch (kind) {
        case Kind::constant: return c;
        case Kind::linear: return mu * u;
        case Kind::power: return u > 0.0 ? c * std::pow(u, p) : 0.0;
        case Kind::tabulated: {
            if (u <= table_u.front()) return table_f.front();
            if (u >= table_u.back()) return table_f.back();
            auto it = std::upper_bound(table_u.begin(), table_u.end(), u);
            std::size_t k = static_cast<std::size_t>(it - table_u.begin());
            double t = (u - table_u[k - 1]) / (table_u[k] - table_u[k - 1]);
            return (1.0 - t) * table_f[k - 1] + t * table_f[k];
        }
    }
    return 0.0;
}

double NonlinearitySpec::df(double u) const {
    switch (kind) {
        case Kind::constant: return 0.0;
        case Kind::linear: return mu;
        case Kind::power: return u > 0.0 ? c * p * std::pow(u, p - 1.0) : 0.0;
        case Kind::tabulated: {
            if (u <= table_u.front() || u >= table_u.back()) return 0.0;
            auto it = std::upper_bound(table_u.begin(), table_u.end(), u);
            std::size_t k = static_cast<std::size_t>(it - table_u.begin());
            return (table_f[k] - table_f[k - 1]) / (table_u[k] - table_u[k - 1]);
        }
    }
    return 0.0;
}

std::string NonlinearitySpec::to_string() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
        case Kind::constant: os << "const:" << c; break;
        case Kind::linear: os << "linear:" << mu; break;
        case Kind::power: os << "power:" << c << "," << p; break;
        case Kind::tabulated:
            os << "table:";
            for (std::size_t i = 0; i < table_u.size(); ++i) os << (i ? ";" : "") << table_u[i] << "," << table_f[i];
            break;
    }
    return os.str();
}

namespace {

std::vector<double> parse_numbers(const std::string& s, char sep) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep)) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw Error(ErrorCode::parse, "bad number '" + tok + "'");
        }
        if (used != tok.size()) throw Error(ErrorCode::parse, "bad number '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace

NonlinearitySpec NonlinearitySpec::parse(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos) throw Error(ErrorCode::parse, "nonlinearity must look like kind:params, got '" + s + "'");
    std::string kind = s.substr(0, colon), rest = s.substr(colon + 1);
    if (kind == "const" || kind == "linear") {
        auto v = parse_numbers(rest, ',');
        if (v.size() != 1) throw Error(ErrorCode::parse, kind + " takes one parameter");
        return kind == "const" ? constant(v[0]) : linear(v[0]);
    }
    if (kind == "power") {
        auto v = parse_numbers(rest, ',');
        if (v.size() != 2) throw Error(ErrorCode::parse, "power takes c,p");
        return power(v[0], v[1]);
    }
    if (kind == "table") {
        std::vector<double> u, f;
        std::stringstream ss(rest);
        std::string pair;
        while (std::getline(ss, pair, ';')) {
            auto v = parse_numbers(pair, ',');
            if (v.size() != 2) throw Error(ErrorCode::parse, "table entries are u,f pairs");
            u.push_back(v[0]);
            f.push_back(v[1]);
        }
        return tabulated(std::move(u), std::move(f));
    }
    throw Error(ErrorCode::parse, "unknown nonlinearity kind '" + kind + "'");
}

// ---------------------------------------------------------------- coefficients

Coefficient Coefficient::nodal(std::vector<double> v) {
    Coefficient c;
    c.nodal_ = std::move(v);
    return c;
}

Coefficient Coefficient::function(std::function<double(Vec2)> fn) {
    Coefficient c;
    c.fn_ = std::move(fn);
    return c;
}

double Coefficient::at_vertex(const Mesh& m, int i) const {
    if (nodal_) return (*nodal_)[i];
    if (fn_) return fn_(m.vertices()[i]);
    return const_;
}

double Coefficient::at(Vec2 x) const {
    if (nodal_) throw Error(ErrorCode::invalid_argument, "nodal coefficient has no pointwise value without a mesh");
    if (fn_) return fn_(x);
    return const_;
}

// ---------------------------------------------------------------- assembly

namespace {

// Quadrature points (barycentric) of the degree-2 rule, equal weights 1/3.
constexpr double kQ[3][3] = {{2.0 / 3, 1.0 / 6, 1.0 / 6}, {1.0 / 6, 2.0 / 3, 1.0 / 6}, {1.0 / 6, 1.0 / 6, 2.0 / 3}};

struct Dofs {
    std::vector<int> index;  // vertex -> free dof, -1 for Dirichlet
    int n = 0;
};

Dofs make_dofs(const Mesh& m) {
    Dofs d;
    d.index.assign(m.vertices().size(), -1);
    for (std::size_t i = 0; i < m.vertices().size(); ++i)
        if (!m.dirichlet_mask()[i]) d.index[i] = d.n++;
    return d;
}

// Element stiffness entry: A grad_i . grad_j
void element_stiffness(const Mesh& m, int t, double K[3][3]) {
    auto g = m.shape_gradients(t);
    double A = m.triangle_area(t);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) K[i][j] = A * dot(g[i], g[j]);
}

struct System {
    SpMat A;
    Vec b;
};

// Accumulates a full-vertex element matrix into the free-dof system, moving
// known Dirichlet values to the right-hand side.
class Assembler {
public:
    Assembler(const Mesh& m, const Dofs& d, const std::vector<double>& dirichlet_values)
        : m_(m), d_(d), g_(dirichlet_values), b_(Vec::Zero(d.n)) {
        trip_.reserve(9 * m.triangles().size());
    }
    void add(int t, const double E[3][3], const double rhs[3]) {
        const auto& v = m_.triangles()[t];
        for (int i = 0; i < 3; ++i) {
            int r = d_.index[v[i]];
            if (r < 0) continue;
            b_[r] += rhs[i];
            for (int j = 0; j < 3; ++j) {
                int c = d_.index[v[j]];
                if (c >= 0)
                    trip_.emplace_back(r, c, E[i][j]);
                else
                    b_[r] -= E[i][j] * g_[v[j]];
            }
        }
    }
    void add_rhs(int vertex, double value) {
        int r = d_.index[vertex];
        if (r >= 0) b_[r] += value;
    }
    System finish() {
        SpMat A(d_.n, d_.n);
        A.setFromTriplets(trip_.begin(), trip_.end());
        return {std::move(A), std::move(b_)};
    }

private:
    const Mesh& m_;
    const Dofs& d_;
    const std::vector<double>& g_;
    std::vector<Eigen::Triplet<double>> trip_;
    Vec b_;
};

class SparseSolver {
public:
    explicit SparseSolver(const SpMat& A) : A_(A) {
        ldlt_.compute(A);
        if (ldlt_.info() == Eigen::Success) {
            const Vec& D = ldlt_.vectorD();
            double dmax = D.cwiseAbs().maxCoeff();
            if (D.size() == 0 || D.cwiseAbs().minCoeff() > 1e-13 * dmax) {
                use_ldlt_ = true;
                return;
            }
        }
        lu_.analyzePattern(A);
        lu_.factorize(A);
        if (lu_.info() != Eigen::Success)
            throw Error(ErrorCode::singular_system, "sparse factorization failed: system is singular");
    }
    Vec solve(const Vec& b) const {
        Vec x = use_ldlt_ ? Vec(ldlt_.solve(b)) : Vec(lu_.solve(b));
        if (!x.allFinite()) throw Error(ErrorCode::singular_system, "linear solve produced non-finite values");
        // a near-singular factorization shows up as a large backward error
        double bn = b.norm();
        if (bn > 0.0 && (A_ * x - b).norm() > 1e-6 * bn)
            throw Error(ErrorCode::singular_system, "system is numerically singular");
        return x;
    }

private:
    const SpMat& A_;
    bool use_ldlt_ = false;
    Eigen::SimplicialLDLT<SpMat> ldlt_;
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu_;
};

// Residual R_i = ∫∇u·∇φ_i − ∫f(u)φ_i and, optionally, the Jacobian.
void semilinear_system(const Mesh& m, const Dofs& d, const NonlinearitySpec& f, const std::vector<double>& u, Vec* R,
                       SpMat* J) {
    *R = Vec::Zero(d.n);
    std::vector<Eigen::Triplet<double>> trip;
    if (J) trip.reserve(9 * m.triangles().size());
    for (int t = 0; t < static_cast<int>(m.triangles().size()); ++t) {
        const auto& v = m.triangles()[t];
        double K[3][3];
        element_stiffness(m, t, K);
        double A = m.triangle_area(t);
        double ue[3] = {u[v[0]], u[v[1]], u[v[2]]};
        double F[3] = {0, 0, 0}, M[3][3] = {};
        for (const auto& q : kQ) {
            double uq = q[0] * ue[0] + q[1] * ue[1] + q[2] * ue[2];
            double fq = f.f(uq), dq = J ? f.df(uq) : 0.0;
            for (int i = 0; i < 3; ++i) {
                F[i] += A / 3.0 * fq * q[i];
                for (int j = 0; j < 3; ++j) M[i][j] += A / 3.0 * dq * q[i] * q[j];
            }
        }
        for (int i = 0; i < 3; ++i) {
            int r = d.index[v[i]];
            if (r < 0) continue;
            double s = -F[i];
            for (int j = 0; j < 3; ++j) s += K[i][j] * ue[j];
            (*R)[r] += s;
            if (J)
                for (int j = 0; j < 3; ++j) {
                    int c = d.index[v[j]];
                    if (c >= 0) trip.emplace_back(r, c, K[i][j] - M[i][j]);
                }
        }
    }
    if (J) {
        J->resize(d.n, d.n);
        J->setFromTriplets(trip.begin(), trip.end());
    }
}

double min_free(const Mesh& m, const std::vector<double>& u) {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u.size(); ++i)
        if (!m.dirichlet_mask()[i]) lo = std::min(lo, u[i]);
    return lo;
}

}  // namespace

double semilinear_residual(const Mesh& mesh, const NonlinearitySpec& f, const std::vector<double>& u) {
    Dofs d = make_dofs(mesh);
    Vec R;
    semilinear_system(mesh, d, f, u, &R, nullptr);
    return R.norm();
}

ScalarField solve_linear(const MeshPtr& mesh, const LinearProblem& pb) {
    const Mesh& m = *mesh;
    Dofs d = make_dofs(m);
    const std::size_t nv = m.vertices().size();
    std::vector<double> g(nv, 0.0), c(nv), src(nv);
    for (std::size_t i = 0; i < nv; ++i) {
        if (m.dirichlet_mask()[i]) g[i] = pb.dirichlet.at_vertex(m, static_cast<int>(i));
        c[i] = pb.c.at_vertex(m, static_cast<int>(i));
        src[i] = pb.source.at_vertex(m, static_cast<int>(i));
    }
    // weak form of Δu + c u = s:  ∫∇u·∇φ − ∫c u φ = −∫s φ + ∫_N (∂u/∂ν) φ
    Assembler as(m, d, g);
    for (int t = 0; t < static_cast<int>(m.triangles().size()); ++t) {
        const auto& v = m.triangles()[t];
        double E[3][3], rhs[3] = {0, 0, 0};
        element_stiffness(m, t, E);
        double A = m.triangle_area(t);
        if (pb.reaction == ReactionAssembly::lumped) {
            for (int i = 0; i < 3; ++i) {
                E[i][i] -= A / 3.0 * c[v[i]];
                rhs[i] -= A / 3.0 * src[v[i]];
            }
        } else {
            for (const auto& q : kQ) {
                double cq = q[0] * c[v[0]] + q[1] * c[v[1]] + q[2] * c[v[2]];
                double sq = q[0] * src[v[0]] + q[1] * src[v[1]] + q[2] * src[v[2]];
                for (int i = 0; i < 3; ++i) {
                    rhs[i] -= A / 3.0 * sq * q[i];
                    for (int j = 0; j < 3; ++j) E[i][j] -= A / 3.0 * cq * q[i] * q[j];
                }
            }
        }
        as.add(t, E, rhs);
    }
    if (!pb.neumann.is_zero()) {
        for (const auto& e : m.boundary_edges()) {
            if (e.tag == BoundaryTag::dirichlet_arc) continue;
            double L = dist(m.vertices()[e.v0], m.vertices()[e.v1]);
            double g0 = pb.neumann.at_vertex(m, e.v0), g1 = pb.neumann.at_vertex(m, e.v1);
            // exact for linear data
            as.add_rhs(e.v0, L * (2.0 * g0 + g1) / 6.0);
            as.add_rhs(e.v1, L * (g0 + 2.0 * g1) / 6.0);
        }
    }
    System sys = as.finish();
    SparseSolver solver(sys.A);
    Vec x = solver.solve(sys.b);
    ScalarField out{mesh, g};
    for (std::size_t i = 0; i < nv; ++i)
        if (d.index[i] >= 0) out.values[i] = x[d.index[i]];
    return out;
}

SolveResult solve_semilinear(const MeshPtr& mesh, const NonlinearitySpec& f, const SolveOptions& opts) {
    const Mesh& m = *mesh;
    Dofs d = make_dofs(m);
    const std::size_t nv = m.vertices().size();
    std::vector<double> u;
    if (opts.initial_guess) {
        if (opts.initial_guess->size() != nv) throw Error(ErrorCode::invalid_argument, "initial guess has the wrong length");
        u = *opts.initial_guess;
        for (std::size_t i = 0; i < nv; ++i)
            if (m.dirichlet_mask()[i]) u[i] = 0.0;
    } else {
        LinearProblem lp;
        lp.source = Coefficient(-1.0);
        u = solve_linear(mesh, lp).values;
    }
    SolveReport rep;
    Vec R;
    SpMat J;
    semilinear_system(m, d, f, u, &R, &J);
    double r = R.norm();
    rep.residual_history.push_back(r);
    while (r > opts.tolerance) {
        if (rep.newton_iterations >= opts.max_iterations) {
            std::ostringstream os;
            os << "Newton did not reach tolerance " << opts.tolerance << " in " << opts.max_iterations
               << " steps (residual " << r << ")";
            throw Error(ErrorCode::no_convergence, os.str());
        }
        SparseSolver solver(J);
        Vec delta = solver.solve(-R);
        double step = 1.0;
        std::vector<double> trial(nv);
        Vec Rt;
        double rt = 0.0;
        for (int halvings = 0;; ++halvings) {
            for (std::size_t i = 0; i < nv; ++i) trial[i] = d.index[i] >= 0 ? u[i] + step * delta[d.index[i]] : 0.0;
            semilinear_system(m, d, f, trial, &Rt, nullptr);
            rt = Rt.norm();
            if (std::isfinite(rt) && rt < r) break;
            if (halvings >= 30) throw Error(ErrorCode::divergence, "Newton step could not reduce the residual");
            step *= 0.5;
            ++rep.damping_events;
        }
        u = std::move(trial);
        ++rep.newton_iterations;
        semilinear_system(m, d, f, u, &R, &J);
        r = R.norm();
        rep.residual_history.push_back(r);
    }
    rep.residual = r;
    rep.min_interior = min_free(m, u);
    rep.positive = rep.min_interior > 0.0;
    return {ScalarField{mesh, std::move(u)}, rep};
}

EigenResult principal_eigenvalue(const MeshPtr& mesh, double rel_tol, int max_iterations) {
    const Mesh& m = *mesh;
    Dofs d = make_dofs(m);
    std::vector<double> zero(m.vertices().size(), 0.0);
    Assembler ka(m, d, zero), ma(m, d, zero);
    const double rhs[3] = {0, 0, 0};
    for (int t = 0; t < static_cast<int>(m.triangles().size()); ++t) {
        double K[3][3], M[3][3];
        element_stiffness(m, t, K);
        double A = m.triangle_area(t);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) M[i][j] = A / 12.0 * (i == j ? 2.0 : 1.0);
        ka.add(t, K, rhs);
        ma.add(t, M, rhs);
    }
    SpMat K = ka.finish().A, M = ma.finish().A;
    SparseSolver solver(K);
    Vec x = Vec::Ones(d.n);
    double lam = 0.0;
    for (int it = 1; it <= max_iterations; ++it) {
        Vec y = solver.solve(M * x);
        double nlam = y.dot(K * y) / y.dot(M * y);
        x = y / y.cwiseAbs().maxCoeff();
        if (it > 1 && std::abs(nlam - lam) <= rel_tol * std::abs(nlam)) {
            EigenResult res;
            res.lambda1 = nlam;
            res.iterations = it;
            if (x.sum() < 0) x = -x;
            x /= x.maxCoeff();
            res.eigenfield = ScalarField{mesh, zero};
            for (std::size_t i = 0; i < zero.size(); ++i)
                if (d.index[i] >= 0) res.eigenfield.values[i] = x[d.index[i]];
            return res;
        }
        lam = nlam;
    }
    throw Error(ErrorCode::no_convergence, "inverse iteration did not converge");
}

// ---------------------------------------------------------------- evaluation

ScalarField interpolate(const MeshPtr& mesh, const std::function<double(Vec2)>& fn) {
    ScalarField u{mesh, {}};
    u.values.reserve(mesh->vertices().size());
    for (Vec2 x : mesh->vertices()) u.values.push_back(fn(x));
    return u;
}

std::optional<double> try_evaluate(const ScalarField& u, Vec2 x) {
    auto loc = u.mesh->try_locate(x);
    if (!loc) return std::nullopt;
    const auto& v = u.mesh->triangles()[loc->triangle];
    return loc->bary[0] * u.values[v[0]] + loc->bary[1] * u.values[v[1]] + loc->bary[2] * u.values[v[2]];
}

double evaluate(const ScalarField& u, Vec2 x) {
    auto r = try_evaluate(u, x);
    if (!r) u.mesh->locate(x);  // throws point_outside
    return *r;
}

Vec2 element_gradient(const ScalarField& u, int t) {
    const auto& v = u.mesh->triangles()[t];
    auto g = u.mesh->shape_gradients(t);
    return g[0] * u.values[v[0]] + g[1] * u.values[v[1]] + g[2] * u.values[v[2]];
}

std::optional<Vec2> try_gradient(const ScalarField& u, Vec2 x) {
    auto all = u.mesh->locate_all(x, 1e-12);
    if (all.empty()) return std::nullopt;
    Vec2 s{0.0, 0.0};
    for (const auto& l : all) s = s + element_gradient(u, l.triangle);
    return s / static_cast<double>(all.size());
}

Vec2 gradient(const ScalarField& u, Vec2 x) {
    auto r = try_gradient(u, x);
    if (!r) u.mesh->locate(x);
    return *r;
}

std::vector<double> scaled_guess(const MeshPtr& mesh, const NonlinearitySpec& f) {
    LinearProblem lp;
    lp.source = Coefficient(-1.0);
    std::vector<double> w = solve_linear(mesh, lp).values;
    if (f.kind != NonlinearitySpec::Kind::power || f.p <= 1.0 || f.c <= 0.0) return w;
    const Mesh& m = *mesh;
    double dir = 0.0, pot = 0.0;
    ScalarField wf{mesh, w};
    for (int t = 0; t < static_cast<int>(m.triangles().size()); ++t) {
        double A = m.triangle_area(t);
        Vec2 g = element_gradient(wf, t);
        dir += A * norm2(g);
        const auto& v = m.triangles()[t];
        for (const auto& q : kQ) {
            double wq = q[0] * w[v[0]] + q[1] * w[v[1]] + q[2] * w[v[2]];
            pot += A / 3.0 * f.c * std::pow(std::max(wq, 0.0), f.p + 1.0);
        }
    }
    double s = std::pow(dir / pot, 1.0 / (f.p - 1.0));
    for (double& x : w) x *= s;
    return w;
}

}  // namespace sectorsym
