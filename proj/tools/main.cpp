// sector_symmetry: command-line front end for the sector solver and audits.
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sectorsym/angle_relations.hpp"
#include "sectorsym/audit.hpp"
#include "sectorsym/error.hpp"
#include "sectorsym/fem.hpp"
#include "sectorsym/io.hpp"
#include "sectorsym/mesh.hpp"
#include "sectorsym/sector_geometry.hpp"
#include "sectorsym/sobolev_mp.hpp"
#include "sectorsym/sweep.hpp"
#include "svg_plot.hpp"

using namespace sectorsym;

namespace {

enum Exit { kPass = 0, kCheckFailed = 1, kUsage = 2, kInternal = 3 };

int report_error(const std::string& code, const std::string& message, int exit_code) {
    nlohmann::json j{{"code", code}, {"message", message}};
    std::cerr << j.dump() << "\n";
    return exit_code;
}

int exit_for(ErrorCode c) {
    return c == ErrorCode::invalid_argument || c == ErrorCode::parse ? kUsage : kInternal;
}

void emit(const std::string& out, const std::string& text) {
    if (out.empty())
        std::cout << text;
    else
        write_atomic(out, text);
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", v + 0.0);
    return buf;
}

void row(std::string& s, const char* key, const std::string& v) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-16s ", key);
    s += buf + v + "\n";
}

template <class F>
std::string maybe(F f) {
    try {
        return num(f());
    } catch (const Error&) {
        return "undefined";
    }
}

// Flags shared by the commands that build a field from scratch.
struct FieldFlags {
    double alpha = NAN, beta = NAN, h = 0.05, grading = 4.0;
    bool symmetric = false;
    std::string f = "const:1";
    std::string field;

    void add(CLI::App* app, bool allow_file) {
        app->set_help_flag("--help", "Print this help message and exit");
        app->add_option("--alpha", alpha, "arc opening (radians)");
        app->add_option("--beta", beta, "sector opening (radians)");
        app->add_option("--h", h, "mesh size")->check(CLI::PositiveNumber);
        app->add_option("--grading", grading, "corner grading factor")->check(CLI::Range(1.0, 1e6));
        app->add_flag("--symmetric", symmetric, "mirror-symmetric mesh");
        app->add_option("--f", f, "nonlinearity: const:c | linear:mu | power:c,p");
        if (allow_file) app->add_option("--field", field, "field JSON written by solve");
    }

    SectorSpec spec() const {
        if (std::isnan(alpha) || std::isnan(beta)) throw Error(ErrorCode::invalid_argument, "--alpha and --beta are required");
        SectorSpec s{alpha, beta};
        validate(s);
        return s;
    }
};

SolveResult solve_from_flags(const FieldFlags& ff) {
    NonlinearitySpec f = NonlinearitySpec::parse(ff.f);
    auto mesh = std::make_shared<const Mesh>(generate(ff.spec(), ff.h, ff.symmetric, ff.grading));
    SolveOptions opts;
    if (f.kind == NonlinearitySpec::Kind::power) opts.initial_guess = scaled_guess(mesh, f);
    return solve_semilinear(mesh, f, opts);
}

ScalarField field_from_flags(const FieldFlags& ff) {
    if (!ff.field.empty()) return field_from_json(read_file(ff.field));
    return solve_from_flags(ff).field;
}

// ---------------------------------------------------------------------------

int cmd_constants(double alpha, double beta, std::optional<double> lambda) {
    Sector s(SectorSpec{alpha, beta});
    const auto& k = s.constants();
    std::string out;
    row(out, "alpha", num(alpha));
    row(out, "beta", num(beta));
    row(out, "a", num(k.a));
    row(out, "l_N", num(k.l_N));
    row(out, "lambda_C", num(k.lambda_C));
    row(out, "lambda_sharp", num(k.lambda_sharp));
    row(out, "l_perp", num(k.l_perp));
    row(out, "lambda_max", num(k.lambda_max));
    row(out, "beta_flat", num(k.beta_flat));
    row(out, "zeta_flat", num(k.zeta_flat));
    row(out, "lambda_flat", num(k.lambda_flat));
    row(out, "l_star", k.l_star ? num(*k.l_star) : "undefined");
    if (lambda) {
        AdmissibleSet J = critical_angles(s, *lambda);
        row(out, "lambda", num(*lambda));
        row(out, "theta_A", num(J.theta_A));
        row(out, "theta_B", num(J.theta_B));
        std::string js;
        for (const auto& I : J.intervals) {
            if (!js.empty()) js += " U ";
            js += (I.lo_open ? "(" : "[") + num(I.lo) + ", " + num(I.hi) + (I.hi_open ? ")" : "]");
        }
        row(out, "J_lambda", js);
        row(out, "lambda_hat", maybe([&] { return lambda_hat(s, *lambda, 0.5 * kPi); }));
        row(out, "lambda_check", maybe([&] { return lambda_check(s, *lambda, 0.5 * kPi); }));
    }
    std::cout << out;
    return kPass;
}

int cmd_check_angles(int samples, std::uint64_t seed) {
    bool ok = true;
    std::printf("%-24s %8s %8s %14s %s\n", "regime", "checked", "rejected", "min_margin", "pass");
    for (AngleRegime r : {AngleRegime::always, AngleRegime::theta_B_acute, AngleRegime::beta_le_two_thirds_pi,
                          AngleRegime::theta_A_ge_beta}) {
        AngleSweep s = sweep_angle_inequality(r, samples, seed);
        std::printf("%-24s %8d %8d %14.6e %s\n", to_string(r), s.checked, s.rejected, s.min_margin,
                    s.pass ? "true" : "false");
        ok = ok && s.pass;
    }
    double worst = 0.0;
    for (int i = 0; i <= 100; ++i) worst = std::max(worst, std::abs(angle_gap_function(0.0, std::sqrt(3.0), 0.05 * i)));
    std::printf("gap_function(0, sqrt3, eps) max |value| %.3e\n", worst);
    ok = ok && worst <= 1e-12;
    return ok ? kPass : kCheckFailed;
}

int cmd_solve(const FieldFlags& ff, const std::string& out) {
    SolveResult r = solve_from_flags(ff);
    MeshQuality q = quality(*r.field.mesh);
    double umax = *std::max_element(r.field.values.begin(), r.field.values.end());
    std::printf("vertices %zu triangles %zu min_angle %.2f\n", q.n_vertices, q.n_triangles, q.min_angle_deg);
    std::printf("newton %d residual %.3e damping %d\n", r.report.newton_iterations, r.report.residual,
                r.report.damping_events);
    std::printf("min_interior %.6e max %.6e positive %s\n", r.report.min_interior, umax,
                r.report.positive ? "true" : "false");
    if (!out.empty()) write_atomic(out, field_to_json(r.field, r.report, NonlinearitySpec::parse(ff.f)));
    return kPass;
}

int cmd_audit(const FieldFlags& ff, std::vector<double> lambdas, const std::vector<double>& thetas,
              std::optional<double> tol, double c0, int fill, const std::string& out) {
    ScalarField u = field_from_flags(ff);
    AuditConfig cfg = default_audit_config(u, c0);
    if (ff.field.empty()) cfg.f = NonlinearitySpec::parse(ff.f);
    else cfg.f = field_fspec_from_json(read_file(ff.field));
    if (tol) cfg.fixed_tolerance = *tol;
    Sector s = field_sector(u);
    if (lambdas.empty())
        for (double t : {0.1, 0.25, 0.5, 0.75, 0.9}) lambdas.push_back(t * s.constants().lambda_max);
    for (double t : thetas)
        if (!(t > 0.0 && t <= kPi)) throw Error(ErrorCode::invalid_argument, "--theta must be radians in (0, pi]");
    SweepPolicy p;
    p.fill = fill;
    p.thetas = thetas;
    p.threads = threads_from_env();
    AuditReport rep = audit_sweep(u, lambdas, p, cfg);
    emit(out, rep.to_csv());
    int bad = 0;
    for (const auto& r : rep.rows) bad += r.expected_fail ? r.pass : !r.pass;
    std::fprintf(out.empty() ? stderr : stdout, "%zu rows, %d failing, tolerance %.3e\n", rep.rows.size(), bad,
                 cfg.tolerance());
    return rep.all_pass() ? kPass : kCheckFailed;
}

int cmd_sweep(const std::string& config_path, const std::string& out_flag) {
    RunConfig c = config_from_toml(read_file(config_path));
    if (!out_flag.empty()) c.out = out_flag;
    SweepOutcome o = run_sweep(c, threads_from_env());
    emit(c.out, o.csv);
    std::fprintf(c.out.empty() ? stderr : stdout, "%s\n", o.summary.c_str());
    return o.pass ? kPass : kCheckFailed;
}

int cmd_sobolev(std::vector<double> betas, bool failure, double c0, const std::string& out,
                const std::string& failure_out) {
    if (betas.empty()) betas = {kPi / 6, kPi / 3, kPi / 2};
    std::vector<SobolevRow> rows;
    bool ok = true;
    for (double b : betas) {
        if (!(b > 0.0 && b <= kPi)) throw Error(ErrorCode::invalid_argument, "--beta must be radians in (0, pi]");
        rows.push_back(sobolev_lower_bound(b));
        if (2.0 * b <= kPi) {
            SobolevRow d = sobolev_lower_bound(2.0 * b);
            bool mono = d.L <= rows.back().L * (1.0 + 1e-3);
            std::fprintf(stderr, "L(2 beta) <= L(beta): beta %.6g %.6g <= %.6g %s\n", b, d.L, rows.back().L,
                         mono ? "true" : "false");
            ok = ok && mono;
        }
    }
    emit(out, sobolev_csv(rows));
    if (failure) {
        std::vector<FailureMeasure> fm;
        for (double b : betas) fm.push_back(failure_measure(b, c0));
        emit(failure_out, failure_csv(fm));
    }
    return ok ? kPass : kCheckFailed;
}

int cmd_eigen(const FieldFlags& ff) {
    auto mesh = std::make_shared<const Mesh>(generate(ff.spec(), ff.h, ff.symmetric, ff.grading));
    EigenResult e = principal_eigenvalue(mesh);
    std::printf("lambda1 %.10g iterations %d\n", e.lambda1, e.iterations);
    if (ff.alpha == ff.beta) {
        double j0 = bessel_j0_first_zero();
        std::printf("j0^2 %.10g relative_error %.3e\n", j0 * j0, std::abs(e.lambda1 - j0 * j0) / (j0 * j0));
    }
    return kPass;
}

int cmd_plot(const std::string& field, const std::string& report, const std::string& kind, double tol,
             const std::string& out) {
    if (field.empty() == report.empty())
        throw Error(ErrorCode::invalid_argument, "give exactly one of --field and --report");
    std::string svg;
    if (!report.empty()) {
        svg = plot::margin_curves(read_file(report));
    } else {
        ScalarField u = field_from_json(read_file(field));
        if (kind == "heatmap")
            svg = plot::heatmap(u);
        else if (kind == "sign")
            svg = plot::sign_map_x1(u, tol);
        else
            throw Error(ErrorCode::invalid_argument, "--kind must be heatmap or sign");
    }
    emit(out, svg);
    return kPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solve and audit the mixed problem on sub-spherical sectors"};
    app.require_subcommand(1);

    auto* c_const = app.add_subcommand("constants", "derived constants and admissible angles");
    double ca = NAN, cb = NAN;
    std::optional<double> clam;
    c_const->add_option("--alpha", ca, "arc opening (radians)")->required();
    c_const->add_option("--beta", cb, "sector opening (radians)")->required();
    c_const->add_option("--lambda", clam, "pivot distance");

    auto* c_angles = app.add_subcommand("check-angles", "random sweep of the angle inequalities");
    int samples = 10000;
    std::uint64_t seed = 1;
    c_angles->add_option("--samples", samples)->check(CLI::PositiveNumber);
    c_angles->add_option("--seed", seed);

    FieldFlags solve_flags, audit_flags, eigen_flags;
    std::string out;
    auto* c_solve = app.add_subcommand("solve", "solve the semilinear problem and write the field");
    solve_flags.add(c_solve, false);
    c_solve->add_option("--out", out, "field JSON path");

    auto* c_audit = app.add_subcommand("audit", "moving-plane audit of a field");
    audit_flags.add(c_audit, true);
    std::vector<double> lambdas, thetas;
    std::optional<double> tol;
    double c0 = 25.0;
    int fill = 3;
    c_audit->add_option("--lambda", lambdas, "pivot distances")->delimiter(',');
    c_audit->add_option("--theta", thetas, "angles (radians)")->delimiter(',');
    c_audit->add_option("--tol", tol, "fixed tolerance instead of the calibrated one");
    c_audit->add_option("--c0", c0, "Lipschitz bound of f");
    c_audit->add_option("--fill", fill, "interior angles per admissible interval");
    c_audit->add_option("--out", out, "report CSV path");

    auto* c_sweep = app.add_subcommand("sweep", "grid sweep from a TOML config");
    std::string config;
    c_sweep->add_option("--config", config, "TOML run config")->required();
    c_sweep->add_option("--out", out, "report CSV path (overrides the config)");

    auto* c_sob = app.add_subcommand("sobolev", "Sobolev-ratio lower bounds and small-volume failure measures");
    std::vector<double> sbetas;
    bool failure = false;
    std::string failure_out;
    c_sob->add_option("--beta", sbetas, "openings (radians)")->delimiter(',');
    c_sob->add_flag("--failure", failure, "also bisect the failure measure");
    c_sob->add_option("--c0", c0, "coefficient bound");
    c_sob->add_option("--out", out, "Sobolev CSV path");
    c_sob->add_option("--failure-out", failure_out, "failure-measure CSV path");

    auto* c_eigen = app.add_subcommand("eigen", "principal eigenvalue of the mixed Laplacian");
    eigen_flags.add(c_eigen, false);

    auto* c_plot = app.add_subcommand("plot", "SVG heatmap, sign map or margin curves");
    std::string pfield, preport, kind = "heatmap";
    double ptol = 0.0;
    c_plot->add_option("--field", pfield, "field JSON");
    c_plot->add_option("--report", preport, "report CSV");
    c_plot->add_option("--kind", kind, "heatmap | sign");
    c_plot->add_option("--tol", ptol, "grey band for the sign map");
    c_plot->add_option("--out", out, "SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error("usage", e.what(), kUsage);
    }

    try {
        if (*c_const) return cmd_constants(ca, cb, clam);
        if (*c_angles) return cmd_check_angles(samples, seed);
        if (*c_solve) return cmd_solve(solve_flags, out);
        if (*c_audit) return cmd_audit(audit_flags, lambdas, thetas, tol, c0, fill, out);
        if (*c_sweep) return cmd_sweep(config, out);
        if (*c_sob) return cmd_sobolev(sbetas, failure, c0, out, failure_out);
        if (*c_eigen) return cmd_eigen(eigen_flags);
        if (*c_plot) return cmd_plot(pfield, preport, kind, ptol, out);
    } catch (const Error& e) {
        return report_error(to_string(e.code()), e.what(), exit_for(e.code()));
    } catch (const std::exception& e) {
        return report_error("internal", e.what(), kInternal);
    }
    return kUsage;
}
