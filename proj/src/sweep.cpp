#include "sectorsym/sweep.hpp"

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <thread>

namespace sectorsym {

namespace {

SweepEntry run_entry(const RunConfig& c, SectorSpec spec) {
    SweepEntry e;
    e.spec = spec;
    e.exploratory = spec.beta > kExploratoryBeta + 1e-12;
    auto mesh = std::make_shared<const Mesh>(generate(spec, c.h, c.symmetric, c.grading));
    SolveOptions opts;
    if (c.f.kind == NonlinearitySpec::Kind::power) opts.initial_guess = scaled_guess(mesh, c.f);
    SolveResult sol = solve_semilinear(mesh, c.f, opts);
    e.solve = sol.report;
    AuditConfig cfg = default_audit_config(sol.field, c.c0);
    cfg.f = c.f;
    if (c.tol) cfg.fixed_tolerance = *c.tol;
    const Sector s(spec);
    std::vector<double> lambdas;
    for (double t : c.lambda_factors) lambdas.push_back(t * s.constants().lambda_max);
    SweepPolicy p;
    p.fill = c.fill;
    p.thetas = c.thetas;
    e.report = audit_sweep(sol.field, lambdas, p, cfg);
    return e;
}

}  // namespace

int threads_from_env() {
    if (const char* v = std::getenv("SECTOR_SYMMETRY_THREADS")) {
        char* end = nullptr;
        long n = std::strtol(v, &end, 10);
        if (end != v && *end == '\0' && n > 0) return static_cast<int>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

SweepOutcome run_sweep(const RunConfig& c, int threads) {
    std::vector<SectorSpec> specs;
    for (double a : c.alphas)
        for (double b : c.betas)
            if (b < a) specs.push_back({a, b});
    SweepOutcome out;
    out.entries.resize(specs.size());
    const int nt = std::max(1, std::min<int>(threads, static_cast<int>(specs.size())));
    std::vector<std::exception_ptr> errs(nt);
    auto work = [&](int id) {
        try {
            for (std::size_t i = id; i < specs.size(); i += nt) out.entries[i] = run_entry(c, specs[i]);
        } catch (...) {
            errs[id] = std::current_exception();
        }
    };
    if (nt == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nt; ++i) pool.emplace_back(work, i);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);

    char buf[512];
    std::snprintf(buf, sizeof buf, "# h=%.17g\n# grading=%.17g\n# symmetric=%s\n# f=%s\n# c0=%.17g\n# seed=%llu\n", c.h,
                  c.grading, c.symmetric ? "true" : "false", c.f.to_string().c_str(), c.c0,
                  static_cast<unsigned long long>(c.seed));
    out.csv = buf;
    for (std::size_t i = 0; i < out.entries.size(); ++i) {
        const auto& e = out.entries[i];
        std::snprintf(buf, sizeof buf, "# entry=%zu alpha=%.17g beta=%.17g kappa=%.17g newton=%d exploratory=%s\n", i,
                      e.spec.alpha, e.spec.beta, e.report.kappa, e.solve.newton_iterations,
                      e.exploratory ? "true" : "false");
        out.csv += buf;
    }
    bool header = true;
    for (const auto& e : out.entries) {
        std::string t = e.report.to_csv();
        // keep the column line once, drop the per-report "#" lines
        std::size_t pos = 0;
        while (pos < t.size()) {
            std::size_t nl = t.find('\n', pos);
            std::string line = t.substr(pos, nl - pos + 1);
            pos = nl + 1;
            if (line[0] == '#') continue;
            if (line.rfind("check_id,", 0) == 0) {
                if (!header) continue;
                header = false;
            }
            out.csv += line;
        }
        for (const auto& r : e.report.rows) {
            bool ok = r.expected_fail ? !r.pass : r.pass;
            if (e.exploratory) {
                out.exploratory_failed_rows += !ok;
                continue;
            }
            ++out.checked_rows;
            out.failed_rows += !ok;
        }
    }
    out.pass = out.failed_rows == 0 && out.checked_rows > 0;
    if (out.pass)
        std::snprintf(buf, sizeof buf, "all symmetry and monotonicity checks pass (%zu entries, %d rows)",
                      out.entries.size(), out.checked_rows);
    else if (out.checked_rows == 0)
        std::snprintf(buf, sizeof buf, "no checks ran");
    else
        std::snprintf(buf, sizeof buf, "%d of %d checks failed", out.failed_rows, out.checked_rows);
    out.summary = buf;
    int n_expl = 0;
    for (const auto& e : out.entries) n_expl += e.exploratory;
    if (n_expl > 0) {
        std::snprintf(buf, sizeof buf, "; exploratory entries (beta > 2pi/3): %d, failing rows %d", n_expl,
                      out.exploratory_failed_rows);
        out.summary += buf;
    }
    return out;
}

}  // namespace sectorsym
