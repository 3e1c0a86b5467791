#include "sectorsym/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>
#include <toml.hpp>

#include "sectorsym/error.hpp"

namespace sectorsym {

using nlohmann::json;

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error(ErrorCode::io, "cannot open " + tmp.string());
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        os.flush();
        if (!os) throw Error(ErrorCode::io, "write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorCode::io, "cannot rename into " + path);
    }
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorCode::io, "cannot read " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

namespace {

json vec(Vec2 v) { return json::array({v.x, v.y}); }
Vec2 vec(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json mesh_json(const Mesh& m) {
    json j;
    const MeshDomain& d = m.domain();
    j["domain"] = {{"beta", d.beta},
                   {"arc_center", vec(d.arc_center)},
                   {"radius", d.radius},
                   {"arc_half_angle", d.arc_half_angle},
                   {"p_plus", vec(d.p_plus)},
                   {"p_minus", vec(d.p_minus)}};
    if (m.spec()) j["spec"] = {{"alpha", m.spec()->alpha}, {"beta", m.spec()->beta}};
    j["h"] = m.h();
    j["symmetric"] = m.symmetric();
    j["grading"] = m.grading();
    json vs = json::array();
    for (Vec2 v : m.vertices()) vs.push_back(vec(v));
    j["vertices"] = std::move(vs);
    json ts = json::array();
    for (const auto& t : m.triangles()) ts.push_back({t[0], t[1], t[2]});
    j["triangles"] = std::move(ts);
    json bs = json::array();
    for (const auto& e : m.boundary_edges()) bs.push_back({{"v0", e.v0}, {"v1", e.v1}, {"tag", to_string(e.tag)}});
    j["boundary_edges"] = std::move(bs);
    return j;
}

Mesh mesh_of(const json& j) {
    const json& d = j.at("domain");
    MeshDomain dom;
    dom.beta = d.at("beta").get<double>();
    dom.arc_center = vec(d.at("arc_center"));
    dom.radius = d.at("radius").get<double>();
    dom.arc_half_angle = d.at("arc_half_angle").get<double>();
    dom.p_plus = vec(d.at("p_plus"));
    dom.p_minus = vec(d.at("p_minus"));
    std::optional<SectorSpec> spec;
    if (j.contains("spec")) spec = SectorSpec{j["spec"].at("alpha").get<double>(), j["spec"].at("beta").get<double>()};
    std::vector<Vec2> vs;
    for (const auto& v : j.at("vertices")) vs.push_back(vec(v));
    std::vector<std::array<int, 3>> ts;
    for (const auto& t : j.at("triangles")) ts.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>()});
    std::vector<BoundaryEdge> bs;
    for (const auto& e : j.at("boundary_edges"))
        bs.push_back({e.at("v0").get<int>(), e.at("v1").get<int>(),
                      boundary_tag_from_string(e.at("tag").get<std::string>())});
    const int n = static_cast<int>(vs.size());
    for (const auto& t : ts)
        for (int k : t)
            if (k < 0 || k >= n) throw Error(ErrorCode::parse, "triangle index out of range");
    for (const auto& e : bs)
        if (e.v0 < 0 || e.v0 >= n || e.v1 < 0 || e.v1 >= n) throw Error(ErrorCode::parse, "edge index out of range");
    return Mesh(dom, spec, std::move(vs), std::move(ts), std::move(bs), j.at("h").get<double>(),
                j.at("symmetric").get<bool>(), j.at("grading").get<double>());
}

template <class F>
auto parse_json(const std::string& text, F&& f) {
    try {
        return f(json::parse(text));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::parse, std::string("malformed JSON: ") + e.what());
    }
}

}  // namespace

std::string mesh_to_json(const Mesh& mesh) { return mesh_json(mesh).dump() + "\n"; }

Mesh mesh_from_json(const std::string& text) {
    return parse_json(text, [](const json& j) { return mesh_of(j); });
}

std::string field_to_json(const ScalarField& u, const std::optional<SolveReport>& report,
                          const std::optional<NonlinearitySpec>& fspec) {
    json j;
    j["mesh"] = mesh_json(*u.mesh);
    j["values"] = u.values;
    if (fspec) j["fspec"] = fspec->to_string();
    if (report) {
        j["solve_report"] = {{"newton_iterations", report->newton_iterations},
                       {"residual", report->residual},
                       {"residual_history", report->residual_history},
                       {"damping_events", report->damping_events},
                       {"min_interior", report->min_interior},
                       {"positive", report->positive}};
    }
    return j.dump() + "\n";
}

ScalarField field_from_json(const std::string& text) {
    return parse_json(text, [](const json& j) {
        ScalarField u;
        u.mesh = std::make_shared<const Mesh>(mesh_of(j.at("mesh")));
        u.values = j.at("values").get<std::vector<double>>();
        if (u.values.size() != u.mesh->vertices().size())
            throw Error(ErrorCode::parse, "value count does not match the mesh");
        return u;
    });
}

std::optional<NonlinearitySpec> field_fspec_from_json(const std::string& text) {
    return parse_json(text, [](const json& j) -> std::optional<NonlinearitySpec> {
        if (!j.contains("fspec")) return std::nullopt;
        return NonlinearitySpec::parse(j["fspec"].get<std::string>());
    });
}

// ---------------------------------------------------------------------------
// TOML

namespace {

toml::array to_array(const std::vector<double>& v) {
    toml::array a;
    for (double x : v) a.push_back(x);
    return a;
}

std::vector<double> doubles(const toml::table& t, const char* key, const std::vector<double>& dflt) {
    const toml::node* n = t.get(key);
    if (!n) return dflt;
    const toml::array* a = n->as_array();
    if (!a) throw Error(ErrorCode::parse, std::string(key) + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : *a) {
        auto v = e.value<double>();
        if (!v) throw Error(ErrorCode::parse, std::string(key) + " must be an array of numbers");
        out.push_back(*v);
    }
    return out;
}

double number(const toml::table& t, const char* key, double dflt) {
    const toml::node* n = t.get(key);
    if (!n) return dflt;
    auto v = n->value<double>();
    if (!v) throw Error(ErrorCode::parse, std::string(key) + " must be a number");
    return *v;
}

void reject_degrees(const std::vector<double>& v, const char* key) {
    for (double x : v)
        if (x > kPi + 1e-12 || x < 0.0)
            throw Error(ErrorCode::parse, std::string(key) + " must be radians in [0, pi]; degrees are not accepted");
}

}  // namespace

std::string config_to_toml(const RunConfig& c) {
    toml::table t;
    t.insert("command", c.command);
    t.insert("alphas", to_array(c.alphas));
    t.insert("betas", to_array(c.betas));
    t.insert("lambda_factors", to_array(c.lambda_factors));
    t.insert("thetas", to_array(c.thetas));
    t.insert("h", c.h);
    t.insert("symmetric", c.symmetric);
    t.insert("grading", c.grading);
    t.insert("f", c.f.to_string());
    if (c.tol) t.insert("tol", *c.tol);
    t.insert("c0", c.c0);
    t.insert("fill", static_cast<int64_t>(c.fill));
    t.insert("seed", static_cast<int64_t>(c.seed));
    t.insert("out", c.out);
    std::ostringstream os;
    os << t << "\n";
    return os.str();
}

RunConfig config_from_toml(const std::string& text) {
    toml::table t;
    try {
        t = toml::parse(text);
    } catch (const toml::parse_error& e) {
        throw Error(ErrorCode::parse, std::string("malformed TOML: ") + std::string(e.description()));
    }
    static const char* known[] = {"command", "alphas", "betas",  "lambda_factors", "thetas", "h",    "symmetric",
                                  "grading", "f",      "tol",    "c0",             "fill",   "seed", "out"};
    for (const auto& [k, v] : t) {
        (void)v;
        bool ok = false;
        for (const char* q : known) ok = ok || k.str() == q;
        if (!ok) throw Error(ErrorCode::parse, "unknown config key: " + std::string(k.str()));
    }
    RunConfig c;
    c.command = t["command"].value_or(c.command);
    c.alphas = doubles(t, "alphas", c.alphas);
    c.betas = doubles(t, "betas", c.betas);
    c.lambda_factors = doubles(t, "lambda_factors", c.lambda_factors);
    c.thetas = doubles(t, "thetas", c.thetas);
    reject_degrees(c.alphas, "alphas");
    reject_degrees(c.betas, "betas");
    reject_degrees(c.thetas, "thetas");
    c.h = number(t, "h", c.h);
    c.symmetric = t["symmetric"].value_or(c.symmetric);
    c.grading = number(t, "grading", c.grading);
    if (auto f = t["f"].value<std::string>()) c.f = NonlinearitySpec::parse(*f);
    if (t.contains("tol")) c.tol = number(t, "tol", 0.0);
    c.c0 = number(t, "c0", c.c0);
    c.fill = static_cast<int>(t["fill"].value_or(static_cast<int64_t>(c.fill)));
    c.seed = static_cast<std::uint64_t>(t["seed"].value_or(static_cast<int64_t>(c.seed)));
    c.out = t["out"].value_or(c.out);
    return c;
}

}  // namespace sectorsym
