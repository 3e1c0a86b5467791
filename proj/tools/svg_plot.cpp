#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <vector>

#include "sectorsym/error.hpp"

namespace sectorsym::plot {

namespace {

constexpr double kW = 640.0, kH = 480.0, kPad = 40.0;

struct Frame {
    double x0, y0, s;
    double X(double x) const { return kPad + (x - x0) * s; }
    double Y(double y) const { return kH - kPad - (y - y0) * s; }
};

Frame fit(const Mesh& m) {
    double xl = 1e300, xh = -1e300, yl = 1e300, yh = -1e300;
    for (Vec2 v : m.vertices()) {
        xl = std::min(xl, v.x);
        xh = std::max(xh, v.x);
        yl = std::min(yl, v.y);
        yh = std::max(yh, v.y);
    }
    double s = std::min((kW - 2 * kPad) / std::max(xh - xl, 1e-12), (kH - 2 * kPad) / std::max(yh - yl, 1e-12));
    return {xl, yl, s};
}

// Piecewise-linear blue-green-yellow ramp on [0, 1].
std::string ramp(double t) {
    t = std::clamp(t, 0.0, 1.0);
    static const double c[3][3] = {{68, 1, 84}, {33, 145, 140}, {253, 231, 37}};
    int i = t < 0.5 ? 0 : 1;
    double f = t < 0.5 ? 2 * t : 2 * t - 1;
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(c[i][0] + f * (c[i + 1][0] - c[i][0])),
                  static_cast<int>(c[i][1] + f * (c[i + 1][1] - c[i][1])),
                  static_cast<int>(c[i][2] + f * (c[i + 1][2] - c[i][2])));
    return buf;
}

std::string open_svg(const std::string& title) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" viewBox=\"0 0 %g %g\">\n"
                  "<rect width=\"100%%\" height=\"100%%\" fill=\"white\"/>\n",
                  kW, kH, kW, kH);
    std::string s = buf;
    s += "<text x=\"" + std::to_string(static_cast<int>(kPad)) + "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" +
         title + "</text>\n";
    return s;
}

template <class Colour>
std::string triangles(const ScalarField& u, const std::string& title, Colour colour) {
    const Mesh& m = *u.mesh;
    Frame f = fit(m);
    std::string s = open_svg(title);
    char buf[256];
    for (int t = 0; t < static_cast<int>(m.triangles().size()); ++t) {
        const auto& v = m.triangles()[t];
        Vec2 a = m.vertices()[v[0]], b = m.vertices()[v[1]], c = m.vertices()[v[2]];
        std::string col = colour(t);
        std::snprintf(buf, sizeof buf, "<polygon points=\"%.2f,%.2f %.2f,%.2f %.2f,%.2f\" fill=\"%s\" stroke=\"%s\" stroke-width=\"0.2\"/>\n",
                      f.X(a.x), f.Y(a.y), f.X(b.x), f.Y(b.y), f.X(c.x), f.Y(c.y), col.c_str(), col.c_str());
        s += buf;
    }
    return s + "</svg>\n";
}

}  // namespace

std::string heatmap(const ScalarField& u) {
    auto [lo, hi] = std::minmax_element(u.values.begin(), u.values.end());
    const double a = *lo, span = std::max(*hi - *lo, 1e-300);
    char title[128];
    std::snprintf(title, sizeof title, "u, range [%.4g, %.4g]", *lo, *hi);
    return triangles(u, title, [&](int t) {
        const auto& v = u.mesh->triangles()[t];
        double mean = (u.values[v[0]] + u.values[v[1]] + u.values[v[2]]) / 3.0;
        return ramp((mean - a) / span);
    });
}

std::string sign_map_x1(const ScalarField& u, double tol) {
    char title[128];
    std::snprintf(title, sizeof title, "sign of u_x1 (tol %.3g)", tol);
    return triangles(u, title, [&](int t) {
        double g = element_gradient(u, t).x;
        return std::string(g < -tol ? "#3b6fb6" : g > tol ? "#c0392b" : "#bbbbbb");
    });
}

std::string margin_curves(const std::string& csv) {
    std::map<std::string, std::map<double, double>> series;
    std::istringstream is(csv);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("check_id,", 0) == 0) continue;
        std::vector<std::string> f;
        std::size_t pos = 0;
        for (int k = 0; k < 10; ++k) {
            std::size_t c = line.find(',', pos);
            if (c == std::string::npos) break;
            f.push_back(line.substr(pos, c - pos));
            pos = c + 1;
        }
        if (f.size() < 10) throw Error(ErrorCode::parse, "report row with fewer than 11 columns");
        double lambda = std::stod(f[3]), viol = std::stod(f[7]), tol = std::stod(f[8]);
        auto& s = series[f[0]];
        auto it = s.find(lambda);
        double m = viol - tol;
        if (it == s.end() || m > it->second) s[lambda] = m;
    }
    if (series.empty()) throw Error(ErrorCode::parse, "no report rows");
    double xl = 1e300, xh = -1e300, yl = 0.0, yh = 0.0;
    for (const auto& [id, s] : series)
        for (const auto& [x, y] : s) {
            xl = std::min(xl, x);
            xh = std::max(xh, x);
            yl = std::min(yl, y);
            yh = std::max(yh, y);
        }
    if (xh <= xl) xh = xl + 1.0;
    if (yh <= yl) yh = yl + 1.0;
    auto X = [&](double x) { return kPad + (x - xl) / (xh - xl) * (kW - 3 * kPad - 120); };
    auto Y = [&](double y) { return kH - kPad - (y - yl) / (yh - yl) * (kH - 2 * kPad); };
    std::string s = open_svg("max violation - tolerance vs lambda");
    char buf[256];
    std::snprintf(buf, sizeof buf, "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n",
                  X(xl), Y(0.0), X(xh), Y(0.0));
    s += buf;
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    int k = 0;
    for (const auto& [id, ser] : series) {
        const char* col = palette[k % 10];
        std::string pts;
        for (const auto& [x, y] : ser) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(x), Y(y));
            pts += buf;
        }
        s += "<polyline fill=\"none\" stroke=\"" + std::string(col) + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\" fill=\"%s\">%s</text>\n",
                      kW - 2 * kPad - 100, kPad + 14.0 * (k + 1), col, id.c_str());
        s += buf;
        ++k;
    }
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\">lambda in [%.3g, %.3g], margin in [%.3g, %.3g]</text>\n",
                  kPad, kH - 12.0, xl, xh, yl, yh);
    s += buf;
    return s + "</svg>\n";
}

}  // namespace sectorsym::plot
