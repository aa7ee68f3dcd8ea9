#include "cslrot/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "cslrot/bounds.hpp"
#include "cslrot/errors.hpp"
#include "cslrot/langevin.hpp"
#include "cslrot/optimizer.hpp"

namespace cslrot {

std::string trim(std::string_view s) {
    auto issp = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    std::size_t a = 0, b = s.size();
    while (a < b && issp(s[a])) ++a;
    while (b > a && issp(s[b - 1])) --b;
    return std::string(s.substr(a, b - a));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i)
        if (i == s.size() || s[i] == sep) {
            out.emplace_back(s.substr(start, i - start));
            start = i + 1;
        }
    return out;
}

std::optional<double> parse_double(std::string_view s) {
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

void Metadata::set(const std::string& key, const std::string& value) {
    for (auto& kv : entries_)
        if (kv.first == key) {
            kv.second = value;
            return;
        }
    entries_.emplace_back(key, value);
}

std::string Metadata::csv_comment() const {
    std::string out;
    for (const auto& [k, v] : entries_) out += "# " + k + ": " + v + "\n";
    return out;
}

nlohmann::json Metadata::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : entries_) j[k] = v;
    return j;
}

Metadata base_metadata(const std::string& command) {
    Metadata m;
    m.set("tool", kToolName);
    m.set("version", kToolVersion);
    m.set("command", command);
    m.set("spectral_convention", "two-sided: S(w) = int ds e^{-iws} E[x(t) x(t+s)]");
    m.set("thermal_floor", "S_th = 4 kB T gamma I (or preset override)");
    m.set("kernel_sign", "angular factor exp(+r r' cos(dtheta) / (2 rc^2))");
    m.set("analysis_band_hz", "2e-3:1e-1");
    return m;
}

void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!dir.empty()) std::filesystem::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write output file '" + path.string() + "'");
    out << content;
    out.flush();
    if (!out) throw InputError("failed writing output file '" + path.string() + "'");
}

namespace {

std::string join_flags(const std::vector<std::string>& flags) {
    std::string s;
    for (const auto& f : flags) s += (s.empty() ? "" : ";") + f;
    return s.empty() ? "ok" : s;
}

}  // namespace

std::string bound_curve_csv(const BoundCurve& c, const Metadata& meta) {
    std::string out = meta.csv_comment();
    out += "rc_m,lambda_max_s^-1,p_factor,y_factor,flags\n";
    for (const auto& p : c.points) {
        out += format_double(p.rc) + ",";
        out += p.lambda_max ? format_double(*p.lambda_max) : std::string("unbounded");
        out += "," + format_double(p.p_factor) + "," + format_double(p.y_factor) + "," +
               join_flags(p.flags) + "\n";
    }
    return out;
}

nlohmann::json bound_curve_json(const BoundCurve& c, const Metadata& meta) {
    nlohmann::json j;
    j["metadata"] = meta.to_json();
    j["geometry_id"] = c.geometry_id;
    j["s_th"] = c.s_th;
    j["convention"] = c.convention;
    j["band_hz"] = {c.band_low_hz, c.band_high_hz};
    if (c.omega_c) j["omega_c"] = *c.omega_c;
    auto& pts = j["points"] = nlohmann::json::array();
    for (const auto& p : c.points) {
        nlohmann::json e;
        e["rc_m"] = p.rc;
        if (p.lambda_max)
            e["lambda_max"] = *p.lambda_max;
        else
            e["lambda_max"] = "unbounded";
        e["p_factor"] = p.p_factor;
        e["y_factor"] = p.y_factor;
        e["flags"] = p.flags;
        if (!p.error.empty()) e["error"] = p.error;
        pts.push_back(e);
    }
    return j;
}

std::string scan_csv(const ScanResult& s, const Metadata& meta) {
    std::string out = meta.csv_comment();
    out += "axis,objective,r_solved,flags\n";
    for (const auto& p : s.points)
        out += format_double(p.axis) + "," + format_double(p.objective) + "," +
               format_double(p.r_inner) + "," + p.flags + "\n";
    return out;
}

nlohmann::json scan_json(const ScanResult& s, const Metadata& meta) {
    nlohmann::json j;
    j["metadata"] = meta.to_json();
    j["axis"] = s.axis_name;
    j["objective"] = s.objective_name;
    j["fixed"] = {{"n", s.fixed.n},       {"epsilon", s.fixed.epsilon}, {"inertia", s.fixed.inertia},
                  {"rc", s.fixed.rc},     {"rho", s.fixed.rho},         {"delta_rho", s.fixed.delta_rho},
                  {"h", s.fixed.height},  {"alpha", s.fixed.alpha}};
    auto& pts = j["points"] = nlohmann::json::array();
    for (const auto& p : s.points)
        pts.push_back({{"axis", p.axis}, {"objective", p.objective}, {"r_solved", p.r_inner},
                       {"flags", p.flags}});
    std::size_t best = s.argmax();
    if (best < s.points.size()) j["argmax"] = s.points[best].axis;
    return j;
}

nlohmann::json optimization_json(const OptimizationResult& r, const Metadata& meta) {
    auto entry = [](const TraceEntry& t) {
        return nlohmann::json{{"n", t.n},       {"epsilon", t.epsilon}, {"alpha", t.alpha},
                              {"h", t.h},       {"r", t.r},             {"R", t.R},
                              {"objective", std::isfinite(t.objective) ? nlohmann::json(t.objective)
                                                                       : nlohmann::json("infeasible")},
                              {"stage", t.stage}};
    };
    nlohmann::json j;
    j["metadata"] = meta.to_json();
    j["best"] = entry(r.best);
    j["evaluations"] = r.evaluations;
    j["budget_exhausted"] = r.budget_exhausted;
    auto& tr = j["trace"] = nlohmann::json::array();
    for (const auto& t : r.trace) tr.push_back(entry(t));
    return j;
}

std::string trajectory_csv(const Trajectory& t, const Metadata& meta) {
    std::string out = meta.csv_comment();
    out += "t_s,theta_rad,L_kg_m2_s\n";
    for (std::size_t i = 0; i < t.theta.size(); ++i)
        out += format_double(t.dt * static_cast<double>(i)) + "," + format_double(t.theta[i]) + "," +
               format_double(t.momentum[i]) + "\n";
    return out;
}

std::string psd_csv(const std::vector<double>& omega, const std::vector<double>& psd,
                    const std::vector<double>& se, const Metadata& meta) {
    std::string out = meta.csv_comment();
    out += "omega_rad_s,psd,stderr\n";
    for (std::size_t i = 0; i < omega.size(); ++i)
        out += format_double(omega[i]) + "," + format_double(psd[i]) + "," + format_double(se[i]) + "\n";
    return out;
}

nlohmann::json validation_json(const ValidationReport& r, const Metadata& meta) {
    nlohmann::json j;
    j["metadata"] = meta.to_json();
    j["pass"] = r.pass;
    j["fraction_within"] = r.fraction_within;
    j["intensity"] = r.intensity;
    j["segment_length"] = r.segment_length;
    j["trajectories"] = r.trajectories;
    j["generator"] = r.generator;
    j["scheme"] = r.scheme;
    j["variance"] = {{"measured", r.variance_measured},
                     {"stderr", r.variance_stderr},
                     {"expected", r.variance_expected},
                     {"z", r.variance_z}};
    auto& bins = j["bins"] = nlohmann::json::array();
    for (const auto& b : r.bins)
        bins.push_back({{"omega", b.omega}, {"estimate", b.estimate}, {"stderr", b.stderr_abs},
                        {"analytic", b.analytic}, {"z", b.z}});
    return j;
}

std::string overlay_csv(const std::vector<OverlayCurve>& curves, const Metadata& meta) {
    std::string out = meta.csv_comment();
    out += "label,rc_m,lambda_s^-1\n";
    for (const auto& c : curves)
        for (const auto& [rc, lam] : c.points) out += c.label + "," + format_double(rc) + "," + format_double(lam) + "\n";
    return out;
}

std::string svg_line_plot(const std::vector<PlotSeries>& series, const PlotAxes& axes) {
    const double W = 720, H = 480, L = 80, R = 160, T = 40, B = 60;
    auto tx = [&](double v) { return axes.log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return axes.log_y ? std::log10(v) : v; };
    auto usable = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && (!axes.log_x || x > 0) && (!axes.log_y || y > 0);
    };
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
            if (usable(s.x[i], s.y[i])) {
                x0 = std::min(x0, tx(s.x[i]));
                x1 = std::max(x1, tx(s.x[i]));
                y0 = std::min(y0, ty(s.y[i]));
                y1 = std::max(y1, ty(s.y[i]));
            }
    if (!(x1 >= x0)) x0 = 0, x1 = 1;
    if (!(y1 >= y0)) y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    if (axes.log_x) x0 = std::floor(x0), x1 = std::ceil(x1);
    if (axes.log_y) y0 = std::floor(y0), y1 = std::ceil(y1);
    auto px = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - T - B); };

    static const char* colors[] = {"#c0392b", "#2c3e50", "#8e44ad", "#27ae60", "#d35400", "#2980b9"};
    std::ostringstream o;
    char buf[128];
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    auto tick_label = [](double v, bool log) {
        char b[32];
        if (log)
            std::snprintf(b, sizeof b, "1e%d", static_cast<int>(std::lround(v)));
        else
            std::snprintf(b, sizeof b, "%.3g", v);
        return std::string(b);
    };
    int nx = axes.log_x ? static_cast<int>(x1 - x0) : 5;
    int ny = axes.log_y ? static_cast<int>(y1 - y0) : 5;
    for (int i = 0; i <= nx; ++i) {
        double v = x0 + (x1 - x0) * i / nx;
        double p = L + (v - x0) / (x1 - x0) * (W - L - R);
        std::snprintf(buf, sizeof buf, "%.1f", p);
        o << "<line x1=\"" << buf << "\" y1=\"" << H - B << "\" x2=\"" << buf << "\" y2=\"" << H - B + 5
          << "\" stroke=\"black\"/><text x=\"" << buf << "\" y=\"" << H - B + 20
          << "\" font-size=\"11\" text-anchor=\"middle\">" << tick_label(v, axes.log_x) << "</text>\n";
    }
    for (int i = 0; i <= ny; ++i) {
        double v = y0 + (y1 - y0) * i / ny;
        double p = H - B - (v - y0) / (y1 - y0) * (H - T - B);
        std::snprintf(buf, sizeof buf, "%.1f", p);
        o << "<line x1=\"" << L - 5 << "\" y1=\"" << buf << "\" x2=\"" << L << "\" y2=\"" << buf
          << "\" stroke=\"black\"/><text x=\"" << L - 8 << "\" y=\"" << buf
          << "\" font-size=\"11\" text-anchor=\"end\">" << tick_label(v, axes.log_y) << "</text>\n";
    }
    o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">" << axes.x_label
      << "</text>\n";
    o << "<text x=\"20\" y=\"" << (T + H - B) / 2 << "\" transform=\"rotate(-90 20 " << (T + H - B) / 2
      << ")\" text-anchor=\"middle\">" << axes.y_label << "</text>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"25\" text-anchor=\"middle\">" << axes.title << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* col = colors[s % 6];
        o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series[s].x.size() && i < series[s].y.size(); ++i) {
            if (!usable(series[s].x[i], series[s].y[i])) continue;
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(series[s].x[i]), py(series[s].y[i]));
            o << buf;
        }
        o << "\"/>\n";
        o << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 20 + 18 * s << "\" font-size=\"12\" fill=\"" << col
          << "\">" << series[s].label << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace cslrot
