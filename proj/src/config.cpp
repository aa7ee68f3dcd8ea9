#include "cslrot/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstring>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cslrot/bounds.hpp"
#include "cslrot/io.hpp"

namespace cslrot {
namespace {

struct Entry {
    std::string value;
    int line = 0;
    int value_col = 0;
    int key_col = 0;
};

using Section = std::map<std::string, Entry>;

class Reader {
public:
    Reader(std::string source, std::map<std::string, Section> sections)
        : source_(std::move(source)), sections_(std::move(sections)) {}

    [[noreturn]] void fail(const Entry& e, int col, const std::string& msg) const {
        throw ConfigError(source_ + ":" + std::to_string(e.line) + ":" + std::to_string(col) + ": " + msg);
    }

    bool has(const std::string& sec, const std::string& key) const {
        auto s = sections_.find(sec);
        return s != sections_.end() && s->second.count(key);
    }

    const Entry* find(const std::string& sec, const std::string& key) {
        auto s = sections_.find(sec);
        if (s == sections_.end()) return nullptr;
        auto it = s->second.find(key);
        if (it == s->second.end()) return nullptr;
        used_.insert(sec + "." + key);
        return &it->second;
    }

    double number(const Entry& e, const std::string& key) const {
        auto v = parse_double(e.value);
        if (!v) {
            // A number followed by letters is almost always a unit.
            std::size_t i = 0;
            while (i < e.value.size() && (std::isdigit(static_cast<unsigned char>(e.value[i])) ||
                                          std::strchr("+-.eE", e.value[i])))
                ++i;
            if (i > 0 && i < e.value.size() && parse_double(e.value.substr(0, i)))
                fail(e, e.value_col + static_cast<int>(i),
                     "unit suffix '" + e.value.substr(i) + "' on '" + key + "' (numbers are bare SI)");
            fail(e, e.value_col, "expected a number for '" + key + "', got '" + e.value + "'");
        }
        return *v;
    }

    std::optional<double> opt_number(const std::string& sec, const std::string& key) {
        const Entry* e = find(sec, key);
        if (!e) return std::nullopt;
        return number(*e, key);
    }

    double req_number(const std::string& sec, const std::string& key, const std::string& why) {
        const Entry* e = find(sec, key);
        if (!e) throw ConfigError(source_ + ": [" + sec + "] missing required key '" + key + "' (" + why + ")");
        return number(*e, key);
    }

    long long integer(const Entry& e, const std::string& key) const {
        double v = number(e, key);
        if (v != std::floor(v) || std::abs(v) > 9.0e15) fail(e, e.value_col, "'" + key + "' must be an integer");
        return static_cast<long long>(v);
    }

    std::optional<long long> opt_integer(const std::string& sec, const std::string& key) {
        const Entry* e = find(sec, key);
        if (!e) return std::nullopt;
        return integer(*e, key);
    }

    void check_unused() const {
        for (const auto& [sec, entries] : sections_)
            for (const auto& [key, e] : entries)
                if (!used_.count(sec + "." + key)) fail(e, e.key_col, "unknown key '" + key + "' in [" + sec + "]");
    }

    const std::string& source() const { return source_; }

private:
    std::string source_;
    std::map<std::string, Section> sections_;
    std::set<std::string> used_;
};

MassModel parse_geometry(Reader& rd, const std::string& type, const Entry& where) {
    const std::string g = "geometry";
    const std::string why = "needed by type " + type;
    auto num = [&](const char* k) { return rd.req_number(g, k, why); };
    auto integ = [&](const char* k) {
        const Entry* e = rd.find(g, k);
        if (!e) throw ConfigError(rd.source() + ": [geometry] missing required key '" + k + "' (" + why + ")");
        return static_cast<int>(rd.integer(*e, k));
    };
    if (type == "homogeneous_disk") return HomogeneousDisk{num("rho"), num("radius"), num("height")};
    if (type == "periodic_annulus")
        return PeriodicAnnulus{num("rho"),         num("delta_rho"), num("r_inner"), num("r_outer"),
                               integ("n_sectors"), num("alpha"),     num("height")};
    if (type == "two_annuli")
        return TwoAnnuli{num("rho"),
                         num("delta_rho"),
                         num("r_core"),
                         num("r_outer_total"),
                         SectorRing{num("inner_r_inner"), num("inner_r_outer"), integ("inner_n_sectors")},
                         SectorRing{num("outer_r_inner"), num("outer_r_outer"), integ("outer_n_sectors")},
                         num("height")};
    if (type == "half_cylinder") return HalfCylinder{num("rho"), num("delta_rho"), num("radius"), num("height")};
    rd.fail(where, where.value_col,
            "unknown geometry type '" + type +
                "' (expected homogeneous_disk, periodic_annulus, two_annuli, half_cylinder)");
}

std::string fmt(double v) { return format_double(v); }

}  // namespace

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.string());
}

RunConfig parse_config_text(const std::string& text, const std::string& source) {
    static const std::set<std::string> known{"geometry", "csl", "noise", "run"};
    std::map<std::string, Section> sections;
    std::string current;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    auto fail = [&](int col, const std::string& msg) {
        throw ConfigError(source + ":" + std::to_string(lineno) + ":" + std::to_string(col) + ": " + msg);
    };
    while (std::getline(in, raw)) {
        ++lineno;
        std::size_t first = raw.find_first_not_of(" \t\r");
        if (first == std::string::npos || raw[first] == '#' || raw[first] == ';') continue;
        int col = static_cast<int>(first) + 1;
        std::string line = trim(raw);
        if (line.front() == '[') {
            if (line.back() != ']') fail(col, "unterminated section header");
            current = trim(line.substr(1, line.size() - 2));
            if (!known.count(current)) fail(col + 1, "unknown section [" + current + "]");
            sections[current];
            continue;
        }
        std::size_t eq = raw.find('=');
        if (eq == std::string::npos) fail(col, "expected 'key = value'");
        if (current.empty()) fail(col, "key outside of any section");
        std::string key = trim(raw.substr(0, eq));
        if (key.empty()) fail(col, "empty key");
        std::size_t vstart = raw.find_first_not_of(" \t", eq + 1);
        std::string value = vstart == std::string::npos ? "" : trim(raw.substr(vstart));
        if (value.empty()) fail(static_cast<int>(eq) + 2, "empty value for '" + key + "'");
        auto& sec = sections[current];
        if (sec.count(key))
            fail(col, "duplicate key '" + key + "' in [" + current + "] (first set on line " +
                          std::to_string(sec[key].line) + ")");
        sec[key] = Entry{value, lineno, static_cast<int>(vstart) + 1, col};
    }

    Reader rd(source, std::move(sections));
    RunConfig cfg;

    const Entry* preset = rd.find("geometry", "preset");
    const Entry* type = rd.find("geometry", "type");
    if (preset && type)
        rd.fail(*type, type->key_col, "geometry has both 'preset' and 'type'; exactly one source is allowed");
    if (!preset && !type)
        throw ConfigError(source + ": [geometry] needs exactly one of 'preset' or 'type'");
    if (preset) {
        cfg.preset = preset->value;
    } else {
        MassModel m = parse_geometry(rd, type->value, *type);
        try {
            validate(m);
        } catch (const InvalidGeometry& e) {
            throw InvalidGeometry(source + ": [geometry]: " + e.what());
        }
        cfg.geometry = m;
    }

    if (auto v = rd.opt_number("csl", "lambda")) cfg.csl.lambda = *v;
    cfg.csl.rc = rd.opt_number("csl", "rc");
    cfg.csl.rc_min = rd.opt_number("csl", "rc_min");
    cfg.csl.rc_max = rd.opt_number("csl", "rc_max");
    cfg.csl.omega_c = rd.opt_number("csl", "omega_c");
    if (auto v = rd.opt_integer("csl", "points_per_decade")) cfg.csl.points_per_decade = static_cast<int>(*v);
    if (const Entry* e = rd.find("csl", "rc_list")) {
        for (const auto& part : split(e->value, ',')) {
            Entry sub = *e;
            sub.value = trim(part);
            cfg.csl.rc_list.push_back(rd.number(sub, "rc_list"));
        }
    }
    if (cfg.csl.rc_min.has_value() != cfg.csl.rc_max.has_value())
        throw ConfigError(source + ": [csl] rc_min and rc_max must be given together");
    if (cfg.csl.points_per_decade < 1) throw ConfigError(source + ": [csl] points_per_decade must be >= 1");

    cfg.noise.temperature = rd.opt_number("noise", "temperature");
    cfg.noise.gamma = rd.opt_number("noise", "gamma");
    cfg.noise.inertia = rd.opt_number("noise", "inertia");
    cfg.noise.omega0 = rd.opt_number("noise", "omega0");
    cfg.noise.s_th = rd.opt_number("noise", "s_th");

    if (const Entry* e = rd.find("run", "method")) {
        if (e->value != "series" && e->value != "quadrature")
            rd.fail(*e, e->value_col, "method must be 'series' or 'quadrature'");
        cfg.method = e->value;
    }
    if (auto v = rd.opt_number("run", "rel_tol")) {
        if (!(*v > 0.0 && *v <= 1e-2)) throw ConfigError(source + ": [run] rel_tol must lie in (0, 1e-2]");
        cfg.rel_tol = *v;
    }
    if (auto v = rd.opt_number("run", "abs_floor")) {
        if (!(*v >= 0.0)) throw ConfigError(source + ": [run] abs_floor must be >= 0");
        cfg.abs_floor = *v;
    }
    if (const Entry* e = rd.find("run", "output_dir")) cfg.output_dir = e->value;
    if (const Entry* e = rd.find("run", "formats")) {
        cfg.formats.clear();
        for (const auto& part : split(e->value, ',')) {
            std::string f = trim(part);
            if (f != "csv" && f != "json" && f != "svg") rd.fail(*e, e->value_col, "unknown output format '" + f + "'");
            cfg.formats.push_back(f);
        }
    }
    if (auto v = rd.opt_integer("run", "threads")) {
        if (*v < 1) throw ConfigError(source + ": [run] threads must be >= 1");
        cfg.threads = static_cast<int>(*v);
    }
    if (const Entry* e = rd.find("run", "seed")) {
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
        if (ec != std::errc() || ptr != e->value.data() + e->value.size())
            rd.fail(*e, e->value_col, "seed must be a non-negative 64-bit integer");
        cfg.seed = v;
    }
    if (auto v = rd.opt_number("run", "hbar")) cfg.constants.hbar = *v;
    if (auto v = rd.opt_number("run", "k_boltzmann")) cfg.constants.k_boltzmann = *v;
    if (auto v = rd.opt_number("run", "m0")) cfg.constants.m0 = *v;
    if (!(cfg.constants.hbar > 0 && cfg.constants.k_boltzmann > 0 && cfg.constants.m0 > 0))
        throw ConfigError(source + ": [run] physical constants must be > 0");
    rd.check_unused();
    return cfg;
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream o;
    o << "[geometry]\n";
    if (c.preset) o << "preset = " << *c.preset << "\n";
    if (c.geometry) {
        std::visit(
            [&](const auto& m) {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, HomogeneousDisk>) {
                    o << "type = homogeneous_disk\nrho = " << fmt(m.rho) << "\nradius = " << fmt(m.radius)
                      << "\nheight = " << fmt(m.height) << "\n";
                } else if constexpr (std::is_same_v<T, PeriodicAnnulus>) {
                    o << "type = periodic_annulus\nrho = " << fmt(m.rho) << "\ndelta_rho = " << fmt(m.delta_rho)
                      << "\nr_inner = " << fmt(m.r_inner) << "\nr_outer = " << fmt(m.r_outer)
                      << "\nn_sectors = " << m.n_sectors << "\nalpha = " << fmt(m.alpha)
                      << "\nheight = " << fmt(m.height) << "\n";
                } else if constexpr (std::is_same_v<T, TwoAnnuli>) {
                    o << "type = two_annuli\nrho = " << fmt(m.rho) << "\ndelta_rho = " << fmt(m.delta_rho)
                      << "\nr_core = " << fmt(m.r_core) << "\nr_outer_total = " << fmt(m.r_outer_total)
                      << "\ninner_r_inner = " << fmt(m.inner.r_inner) << "\ninner_r_outer = " << fmt(m.inner.r_outer)
                      << "\ninner_n_sectors = " << m.inner.n_sectors << "\nouter_r_inner = " << fmt(m.outer.r_inner)
                      << "\nouter_r_outer = " << fmt(m.outer.r_outer) << "\nouter_n_sectors = " << m.outer.n_sectors
                      << "\nheight = " << fmt(m.height) << "\n";
                } else {
                    o << "type = half_cylinder\nrho = " << fmt(m.rho) << "\ndelta_rho = " << fmt(m.delta_rho)
                      << "\nradius = " << fmt(m.radius) << "\nheight = " << fmt(m.height) << "\n";
                }
            },
            *c.geometry);
    }
    o << "\n[csl]\nlambda = " << fmt(c.csl.lambda) << "\n";
    if (c.csl.rc) o << "rc = " << fmt(*c.csl.rc) << "\n";
    if (!c.csl.rc_list.empty()) {
        o << "rc_list = ";
        for (std::size_t i = 0; i < c.csl.rc_list.size(); ++i) o << (i ? ", " : "") << fmt(c.csl.rc_list[i]);
        o << "\n";
    }
    if (c.csl.rc_min) o << "rc_min = " << fmt(*c.csl.rc_min) << "\n";
    if (c.csl.rc_max) o << "rc_max = " << fmt(*c.csl.rc_max) << "\n";
    o << "points_per_decade = " << c.csl.points_per_decade << "\n";
    if (c.csl.omega_c) o << "omega_c = " << fmt(*c.csl.omega_c) << "\n";
    o << "\n[noise]\n";
    auto opt = [&](const char* k, const std::optional<double>& v) {
        if (v) o << k << " = " << fmt(*v) << "\n";
    };
    opt("temperature", c.noise.temperature);
    opt("gamma", c.noise.gamma);
    opt("inertia", c.noise.inertia);
    opt("omega0", c.noise.omega0);
    opt("s_th", c.noise.s_th);
    o << "\n[run]\nmethod = " << c.method << "\nrel_tol = " << fmt(c.rel_tol) << "\nabs_floor = " << fmt(c.abs_floor)
      << "\noutput_dir = " << c.output_dir << "\nformats = ";
    for (std::size_t i = 0; i < c.formats.size(); ++i) o << (i ? "," : "") << c.formats[i];
    o << "\nthreads = " << c.threads << "\nseed = " << c.seed << "\nhbar = " << fmt(c.constants.hbar)
      << "\nk_boltzmann = " << fmt(c.constants.k_boltzmann) << "\nm0 = " << fmt(c.constants.m0) << "\n";
    return o.str();
}

std::vector<double> rc_values(const CslGrid& g) {
    if (!g.rc_list.empty()) return g.rc_list;
    if (g.rc_min && g.rc_max) return log_grid(*g.rc_min, *g.rc_max, g.points_per_decade);
    if (g.rc) return {*g.rc};
    return log_grid(1e-9, 1e-2, g.points_per_decade);
}

RadialOptions radial_options(const RunConfig& cfg) {
    RadialOptions o;
    o.method = cfg.method == "quadrature" ? KernelMethod::quadrature : KernelMethod::series;
    o.rel_tol = cfg.rel_tol;
    o.abs_floor = cfg.abs_floor;
    return o;
}

}  // namespace cslrot
