#include "cslrot/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "cslrot/bounds.hpp"
#include "cslrot/config.hpp"
#include "cslrot/errors.hpp"
#include "cslrot/io.hpp"
#include "cslrot/langevin.hpp"
#include "cslrot/optimizer.hpp"
#include "cslrot/presets.hpp"

namespace cslrot {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Common {
    std::string config;
    std::string out_dir;
    std::string formats;
    int threads = 0;
    std::string method;
    double rel_tol = 0.0;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "INI-style run configuration");
    sub->add_option("--out", c.out_dir, "output directory");
    sub->add_option("--formats", c.formats, "comma list of csv,json,svg");
    sub->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--method", c.method, "kernel method: series or quadrature");
    sub->add_option("--rel-tol", c.rel_tol, "relative tolerance of P");
}

struct Context {
    RunConfig cfg;
    bool from_file = false;
    std::filesystem::path out;
    std::vector<std::string> formats;
    int threads = 1;
    RadialOptions radial;
};

Context make_context(const Common& c) {
    Context ctx;
    if (!c.config.empty()) {
        ctx.cfg = parse_config(c.config);
        ctx.from_file = true;
    }
    const char* env = std::getenv(kOutputDirEnv);
    if (!c.out_dir.empty())
        ctx.out = c.out_dir;
    else if (ctx.from_file && ctx.cfg.output_dir != ".")
        ctx.out = ctx.cfg.output_dir;
    else if (env && *env)
        ctx.out = env;
    else
        ctx.out = ctx.cfg.output_dir;
    ctx.formats = ctx.cfg.formats;
    if (!c.formats.empty()) {
        ctx.formats.clear();
        for (const auto& f : split(c.formats, ',')) {
            std::string t = trim(f);
            if (t != "csv" && t != "json" && t != "svg") throw InputError("unknown output format '" + t + "'");
            ctx.formats.push_back(t);
        }
    }
    ctx.threads = c.threads > 0 ? c.threads : ctx.cfg.threads;
    if (!c.method.empty()) {
        if (c.method != "series" && c.method != "quadrature") throw InputError("method must be series or quadrature");
        ctx.cfg.method = c.method;
    }
    if (c.rel_tol > 0.0) {
        if (c.rel_tol > 1e-2) throw InputError("--rel-tol must lie in (0, 1e-2]");
        ctx.cfg.rel_tol = c.rel_tol;
    }
    ctx.radial = radial_options(ctx.cfg);
    ensure_directory(ctx.out);
    return ctx;
}

bool wants(const Context& ctx, const std::string& f) {
    return std::find(ctx.formats.begin(), ctx.formats.end(), f) != ctx.formats.end();
}

std::string emit(const Context& ctx, const std::string& stem, const std::string& csv,
                 const nlohmann::json* json, const std::string& svg) {
    std::string first;
    auto put = [&](const std::string& ext, const std::string& body) {
        auto path = ctx.out / (stem + "." + ext);
        write_text_file(path, body);
        if (first.empty()) first = path.string();
    };
    if (wants(ctx, "csv") && !csv.empty()) put("csv", csv);
    if (wants(ctx, "json") && json) put("json", json->dump(2) + "\n");
    if (wants(ctx, "svg") && !svg.empty()) put("svg", svg);
    return first.empty() ? std::string("(no output formats selected)") : first;
}

std::pair<double, double> parse_range(const std::string& s, const std::string& flag) {
    auto parts = split(s, ':');
    if (parts.size() != 2) throw InputError(flag + " expects lo:hi, got '" + s + "'");
    auto lo = parse_double(trim(parts[0]));
    auto hi = parse_double(trim(parts[1]));
    if (!lo || !hi || !(*hi >= *lo)) throw InputError(flag + " expects numeric lo:hi with lo <= hi");
    return {*lo, *hi};
}

template <class T>
std::vector<T> parse_list(const std::string& s, const std::string& flag) {
    std::vector<T> out;
    for (const auto& p : split(s, ',')) {
        auto v = parse_double(trim(p));
        if (!v) throw InputError(flag + ": malformed value '" + p + "'");
        if constexpr (std::is_integral_v<T>) {
            if (*v != std::floor(*v)) throw InputError(flag + ": '" + p + "' is not an integer");
        }
        out.push_back(static_cast<T>(*v));
    }
    return out;
}

struct Resolved {
    MassModel model;
    NoiseBudget budget;
    std::string id;
    std::string provenance;
    bool budget_complete = true;
};

Resolved resolve(const Context& ctx, const std::string& preset_flag) {
    Resolved r;
    std::string preset = !preset_flag.empty() ? preset_flag : ctx.cfg.preset.value_or("");
    if (!preset.empty()) {
        const Preset& p = find_preset(preset);
        r.model = p.model;
        r.budget = p.budget;
        r.id = p.name;
        r.provenance = p.provenance;
    } else if (ctx.cfg.geometry) {
        r.model = *ctx.cfg.geometry;
        r.id = "inline:" + kind_name(r.model);
        r.provenance = "inline geometry from configuration";
        r.budget.temperature = kExperimentTemperature;
        r.budget.inertia = moment_of_inertia(r.model);
        r.budget.omega0 = kTwoPi * kExperimentResonanceHz;
        r.budget_complete = false;
    } else {
        throw InputError("no geometry given: use --preset NAME or --config FILE with a [geometry] section");
    }
    const auto& n = ctx.cfg.noise;
    if (n.temperature) r.budget.temperature = *n.temperature;
    if (n.inertia) r.budget.inertia = *n.inertia;
    if (n.omega0) r.budget.omega0 = *n.omega0;
    if (n.gamma) {
        r.budget.gamma = *n.gamma;
        if (!n.s_th && preset.empty()) r.budget.s_th_override.reset();
        r.budget_complete = true;
    }
    if (n.s_th) {
        r.budget.s_th_override = *n.s_th;
        r.budget_complete = true;
    }
    return r;
}

Metadata metadata_for(const Context& ctx, const std::string& command, const Resolved* r) {
    Metadata m = base_metadata(command);
    m.set("method", ctx.cfg.method);
    m.set("rel_tol", ctx.cfg.rel_tol);
    m.set("abs_floor", ctx.cfg.abs_floor);
    m.set("hbar", ctx.cfg.constants.hbar);
    m.set("m0", ctx.cfg.constants.m0);
    if (r) {
        m.set("geometry_id", r->id);
        m.set("provenance", r->provenance);
    }
    return m;
}

int cmd_presets(std::ostream& out) {
    for (const auto& p : presets()) {
        out << p.name << "  [" << kind_name(p.model) << "]  " << p.description << "\n";
        out << "    provenance: " << p.provenance << "\n";
        for (const auto& a : p.assumptions) out << "    assumption: " << a << "\n";
    }
    return 0;
}

std::vector<std::pair<double, double>> read_bound_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open bound file '" + path + "'");
    std::string line;
    int lineno = 0;
    bool header = false;
    std::vector<std::pair<double, double>> pts;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (!header) {
            if (t != "rc_m,lambda_max_s^-1,p_factor,y_factor,flags")
                throw InputError(path + ":" + std::to_string(lineno) + ": not a bound curve CSV header");
            header = true;
            continue;
        }
        auto f = split(t, ',');
        if (f.size() != 5) throw InputError(path + ":" + std::to_string(lineno) + ": expected 5 fields");
        auto rc = parse_double(f[0]);
        if (!rc) throw InputError(path + ":" + std::to_string(lineno) + ": malformed rc");
        if (f[1] == "unbounded") continue;
        auto lam = parse_double(f[1]);
        if (!lam) throw InputError(path + ":" + std::to_string(lineno) + ": malformed lambda");
        pts.emplace_back(*rc, *lam);
    }
    return pts;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Rotational CSL noise spectra, bounds and test-mass optimisation"};
    app.name(kToolName);
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    // dns
    Common c_dns;
    std::string dns_preset;
    double dns_rc = 0.0, dns_lambda = 0.0, dns_omega = -1.0, dns_omega_c = 0.0;
    auto* dns = app.add_subcommand("dns", "CSL torque noise spectrum for one geometry and rc");
    add_common(dns, c_dns);
    dns->add_option("--preset", dns_preset, "embedded preset");
    dns->add_option("--rc", dns_rc, "correlation length [m]");
    dns->add_option("--lambda", dns_lambda, "collapse rate [1/s]");
    dns->add_option("--omega", dns_omega, "angular frequency for the colored multiplier [rad/s]");
    dns->add_option("--omega-c", dns_omega_c, "colored-noise cutoff [rad/s]");

    // scan-alpha / scan-height
    Common c_sa, c_sh;
    AnnulusScanSpec sa, sh;
    sa.height = 1e-3;
    int sa_grid = 61, sa_ppd = 0;
    auto* scan_a = app.add_subcommand("scan-alpha", "P versus sector angle at fixed moment of inertia");
    scan_a->set_help_flag("--help", "Print this help message and exit");
    add_common(scan_a, c_sa);
    scan_a->add_option("--n", sa.n, "sector count")->check(CLI::PositiveNumber);
    scan_a->add_option("--rc", sa.rc, "correlation length [m]");
    scan_a->add_option("--inertia", sa.inertia, "fixed moment of inertia [kg m^2]");
    scan_a->add_option("--epsilon", sa.epsilon, "R / r");
    scan_a->add_option("--h,--height", sa.height, "height [m]");
    scan_a->add_option("--rho", sa.rho, "light density [kg/m^3]");
    scan_a->add_option("--delta-rho", sa.delta_rho, "density excess [kg/m^3]");
    scan_a->add_option("--grid", sa_grid, "points including both endpoints (>= 8)");
    scan_a->add_option("--points-per-decade", sa_ppd, "use a decade-anchored log grid instead");

    double sh_lo = 1e-5, sh_hi = 1e-1;
    int sh_ppd = 10;
    auto* scan_h = app.add_subcommand("scan-height", "P x Y versus height at fixed moment of inertia");
    add_common(scan_h, c_sh);
    scan_h->add_option("--n", sh.n, "sector count")->check(CLI::PositiveNumber);
    scan_h->add_option("--rc", sh.rc, "correlation length [m]");
    scan_h->add_option("--inertia", sh.inertia, "fixed moment of inertia [kg m^2]");
    scan_h->add_option("--epsilon", sh.epsilon, "R / r");
    scan_h->add_option("--alpha", sh.alpha, "sector angle [rad]");
    scan_h->add_option("--rho", sh.rho, "light density [kg/m^3]");
    scan_h->add_option("--delta-rho", sh.delta_rho, "density excess [kg/m^3]");
    scan_h->add_option("--h-min", sh_lo, "smallest height [m]");
    scan_h->add_option("--h-max", sh_hi, "largest height [m]");
    scan_h->add_option("--points-per-decade", sh_ppd, "log grid density");

    // optimize
    Common c_opt;
    double opt_rc = 1e-4;
    std::string opt_objective = "p", opt_n = "4,10,20,100", opt_eps = "2,20", opt_alpha = "1e-4:1",
                opt_h = "1e-3:1e-3";
    long opt_budget = 2000;
    int opt_coarse = 9;
    Constraints opt_c;
    auto* optimize = app.add_subcommand("optimize", "search sector count, angle, height and R/r");
    add_common(optimize, c_opt);
    optimize->add_option("--rc", opt_rc, "correlation length [m]");
    optimize->add_option("--objective", opt_objective, "p, pxy or inverse-lambda");
    optimize->add_option("--n-values", opt_n, "comma list of sector counts");
    optimize->add_option("--epsilon-values", opt_eps, "comma list of R / r");
    optimize->add_option("--alpha-range", opt_alpha, "lo:hi as fractions of 2 pi / n");
    optimize->add_option("--h-range", opt_h, "lo:hi heights [m]");
    optimize->add_option("--budget", opt_budget, "maximum P evaluations (>= 100)");
    optimize->add_option("--coarse-points", opt_coarse, "coarse grid size per axis");
    optimize->add_option("--inertia", opt_c.inertia, "fixed moment of inertia [kg m^2]");
    optimize->add_option("--rho", opt_c.rho, "light density [kg/m^3]");
    optimize->add_option("--delta-rho", opt_c.delta_rho, "density excess [kg/m^3]");
    optimize->add_option("--s-th", opt_c.s_th, "floor for the inverse-lambda objective");

    // bound
    Common c_b;
    std::string b_preset, b_decades;
    int b_ppd = 0;
    double b_temperature = 0.0, b_s_th = 0.0, b_omega_c = 0.0;
    auto* bound = app.add_subcommand("bound", "lambda_max(rc) exclusion curve");
    add_common(bound, c_b);
    bound->add_option("--preset", b_preset, "embedded preset");
    bound->add_option("--rc-decades", b_decades, "lo:hi range of rc [m]");
    bound->add_option("--points-per-decade", b_ppd, "log grid density (default 25)");
    bound->add_option("--temperature", b_temperature, "rescale the floor to this temperature [K]");
    bound->add_option("--s-th", b_s_th, "thermal floor override [N^2 m^2 s]");
    bound->add_option("--omega-c", b_omega_c, "colored-noise cutoff [rad/s]");

    // simulate
    Common c_sim;
    std::string sim_preset, sim_band;
    double sim_lambda = 0.0, sim_rc = 0.0, sim_s_csl = -1.0;
    double sim_inertia = 0.0, sim_omega0 = 0.0, sim_gamma = 0.0, sim_temperature = 0.0, sim_s_th = 0.0;
    TrajectoryConfig tc;
    tc.dt = 0.2;
    tc.duration = 0.0;
    tc.n_trajectories = 20;
    tc.burn_in = -1.0;
    tc.stationary_start = true;
    int sim_stride = 10;
    auto* simulate_cmd = app.add_subcommand("simulate", "Langevin trajectories and PSD cross-check");
    add_common(simulate_cmd, c_sim);
    simulate_cmd->add_option("--preset", sim_preset, "take the noise budget (and geometry) from a preset");
    simulate_cmd->add_option("--lambda", sim_lambda, "collapse rate for the CSL torque [1/s]");
    simulate_cmd->add_option("--rc", sim_rc, "correlation length for the CSL torque [m]");
    simulate_cmd->add_option("--s-csl", sim_s_csl, "CSL torque DNS given directly [N^2 m^2 s]");
    simulate_cmd->add_option("--inertia", sim_inertia, "moment of inertia [kg m^2]");
    simulate_cmd->add_option("--omega0", sim_omega0, "resonance [rad/s]");
    simulate_cmd->add_option("--gamma", sim_gamma, "damping [1/s]");
    simulate_cmd->add_option("--temperature", sim_temperature, "temperature [K]");
    simulate_cmd->add_option("--s-th", sim_s_th, "thermal floor [N^2 m^2 s]");
    simulate_cmd->add_option("--dt", tc.dt, "time step [s]");
    simulate_cmd->add_option("--duration", tc.duration, "recorded span per trajectory [s]");
    simulate_cmd->add_option("--seed", tc.seed, "64-bit seed");
    simulate_cmd->add_option("--trajectories", tc.n_trajectories, "number of trajectories");
    simulate_cmd->add_option("--burn-in", tc.burn_in, "discarded span [s] (default 10 / gamma)");
    simulate_cmd->add_option("--band", sim_band, "lo:hi analysis band [rad/s]");
    simulate_cmd->add_option("--trajectory-stride", sim_stride, "write every k-th sample of trajectory 0");

    // presets
    auto* presets_cmd = app.add_subcommand("presets", "list embedded presets");

    // overlay-merge
    Common c_ov;
    std::string ov_bound, ov_label = "this_work";
    std::vector<std::string> ov_overlays;
    auto* overlay = app.add_subcommand("overlay-merge", "combine a bound curve with published overlay curves");
    add_common(overlay, c_ov);
    overlay->add_option("--bound", ov_bound, "bound curve CSV produced by the bound command")->required();
    overlay->add_option("--overlay", ov_overlays, "overlay CSV (label,rc_m,lambda_s^-1)")->required();
    overlay->add_option("--label", ov_label, "label for the bound curve");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (presets_cmd->parsed()) return cmd_presets(out);

        if (dns->parsed()) {
            Context ctx = make_context(c_dns);
            Resolved r = resolve(ctx, dns_preset);
            CslParams csl;
            csl.rc = dns_rc > 0.0 ? dns_rc : ctx.cfg.csl.rc.value_or(r.id.rfind("inline", 0) == 0 ? 0.0 : find_preset(r.id).reference_rc);
            if (!(csl.rc > 0.0)) throw InputError("dns needs --rc (or [csl] rc)");
            csl.lambda = dns_lambda > 0.0 ? dns_lambda : ctx.cfg.csl.lambda;
            if (dns_omega_c > 0.0) csl.omega_c = dns_omega_c;
            else if (ctx.cfg.csl.omega_c) csl.omega_c = ctx.cfg.csl.omega_c;
            SpectrumResult s = csl_torque_dns(r.model, csl, ctx.cfg.constants, ctx.radial);
            Metadata meta = metadata_for(ctx, "dns", &r);
            nlohmann::json j;
            j["metadata"] = meta.to_json();
            j["rc_m"] = csl.rc;
            j["lambda"] = csl.lambda;
            j["p_factor"] = s.p_factor;
            j["p_abs_error"] = s.p_abs_error;
            j["y_factor"] = s.y_factor;
            j["s_csl"] = s.s_csl;
            j["eta"] = s.eta;
            j["kernel_evaluations"] = s.kernel_evaluations;
            std::string csv = meta.csv_comment() + "rc_m,lambda_s^-1,p_factor,y_factor,s_csl,eta";
            std::string row = format_double(csl.rc) + "," + format_double(csl.lambda) + "," +
                              format_double(s.p_factor) + "," + format_double(s.y_factor) + "," +
                              format_double(s.s_csl) + "," + format_double(s.eta);
            if (r.budget_complete) {
                double sth = thermal_torque_dns(r.budget, ctx.cfg.constants);
                j["s_th"] = sth;
                csv += ",s_th";
                row += "," + format_double(sth);
            }
            if (csl.omega_c && dns_omega >= 0.0) {
                double mult = colored_multiplier(dns_omega, *csl.omega_c);
                j["colored_multiplier"] = mult;
                j["s_csl_colored"] = s.s_csl * mult;
                csv += ",colored_multiplier";
                row += "," + format_double(mult);
            }
            csv += "\n" + row + "\n";
            std::string where = emit(ctx, "dns", csv, &j, "");
            out << "dns " << r.id << ": rc=" << format_double(csl.rc) << " P=" << format_double(s.p_factor)
                << " Y=" << format_double(s.y_factor) << " S_CSL=" << format_double(s.s_csl) << " -> " << where
                << "\n";
            return 0;
        }

        if (scan_a->parsed()) {
            Context ctx = make_context(c_sa);
            std::vector<double> grid;
            if (sa_ppd > 0) {
                grid = decade_alpha_grid(sa.n, sa_ppd);
            } else {
                grid = default_alpha_grid(sa.n, sa_grid);
            }
            ScanResult s = scan_alpha(sa, grid, ctx.radial, ctx.threads);
            Metadata meta = metadata_for(ctx, "scan-alpha", nullptr);
            meta.set("n", std::to_string(sa.n));
            meta.set("epsilon", sa.epsilon);
            meta.set("inertia", sa.inertia);
            meta.set("h", sa.height);
            meta.set("rc", sa.rc);
            meta.set("rho", sa.rho);
            meta.set("delta_rho", sa.delta_rho);
            nlohmann::json j = scan_json(s, meta);
            PlotSeries ps{"P", {}, {}};
            for (const auto& p : s.points) ps.x.push_back(p.axis), ps.y.push_back(p.objective);
            std::string where = emit(ctx, "scan_alpha", scan_csv(s, meta), &j,
                                     svg_line_plot({ps}, {"P versus alpha", "alpha [rad]", "P", true, true}));
            std::size_t best = s.argmax();
            out << "scan-alpha: " << s.points.size() << " points, argmax alpha="
                << (best < s.points.size() ? format_double(s.points[best].axis) : "none") << ", P(2pi/n)="
                << format_double(s.points.back().objective) << " -> " << where << "\n";
            for (const auto& p : s.points)
                if (p.flags == "convergence_failure") return 2;
            return 0;
        }

        if (scan_h->parsed()) {
            Context ctx = make_context(c_sh);
            ScanResult s = scan_height(sh, log_grid(sh_lo, sh_hi, sh_ppd), ctx.radial, ctx.threads);
            Metadata meta = metadata_for(ctx, "scan-height", nullptr);
            meta.set("n", std::to_string(sh.n));
            meta.set("epsilon", sh.epsilon);
            meta.set("inertia", sh.inertia);
            meta.set("alpha", sh.alpha);
            meta.set("rc", sh.rc);
            nlohmann::json j = scan_json(s, meta);
            PlotSeries ps{"PxY", {}, {}};
            for (const auto& p : s.points) ps.x.push_back(p.axis), ps.y.push_back(p.objective);
            std::string where = emit(ctx, "scan_height", scan_csv(s, meta), &j,
                                     svg_line_plot({ps}, {"P x Y versus h", "h [m]", "P x Y", true, true}));
            std::size_t best = s.argmax();
            out << "scan-height: " << s.points.size() << " points, argmax h="
                << (best < s.points.size() ? format_double(s.points[best].axis) : "none") << " -> " << where << "\n";
            for (const auto& p : s.points)
                if (p.flags == "convergence_failure") return 2;
            return 0;
        }

        if (optimize->parsed()) {
            Context ctx = make_context(c_opt);
            Objective obj;
            if (opt_objective == "p") obj = Objective::p;
            else if (opt_objective == "pxy") obj = Objective::p_times_y;
            else if (opt_objective == "inverse-lambda") obj = Objective::inverse_lambda;
            else throw InputError("--objective must be p, pxy or inverse-lambda");
            SearchRanges ranges;
            ranges.n_values = parse_list<int>(opt_n, "--n-values");
            ranges.epsilon_values = parse_list<double>(opt_eps, "--epsilon-values");
            std::tie(ranges.alpha_lo_fraction, ranges.alpha_hi_fraction) = parse_range(opt_alpha, "--alpha-range");
            std::tie(ranges.h_lo, ranges.h_hi) = parse_range(opt_h, "--h-range");
            ranges.coarse_points = opt_coarse;
            OptimizationResult res =
                optimize_geometry(obj, ranges, opt_c, opt_rc, opt_budget, ctx.radial, ctx.cfg.constants);
            Metadata meta = metadata_for(ctx, "optimize", nullptr);
            meta.set("rc", opt_rc);
            meta.set("objective", opt_objective);
            meta.set("budget", std::to_string(opt_budget));
            nlohmann::json j = optimization_json(res, meta);
            std::string csv = meta.csv_comment() + "n,epsilon,alpha_rad,h_m,r_m,R_m,objective,stage\n";
            for (const auto& t : res.trace)
                csv += std::to_string(t.n) + "," + format_double(t.epsilon) + "," + format_double(t.alpha) + "," +
                       format_double(t.h) + "," + format_double(t.r) + "," + format_double(t.R) + "," +
                       (std::isfinite(t.objective) ? format_double(t.objective) : std::string("infeasible")) + "," +
                       t.stage + "\n";
            std::string where = emit(ctx, "optimize", csv, &j, "");
            out << "optimize: best n=" << res.best.n << " eps=" << format_double(res.best.epsilon)
                << " alpha=" << format_double(res.best.alpha) << " h=" << format_double(res.best.h)
                << " objective=" << format_double(res.best.objective) << " (" << res.evaluations << " evaluations"
                << (res.budget_exhausted ? ", budget exhausted" : "") << ") -> " << where << "\n";
            return 0;
        }

        if (bound->parsed()) {
            Context ctx = make_context(c_b);
            Resolved r = resolve(ctx, b_preset);
            if (b_s_th > 0.0) r.budget.s_th_override = b_s_th, r.budget_complete = true;
            if (!r.budget_complete)
                throw InputError("inline geometry needs [noise] gamma or s_th (or --s-th) to define the floor");
            double base_t = r.budget.temperature;
            NoiseBudget floor = r.budget;
            if (b_temperature > 0.0) {
                floor.s_th_override =
                    rescale_thermal(thermal_torque_dns(r.budget, ctx.cfg.constants), 1.0, b_temperature / base_t);
                floor.temperature = b_temperature;
            }
            std::vector<double> grid;
            int ppd = b_ppd > 0 ? b_ppd : ctx.cfg.csl.points_per_decade;
            if (!b_decades.empty()) {
                auto [lo, hi] = parse_range(b_decades, "--rc-decades");
                grid = log_grid(lo, hi, ppd);
            } else {
                CslGrid g = ctx.cfg.csl;
                g.points_per_decade = ppd;
                grid = rc_values(g);
            }
            BoundCurve curve = bound_curve(r.model, grid, floor, ctx.cfg.constants, ctx.radial, ctx.threads);
            curve.geometry_id = r.id;
            double omega_c = b_omega_c > 0.0 ? b_omega_c : ctx.cfg.csl.omega_c.value_or(0.0);
            if (omega_c > 0.0)
                curve = colored_bound_adjustment(curve, omega_c, kTwoPi * kBandLowHz, kTwoPi * kBandHighHz);
            auto minima = mark_local_minima(curve);
            Metadata meta = metadata_for(ctx, "bound", &r);
            meta.set("s_th", curve.s_th);
            meta.set("temperature", floor.temperature);
            if (b_temperature > 0.0) meta.set("floor_rescaled_from_temperature", base_t);
            if (omega_c > 0.0) meta.set("omega_c", omega_c);
            meta.set("local_minima_count", std::to_string(minima.size()));
            meta.set("two_local_minima", minima.size() == 2 ? "true" : "false");
            nlohmann::json j = bound_curve_json(curve, meta);
            PlotSeries ps{r.id, {}, {}};
            for (const auto& p : curve.points)
                if (p.lambda_max) ps.x.push_back(p.rc), ps.y.push_back(*p.lambda_max);
            std::string where = emit(ctx, "bound", bound_curve_csv(curve, meta), &j,
                                     svg_line_plot({ps}, {"CSL exclusion", "rc [m]", "lambda_max [1/s]", true, true}));
            std::size_t failures = 0;
            double best = INFINITY, best_rc = 0.0;
            for (const auto& p : curve.points) {
                if (std::find(p.flags.begin(), p.flags.end(), "convergence_failure") != p.flags.end()) ++failures;
                if (p.lambda_max && *p.lambda_max < best) best = *p.lambda_max, best_rc = p.rc;
            }
            out << "bound " << r.id << ": " << curve.points.size() << " points, " << minima.size()
                << " local minima, min lambda_max=" << (std::isfinite(best) ? format_double(best) : "unbounded")
                << " at rc=" << format_double(best_rc) << " -> " << where << "\n";
            return failures ? 2 : 0;
        }

        if (simulate_cmd->parsed()) {
            Context ctx = make_context(c_sim);
            NoiseBudget b;
            b.temperature = kExperimentTemperature;
            b.inertia = kExperimentInertia;
            b.omega0 = kTwoPi * kExperimentResonanceHz;
            b.gamma = 0.0;
            std::optional<Resolved> r;
            if (!sim_preset.empty() || ctx.cfg.preset || ctx.cfg.geometry) {
                r = resolve(ctx, sim_preset);
                b = r->budget;
                if (!sim_preset.empty() || ctx.cfg.preset) b.gamma = 0.0;  // preset damping is not published
            }
            if (sim_inertia > 0.0) b.inertia = sim_inertia;
            if (sim_omega0 > 0.0) b.omega0 = sim_omega0;
            if (sim_temperature > 0.0) b.temperature = sim_temperature;
            bool synthetic = false;
            if (sim_gamma > 0.0)
                b.gamma = sim_gamma;
            else if (!(b.gamma > 0.0))
                b.gamma = b.omega0 / 10.0, synthetic = true;
            if (sim_s_th > 0.0) b.s_th_override = sim_s_th;
            double s_csl = 0.0;
            if (sim_s_csl >= 0.0) {
                s_csl = sim_s_csl;
            } else if (sim_lambda > 0.0) {
                if (!r) throw InputError("--lambda needs a geometry (--preset or --config)");
                if (!(sim_rc > 0.0)) throw InputError("--lambda needs --rc");
                s_csl = csl_torque_dns(r->model, CslParams{sim_lambda, sim_rc, {}}, ctx.cfg.constants, ctx.radial).s_csl;
            }
            if (tc.duration <= 0.0) tc.duration = 4.0 * 65536.0 * tc.dt;
            if (tc.burn_in < 0.0) tc.burn_in = 10.0 / b.gamma;
            if (ctx.from_file) tc.seed = ctx.cfg.seed;
            double lo = kTwoPi * kBandLowHz, hi = kTwoPi * kBandHighHz;
            if (!sim_band.empty()) std::tie(lo, hi) = parse_range(sim_band, "--band");
            ValidationOptions vo;
            vo.workers = ctx.threads;
            ValidationReport rep = validate_spectrum(b, s_csl, tc, lo, hi, vo);
            Metadata meta = metadata_for(ctx, "simulate", r ? &*r : nullptr);
            meta.set("seed", std::to_string(tc.seed));
            meta.set("generator", Philox4x32::name());
            meta.set("scheme", rep.scheme);
            meta.set("dt", tc.dt);
            meta.set("duration", tc.duration);
            meta.set("burn_in", tc.burn_in);
            meta.set("trajectories", std::to_string(tc.n_trajectories));
            meta.set("inertia", b.inertia);
            meta.set("omega0", b.omega0);
            meta.set("gamma", b.gamma);
            meta.set("gamma_source", synthetic ? "synthetic: omega0 / 10 (damping not published)" : "given");
            meta.set("s_th", thermal_torque_dns(b, ctx.cfg.constants));
            meta.set("s_csl", s_csl);
            meta.set("noise_intensity", "two-sided white density D = S_th + S_CSL");
            Trajectory t0 = simulate(b, rep.intensity, tc, 0);
            Trajectory thin;
            thin.dt = t0.dt * std::max(1, sim_stride);
            for (std::size_t i = 0; i < t0.theta.size(); i += std::max(1, sim_stride)) {
                thin.theta.push_back(t0.theta[i]);
                thin.momentum.push_back(t0.momentum[i]);
            }
            std::vector<double> w, v, se;
            for (const auto& bin : rep.bins) w.push_back(bin.omega), v.push_back(bin.estimate), se.push_back(bin.stderr_abs);
            nlohmann::json j = validation_json(rep, meta);
            if (wants(ctx, "csv")) {
                write_text_file(ctx.out / "trajectory.csv", trajectory_csv(thin, meta));
                write_text_file(ctx.out / "psd.csv", psd_csv(w, v, se, meta));
            }
            if (wants(ctx, "json")) write_text_file(ctx.out / "simulate_report.json", j.dump(2) + "\n");
            if (wants(ctx, "svg")) {
                PlotSeries est{"estimate", w, v}, ana{"analytic", w, {}};
                for (const auto& bin : rep.bins) ana.y.push_back(bin.analytic);
                write_text_file(ctx.out / "psd.svg",
                                svg_line_plot({est, ana}, {"theta PSD", "omega [rad/s]", "S_theta [rad^2 s]", true, true}));
            }
            out << "simulate: " << rep.bins.size() << " bins, " << format_double(100.0 * rep.fraction_within)
                << "% within 3 SE (" << (rep.pass ? "PASS" : "FAIL") << "), variance z=" << format_double(rep.variance_z)
                << " -> " << ctx.out.string() << "\n";
            return 0;
        }

        if (overlay->parsed()) {
            Context ctx = make_context(c_ov);
            std::vector<OverlayCurve> curves;
            OverlayCurve own{ov_label, read_bound_csv(ov_bound)};
            curves.push_back(own);
            for (const auto& f : ov_overlays)
                for (auto& c : ingest_overlay(f)) curves.push_back(std::move(c));
            Metadata meta = metadata_for(ctx, "overlay-merge", nullptr);
            meta.set("bound_source", ov_bound);
            std::vector<PlotSeries> series;
            for (const auto& c : curves) {
                PlotSeries ps{c.label, {}, {}};
                for (const auto& [x, y] : c.points) ps.x.push_back(x), ps.y.push_back(y);
                series.push_back(ps);
            }
            std::string where = emit(ctx, "overlay_merged", overlay_csv(curves, meta), nullptr,
                                     svg_line_plot(series, {"CSL exclusion with overlays", "rc [m]", "lambda [1/s]", true, true}));
            out << "overlay-merge: " << curves.size() << " curves -> " << where << "\n";
            return 0;
        }
    } catch (const ConvergenceError& e) {
        err << "convergence failure: " << e.what() << " (terms " << e.terms_used() << ", achieved "
            << format_double(e.achieved_error()) << ")\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace cslrot
