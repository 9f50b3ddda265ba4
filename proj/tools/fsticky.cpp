// fsticky: batch driver for the fractional sticky diffusion library.
//
//   fsticky ml-eval --alpha 0.5 --z=-1,-2
//   fsticky sample stable --alpha 0.5 --n-paths 1000 --out run1
//   fsticky experiment joint-law --seed 7 --workers 2 --out run2
//   fsticky solve-halfline --method l1 --t-grid 0.5,1 --x-grid 0,1 --out run3
//   fsticky --from-manifest run2/manifest.json --out run2b
//
// Settings resolve as: FRAC_STICKY_SEED < manifest < --config file < flags.
// Exit codes: 0 ok, 1 criterion failure, 2 invalid input, 3 numerical failure.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fsticky/experiments.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace fsticky;

namespace {

using Settings = std::map<std::string, std::string>;

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + '"';
}

double to_real(const Settings& s, const std::string& k, double def) {
    auto it = s.find(k);
    if (it == s.end()) return def;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(it->second, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != it->second.size()) throw ValidationError("--" + k + ": not a number: " + it->second);
    return v;
}

std::uint64_t to_count(const Settings& s, const std::string& k, std::uint64_t def) {
    auto it = s.find(k);
    if (it == s.end()) return def;
    const std::string& v = it->second;
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
        throw ValidationError("--" + k + ": not a nonnegative integer: " + v);
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw ValidationError("--" + k + ": out of range: " + v);
    }
}

std::vector<double> to_list(const Settings& s, const std::string& k, std::vector<double> def) {
    auto it = s.find(k);
    if (it == s.end()) return def;
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
        Settings one{{k, item}};
        out.push_back(to_real(one, k, 0.0));
    }
    if (out.empty()) throw ValidationError("--" + k + ": empty list");
    return out;
}

std::string to_str(const Settings& s, const std::string& k, const std::string& def) {
    auto it = s.find(k);
    return it == s.end() ? def : it->second;
}

Settings read_config(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw ValidationError("cannot read config file " + file.string());
    Settings out;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        const auto trim = [](std::string v) {
            const auto a = v.find_first_not_of(" \t\r"), b = v.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : v.substr(a, b - a + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError(file.string() + ":" + std::to_string(n) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::replace(key.begin(), key.end(), '_', '-');
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

RunConfig make_run_config(const Settings& s) {
    RunConfig cfg;
    cfg.params.alpha = to_real(s, "alpha", 1.0);
    cfg.params.eta = to_real(s, "eta", 1.0);
    cfg.params.sigma = to_real(s, "sigma", 1.0);
    cfg.params.c = to_real(s, "c", 0.0);
    for (const char* k : {"alpha", "eta", "sigma", "c", "n-paths", "dt", "horizon"})
        if (s.count(k)) cfg.overridden.insert(k);
    if (s.count("alpha") || s.count("eta") || s.count("sigma") || s.count("c")) cfg.params.validate();
    cfg.seed = to_count(s, "seed", cfg.seed);
    cfg.n_paths = to_count(s, "n-paths", 0);
    cfg.dt = to_real(s, "dt", 0.0);
    cfg.horizon = to_real(s, "horizon", 0.0);
    cfg.workers = static_cast<int>(to_count(s, "workers", 1));
    cfg.scale = to_real(s, "scale", 1.0);
    require(cfg.workers >= 1, "--workers must be >= 1");
    require(cfg.scale > 0.0, "--scale must be positive");
    require(!cfg.has("n-paths") || cfg.n_paths >= 1, "--n-paths must be >= 1");
    require(!cfg.has("dt") || cfg.dt > 0.0, "--dt must be positive");
    require(!cfg.has("horizon") || cfg.horizon > 0.0, "--horizon must be positive");
    return cfg;
}

class Output {
public:
    explicit Output(std::string dir) : dir_(std::move(dir)) {
        if (!dir_.empty()) fs::create_directories(dir_);
    }
    bool enabled() const { return !dir_.empty(); }

    // Header plus rows; to stdout as well when `echo` is set.
    void csv(const std::string& name, const std::vector<std::string>& header,
             const std::vector<std::vector<std::string>>& rows, bool echo = false) {
        std::ostringstream os;
        for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
        os << '\n';
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_field(r[i]);
            os << '\n';
        }
        if (echo) std::cout << os.str();
        if (enabled()) {
            std::ofstream(fs::path(dir_) / name, std::ios::binary) << os.str();
            files_.push_back(name);
        }
    }

    void manifest(const std::string& command, const std::string& target, const Settings& s, json extra) {
        if (!enabled()) return;
        json m;
        m["version"] = FSTICKY_VERSION;
        m["command"] = command;
        m["target"] = target;
        m["settings"] = s;
        m["resolved_seed"] = std::to_string(to_count(s, "seed", RunConfig{}.seed));
        m["outputs"] = files_;
        for (auto& [k, v] : extra.items()) m[k] = v;
        std::ofstream(fs::path(dir_) / "manifest.json") << m.dump(2) << '\n';
    }

private:
    std::string dir_;
    std::vector<std::string> files_;
};

std::vector<std::string> field_row(double t, double x, double u, const std::vector<double>& se, std::size_t idx) {
    return {g17(t), g17(x), g17(u), se.empty() ? std::string{} : g17(se[idx])};
}

int cmd_ml_eval(const Settings& s, Output& out) {
    const double alpha = to_real(s, "alpha", 1.0);
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("ml-eval: alpha must lie in (0,1]");
    const auto zs = to_list(s, "z", {0.0, -0.5, -1.0, -2.0, -5.0, -10.0});
    std::vector<std::vector<std::string>> rows;
    for (double z : zs) rows.push_back({g17(z), g17(mittag_leffler(alpha, z))});
    out.csv("results.csv", {"z", "E_alpha"}, rows, true);
    out.manifest("ml-eval", "", s, json::object());
    return 0;
}

void dump_path(const RunConfig& cfg, const ModelParams& p, double x0, double T, double dt, Output& out) {
    RngStream pr(cfg.seed, stream_id(900, 0, 0)), hr(cfg.seed, stream_id(900, 0, 1)), kr(cfg.seed, stream_id(900, 0, 2));
    const auto sk = simulate_rbm(x0, T, dt, pr);
    const auto clock = build_frac_sticky_clock(p, sk, hr).first;
    const auto xb = compose_xbar(p, sk, clock, kr);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < xb.size(); ++i) {
        if (xb.killed_at && xb.times[i] > *xb.killed_at) break;
        rows.push_back({g17(xb.times[i]), g17(xb.positions[i]), g17(xb.local_time[i])});
    }
    out.csv("path_dump.csv", {"t", "x", "gamma"}, rows);
}

int cmd_sample(const std::string& kind, const Settings& s, Output& out) {
    const RunConfig cfg = make_run_config(s);
    const ModelParams p = cfg.params;
    const std::uint64_t n = cfg.has("n-paths") ? cfg.n_paths : 10000;
    const double T = cfg.has("horizon") ? cfg.horizon : 1.0;
    const double dt = cfg.has("dt") ? cfg.dt : 1e-3;
    const double x0 = to_real(s, "x0", 0.0);
    require(x0 >= 0.0, "--x0 must be nonnegative");
    std::function<double(std::uint64_t)> draw;
    if (kind == "stable") {
        draw = [&](std::uint64_t i) {
            RngStream r(cfg.seed, stream_id(901, i));
            return detail::stable_draw(p.alpha, T, r);
        };
    } else if (kind == "inverse-stable") {
        if (p.alpha == 1.0) throw DomainError("sample inverse-stable: alpha must lie in (0,1)");
        draw = [&](std::uint64_t i) {
            RngStream r(cfg.seed, stream_id(902, i));
            return sample_inverse_stable_marginal(p.alpha, T, r);
        };
    } else if (kind == "mittag-leffler") {
        draw = [&](std::uint64_t i) {
            RngStream r(cfg.seed, stream_id(903, i));
            return sample_mittag_leffler(p.alpha, p.sigma / p.eta, r);
        };
    } else if (kind == "first-hold") {
        const double eps = to_real(s, "eps-hold", 2.0 * std::sqrt(dt));
        draw = [&](std::uint64_t i) {
            RngStream pr(cfg.seed, stream_id(904, i, 0)), hr(cfg.seed, stream_id(904, i, 1));
            return first_hold_duration(p, dt, eps, pr, hr);
        };
    } else if (kind == "lifetime") {
        LifetimeConfig lc;
        lc.dt = dt;
        lc.max_internal_time = to_real(s, "max-internal-time", 50.0);
        draw = [&, lc](std::uint64_t i) {
            RngStream pr(cfg.seed, stream_id(905, i, 0)), hr(cfg.seed, stream_id(905, i, 1));
            return sample_lifetime(p, x0, pr, hr, lc).value;
        };
    } else if (kind == "xbar") {
        // X-bar at the horizon
        draw = [&](std::uint64_t i) {
            RngStream pr(cfg.seed, stream_id(906, i, 0)), hr(cfg.seed, stream_id(906, i, 1));
            FracStickyWalker<HalfLineRbm> w(p, HalfLineRbm(x0, dt), dt, pr, hr);
            return w.at(T).x;
        };
    } else {
        throw ValidationError("sample: unknown kind '" + kind +
                              "' (stable, inverse-stable, mittag-leffler, first-hold, lifetime, xbar)");
    }
    const auto v = collect_samples(n, cfg.workers, draw);
    std::vector<std::vector<std::string>> rows;
    rows.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) rows.push_back({std::to_string(i), g17(v[i])});
    out.csv("results.csv", {"index", "value"}, rows, !out.enabled());
    if (s.count("path-dump")) dump_path(cfg, p, x0, T, dt, out);
    out.manifest("sample", kind, s, json::object());
    return 0;
}

int cmd_solve_halfline(const Settings& s, Output& out) {
    const RunConfig cfg = make_run_config(s);
    const auto ts = to_list(s, "t-grid", {0.25, 0.5, 1.0, 2.0});
    const auto xs = to_list(s, "x-grid", {0.0, 0.5, 1.0, 2.0});
    const std::string datum = to_str(s, "datum", "exp");
    const double rate = to_real(s, "rate", 1.0);
    InitialDatum f;
    if (datum == "exp")
        f = exponential_datum(rate);
    else if (datum == "const")
        f = constant_datum(rate);
    else
        throw ValidationError("--datum must be exp or const");
    const std::string method = to_str(s, "method", "inversion");
    Field fld;
    if (method == "inversion") {
        fld = solve_laplace_inversion(ts, xs, cfg.params, f);
    } else if (method == "l1") {
        L1SchemeConfig lc;
        if (cfg.has("dt")) lc.dt = cfg.dt;
        lc.dx = to_real(s, "dx", lc.dx);
        fld = solve_l1_caputo(cfg.params, f, lc, *std::max_element(ts.begin(), ts.end()), ts, xs).field;
    } else if (method == "volterra") {
        fld = solve_volterra(ts, xs, cfg.params, f, boundary_trace(cfg.params, f));
    } else if (method == "mc") {
        fld = mc_solution(cfg.params, f, ts, xs, cfg.has("n-paths") ? cfg.n_paths : 100000, cfg.seed,
                          cfg.has("dt") ? cfg.dt : 5e-4, cfg.workers);
    } else {
        throw ValidationError("--method must be inversion, l1, volterra or mc");
    }
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < ts.size(); ++i)
        for (std::size_t j = 0; j < xs.size(); ++j)
            rows.push_back(field_row(ts[i], xs[j], fld.at(i, j), fld.se, i * xs.size() + j));
    out.csv("results.csv", {"t", "x", "u", "se"}, rows, !out.enabled());
    int flagged = 0;
    for (bool b : fld.flagged) flagged += b;
    out.manifest("solve-halfline", method, s, json{{"flagged_points", flagged}});
    if (flagged) std::cerr << "warning: " << flagged << " inversion points disagree with the companion method\n";
    return 0;
}

int cmd_solve_interval(const Settings& s, Output& out) {
    const RunConfig cfg = make_run_config(s);
    const auto ts = to_list(s, "t-grid", {0.1, 0.5, 1.0});
    const auto xs = to_list(s, "x-grid", {0.0, 0.25, 0.5, 0.75, 1.0});
    for (double x : xs) require(x >= 0.0 && x <= 1.0, "--x-grid must lie in [0,1]");
    const auto f = cosine_datum(to_real(s, "freq", std::numbers::pi), to_real(s, "offset", 0.0),
                                to_real(s, "amp", 1.0));
    const std::string method = to_str(s, "method", "series");
    std::vector<std::vector<std::string>> rows;
    if (method == "series") {
        const auto basis = solve_eigen(cfg.params, to_count(s, "modes", 400));
        const auto sol = build_series(basis, f.f, cfg.params.alpha, 1e-6);
        for (double t : ts)
            for (double x : xs) {
                const auto [wi, wb] = evaluate_series(sol, t, x);
                rows.push_back({g17(t), g17(x), g17(wi + wb), ""});
            }
        std::vector<std::vector<std::string>> brows;
        for (std::size_t k = 0; k < basis.count(); ++k)
            brows.push_back({std::to_string(k), g17(basis.eigenvalues[k]), g17(basis.A[k]), g17(basis.B[k])});
        out.csv("basis.csv", {"k", "mu", "A", "B"}, brows);
    } else if (method == "exact") {
        for (double t : ts)
            for (double x : xs) rows.push_back({g17(t), g17(x), g17(interval_exact(cfg.params, f, t, x).value), ""});
    } else if (method == "mc") {
        for (double x : xs) {
            const auto mc = mc_interval(cfg.params, f.f, ts, x, cfg.has("n-paths") ? cfg.n_paths : 50000, cfg.seed,
                                        cfg.has("dt") ? cfg.dt : 2e-4, cfg.workers);
            for (std::size_t k = 0; k < ts.size(); ++k) rows.push_back({g17(ts[k]), g17(x), g17(mc[k].mean), g17(mc[k].se)});
        }
    } else {
        throw ValidationError("--method must be series, exact or mc");
    }
    out.csv("results.csv", {"t", "x", "u", "se"}, rows, !out.enabled());
    out.manifest("solve-interval", method, s, json::object());
    return 0;
}

int cmd_experiment(const std::string& name, const Settings& s, Output& out) {
    const auto& table = experiment_table();
    auto it = table.find(name);
    if (it == table.end()) {
        std::cerr << "error: unknown experiment '" << name << "'\n";
        return 2;
    }
    RunConfig cfg = make_run_config(s);
    cfg.experiment = name;
    const auto t0 = std::chrono::steady_clock::now();
    const Report rep = it->second(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::vector<std::vector<std::string>> rows;
    for (const auto& r : rep.rows)
        rows.push_back({std::to_string(r.criterion), r.check, r.point, g17(r.value), g17(r.reference), g17(r.se),
                        g17(r.tolerance), r.gating ? "check" : "diag", r.pass ? "1" : "0"});
    out.csv("results.csv",
            {"criterion", "check", "point", "value", "reference", "se", "tolerance", "role", "pass"}, rows);
    std::vector<std::vector<std::string>> crows;
    json summary = json::array();
    for (const auto& c : rep.criteria) {
        crows.push_back({std::to_string(c.id), c.name, c.pass ? "PASS" : "FAIL", c.summary});
        summary.push_back({{"criterion", c.id}, {"name", c.name}, {"pass", c.pass}, {"summary", c.summary}});
    }
    out.csv("criteria.csv", {"criterion", "name", "status", "summary"}, crows);
    out.manifest("experiment", name, s, json{{"criteria", summary}, {"wall_seconds", secs}});

    for (const auto& r : rep.rows)
        if (r.gating && !r.pass)
            std::cout << "  fail [" << r.criterion << "] " << r.check << " @ " << r.point << ": value " << g17(r.value)
                      << " reference " << g17(r.reference) << " tolerance " << g17(r.tolerance) << '\n';
    for (const auto& c : rep.criteria)
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.id << " " << c.name << ": " << c.summary << '\n';
    return rep.ok() ? 0 : 1;
}

// Options stored as strings so they can be echoed verbatim into the manifest.
struct OptionSet {
    std::map<std::string, std::string> values;
    std::vector<std::pair<std::string, CLI::Option*>> handles;  // a key may live on several subcommands

    void add(CLI::App& app, const std::string& key, const std::string& help) {
        handles.emplace_back(key, app.add_option("--" + key, values[key], help));
    }
    void flag(CLI::App& app, const std::string& key, const std::string& help) {
        handles.emplace_back(key, app.add_flag("--" + key, help));
    }
    bool known(const std::string& key) const { return values.count(key) > 0 || key == "path-dump"; }
    void collect(Settings& s) const {
        for (const auto& [k, h] : handles)
            if (h->count() > 0) s[k] = h->get_expected_min() == 0 ? std::string("1") : values.at(k);
    }
};

int run(int argc, char** argv) {
    CLI::App app{"Fractional sticky diffusion: experiments, samplers and solvers"};
    app.set_version_flag("--version", std::string(FSTICKY_VERSION));
    app.require_subcommand(0, 1);
    app.fallthrough();
    OptionSet opts;
    std::string config, manifest, out_dir;
    app.add_option("--config", config, "key=value settings file");
    app.add_option("--from-manifest", manifest, "rerun the command recorded in a manifest.json");
    app.add_option("--out", out_dir, "output directory for results.csv and manifest.json");
    opts.add(app, "alpha", "fractional order in (0,1]");
    opts.add(app, "eta", "boundary stickiness coefficient");
    opts.add(app, "sigma", "boundary reflection coefficient");
    opts.add(app, "c", "boundary killing coefficient");
    opts.add(app, "seed", "64-bit master seed");
    opts.add(app, "n-paths", "Monte Carlo sample size");
    opts.add(app, "dt", "time step");
    opts.add(app, "horizon", "time horizon");
    opts.add(app, "workers", "worker threads (results do not depend on it)");
    opts.add(app, "scale", "multiplier on default sample sizes of experiments");

    auto* ml = app.add_subcommand("ml-eval", "tabulate E_alpha(z)");
    opts.add(*ml, "z", "comma-separated nonpositive arguments");

    auto* smp = app.add_subcommand("sample", "draw variates or path functionals");
    std::string kind;
    smp->add_option("kind", kind, "stable | inverse-stable | mittag-leffler | first-hold | lifetime | xbar")->required();
    opts.add(*smp, "x0", "start point");
    opts.add(*smp, "eps-hold", "hold band for first-hold");
    opts.add(*smp, "max-internal-time", "path horizon for lifetime");
    opts.flag(*smp, "path-dump", "also write path_dump.csv for one X-bar path");

    auto* exp = app.add_subcommand("experiment", "run a validation experiment");
    std::string exp_name;
    exp->add_option("name", exp_name, "experiment name")->required();

    auto* shl = app.add_subcommand("solve-halfline", "solve the half-line problem");
    opts.add(*shl, "method", "inversion | l1 | volterra | mc");
    opts.add(*shl, "datum", "exp | const");
    opts.add(*shl, "rate", "decay rate of exp datum, or value of const datum");
    opts.add(*shl, "dx", "L1 space step");

    auto* itv = app.add_subcommand("solve-interval", "solve the problem on [0,1]");
    opts.add(*itv, "method", "series | exact | mc");
    opts.add(*itv, "freq", "datum offset + amp cos(freq x)");
    opts.add(*itv, "offset", "datum offset");
    opts.add(*itv, "amp", "datum amplitude");
    opts.add(*itv, "modes", "number of eigenmodes");
    for (auto* sc : {shl, itv}) {
        opts.add(*sc, "t-grid", "comma-separated times");
        opts.add(*sc, "x-grid", "comma-separated positions");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        Settings s;
        if (const char* env = std::getenv("FRAC_STICKY_SEED")) s["seed"] = env;
        std::string command, target;
        if (!manifest.empty()) {
            std::ifstream in(manifest);
            if (!in) throw ValidationError("cannot read manifest " + manifest);
            json m;
            try {
                m = json::parse(in);
                command = m.at("command").get<std::string>();
                target = m.at("target").get<std::string>();
                for (auto& [k, v] : m.at("settings").items()) s[k] = v.get<std::string>();
            } catch (const json::exception& e) {
                throw ValidationError(std::string("malformed manifest: ") + e.what());
            }
        }
        if (!config.empty())
            for (const auto& [k, v] : read_config(config)) {
                if (!opts.known(k)) throw ValidationError("config: unknown key '" + k + "'");
                s[k] = v;
            }
        opts.collect(s);
        if (ml->parsed()) command = "ml-eval";
        if (smp->parsed()) command = "sample", target = kind;
        if (exp->parsed()) command = "experiment", target = exp_name;
        if (shl->parsed()) command = "solve-halfline";
        if (itv->parsed()) command = "solve-interval";
        if (command.empty()) {
            std::cerr << app.help();
            return 2;
        }
        Output out(out_dir);
        if (command == "ml-eval") return cmd_ml_eval(s, out);
        if (command == "sample") return cmd_sample(target, s, out);
        if (command == "experiment") return cmd_experiment(target, s, out);
        if (command == "solve-halfline") return cmd_solve_halfline(s, out);
        if (command == "solve-interval") return cmd_solve_interval(s, out);
        throw ValidationError("unknown command '" + command + "'");
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
